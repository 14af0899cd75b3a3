use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ewcones_core::appendix;
use ewcones_core::certify::{self, block_positivity_search, DEFAULT_SEED};
use ewcones_core::cones::{
    boundary_ellipse, decomposable_curves, intersection_ellipse, product_relations, sample_cloud,
    special_points, ConeSelection,
};
use ewcones_core::errata;
use ewcones_core::spa::{self, spa_decompose};
use ewcones_core::{
    certify_decomposability, cone_residuals, detect, witness_from_params, BipartiteShape, ConeId,
    Certificate, Evidence, WitnessParams,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{read_state, CliError, PointOptions};
use crate::record::RunRecord;

#[derive(Parser, Debug)]
#[command(name = "ewcones", version, about = "Circulant entanglement witnesses from rotations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cone membership, decomposability certificate and block-positivity estimate
    Classify {
        #[command(flatten)]
        opts: PointOptions,
        /// See-saw restarts
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// See-saw seed
        #[arg(long, env = "EWCONES_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Point clouds of the two cones
    Geometry {
        #[arg(long, default_value = "both")]
        cone: ConeSelection,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(2..))]
        resolution: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; CSV goes to stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical mixture and its separable decomposition
    Spa {
        #[command(flatten)]
        opts: PointOptions,
    },
    /// Expectation of a witness on a 16x16 state
    Detect {
        #[command(flatten)]
        opts: PointOptions,
        /// JSON file with [re, im] pairs, row-major
        #[arg(long)]
        state: PathBuf,
    },
    /// Corrections applied to published formulas
    Errata,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let record = match cli.command {
        Command::Classify {
            opts,
            restarts,
            seed,
        } => Some(classify(&opts, restarts, seed)?),
        Command::Geometry {
            cone,
            resolution,
            format,
            out,
        } => geometry(cone, resolution as usize, format, out)?,
        Command::Spa { opts } => Some(spa_report(&opts)?),
        Command::Detect { opts, state } => Some(detect_state(&opts, state)?),
        Command::Errata => Some(errata_report()),
    };
    match record {
        Some(record) => emit(&(record.to_json() + "\n")),
        None => Ok(()),
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
}

#[derive(Serialize)]
struct Abcd {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl From<&WitnessParams> for Abcd {
    fn from(p: &WitnessParams) -> Self {
        Self {
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
        }
    }
}

fn point_outputs(p: &WitnessParams) -> Value {
    json!({
        "params": Abcd::from(p),
        "provenance": p.provenance,
    })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CertificateSummary {
    ProbeState {
        epsilon: f64,
        pairing_value: f64,
        epsilon_interval: Option<(f64, f64)>,
        probe_min_eigenvalue: f64,
        probe_min_pt_eigenvalue: f64,
    },
    Split {
        a_eigenvalues: Vec<f64>,
        a_eigenvalues_closed_form: Vec<f64>,
        p_min_eigenvalue: f64,
        q_min_eigenvalue: f64,
        reconstruction_residual: f64,
    },
}

fn summarize(cert: &Certificate) -> Value {
    let evidence = match &cert.evidence {
        Evidence::ProbeState {
            epsilon,
            pairing_value,
            epsilon_interval,
            probe_min_eigenvalue,
            probe_min_pt_eigenvalue,
        } => CertificateSummary::ProbeState {
            epsilon: *epsilon,
            pairing_value: *pairing_value,
            epsilon_interval: *epsilon_interval,
            probe_min_eigenvalue: *probe_min_eigenvalue,
            probe_min_pt_eigenvalue: *probe_min_pt_eigenvalue,
        },
        Evidence::Split {
            a_eigenvalues,
            a_eigenvalues_closed_form,
            p_min_eigenvalue,
            q_min_eigenvalue,
            reconstruction_residual,
            ..
        } => CertificateSummary::Split {
            a_eigenvalues: a_eigenvalues.clone(),
            a_eigenvalues_closed_form: a_eigenvalues_closed_form.clone(),
            p_min_eigenvalue: *p_min_eigenvalue,
            q_min_eigenvalue: *q_min_eigenvalue,
            reconstruction_residual: *reconstruction_residual,
        },
    };
    let verification = cert.verify();
    json!({
        "verdict": cert.verdict,
        "verified": verification.is_ok(),
        "verification_error": verification.err().map(|e| e.to_string()),
        "evidence": evidence,
    })
}

fn classify(opts: &PointOptions, restarts: usize, seed: u64) -> Result<RunRecord, CliError> {
    let params = opts.resolve()?;
    let manual = params.as_manual();
    let report = cone_residuals(&manual, opts.tol);
    let mut warnings = Vec::new();
    if !report.on_either() {
        warnings.push(format!(
            "point lies on neither cone (residuals {:e}, {:e}); not a member of the family",
            report.residual_i, report.residual_ii
        ));
    }
    let cert = certify_decomposability(&manual, opts.tol)?;
    let bp = block_positivity_search(&witness_from_params(&manual)?, restarts, seed)?;

    let mut outputs = point_outputs(&params);
    let map = outputs.as_object_mut().expect("object");
    map.insert("in_family".into(), json!(report.on_either()));
    map.insert("warnings".into(), json!(warnings));
    map.insert("cones".into(), json!(report));
    map.insert(
        "boundary_ellipse".into(),
        json!(boundary_ellipse(&manual, opts.tol).map(ConeId::tag)),
    );
    map.insert("product_relations".into(), json!(product_relations(&manual)));
    map.insert("certificate".into(), summarize(&cert));
    map.insert(
        "block_positivity".into(),
        json!({
            "minimum": bp.minimum,
            "restarts": bp.restarts,
            "label": bp.label,
        }),
    );

    let mut inputs = opts.echo();
    inputs["restarts"] = json!(restarts);
    Ok(RunRecord::new("classify", inputs, outputs).with_seed(seed))
}

#[derive(Serialize)]
struct Row {
    b: f64,
    c: f64,
    d: f64,
    tag: String,
}

fn geometry_rows(selection: ConeSelection, resolution: usize) -> Result<Vec<Row>, CliError> {
    let mut rows: Vec<Row> = sample_cloud(selection, resolution)?
        .into_iter()
        .map(|p| Row {
            b: p.b,
            c: p.c,
            d: p.d,
            tag: p.cone.tag().to_string(),
        })
        .collect();
    rows.extend(special_points().into_iter().map(|s| Row {
        b: s.params.b,
        c: s.params.c,
        d: s.params.d,
        tag: format!("special_{}", s.label),
    }));
    rows.extend(decomposable_curves(selection, resolution)?.into_iter().map(|p| Row {
        b: p.b,
        c: p.c,
        d: p.d,
        tag: format!("bd_{}", p.cone.tag()),
    }));
    if selection == ConeSelection::Both {
        rows.extend(intersection_ellipse(resolution).into_iter().map(|[b, c, d]| Row {
            b,
            c,
            d,
            tag: "intersection".into(),
        }));
    }
    Ok(rows)
}

fn max_row_residual(rows: &[Row]) -> f64 {
    rows.iter()
        .map(|r| {
            ConeId::I
                .residual(r.b, r.c, r.d)
                .abs()
                .min(ConeId::II.residual(r.b, r.c, r.d).abs())
        })
        .fold(0.0, f64::max)
}

fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from("b,c,d,tag\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.b, r.c, r.d, r.tag).expect("string write");
    }
    out
}

fn geometry(
    selection: ConeSelection,
    resolution: usize,
    format: Format,
    out: Option<PathBuf>,
) -> Result<Option<RunRecord>, CliError> {
    let rows = geometry_rows(selection, resolution)?;
    let selection_tag = match selection {
        ConeSelection::One(c) => c.tag(),
        ConeSelection::Both => "both",
    };
    let inputs = json!({
        "cone": selection_tag,
        "resolution": resolution,
        "format": format,
        "out": out,
    });
    let max_residual = max_row_residual(&rows);
    let Some(path) = out else {
        return Ok(match format {
            Format::Csv => {
                emit(&to_csv(&rows))?;
                None
            }
            Format::Json => Some(RunRecord::new(
                "geometry",
                inputs,
                json!({ "rows": rows.len(), "max_residual": max_residual, "points": rows }),
            )),
        });
    };
    let body = match format {
        Format::Csv => to_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    };
    std::fs::write(&path, body)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(Some(RunRecord::new(
        "geometry",
        inputs,
        json!({ "path": path, "rows": rows.len(), "max_residual": max_residual }),
    )))
}

fn spa_report(opts: &PointOptions) -> Result<RunRecord, CliError> {
    let params = opts.resolve()?;
    let manual = params.as_manual();
    let result = spa_decompose(&manual)?;
    let bisection = spa::critical_p_bisection(&witness_from_params(&manual)?, 1e-13)?;
    let mut outputs = point_outputs(&params);
    let map = outputs.as_object_mut().expect("object");
    map.insert("p_star".into(), json!(result.p_star));
    map.insert("p_star_closed_form".into(), json!(result.p_star_closed_form));
    map.insert("p_star_bisection".into(), json!(bisection));
    map.insert("p_star_as_printed".into(), json!(result.p_star_as_printed));
    map.insert("mixed_min_eigenvalue".into(), json!(result.mixed_min_eigenvalue));
    map.insert("normalization".into(), json!(result.decomposition.normalization));
    map.insert("spa3_slacks".into(), json!(result.spa3_slacks));
    map.insert("spa3_satisfied".into(), json!(result.spa3_satisfied));
    map.insert("reconstruction_residual".into(), json!(result.reconstruction_residual));
    map.insert("separable".into(), json!(result.certifies_separability()));
    Ok(RunRecord::new("spa", opts.echo(), outputs).with_errata(result.errata_applied.iter().copied()))
}

fn detect_state(opts: &PointOptions, state: PathBuf) -> Result<RunRecord, CliError> {
    let params = opts.resolve()?;
    let w = witness_from_params(&params.as_manual())?;
    let rho = read_state(&state, 16)?;
    let value = detect(&w, &rho)?;
    let min_pt = certify::min_partial_transpose_eigenvalue(&rho, BipartiteShape::square(4))?;
    let mut outputs = point_outputs(&params);
    let map = outputs.as_object_mut().expect("object");
    map.insert("expectation".into(), json!(value));
    map.insert("detected".into(), json!(value < -opts.tol));
    map.insert("state_trace".into(), json!(rho.trace().re));
    map.insert("state_min_pt_eigenvalue".into(), json!(min_pt));
    map.insert("state_ppt".into(), json!(min_pt >= -opts.tol));
    let mut inputs = opts.echo();
    inputs["state"] = json!(state);
    Ok(RunRecord::new("detect", inputs, outputs))
}

fn errata_report() -> RunRecord {
    let mut all = vec![errata::orientation_erratum()];
    all.extend(appendix::audit().errata.iter().cloned());
    all.extend(errata::spa_errata());
    let ids: Vec<String> = all.iter().map(|e| e.id.clone()).collect();
    RunRecord::new("errata", json!({}), json!({ "errata": all })).with_errata(ids)
}
