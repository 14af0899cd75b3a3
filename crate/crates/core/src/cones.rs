//! Two coaxial quadric cones in `(b, c, d)` space.
//!
//! Cone I has its vertex at `(1/2, 1, 1/2)` on the plane `b + d = 1` and its
//! base ellipse on `b + d = 2`; cone II has its vertex at `(1, 1/2, 1)` on
//! `b + d = 2` and its base ellipse on `b + d = 1`. Both share the axis
//! `(1/2, 1, 1/2) + t(1, −1, 1)` and meet along an ellipse in `b + d = 3/2`.
//! Ellipses are named by their plane: ellipse I lies in `b + d = 2`,
//! ellipse II in `b + d = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::WitnessParams;

/// Default membership slack.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConeId {
    I,
    II,
}

impl ConeId {
    pub fn tag(self) -> &'static str {
        match self {
            ConeId::I => "I",
            ConeId::II => "II",
        }
    }

    pub fn vertex(self) -> [f64; 3] {
        match self {
            ConeId::I => [0.5, 1.0, 0.5],
            ConeId::II => [1.0, 0.5, 1.0],
        }
    }

    /// `b + d` on the base ellipse.
    pub fn base_plane(self) -> f64 {
        match self {
            ConeId::I => 2.0,
            ConeId::II => 1.0,
        }
    }

    /// Left-hand side of the quadric minus its right-hand side.
    pub fn residual(self, b: f64, c: f64, d: f64) -> f64 {
        let shared = (2.0 * c - 3.0).powi(2) + 4.0 * b * c + 4.0 * c * d - 2.0 * b * d;
        match self {
            ConeId::I => (b - 2.0).powi(2) + (d - 2.0).powi(2) + shared - 9.0,
            ConeId::II => (b - 1.0).powi(2) + (d - 1.0).powi(2) + shared - 6.0,
        }
    }
}

/// Which cones a sample should come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeSelection {
    One(ConeId),
    Both,
}

impl ConeSelection {
    pub fn cones(self) -> Vec<ConeId> {
        match self {
            ConeSelection::One(c) => vec![c],
            ConeSelection::Both => vec![ConeId::I, ConeId::II],
        }
    }
}

impl std::str::FromStr for ConeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(ConeSelection::One(ConeId::I)),
            "II" | "ii" | "2" => Ok(ConeSelection::One(ConeId::II)),
            "both" => Ok(ConeSelection::Both),
            other => Err(Error::Validation(format!("unknown cone `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub residual_i: f64,
    pub residual_ii: f64,
    /// `b + d`
    pub plane_coordinate: f64,
    pub on_cone_i: bool,
    pub on_cone_ii: bool,
    pub on_intersection: bool,
    pub tolerance: f64,
}

impl ConeReport {
    pub fn on_either(&self) -> bool {
        self.on_cone_i || self.on_cone_ii
    }

    pub fn min_abs_residual(&self) -> f64 {
        self.residual_i.abs().min(self.residual_ii.abs())
    }
}

pub fn cone_residuals(p: &WitnessParams, tol: f64) -> ConeReport {
    let (b, c, d) = (p.b, p.c, p.d);
    let residual_i = ConeId::I.residual(b, c, d);
    let residual_ii = ConeId::II.residual(b, c, d);
    let plane = b + d;
    let in_slab = (1.0 - tol..=2.0 + tol).contains(&plane);
    let on_cone_i = in_slab && residual_i.abs() <= tol;
    let on_cone_ii = in_slab && residual_ii.abs() <= tol;
    ConeReport {
        residual_i,
        residual_ii,
        plane_coordinate: plane,
        on_cone_i,
        on_cone_ii,
        on_intersection: on_cone_i && on_cone_ii && (plane - 1.5).abs() <= tol,
        tolerance: tol,
    }
}

/// Sign choice in the ellipse parameterizations; `Plus` is the upper sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Point on a boundary ellipse.
///
/// Ellipse I (`b + d = 2`), `t = c`: `a = 1 − t`, `b = 1 ± √(t(1−t))`,
/// `d = 1 ∓ √(t(1−t))`. Ellipse II (`b + d = 1`), `t = d`:
/// `a = 1 ± √(t(1−t))`, `b = 1 − t`, `c = 1 ∓ √(t(1−t))`.
pub fn ellipse_point(cone: ConeId, t: f64, branch: Branch) -> Result<WitnessParams> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("ellipse parameter {t} outside [0, 1]")));
    }
    let s = branch.sign() * (t * (1.0 - t)).sqrt();
    let (a, b, c, d) = match cone {
        ConeId::I => (1.0 - t, 1.0 + s, t, 1.0 - s),
        ConeId::II => (1.0 + s, 1.0 - t, 1.0 - s, t),
    };
    WitnessParams::new(a, b, c, d)
}

/// Point a fraction `s` of the way from the cone's vertex to the base point
/// `ellipse_point(cone, t, branch)`.
pub fn generator_point(cone: ConeId, t: f64, branch: Branch, s: f64) -> Result<WitnessParams> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("generator fraction {s} outside [0, 1]")));
    }
    let base = ellipse_point(cone, t, branch)?;
    let [vb, vc, vd] = cone.vertex();
    let b = vb + s * (base.b - vb);
    let c = vc + s * (base.c - vc);
    let d = vd + s * (base.d - vd);
    WitnessParams::new(3.0 - b - c - d, b, c, d)
}

/// `(bd − (1−a)², ac − (1−b)²)`.
pub fn product_relations(p: &WitnessParams) -> (f64, f64) {
    (
        p.b * p.d - (1.0 - p.a).powi(2),
        p.a * p.c - (1.0 - p.b).powi(2),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialPoint {
    pub label: &'static str,
    pub description: &'static str,
    pub params: WitnessParams,
    pub ellipse: ConeId,
    pub report: ConeReport,
}

/// The four labelled points `Φ[0,1,1,1]` (iii), `Φ[1,1,1,0]` (i),
/// `Φ[1,0,1,1]` (ii) and `Φ[1,1,0,1]` (iv).
pub fn special_points() -> Vec<SpecialPoint> {
    let raw = [
        ("iii", "reduction map", [0.0, 1.0, 1.0, 1.0], ConeId::I),
        ("i", "generalized Choi map", [1.0, 1.0, 1.0, 0.0], ConeId::II),
        ("ii", "generalized Choi map", [1.0, 0.0, 1.0, 1.0], ConeId::II),
        ("iv", "boundary point", [1.0, 1.0, 0.0, 1.0], ConeId::I),
    ];
    raw.into_iter()
        .map(|(label, description, [a, b, c, d], ellipse)| {
            let params = WitnessParams::new(a, b, c, d).expect("special points sum to 3");
            SpecialPoint {
                label,
                description,
                params,
                ellipse,
                report: cone_residuals(&params, MEMBERSHIP_TOL),
            }
        })
        .collect()
}

/// Ellipse on which a point lies, if any: the cone residual must vanish and
/// `b + d` must equal the ellipse's plane.
pub fn boundary_ellipse(p: &WitnessParams, tol: f64) -> Option<ConeId> {
    let report = cone_residuals(p, tol);
    let plane = report.plane_coordinate;
    if report.on_cone_i && (plane - 2.0).abs() <= tol {
        Some(ConeId::I)
    } else if report.on_cone_ii && (plane - 1.0).abs() <= tol {
        Some(ConeId::II)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CloudPoint {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub cone: ConeId,
}

/// Ruled-surface samples: `resolution` base points per branch, each joined to
/// the vertex by a generator sampled at `resolution` evenly spaced points.
/// The vertex appears once per cone; base points where both branches coincide
/// are emitted once.
pub fn sample_cloud(selection: ConeSelection, resolution: usize) -> Result<Vec<CloudPoint>> {
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be at least 2, got {resolution}")));
    }
    let mut out = Vec::new();
    for cone in selection.cones() {
        let [vb, vc, vd] = cone.vertex();
        out.push(CloudPoint {
            b: vb,
            c: vc,
            d: vd,
            cone,
        });
        for base in base_ellipse(cone, resolution) {
            for step in 1..resolution {
                let s = step as f64 / (resolution - 1) as f64;
                out.push(CloudPoint {
                    b: vb + s * (base[0] - vb),
                    c: vc + s * (base[1] - vc),
                    d: vd + s * (base[2] - vd),
                    cone,
                });
            }
        }
    }
    Ok(out)
}

/// `(b, c, d)` samples of the base ellipse, both branches, duplicates at the
/// branch points dropped.
pub fn base_ellipse(cone: ConeId, resolution: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        for k in 0..resolution {
            let t = k as f64 / (resolution - 1) as f64;
            if branch == Branch::Minus && (t == 0.0 || t == 1.0) {
                continue;
            }
            let p = ellipse_point(cone, t, branch).expect("t in [0, 1]");
            out.push([p.b, p.c, p.d]);
        }
    }
    out
}

/// Samples of the ellipse `b + d = 3/2` shared by both cones, taken halfway
/// along the generators of cone I.
pub fn intersection_ellipse(resolution: usize) -> Vec<[f64; 3]> {
    let v = ConeId::I.vertex();
    base_ellipse(ConeId::I, resolution)
        .into_iter()
        .map(|p| [0.5 * (v[0] + p[0]), 0.5 * (v[1] + p[1]), 0.5 * (v[2] + p[2])])
        .collect()
}

/// Antipode of a base-ellipse point through the ellipse centre.
pub fn antipode(cone: ConeId, t: f64, branch: Branch) -> Result<WitnessParams> {
    let flipped = match branch {
        Branch::Plus => Branch::Minus,
        Branch::Minus => Branch::Plus,
    };
    ellipse_point(cone, 1.0 - t, flipped)
}

/// Distance from `(b, c, d)` to the common axis `(1/2, 1, 1/2) + t(1, −1, 1)`.
pub fn distance_to_axis(point: [f64; 3]) -> f64 {
    let origin = [0.5, 1.0, 0.5];
    let dir = [1.0, -1.0, 1.0];
    let diff = [point[0] - origin[0], point[1] - origin[1], point[2] - origin[2]];
    let t = (diff[0] * dir[0] + diff[1] * dir[1] + diff[2] * dir[2]) / 3.0;
    diff.iter()
        .zip(dir)
        .map(|(x, u)| (x - t * u).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Samples of the curves where the plane `b = d` meets each cone.
///
/// On cone I these are the generators `c = 1` and `c = 2 − 2b`; on cone II
/// `c = 1/2` and `c = 5/2 − 2b`, all for `b ∈ [1/2, 1]`.
pub fn decomposable_curves(selection: ConeSelection, resolution: usize) -> Result<Vec<CloudPoint>> {
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be at least 2, got {resolution}")));
    }
    let mut out = Vec::new();
    for cone in selection.cones() {
        let lines: [fn(f64) -> f64; 2] = match cone {
            ConeId::I => [|_| 1.0, |b| 2.0 - 2.0 * b],
            ConeId::II => [|_| 0.5, |b| 2.5 - 2.0 * b],
        };
        for line in lines {
            for k in 0..resolution {
                let b = 0.5 + 0.5 * k as f64 / (resolution - 1) as f64;
                out.push(CloudPoint {
                    b,
                    c: line(b),
                    d: b,
                    cone,
                });
            }
        }
    }
    Ok(out)
}
