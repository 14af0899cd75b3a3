use serde::Serialize;
use serde_json::Value;

/// One JSON document per invocation.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: &'static str,
    pub inputs: Value,
    pub outputs: Value,
    pub errata_applied: Vec<String>,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunRecord {
    pub fn new(command: &'static str, inputs: Value, outputs: Value) -> Self {
        Self {
            command,
            inputs,
            outputs,
            errata_applied: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: None,
        }
    }

    pub fn with_errata<S: Into<String>>(mut self, ids: impl IntoIterator<Item = S>) -> Self {
        self.errata_applied.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}
