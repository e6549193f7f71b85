use serde::Serialize;
use serde_json::Value;

use infgroups::Certificate;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// One report per run. Field order is fixed, and floats are printed by
/// `serde_json`'s shortest round-trip formatter, so equal runs give equal bytes.
#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub config: &'a RunConfig,
    pub passed: bool,
    pub certificates: &'a [Certificate],
    #[serde(skip_serializing_if = "Value::is_null")]
    pub artifacts: &'a Value,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a RunConfig, certificates: &'a [Certificate], artifacts: &'a Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "infgroups",
            config,
            passed: certificates.iter().all(Certificate::passed),
            certificates,
            artifacts,
        }
    }

    pub fn render(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
