use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce a report, plus the timing that the report
/// itself leaves out.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub tool_version: &'static str,
    pub start: String,
    pub end: String,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(
        subcommand: String,
        argv: &[String],
        config: Value,
        seed: u64,
        start: chrono::DateTime<chrono::Utc>,
        wall_time_s: f64,
        outputs: &[PathBuf],
    ) -> Self {
        Self {
            subcommand,
            argv: argv.to_vec(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            start: start.to_rfc3339(),
            end: chrono::Utc::now().to_rfc3339(),
            wall_time_s,
            outputs: outputs.to_vec(),
        }
    }
}
