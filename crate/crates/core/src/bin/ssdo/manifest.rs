use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::{CliError, CliResult};

/// What a run read and wrote, echoed into its report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, String>,
    pub outputs: BTreeMap<&'static str, String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub form: Option<String>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            seed: None,
            config: serde_json::Value::Null,
            form: None,
        }
    }

    /// Records an input, which must exist.
    pub fn input(&mut self, role: &'static str, path: &Path) -> CliResult<()> {
        if !path.is_file() {
            return Err(CliError::Usage(format!(
                "{role} file {} does not exist",
                path.display()
            )));
        }
        self.inputs.insert(role, path.display().to_string());
        Ok(())
    }

    pub fn output(&mut self, role: &'static str, path: &Path) {
        self.outputs.insert(role, path.display().to_string());
    }
}
