//! Report emission: every artifact is written atomically, and each command
//! leaves a JSON sidecar next to its primary output recording the tool
//! version and the exact configuration that produced it.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use logdiff::report::write_atomic;

pub fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// `<output>.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".json");
    output.with_file_name(name)
}

/// SHA-256 of the configuration's JSON form. `serde_json` maps are ordered
/// by key, so equal configurations hash equally.
pub fn config_hash(config: &Value) -> String {
    let bytes = serde_json::to_vec(config).expect("JSON values serialise");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Provenance {
    command: &'static str,
    config: Value,
    outputs: Vec<PathBuf>,
    summary: Value,
}

impl Provenance {
    pub fn new(command: &'static str, config: &impl Serialize) -> anyhow::Result<Self> {
        Ok(Self {
            command,
            config: serde_json::to_value(config)?,
            outputs: Vec::new(),
            summary: Value::Null,
        })
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn summary(&mut self, summary: Value) {
        self.summary = summary;
    }

    /// Writes the sidecar next to the first recorded output.
    pub fn finish(self) -> anyhow::Result<()> {
        let Some(primary) = self.outputs.first() else {
            return Ok(());
        };
        let doc = json!({
            "tool": "logdiff",
            "version": env!("CARGO_PKG_VERSION"),
            "library_version": logdiff::VERSION,
            "command": self.command,
            "config_sha256": config_hash(&self.config),
            "config": self.config,
            "outputs": self.outputs,
            "summary": self.summary,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        write(&sidecar_path(primary), text.as_bytes())
    }
}
