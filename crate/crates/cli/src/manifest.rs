use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance embedded in every report. Only `wall_clock` varies between
/// identical runs.
#[derive(Debug)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    started: SystemTime,
    clock: Instant,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, seed: u64) -> Self {
        RunManifest { command_line, inputs: Vec::new(), seed, started: SystemTime::now(), clock: Instant::now() }
    }

    pub fn record_input(&mut self, path: &str, bytes: &[u8]) {
        let sha256 = hex::encode(Sha256::digest(bytes));
        self.inputs.push(InputDigest { path: path.to_string(), sha256 });
    }

    pub fn to_json_value(&self) -> Value {
        let started_ms = self.started.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        json!({
            "command_line": self.command_line,
            "inputs": self.inputs,
            "seed": self.seed,
            "tool": env!("CARGO_PKG_NAME"),
            "tool_version": env!("CARGO_PKG_VERSION"),
            "wall_clock": {
                "started_unix_ms": started_ms as u64,
                "elapsed_ms": self.clock.elapsed().as_millis() as u64,
            },
        })
    }
}
