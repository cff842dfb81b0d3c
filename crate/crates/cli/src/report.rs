use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use lietor::report::AxiomReport;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Output of one subcommand: summary lines for the terminal, structured
/// data for JSON, and the checks that decide the exit code.
pub struct Report {
    pub module: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub summary: Vec<(String, String)>,
    pub data: Map<String, Value>,
    pub checks: AxiomReport,
    pub timing: Option<Duration>,
    /// Printed verbatim instead of the usual rendering.
    pub raw: Option<String>,
}

impl Report {
    pub fn new(module: &'static str, subject: &str) -> Report {
        Report {
            module,
            command: Vec::new(),
            inputs: Vec::new(),
            seed: None,
            summary: Vec::new(),
            data: Map::new(),
            checks: AxiomReport::new(subject),
            timing: None,
            raw: None,
        }
    }

    pub fn line(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn put(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }

    pub fn ok(&self) -> bool {
        self.checks.all_pass()
    }

    pub fn to_json(&self) -> Value {
        let inputs: Vec<Value> = self.inputs.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect();
        let mut out = json!({
            "command": self.command,
            "module": self.module,
            "inputs": inputs,
            "ok": self.ok(),
            "data": Value::Object(self.data.clone()),
            "checks": self.checks.to_json(),
        });
        if let Some(s) = self.seed {
            out["seed"] = json!(s.to_string());
        }
        if let Some(t) = self.timing {
            out["timing_ms"] = json!(t.as_millis().to_string());
        }
        out
    }

    pub fn render(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut s = String::new();
        let _ = writeln!(s, "$ {}", self.command.join(" "));
        for (p, d) in &self.inputs {
            let _ = writeln!(s, "input {p}  sha256 {d}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed {seed}");
        }
        let width = self.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            let pad = width - k.chars().count();
            let _ = writeln!(s, "{k}{}  {v}", " ".repeat(pad));
        }
        if !self.checks.entries.is_empty() {
            let _ = write!(s, "{}", self.checks);
        }
        let _ = writeln!(s, "{}", if self.ok() { "ok" } else { "FAILED" });
        if let Some(t) = self.timing {
            let _ = writeln!(s, "elapsed {:.3} s", t.as_secs_f64());
        }
        s
    }
}

/// Reads a JSON input file and records its digest.
pub fn read_json(path: &Path, report: &mut Report) -> Result<Value, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    report.inputs.push((path.display().to_string(), hex(&Sha256::digest(&bytes))));
    serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: malformed JSON: {e}", path.display())))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
