use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// Passed on every instance inside the recorded window.
    WindowedPass,
    Fail,
    /// Informational entry; never affects the overall verdict.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ordered list of named checks. Failures always carry a witness and
/// windowed results always carry their window.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub entries: Vec<CheckEntry>,
}

impl AxiomReport {
    pub fn new(subject: impl Into<String>) -> AxiomReport {
        AxiomReport { subject: subject.into(), entries: Vec::new() }
    }

    fn push(&mut self, name: &str, status: Status, window: Option<i64>, witness: Option<String>) -> &mut CheckEntry {
        self.entries.push(CheckEntry { name: name.to_string(), status, window, witness, note: None });
        self.entries.last_mut().expect("just pushed")
    }

    pub fn pass(&mut self, name: &str) -> &mut CheckEntry {
        self.push(name, Status::Pass, None, None)
    }

    pub fn fail(&mut self, name: &str, witness: impl Into<String>) -> &mut CheckEntry {
        self.push(name, Status::Fail, None, Some(witness.into()))
    }

    pub fn info(&mut self, name: &str, note: impl Into<String>) -> &mut CheckEntry {
        let e = self.push(name, Status::Info, None, None);
        e.note = Some(note.into());
        e
    }

    /// Records `Ok` as a pass (windowed if `window` is set) and `Err` as a failure.
    pub fn record(&mut self, name: &str, window: Option<i64>, outcome: Result<(), String>) -> &mut CheckEntry {
        match outcome {
            Ok(()) => {
                let status = if window.is_some() { Status::WindowedPass } else { Status::Pass };
                self.push(name, status, window, None)
            }
            Err(w) => self.push(name, Status::Fail, window, Some(w)),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// True iff an entry with this name exists and did not fail.
    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|e| matches!(e.status, Status::Pass | Status::WindowedPass))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.entries.extend(other.entries);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "subject": self.subject,
            "ok": self.all_pass(),
            "checks": serde_json::to_value(&self.entries).expect("entries serialize"),
        })
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "pass".to_string(),
                Status::WindowedPass => format!("pass (window {})", e.window.unwrap_or_default()),
                Status::Fail => "FAIL".to_string(),
                Status::Info => "info".to_string(),
            };
            write!(f, "  {:<28} {}", e.name, tag)?;
            if let Some(w) = &e.witness {
                write!(f, "  witness: {w}")?;
            }
            if let Some(n) = &e.note {
                write!(f, "  {n}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = AxiomReport::new("demo");
        r.pass("A");
        r.record("B", Some(3), Ok(()));
        r.info("C", "context");
        assert!(r.all_pass());
        assert!(r.passed("B") && !r.passed("C"));
        r.record("D", None, Err("x = 1".into()));
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 1);
        let j = r.to_json();
        assert_eq!(j["checks"][1]["status"], "windowed-pass");
        assert_eq!(j["checks"][3]["witness"], "x = 1");
    }
}
