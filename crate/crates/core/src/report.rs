//! Run reports shared by the verification suites and the CLI.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            expected: expected.into(),
            actual: actual.into(),
            ok,
        }
    }

    /// A check whose expected and actual renderings must coincide.
    pub fn equal(name: impl Into<String>, expected: impl fmt::Display, actual: impl fmt::Display) -> Self {
        let (e, a) = (expected.to_string(), actual.to_string());
        let ok = e == a;
        Check::new(name, e, a, ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub status: Status,
    /// Elementary instances examined across all checks.
    pub instances: usize,
    pub checks: Vec<Check>,
    /// Computed values, for commands that produce more than a verdict.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, serde_json::Value>,
    /// Wall-clock seconds. Left out of serialized output so reports are
    /// byte-identical across runs; the CLI prints it on stderr.
    #[serde(skip)]
    pub elapsed: f64,
    #[serde(skip)]
    result_text: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            parameters: BTreeMap::new(),
            status: Status::Fail,
            instances: 0,
            checks: Vec::new(),
            results: BTreeMap::new(),
            elapsed: 0.0,
            result_text: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Records a computed value; `text` is its plain-text rendering.
    pub fn result(&mut self, key: &str, value: serde_json::Value, text: impl fmt::Display) {
        self.results.insert(key.to_string(), value);
        self.result_text.push((key.to_string(), text.to_string()));
    }

    pub fn push(&mut self, check: Check, instances: usize) {
        self.checks.push(check);
        self.instances += instances;
    }

    /// Sets the status: pass iff there is at least one instance and every
    /// check is ok.
    pub fn finish(mut self, elapsed: f64) -> Self {
        if self.instances == 0 {
            self.checks.push(Check::new("instances checked", "at least 1", "0", false));
        }
        self.status = if self.checks.iter().all(|c| c.ok) {
            Status::Pass
        } else {
            Status::Fail
        };
        self.elapsed = elapsed;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering: one line per check, then a summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, text) in &self.result_text {
            out.push_str(&format!("{key} = {text}\n"));
        }
        for c in &self.checks {
            let mark = if c.ok { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {}: {}\n", c.name, c.actual));
            if !c.ok {
                out.push_str(&format!("     expected: {}\n", c.expected));
            }
        }
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{} [{}]: {} ({} checks, {} instances)\n",
            self.command,
            params.join(" "),
            self.status,
            self.checks.len(),
            self.instances
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_reports_fail() {
        let r = RunReport::new("x").finish(0.0);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn status_follows_checks() {
        let mut r = RunReport::new("x").param("n", 3);
        r.push(Check::equal("a", 1, 1), 2);
        let r = r.finish(1.5);
        assert!(r.passed());
        assert_eq!(r.instances, 2);
        let json = r.to_json();
        assert!(!json.contains("elapsed"));
        assert!(json.contains("\"status\": \"pass\""));

        let mut r = RunReport::new("x");
        r.push(Check::equal("a", 1, 2), 1);
        assert_eq!(r.finish(0.0).status, Status::Fail);
    }

    #[test]
    fn text_rendering() {
        let mut r = RunReport::new("verify thm49").param("max_n", 2);
        r.push(Check::equal("n=2 chi=lr", "2", "2"), 1);
        let text = r.finish(0.0).to_text();
        assert_eq!(text, "ok   n=2 chi=lr: 2\nverify thm49 [max_n=2]: pass (1 checks, 1 instances)\n");
    }

    #[test]
    fn results_render_before_checks() {
        let mut r = RunReport::new("simulate");
        r.result("exit_order", serde_json::json!([2, 1]), "[2, 1]");
        r.push(Check::equal("same", 1, 1), 1);
        let r = r.finish(0.0);
        assert!(r.to_text().starts_with("exit_order = [2, 1]\nok   same"));
        assert!(r.to_json().contains("\"exit_order\""));
    }
}
