//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A single failed check, with enough data to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub witness: Value,
    pub inputs: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub passed: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Report schema: `{suite, passed, checks, failures, spec}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<Failure>,
    pub spec: Value,
}

/// Failures recorded per check are capped so reports stay small.
const MAX_FAILURES_PER_CHECK: usize = 8;

impl Report {
    pub fn new(suite: impl Into<String>, spec: Value) -> Self {
        Report {
            suite: suite.into(),
            passed: true,
            checks: Vec::new(),
            failures: Vec::new(),
            spec,
        }
    }

    pub fn begin(&mut self, check: &str) -> CheckTally<'_> {
        CheckTally {
            report: self,
            check: check.to_string(),
            samples: 0,
            failures: 0,
            note: None,
        }
    }

    /// Folds another report in, prefixing its check names with its suite.
    pub fn absorb(&mut self, other: Report) {
        let prefix = other.suite.clone();
        self.passed &= other.passed;
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.check = format!("{prefix}/{}", c.check);
            c
        }));
        self.failures.extend(other.failures.into_iter().map(|mut f| {
            f.check = format!("{prefix}/{}", f.check);
            f
        }));
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn failures_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Failure> + 'a {
        self.failures.iter().filter(move |f| f.check == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Accumulates samples for one named check; finalized on drop.
pub struct CheckTally<'a> {
    report: &'a mut Report,
    check: String,
    samples: usize,
    failures: usize,
    note: Option<String>,
}

impl CheckTally<'_> {
    pub fn pass(&mut self) {
        self.samples += 1;
    }

    pub fn fail(&mut self, witness: Value, inputs: Value) {
        self.samples += 1;
        self.failures += 1;
        if self.failures <= MAX_FAILURES_PER_CHECK {
            self.report.failures.push(Failure {
                check: self.check.clone(),
                witness,
                inputs,
            });
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value, inputs: impl FnOnce() -> Value) {
        if ok {
            self.pass();
        } else {
            self.fail(witness(), inputs());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn samples(&self) -> usize {
        self.samples
    }
}

impl Drop for CheckTally<'_> {
    fn drop(&mut self) {
        let passed = self.failures == 0;
        self.report.passed &= passed;
        self.report.checks.push(CheckSummary {
            check: std::mem::take(&mut self.check),
            passed,
            samples: self.samples,
            note: self.note.take(),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn tallies_roll_up() {
        let mut r = Report::new("demo", json!({}));
        {
            let mut t = r.begin("a");
            t.pass();
            t.pass();
        }
        assert!(r.passed);
        {
            let mut t = r.begin("b");
            t.fail(json!(1), json!({"x": 2}));
        }
        assert!(!r.passed);
        assert_eq!(r.check("a").unwrap().samples, 2);
        assert_eq!(r.failures_of("b").count(), 1);

        let mut outer = Report::new("all", json!(null));
        outer.absorb(r);
        assert!(!outer.passed);
        assert!(outer.check("demo/b").is_some());
    }
}
