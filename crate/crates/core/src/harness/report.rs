use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::thresholds::{Threshold, Thresholds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One pass/fail comparison of a statistic against its requirement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable requirement, e.g. `"<= 2"`.
    pub requirement: String,
    pub passed: bool,
}

/// Outcome of a packaged experiment.
///
/// Maps are ordered, so the JSON rendering is byte-stable for equal inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub experiment: String,
    pub master_seed: u64,
    pub params: Value,
    pub statistics: BTreeMap<String, Value>,
    pub thresholds_version: u32,
    pub thresholds: BTreeMap<String, Threshold>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn new(experiment: &str, master_seed: u64, params: impl Serialize, thresholds: &Thresholds, groups: &[&str]) -> Self {
        let mut used = BTreeMap::new();
        for g in groups {
            used.extend(thresholds.group(g));
        }
        TheoremReport {
            experiment: experiment.to_string(),
            master_seed,
            params: serde_json::to_value(params).expect("parameters serialize"),
            statistics: BTreeMap::new(),
            thresholds_version: thresholds.version,
            thresholds: used,
            checks: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("statistics serialize");
        self.statistics.insert(key.to_string(), v);
    }

    /// Records a check and updates the verdict.
    pub fn check(&mut self, name: &str, value: f64, requirement: impl Into<String>, passed: bool) {
        if !passed {
            self.verdict = Verdict::Fail;
        }
        self.checks.push(Check {
            name: name.to_string(),
            value,
            requirement: requirement.into(),
            passed,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let th = Thresholds::defaults();
        let mut r = TheoremReport::new("demo", 3, serde_json::json!({"n": 5}), &th, &["gw"]);
        r.stat("x", 1.5);
        r.check("a", 1.0, "<= 2", true);
        assert!(r.passed());
        r.check("b", 3.0, "<= 2", false);
        assert!(!r.passed());
        assert!(r.thresholds.contains_key("gw.median_max"));
        let back: TheoremReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
