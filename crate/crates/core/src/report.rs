//! Structured verification results and the sampling policy they echo.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Counterexample payloads kept per report; further violations are only
/// counted.
pub const MAX_COUNTEREXAMPLES: usize = 20;

/// How a verification sweep chooses its cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad policy `{0}`: expected `exhaustive` or `sampled:<count>:seed=<seed>`")]
pub struct PolicyParseError(pub String);

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Exhaustive => f.write_str("exhaustive"),
            Policy::Sampled { count, seed } => write!(f, "sampled:{count}:seed={seed}"),
        }
    }
}

impl FromStr for Policy {
    type Err = PolicyParseError;

    fn from_str(s: &str) -> Result<Policy, PolicyParseError> {
        let err = || PolicyParseError(s.to_string());
        let s = s.trim();
        if s == "exhaustive" {
            return Ok(Policy::Exhaustive);
        }
        let mut parts = s.split(':');
        if parts.next() != Some("sampled") {
            return Err(err());
        }
        let count = parts
            .next()
            .and_then(|c| c.parse().ok())
            .filter(|&c: &usize| c > 0)
            .ok_or_else(err)?;
        let seed_part = parts.next().ok_or_else(err)?;
        let seed = seed_part
            .strip_prefix("seed=")
            .unwrap_or(seed_part)
            .parse()
            .map_err(|_| err())?;
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(Policy::Sampled { count, seed })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable { reason: String },
}

impl Verdict {
    /// Pass and not-applicable both count as acceptable.
    pub fn is_acceptable(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// Short machine id of the check, e.g. `composition-table`.
    pub check: String,
    /// The statement being checked, in words.
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub policy: String,
    pub verdict: Verdict,
    pub counts: BTreeMap<String, u64>,
    pub counterexamples: Vec<Value>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(check: &str, claim: &str, policy: impl fmt::Display) -> VerificationReport {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            check: check.to_string(),
            claim: claim.to_string(),
            instance: None,
            policy: policy.to_string(),
            verdict: Verdict::Pass,
            counts: BTreeMap::new(),
            counterexamples: Vec::new(),
            notes: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn with_instance(mut self, fingerprint: &str) -> VerificationReport {
        self.instance = Some(fingerprint.to_string());
        self
    }

    pub fn add_count(&mut self, key: &str, n: u64) {
        *self.counts.entry(key.to_string()).or_default() += n;
    }

    pub fn set_count(&mut self, key: &str, n: u64) {
        self.counts.insert(key.to_string(), n);
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Records a violation; the report fails.
    pub fn violation(&mut self, payload: Value) {
        self.add_count("violations", 1);
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(payload);
        }
        self.verdict = Verdict::Fail;
    }

    /// Checks `ok`, recording `payload()` as a violation when it is false.
    pub fn expect(&mut self, ok: bool, payload: impl FnOnce() -> Value) {
        if !ok {
            self.violation(payload());
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Marks the report not applicable unless it already failed.
    pub fn not_applicable(&mut self, reason: impl Into<String>) {
        if self.verdict != Verdict::Fail {
            self.verdict = Verdict::NotApplicable { reason: reason.into() };
        }
    }

    /// Folds a sub-report into this one: counts add up, counterexamples and
    /// notes are appended, and a failure fails the result.
    pub fn absorb(&mut self, other: VerificationReport) {
        for (k, v) in other.counts {
            self.add_count(&k, v);
        }
        for c in other.counterexamples {
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(c);
            }
        }
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
        if other.verdict == Verdict::Fail {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn violations(&self) -> u64 {
        self.count("violations")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn policy_parsing() {
        assert_eq!("exhaustive".parse::<Policy>().unwrap(), Policy::Exhaustive);
        assert_eq!(
            "sampled:10000:seed=42".parse::<Policy>().unwrap(),
            Policy::Sampled { count: 10000, seed: 42 }
        );
        assert_eq!(
            "sampled:5:7".parse::<Policy>().unwrap(),
            Policy::Sampled { count: 5, seed: 7 }
        );
        for bad in [
            "sampled:100",
            "sampled",
            "sampled:0:seed=1",
            "random",
            "sampled:1:seed=x",
        ] {
            assert!(bad.parse::<Policy>().is_err(), "{bad}");
        }
        let p = Policy::Sampled { count: 3, seed: 9 };
        assert_eq!(p.to_string().parse::<Policy>().unwrap(), p);
    }

    #[test]
    fn failing_report_keeps_a_counterexample() {
        let mut r = VerificationReport::new("x", "claim", Policy::Exhaustive);
        assert!(r.passed());
        r.expect(true, || json!(null));
        assert!(r.passed());
        for i in 0..30 {
            r.expect(false, || json!({ "i": i }));
        }
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.violations(), 30);
        assert_eq!(r.counterexamples.len(), MAX_COUNTEREXAMPLES);
        r.not_applicable("ignored after failure");
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn absorbing_merges_counts_and_failures() {
        let mut a = VerificationReport::new("a", "claim", Policy::Exhaustive);
        a.add_count("n", 2);
        let mut b = VerificationReport::new("b", "claim", Policy::Exhaustive);
        b.add_count("n", 3);
        a.absorb(b.clone());
        assert_eq!(a.count("n"), 5);
        assert!(a.passed());
        b.violation(json!(1));
        a.absorb(b);
        assert_eq!(a.verdict, Verdict::Fail);
        assert_eq!(a.violations(), 1);
    }

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new("x", "claim", "exhaustive");
        r.not_applicable("premise fails");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"]["status"], "not-applicable");
        assert_eq!(v["verdict"]["reason"], "premise fails");
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert!(v.get("wall_time_ms").is_none());
    }
}
