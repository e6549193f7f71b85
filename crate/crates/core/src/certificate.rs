//! Machine-checkable verdicts for identity checks.
//!
//! A [`Certificate`] records what was checked, a digest of the canonicalized
//! inputs, the observed residual and the tolerance it was judged against.
//! The verdict is derived, never stored independently: `pass` iff
//! `residual <= tolerance` (a NaN residual always fails).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub inputs_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(
        name: impl Into<String>,
        inputs: &serde_json::Value,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let verdict = if residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            inputs_digest: digest(inputs),
            residual,
            tolerance,
            verdict,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Re-judge against a different tolerance (the residual is unchanged).
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.verdict = if self.residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    /// Combine several sub-checks into one certificate whose residual is the
    /// worst normalized residual, rescaled to `tolerance`.
    pub fn combine(
        name: impl Into<String>,
        inputs: &serde_json::Value,
        parts: &[Certificate],
        tolerance: f64,
    ) -> Self {
        let worst = parts
            .iter()
            .map(|c| {
                if c.tolerance > 0.0 {
                    c.residual / c.tolerance * tolerance
                } else if c.residual == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0_f64, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
        let mut out = Certificate::new(name, inputs, worst, tolerance);
        for p in parts {
            out.notes.push(format!(
                "{}: residual {:.3e} (tol {:.1e}) {}",
                p.name,
                p.residual,
                p.tolerance,
                if p.passed() { "pass" } else { "fail" }
            ));
            for n in &p.notes {
                if !out.notes.contains(n) {
                    out.notes.push(n.clone());
                }
            }
        }
        out
    }
}

/// SHA-256 of the compact JSON rendering. `serde_json` keeps map keys sorted
/// (no `preserve_order` feature), so equal values give equal digests.
pub fn digest(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_follows_residual() {
        let c = Certificate::new("x", &json!({"a": 1}), 1e-9, 1e-8);
        assert!(c.passed());
        let c = Certificate::new("x", &json!({"a": 1}), 1e-7, 1e-8);
        assert!(!c.passed());
        let c = Certificate::new("x", &json!({"a": 1}), f64::NAN, 1.0);
        assert!(!c.passed());
        let c = Certificate::new("x", &json!(null), 0.0, 0.0);
        assert!(c.passed());
    }

    #[test]
    fn digest_is_key_order_independent() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"a":[1,2],"b":1}"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&json!({"a": [2, 1], "b": 1})));
    }
}
