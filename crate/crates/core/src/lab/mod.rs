//! Numerical audits of the inequalities behind the Orlicz-Sobolev theory:
//! Young's inequality, the conjugate bound `Ã(a(t)t) <= A(2t)`, the ξ
//! sandwiches, growth ratios of `A*`, the radial (Strauss) decay bound, the
//! embedding conditions and a vanishing demo for spreading sequences.

mod checks;
mod lions;
mod strauss;

pub use checks::{f3_ratio_check, lemma_f0_check, sandwich_check, young_check, Sandwich};
pub use lions::{embedding_conditions_check, lions_vanishing_demo, LionsDemo, LionsRow};
pub use strauss::{strauss_check, StraussBound};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative tolerance used by every check: a sample fails when
/// `rhs − lhs < −tolerance · max(|lhs|, |rhs|)`.
pub const CHECK_TOLERANCE: f64 = 1e-9;

const MAX_RECORDED: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub input: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of auditing `lhs <= rhs` over many samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    /// Minimum of `rhs − lhs`.
    pub worst_margin: f64,
    /// Minimum of `(rhs − lhs)/max(|lhs|, |rhs|)`.
    pub worst_relative_margin: f64,
    pub tolerance: f64,
    /// Failing samples, the first few only.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub passed: bool,
}

impl CheckReport {
    pub(crate) fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            samples: 0,
            worst_margin: f64::INFINITY,
            worst_relative_margin: f64::INFINITY,
            tolerance: CHECK_TOLERANCE,
            violations: Vec::new(),
            violation_count: 0,
            passed: true,
        }
    }

    /// Records the sample `lhs <= rhs`. NaN on either side is a violation.
    pub(crate) fn push(&mut self, input: &[f64], lhs: f64, rhs: f64) {
        self.samples += 1;
        let (margin, rel) = if lhs.is_nan() || rhs.is_nan() {
            (f64::NEG_INFINITY, f64::NEG_INFINITY)
        } else if lhs == rhs {
            (0.0, 0.0)
        } else if rhs == f64::INFINITY || lhs == f64::NEG_INFINITY {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let m = rhs - lhs;
            let scale = lhs.abs().max(rhs.abs());
            (m, if scale > 0.0 { m / scale } else { 0.0 })
        };
        self.worst_margin = self.worst_margin.min(margin);
        self.worst_relative_margin = self.worst_relative_margin.min(rel);
        if !(rel >= -self.tolerance) {
            self.violation_count += 1;
            self.passed = false;
            if self.violations.len() < MAX_RECORDED {
                self.violations.push(Violation {
                    input: input.to_vec(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    /// Records `|a − b| <= rel_tol · max(|a|, |b|)` as an inequality sample.
    pub(crate) fn push_close(&mut self, input: &[f64], a: f64, b: f64, rel_tol: f64) {
        let scale = a.abs().max(b.abs());
        self.push(input, (a - b).abs(), rel_tol * scale);
    }

    /// Folds another report into this one.
    pub fn merge(&mut self, other: CheckReport) {
        self.samples += other.samples;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        self.worst_relative_margin = self.worst_relative_margin.min(other.worst_relative_margin);
        self.violation_count += other.violation_count;
        self.passed &= other.passed;
        let room = MAX_RECORDED.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
    }

    /// One line of text: name, verdict, samples and worst margins.
    pub fn summary(&self) -> String {
        format!(
            "{:<28} {}  samples={:<6} worst_margin={:+.3e} worst_rel={:+.3e} violations={}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.samples,
            self.worst_margin,
            self.worst_relative_margin,
            self.violation_count
        )
    }
}

/// Deterministic sampler shared by the checks.
pub(crate) struct Sampler(ChaCha8Rng);

impl Sampler {
    pub(crate) fn new(seed: u64) -> Self {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Log-uniform on `[lo, hi]`.
    pub(crate) fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let x: f64 = self.0.gen_range(lo.ln()..=hi.ln());
        x.exp()
    }
}
