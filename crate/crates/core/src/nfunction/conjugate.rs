use super::{NFunction, OrliczFunction};
use crate::error::Result;

/// The complementary N-function `Ã` of an N-function, usable as a Young
/// function in its own right (Hölder pairings, Luxemburg norms).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateFunction {
    base: NFunction,
}

impl ConjugateFunction {
    pub fn new(base: NFunction) -> Self {
        ConjugateFunction { base }
    }

    pub fn base(&self) -> &NFunction {
        &self.base
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        self.base.conjugate_eval(s)
    }
}

impl OrliczFunction for ConjugateFunction {
    /// Saturates to infinity when the root finder cannot bracket `s`.
    fn value(&self, s: f64) -> f64 {
        self.base.conjugate_eval(s).unwrap_or(f64::INFINITY)
    }

    fn flux(&self, s: f64) -> f64 {
        self.base.flux_inverse(s.abs()).unwrap_or(f64::INFINITY)
    }

    /// Conjugate exponents `(m/(m−1), l/(l−1))`.
    fn exponents(&self) -> (f64, f64) {
        let (l, m) = (self.base.l(), self.base.m());
        (m / (m - 1.0), l / (l - 1.0))
    }
}
