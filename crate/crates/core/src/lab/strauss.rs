use serde::Serialize;

use super::CheckReport;
use crate::error::{Error, Result};
use crate::nfunction::NFunction;
use crate::radial::{modular, radial_gradient, truncation_tail, GridFunction};

/// Tail estimates above this share of `E` mean `u` has not decayed on the grid.
const TAIL_THRESHOLD: f64 = 1e-6;

/// Pointwise decay bound `|u(r)| <= A^{-1}(C E / r^{N−1})` for radial `u`,
/// with `C = (K+1)/ω_{N−1}` and `E = ∫A(|u|) + ∫A(|∇u|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StraussBound {
    #[serde(skip)]
    pub nf: NFunction,
    pub dim: usize,
    pub c: f64,
    pub e: f64,
}

impl StraussBound {
    pub fn new(nf: &NFunction, u: &GridFunction) -> Result<Self> {
        let grid = u.grid();
        let e = modular(nf, u, None) + modular(nf, &radial_gradient(u), None);
        if !e.is_finite() {
            return Err(Error::Numeric(format!("energy E = {e} is not finite")));
        }
        Ok(StraussBound {
            nf: nf.clone(),
            dim: grid.dim(),
            c: (nf.delta2() + 1.0) / grid.surface_area(),
            e,
        })
    }

    pub fn bound(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("the decay bound needs r > 0, got {r}")));
        }
        self.nf.inverse(self.c * self.e / r.powi(self.dim as i32 - 1))
    }
}

/// Audits the decay bound at every node `r >= r_min`.
pub fn strauss_check(nf: &NFunction, u: &GridFunction, r_min: f64) -> Result<CheckReport> {
    let sb = StraussBound::new(nf, u)?;
    let tail = truncation_tail(nf, u);
    if tail > TAIL_THRESHOLD * sb.e.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "u has not decayed at R_max: tail estimate {tail:e} vs E = {:e}",
            sb.e
        )));
    }
    let mut report = CheckReport::new("strauss");
    for (&r, &v) in u.grid().nodes().iter().zip(u.values()) {
        if r >= r_min && r > 0.0 {
            report.push(&[r], v.abs(), sb.bound(r)?);
        }
    }
    Ok(report)
}
