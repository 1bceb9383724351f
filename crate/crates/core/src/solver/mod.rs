//! Radial ground states of `−div(a(|∇u|)∇u) + V a(|u|)u = f(u)` by a
//! discrete mountain-pass method, plus a shooting oracle for the power case
//! and audits of the energy inequalities.
//!
//! The discrete energy is
//! `J(u) = ω Σ_c μ_c A(|δ_c|) + ω Σ_i q_i (V_i A(|u_i|) − F(u_i))`,
//! where `δ_c` is the slope of the piecewise-linear interpolant on cell `c`,
//! `μ_c` the cell measure and `q_i` the lumped mass of node `i`. The last
//! node carries the boundary value `u(R_max) = 0` during solves.

mod audit;
mod energy;
mod mountain;
mod shooting;

pub use audit::{mp_geometry_probe, ps_inequality_check, GeometryProbe};
pub use energy::{directional_derivative, energy, energy_parts, gradient, hessian, residual, EnergyParts, Tridiagonal};
pub use mountain::{find_endpoint, mountain_pass_solve, nehari_project, unit_bump, MountainPassReport, NehariProjection};
pub use shooting::{shooting_oracle, ShootingConfig, ShootingResult};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfunction::{NFunction, SobolevConjugate};
use crate::radial::{Potential, PotentialSpec, RadialGrid, Spacing};

/// Lower cutoff for `|u'|` and `|u|` where `A''` is singular at 0.
pub const EPS_REG: f64 = 1e-12;

/// The nonlinearity `f`. Only pure powers are provided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    /// `f(t) = coef·|t|^{q−2}t`, `F(t) = coef·|t|^q/q`, `θ = q`.
    PurePower {
        q: f64,
        #[serde(default = "one")]
        coef: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl NonlinearitySpec {
    pub fn pure_power(q: f64) -> Self {
        NonlinearitySpec::PurePower { q, coef: 1.0 }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            NonlinearitySpec::PurePower { q, .. } => q,
        }
    }

    /// Ambrosetti-Rabinowitz exponent θ with `θF(t) <= tf(t)`.
    pub fn theta(&self) -> f64 {
        self.exponent()
    }

    pub fn f(&self, t: f64) -> f64 {
        match *self {
            NonlinearitySpec::PurePower { q, coef } => coef * t.abs().powf(q - 2.0) * t,
        }
    }

    #[allow(non_snake_case)]
    pub fn F(&self, t: f64) -> f64 {
        match *self {
            NonlinearitySpec::PurePower { q, coef } => coef * t.abs().powf(q) / q,
        }
    }

    /// `f'(t)`.
    pub fn df(&self, t: f64) -> f64 {
        match *self {
            NonlinearitySpec::PurePower { q, coef } => coef * (q - 1.0) * t.abs().powf(q - 2.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            NonlinearitySpec::PurePower { q, coef } => {
                if !(q > 1.0 && q.is_finite()) {
                    return Err(Error::param("pure_power: 1 < q", q));
                }
                if !(coef > 0.0 && coef.is_finite()) {
                    return Err(Error::param("pure_power: coef > 0", coef));
                }
                Ok(())
            }
        }
    }
}

/// A discretized problem: N-function, potential, nonlinearity and grid.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    nf: NFunction,
    sc: SobolevConjugate,
    potential_spec: PotentialSpec,
    potential: Potential,
    nonlin: NonlinearitySpec,
    grid: Arc<RadialGrid>,
}

impl ProblemSpec {
    /// Builds the problem and checks the admissibility window
    /// `m < θ` and `m < q < l*`.
    pub fn new(
        nf: NFunction,
        potential_spec: PotentialSpec,
        nonlin: NonlinearitySpec,
        grid: Arc<RadialGrid>,
    ) -> Result<Self> {
        nonlin.validate()?;
        let sc = nf.sobolev_conjugate(grid.dim()).map_err(|e| {
            Error::Admissibility(format!("no Sobolev conjugate in dimension {}: {e}", grid.dim()))
        })?;
        let (m, l_star, q, theta) = (nf.m(), sc.l_star(), nonlin.exponent(), nonlin.theta());
        if !(theta > m) {
            return Err(Error::Admissibility(format!("θ = {theta} must exceed m = {m}")));
        }
        if !(q > m && q < l_star) {
            return Err(Error::Admissibility(format!("q = {q} must lie in (m, l*) = ({m}, {l_star})")));
        }
        let potential = potential_spec.sample(&grid)?;
        Ok(ProblemSpec {
            nf,
            sc,
            potential_spec,
            potential,
            nonlin,
            grid,
        })
    }

    pub fn nf(&self) -> &NFunction {
        &self.nf
    }

    pub fn sc(&self) -> &SobolevConjugate {
        &self.sc
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn potential_spec(&self) -> &PotentialSpec {
        &self.potential_spec
    }

    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.nonlin
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// The same problem on another grid.
    pub fn with_grid(&self, grid: Arc<RadialGrid>) -> Result<Self> {
        ProblemSpec::new(self.nf.clone(), self.potential_spec.clone(), self.nonlin, grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "M")]
    pub cells: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        RadialGrid::new(self.dim, self.r_max, self.cells, self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Stop when the sup-norm of the strong residual falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of path segments.
    pub path_points: usize,
    /// Zero keeps the unit Gaussian seed; other values perturb its width.
    pub seed: u64,
    pub grid: GridConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iter: 50_000,
            path_points: 20,
            seed: 0,
            grid: GridConfig {
                dim: 3,
                r_max: 20.0,
                cells: 4000,
                spacing: Spacing::Uniform,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunction::NFunctionSpec;

    fn grid(dim: usize) -> Arc<RadialGrid> {
        RadialGrid::new(dim, 10.0, 100, Spacing::Uniform).unwrap()
    }

    #[test]
    fn admissibility_window() {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        let v = PotentialSpec::constant(1.0);
        assert!(ProblemSpec::new(nf.clone(), v.clone(), NonlinearitySpec::pure_power(4.0), grid(3)).is_ok());
        for q in [2.0, 6.0, 7.0] {
            let r = ProblemSpec::new(nf.clone(), v.clone(), NonlinearitySpec::pure_power(q), grid(3));
            assert!(matches!(r, Err(Error::Admissibility(_))), "{q}");
        }
        let ps = NFunction::build(&NFunctionSpec::power_sum(2.0, 3.0)).unwrap();
        assert!(ProblemSpec::new(ps.clone(), v.clone(), NonlinearitySpec::pure_power(3.5), grid(4)).is_ok());
        assert!(ProblemSpec::new(ps, PotentialSpec::constant(-1.0), NonlinearitySpec::pure_power(3.5), grid(4)).is_err());
    }

    #[test]
    fn nonlinearity_relations() {
        let f = NonlinearitySpec::PurePower { q: 3.5, coef: 2.0 };
        for t in [-2.0, -0.3, 0.7, 4.0] {
            assert!((f.theta() * f.F(t) - t * f.f(t)).abs() < 1e-12 * (1.0 + t * f.f(t)).abs());
            let h = 1e-6;
            assert!(((f.F(t + h) - f.F(t - h)) / (2.0 * h) - f.f(t)).abs() < 1e-6);
            assert!(((f.f(t + h) - f.f(t - h)) / (2.0 * h) - f.df(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn config_json() {
        let cfg: SolverConfig =
            serde_json::from_str(r#"{"tol":1e-7,"grid":{"N":4,"R_max":15.0,"M":800,"spacing":"graded"}}"#).unwrap();
        assert_eq!(cfg.tol, 1e-7);
        assert_eq!(cfg.max_iter, 50_000);
        assert_eq!(cfg.grid.spacing, Spacing::Graded);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"tolerance":1}"#).is_err());
        let n: NonlinearitySpec = serde_json::from_str(r#"{"kind":"pure_power","q":4}"#).unwrap();
        assert_eq!(n, NonlinearitySpec::pure_power(4.0));
    }
}
