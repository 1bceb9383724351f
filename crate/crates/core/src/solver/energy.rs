use serde::Serialize;

use super::{ProblemSpec, EPS_REG};
use crate::error::{Error, Result};
use crate::radial::{cell_gradient, GridFunction};

/// The three integrals making up `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParts {
    /// `∫A(|∇u|)` with the cellwise gradient.
    pub gradient_modular: f64,
    /// `∫V A(|u|)`.
    pub potential_modular: f64,
    /// `∫F(u)`.
    pub nonlinear: f64,
}

impl EnergyParts {
    pub fn energy(&self) -> f64 {
        self.gradient_modular + self.potential_modular - self.nonlinear
    }
}

fn check_grid(p: &ProblemSpec, u: &GridFunction) -> Result<()> {
    if u.grid().nodes() != p.grid().nodes() {
        return Err(Error::Grid("function and problem live on different grids".into()));
    }
    Ok(())
}

pub fn energy_parts(p: &ProblemSpec, u: &GridFunction) -> Result<EnergyParts> {
    check_grid(p, u)?;
    let grid = p.grid();
    let omega = grid.surface_area();
    let nf = p.nf();
    let v = p.potential().values();
    let gradient_modular = omega
        * cell_gradient(u)
            .iter()
            .zip(grid.cell_measure())
            .map(|(&d, &mu)| mu * nf.eval(d))
            .sum::<f64>();
    let (mut pot, mut non) = (0.0, 0.0);
    for (i, (&x, &q)) in u.values().iter().zip(grid.lumped_mass()).enumerate() {
        if x != 0.0 {
            pot += q * v[i] * nf.eval(x);
            non += q * p.nonlinearity().F(x);
        }
    }
    let parts = EnergyParts {
        gradient_modular,
        potential_modular: omega * pot,
        nonlinear: omega * non,
    };
    if !parts.energy().is_finite() {
        return Err(Error::Numeric(format!("energy is not finite: {parts:?}")));
    }
    Ok(parts)
}

/// `J(u)`.
pub fn energy(p: &ProblemSpec, u: &GridFunction) -> Result<f64> {
    Ok(energy_parts(p, u)?.energy())
}

fn signed_flux(p: &ProblemSpec, t: f64) -> f64 {
    p.nf().flux(t).copysign(t)
}

/// `∂J/∂u_i` for every node, the exact derivative of the discrete energy.
pub fn gradient(p: &ProblemSpec, u: &GridFunction) -> Result<Vec<f64>> {
    check_grid(p, u)?;
    let grid = p.grid();
    let omega = grid.surface_area();
    let r = grid.nodes();
    let v = p.potential().values();
    let mut g: Vec<f64> = u
        .values()
        .iter()
        .zip(grid.lumped_mass())
        .enumerate()
        .map(|(i, (&x, &q))| omega * q * (v[i] * signed_flux(p, x) - p.nonlinearity().f(x)))
        .collect();
    for (c, (&d, &mu)) in cell_gradient(u).iter().zip(grid.cell_measure()).enumerate() {
        let w = omega * mu * signed_flux(p, d) / (r[c + 1] - r[c]);
        g[c] -= w;
        g[c + 1] += w;
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("gradient is not finite".into()));
    }
    Ok(g)
}

/// `⟨J'(u), φ⟩`.
pub fn directional_derivative(p: &ProblemSpec, u: &GridFunction, phi: &GridFunction) -> Result<f64> {
    check_grid(p, phi)?;
    Ok(gradient(p, u)?.iter().zip(phi.values()).map(|(g, f)| g * f).sum())
}

/// The gradient divided by the quadrature mass `ω q_i`, which approximates
/// the strong form `−r^{1−N}(r^{N−1}a(|u'|)u')' + V a(|u|)u − f(u)`.
pub fn residual(p: &ProblemSpec, u: &GridFunction) -> Result<GridFunction> {
    let grid = p.grid();
    let omega = grid.surface_area();
    let g = gradient(p, u)?;
    let values = g.iter().zip(grid.lumped_mass()).map(|(g, q)| g / (omega * q)).collect();
    GridFunction::new(grid.clone(), values)
}

/// A tridiagonal matrix: `sub[i]` is entry `(i+1, i)`, `sup[i]` is `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Drops the last row and column.
    pub fn without_last(&self) -> Tridiagonal {
        let n = self.diag.len() - 1;
        Tridiagonal {
            sub: self.sub[..n - 1].to_vec(),
            diag: self.diag[..n].to_vec(),
            sup: self.sup[..n - 1].to_vec(),
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        crate::numeric::solve_tridiagonal(&self.sub, &self.diag, &self.sup, rhs)
    }
}

/// `∂²J/∂u_i∂u_j`. Where `A''` blows up at 0, the argument is cut off at
/// [`EPS_REG`].
pub fn hessian(p: &ProblemSpec, u: &GridFunction) -> Result<Tridiagonal> {
    check_grid(p, u)?;
    let grid = p.grid();
    let omega = grid.surface_area();
    let r = grid.nodes();
    let v = p.potential().values();
    let nf = p.nf();
    let second = |t: f64| nf.flux_derivative(t.abs().max(EPS_REG));
    let mut diag: Vec<f64> = u
        .values()
        .iter()
        .zip(grid.lumped_mass())
        .enumerate()
        .map(|(i, (&x, &q))| omega * q * (v[i] * second(x) - p.nonlinearity().df(x)))
        .collect();
    let mut off = Vec::with_capacity(diag.len() - 1);
    for (c, (&d, &mu)) in cell_gradient(u).iter().zip(grid.cell_measure()).enumerate() {
        let h = r[c + 1] - r[c];
        let k = omega * mu * second(d) / (h * h);
        diag[c] += k;
        diag[c + 1] += k;
        off.push(-k);
    }
    if diag.iter().chain(&off).any(|x| !x.is_finite()) {
        return Err(Error::Numeric("Hessian is not finite".into()));
    }
    Ok(Tridiagonal {
        sub: off.clone(),
        diag,
        sup: off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunction::{NFunction, NFunctionSpec};
    use crate::radial::{PotentialSpec, RadialGrid, Spacing};
    use crate::solver::NonlinearitySpec;
    use std::f64::consts::PI;

    fn cubic_problem(cells: usize) -> ProblemSpec {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        let grid = RadialGrid::new(3, 10.0, cells, Spacing::Uniform).unwrap();
        ProblemSpec::new(nf, PotentialSpec::constant(1.0), NonlinearitySpec::pure_power(4.0), grid).unwrap()
    }

    #[test]
    fn gaussian_energy() {
        let p = cubic_problem(4000);
        let u = GridFunction::from_fn(p.grid().clone(), |r| (-r * r).exp());
        let expect = 4.0 * (PI / 2.0).powf(1.5) - 0.25 * (PI / 4.0).powf(1.5);
        let j = energy(&p, &u).unwrap();
        assert!((j - expect).abs() < 1e-5, "{j} {expect}");
        assert_eq!(energy(&p, &GridFunction::zeros(p.grid().clone())).unwrap(), 0.0);
        assert!(gradient(&p, &GridFunction::zeros(p.grid().clone())).unwrap().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let nf = NFunction::build(&NFunctionSpec::power_sum(2.0, 3.0)).unwrap();
        let grid = RadialGrid::new(4, 8.0, 60, Spacing::Graded).unwrap();
        let p = ProblemSpec::new(nf, PotentialSpec::constant(1.5), NonlinearitySpec::pure_power(3.5), grid).unwrap();
        let u = GridFunction::from_fn(p.grid().clone(), |r| 2.0 * (-r * r / 3.0).exp() * (1.0 + 0.3 * r.cos()));
        let phi = GridFunction::from_fn(p.grid().clone(), |r| (-r).exp() * (2.0 * r).sin());
        let h = 1e-6;
        let gp = gradient(&p, &u.add(&phi.scaled(h)).unwrap()).unwrap();
        let gm = gradient(&p, &u.add(&phi.scaled(-h)).unwrap()).unwrap();
        let hv = hessian(&p, &u).unwrap().apply(phi.values());
        for i in 0..hv.len() {
            let fd = (gp[i] - gm[i]) / (2.0 * h);
            assert!((fd - hv[i]).abs() <= 1e-6 * (1.0 + hv[i].abs()), "{i} {fd} {}", hv[i]);
        }
    }

    #[test]
    fn directional_derivative_is_first_order_accurate() {
        let p = cubic_problem(200);
        let u = GridFunction::from_fn(p.grid().clone(), |r| 3.0 * (-r * r / 2.0).exp());
        let phi = GridFunction::from_fn(p.grid().clone(), |r| (-r * r).exp() * (1.0 - r));
        let d = directional_derivative(&p, &u, &phi).unwrap();
        let j0 = energy(&p, &u).unwrap();
        let err = |h: f64| ((energy(&p, &u.add(&phi.scaled(h)).unwrap()).unwrap() - j0) / h - d).abs();
        let ratio = err(1e-4) / err(1e-5);
        assert!((8.0..=12.0).contains(&ratio), "{ratio}");
    }
}
