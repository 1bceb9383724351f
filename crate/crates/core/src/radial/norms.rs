use serde::Serialize;

use super::{GridFunction, Potential};
use crate::error::{Error, Result};
use crate::nfunction::{xi_inverse, NFunction, OrliczFunction, XiKind};
use crate::numeric::{safeguarded_newton, Tolerance};

fn potential_at(potential: Option<&Potential>, i: usize) -> f64 {
    potential.map_or(1.0, |v| v.values()[i])
}

/// `∫ V Φ(|u|)`; with no potential, `V = 1`.
pub fn modular<F: OrliczFunction + ?Sized>(f: &F, u: &GridFunction, potential: Option<&Potential>) -> f64 {
    let grid = u.grid();
    let sum: f64 = u
        .values()
        .iter()
        .zip(grid.weights())
        .enumerate()
        .map(|(i, (&v, &w))| {
            if v == 0.0 {
                0.0
            } else {
                w * potential_at(potential, i) * f.value(v)
            }
        })
        .sum();
    grid.surface_area() * sum
}

/// `∫_{B_R(0)} Φ(|u|)` using the nodes with `r <= radius`.
pub fn window_modular<F: OrliczFunction + ?Sized>(f: &F, u: &GridFunction, radius: f64) -> f64 {
    let grid = u.grid();
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(u.values())
        .zip(grid.weights())
        .take_while(|((&r, _), _)| r <= radius)
        .map(|((_, &v), &w)| if v == 0.0 { 0.0 } else { w * f.value(v) })
        .sum();
    grid.surface_area() * sum
}

/// Luxemburg norm `inf{α > 0 : Σ wᵢ Φ(|vᵢ|/α) <= 1}` for nonnegative weights.
///
/// Solved for `β = 1/α`, where the sum is increasing. With `M0` the sum at
/// `β = 1`, the growth exponents give `ξ1^{-1}(1/M0) <= β <= ξ0^{-1}(1/M0)`.
pub fn luxemburg_weighted<F: OrliczFunction + ?Sized>(f: &F, values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::Grid("values and weights differ in length".into()));
    }
    let active: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter(|(v, w)| **v != 0.0 && **w > 0.0)
        .map(|(v, w)| (v.abs(), *w))
        .collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let psi = |beta: f64| -> (f64, f64) {
        active.iter().fold((0.0, 0.0), |(s, d), &(v, w)| {
            (s + w * f.value(beta * v), d + w * v * f.flux(beta * v))
        })
    };
    let (l, m) = f.exponents();
    let m0 = psi(1.0).0;
    let (mut lo, mut hi) = if m0.is_finite() && m0 > 0.0 {
        (
            xi_inverse(XiKind::Upper, 1.0 / m0, l, m) * (1.0 - 1e-9),
            xi_inverse(XiKind::Lower, 1.0 / m0, l, m) * (1.0 + 1e-9),
        )
    } else {
        (1.0, 1.0)
    };
    if !(lo > 0.0 && lo.is_finite()) {
        lo = 1.0;
    }
    if !(hi >= lo && hi.is_finite()) {
        hi = lo;
    }
    // the ξ bracket is exact for exact Φ; tabulated Φ can miss it by rounding
    let mut guard = 0;
    while psi(lo).0 > 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Numeric("Luxemburg bracket: lower end not found".into()));
        }
    }
    while psi(hi).0 < 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::Numeric("Luxemburg bracket: upper end not found".into()));
        }
    }
    let tol = Tolerance {
        abs: f64::MIN_POSITIVE,
        rel: 1e-13,
    };
    let beta = safeguarded_newton(psi, 1.0, lo, hi, tol)?;
    Ok(1.0 / beta)
}

/// `‖u‖_{Φ}` (or `‖u‖_{Φ,V}` with a potential).
pub fn luxemburg_norm<F: OrliczFunction + ?Sized>(
    f: &F,
    u: &GridFunction,
    potential: Option<&Potential>,
) -> Result<f64> {
    let grid = u.grid();
    let omega = grid.surface_area();
    let weights: Vec<f64> = grid
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| omega * w * potential_at(potential, i))
        .collect();
    luxemburg_weighted(f, u.values(), &weights)
}

/// Nodal `u'(r)`: three-point differences on the (possibly nonuniform) grid,
/// `u'(0) = 0` by symmetry and a second-order one-sided formula at `R_max`.
pub fn radial_gradient(u: &GridFunction) -> GridFunction {
    let r = u.grid().nodes();
    let v = u.values();
    let n = r.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
        d[i] = -h1 / (h0 * (h0 + h1)) * v[i - 1] + (h1 - h0) / (h0 * h1) * v[i] + h0 / (h1 * (h0 + h1)) * v[i + 1];
    }
    let (h1, h2) = (r[n - 1] - r[n - 2], r[n - 2] - r[n - 3]);
    let c0 = 1.0 / h1 + 1.0 / (h1 + h2);
    let c1 = -(h1 + h2) / (h1 * h2);
    let c2 = h1 / ((h1 + h2) * h2);
    d[n - 1] = c0 * v[n - 1] + c1 * v[n - 2] + c2 * v[n - 3];
    GridFunction::new(u.grid().clone(), d).expect("gradient of finite values is finite")
}

/// Exact gradient of the piecewise-linear interpolant, one value per cell.
pub fn cell_gradient(u: &GridFunction) -> Vec<f64> {
    let r = u.grid().nodes();
    let v = u.values();
    (0..r.len() - 1).map(|c| (v[c + 1] - v[c]) / (r[c + 1] - r[c])).collect()
}

/// `‖∇u‖_A + ‖u‖_{A,V}`.
pub fn sobolev_norm(nf: &NFunction, u: &GridFunction, potential: Option<&Potential>) -> Result<f64> {
    let grad = radial_gradient(u);
    Ok(luxemburg_norm(nf, &grad, None)? + luxemburg_norm(nf, u, potential)?)
}

/// `∫|uv|` together with the Hölder bound `2‖u‖_A ‖v‖_Ã`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderPairing {
    pub pairing: f64,
    pub bound: f64,
}

pub fn holder_pairing(nf: &NFunction, u: &GridFunction, v: &GridFunction) -> Result<HolderPairing> {
    let product = u.zip_with(v, |a, b| (a * b).abs())?;
    let pairing = u.grid().integrate_volume(product.values());
    let bound = 2.0 * luxemburg_norm(nf, u, None)? * luxemburg_norm(&nf.conjugate(), v, None)?;
    Ok(HolderPairing { pairing, bound })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularConvergence {
    /// `∫ A(|uₙ − u|)` for each member of the sequence.
    pub distances: Vec<f64>,
    pub converged: bool,
}

/// Modular distances of a sequence to a limit; converged when the last one is
/// within `tol` and the distances never grow by more than `tol`.
pub fn modular_convergence_check(
    nf: &NFunction,
    sequence: &[GridFunction],
    limit: &GridFunction,
    tol: f64,
) -> Result<ModularConvergence> {
    let distances = sequence
        .iter()
        .map(|u| Ok(modular(nf, &u.sub(limit)?, None)))
        .collect::<Result<Vec<f64>>>()?;
    let converged = distances.last().is_some_and(|&d| d <= tol) && distances.windows(2).all(|w| w[1] <= w[0] + tol);
    Ok(ModularConvergence { distances, converged })
}

/// `A(|u(R_max)|)` times the volume of the outermost annular cell: a rough
/// size of the mass lost by cutting the domain at `R_max`.
pub fn truncation_tail(nf: &NFunction, u: &GridFunction) -> f64 {
    let grid = u.grid();
    let last = *grid.cell_measure().last().expect("grid has cells");
    nf.eval(*u.values().last().expect("grid has nodes")) * grid.surface_area() * last
}
