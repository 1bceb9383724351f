//! Radial functions on `ℝ^N` sampled on `[0, R_max]`, with modulars,
//! Luxemburg norms and the Orlicz-Sobolev norm.
//!
//! Functions are extended by zero beyond `R_max`. All integrals are
//! `ω_{N−1} ∫₀^{R_max} g(r) r^{N−1} dr`, evaluated with weights that integrate
//! the piecewise-linear interpolant of `g` exactly against `r^{N−1}`.

mod io;
mod norms;
mod potential;

pub use io::{read_csv, write_csv};
pub use norms::{
    cell_gradient, holder_pairing, luxemburg_norm, luxemburg_weighted, modular, modular_convergence_check,
    radial_gradient, sobolev_norm, truncation_tail, window_modular, ModularConvergence,
};
pub use potential::{Potential, PotentialSpec};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, hermite, pchip_slopes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Uniform,
    /// `r_i = R sinh(βi/M)/sinh(β)`, nodes clustered near the origin.
    Graded,
}

impl std::str::FromStr for Spacing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Spacing::Uniform),
            "graded" => Ok(Spacing::Graded),
            other => Err(Error::Domain(format!("unknown spacing '{other}'"))),
        }
    }
}

const GRADING: f64 = 3.0;

/// `ω_{N−1} = 2π^{N/2}/Γ(N/2)`, the area of the unit sphere in `ℝ^N`.
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    // Γ(N/2) by the half-integer recursion
    let half = dim as f64 / 2.0;
    let mut gamma = if dim.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if dim.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < half - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

/// Nodes `0 = r_0 < … < r_M = R_max` and quadrature data for the measure
/// `r^{N−1} dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    nodes: Vec<f64>,
    /// Node weights of the cubic rule for `∫ g(r) r^{N−1} dr`.
    weights: Vec<f64>,
    /// `∫ φ_i(r) r^{N−1} dr` for the hat function `φ_i` of node `i`.
    lumped_mass: Vec<f64>,
    /// `∫_{r_i}^{r_{i+1}} r^{N−1} dr`.
    cell_measure: Vec<f64>,
    surface_area: f64,
}

/// Integrates, cell by cell, the cubic through the four nearest nodes
/// against `r^{N−1}`; the second cell uses nodes 1 to 4 and the last cell
/// the four last nodes. On the first
/// cell `g` is taken as the even quadratic `g_0 + (g_1 − g_0) r²/r_1²`,
/// which keeps the origin weight positive.
fn cubic_weights(dim: usize, nodes: &[f64]) -> Vec<f64> {
    let last = nodes.len() - 1;
    let (gx, gw) = gauss_legendre(dim.div_ceil(2) + 2);
    let k = dim as i32 - 1;
    let mut weights = vec![0.0; nodes.len()];
    for c in 0..last {
        let (a, b) = (nodes[c], nodes[c + 1]);
        // the second cell avoids node 0, whose basis function is negative there
        let first = if c == 1 { 1 } else { c.saturating_sub(1).min(last - 3) };
        let stencil: [(usize, f64); 4] = std::array::from_fn(|j| (first + j, nodes[first + j]));
        for (&z, &w) in gx.iter().zip(&gw) {
            let r = a + (b - a) * 0.5 * (z + 1.0);
            let rk = r.powi(k) * w * 0.5 * (b - a);
            if c == 0 {
                let s = (r / b).powi(2);
                weights[0] += (1.0 - s) * rk;
                weights[1] += s * rk;
                continue;
            }
            for (j, &(node, xj)) in stencil.iter().enumerate() {
                let basis: f64 = stencil
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, &(_, xi))| (r - xi) / (xj - xi))
                    .product();
                weights[node] += basis * rk;
            }
        }
    }
    weights
}

impl RadialGrid {
    pub fn new(dim: usize, r_max: f64, cells: usize, spacing: Spacing) -> Result<Arc<Self>> {
        if dim < 2 {
            return Err(Error::Grid(format!("dimension must be >= 2, got {dim}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::Grid(format!("R_max must be positive, got {r_max}")));
        }
        if cells < 16 {
            return Err(Error::Grid(format!("need at least 16 cells, got {cells}")));
        }
        let m = cells as f64;
        let nodes: Vec<f64> = (0..=cells)
            .map(|i| match spacing {
                Spacing::Uniform => r_max * i as f64 / m,
                Spacing::Graded => r_max * (GRADING * i as f64 / m).sinh() / GRADING.sinh(),
            })
            .collect();
        Self::from_nodes(dim, nodes)
    }

    /// Builds a grid from explicit nodes; the first must be 0.
    pub fn from_nodes(dim: usize, nodes: Vec<f64>) -> Result<Arc<Self>> {
        if dim < 2 {
            return Err(Error::Grid(format!("dimension must be >= 2, got {dim}")));
        }
        if nodes.len() < 3 {
            return Err(Error::Grid("need at least three nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::Grid(format!("first node must be 0, got {}", nodes[0])));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Grid("nodes must be finite and strictly increasing".into()));
        }
        let last = nodes.len() - 1;
        let (gx, gw) = gauss_legendre(dim.div_ceil(2) + 1);
        let k = dim as i32 - 1;
        let mut lumped_mass = vec![0.0; nodes.len()];
        let mut cell_measure = Vec::with_capacity(last);
        for c in 0..last {
            let (a, b) = (nodes[c], nodes[c + 1]);
            let h = b - a;
            let (mut left, mut right) = (0.0, 0.0);
            for (&z, &w) in gx.iter().zip(&gw) {
                let s = 0.5 * (z + 1.0);
                let r = a + h * s;
                let rk = r.powi(k) * w * 0.5 * h;
                left += (1.0 - s) * rk;
                right += s * rk;
            }
            lumped_mass[c] += left;
            lumped_mass[c + 1] += right;
            cell_measure.push(left + right);
        }
        let weights = if nodes.len() >= 5 { cubic_weights(dim, &nodes) } else { lumped_mass.clone() };
        Ok(Arc::new(RadialGrid {
            dim,
            nodes,
            weights,
            lumped_mass,
            cell_measure,
            surface_area: sphere_area(dim),
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node weights for `∫₀^{R_max} g(r) r^{N−1} dr`, fourth order for
    /// smooth even `g`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ φ_i r^{N−1} dr` for the piecewise-linear hat functions: the
    /// lumped mass matrix, second order and strictly positive.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped_mass
    }

    pub fn cell_measure(&self) -> &[f64] {
        &self.cell_measure
    }

    pub fn surface_area(&self) -> f64 {
        self.surface_area
    }

    /// `∫₀^{R_max} g(r) r^{N−1} dr` for nodal values `g`.
    pub fn integrate(&self, g: &[f64]) -> f64 {
        self.weights.iter().zip(g).map(|(w, v)| w * v).sum()
    }

    /// `∫_{ℝ^N} g` for a radial `g` given by nodal values.
    pub fn integrate_volume(&self, g: &[f64]) -> f64 {
        self.surface_area * self.integrate(g)
    }

    /// Largest cell width.
    pub fn max_step(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Nodal values of a radial function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite grid value {v}")));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        GridFunction {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        self.map(|v| lambda * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.nodes() != other.grid.nodes() {
            return Err(Error::Grid("grid functions live on different grids".into()));
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at an arbitrary radius by monotone cubic interpolation; zero
    /// beyond `R_max`.
    pub fn eval_at(&self, r: f64) -> f64 {
        self.interpolator().eval(r)
    }

    pub fn interpolator(&self) -> Interpolator<'_> {
        Interpolator {
            nodes: self.grid.nodes(),
            values: &self.values,
            slopes: pchip_slopes(self.grid.nodes(), &self.values),
        }
    }

    /// True when the values never increase with `r`.
    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Monotone piecewise-cubic interpolant of a [`GridFunction`].
pub struct Interpolator<'a> {
    nodes: &'a [f64],
    values: &'a [f64],
    slopes: Vec<f64>,
}

impl Interpolator<'_> {
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let last = self.nodes.len() - 1;
        if r > self.nodes[last] {
            return 0.0;
        }
        let i = self.nodes.partition_point(|&x| x <= r).clamp(1, last) - 1;
        hermite(
            self.nodes[i],
            self.nodes[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            r,
        )
        .0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_moments_are_exact() {
        for spacing in [Spacing::Uniform, Spacing::Graded] {
            let g = RadialGrid::new(3, 1.0, 37, spacing).unwrap();
            let ones = vec![1.0; g.len()];
            assert!((g.integrate(&ones) - 1.0 / 3.0).abs() < 1e-15);
            assert!((g.integrate_volume(&ones) - 4.0 * PI / 3.0).abs() < 1e-14);
            let g2 = RadialGrid::new(2, 2.0, 16, spacing).unwrap();
            assert!((g2.integrate(&vec![1.0; g2.len()]) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_rule_is_positive_and_fourth_order() {
        for dim in 2..=4 {
            for spacing in [Spacing::Uniform, Spacing::Graded] {
                let g = RadialGrid::new(dim, 8.0, 64, spacing).unwrap();
                assert!(g.weights().iter().all(|&w| w >= 0.0), "{dim} {spacing:?} {:?}", &g.weights()[..4]);
                assert!(g.lumped_mass().iter().all(|&w| w > 0.0));
            }
            // ∫₀^∞ e^{−r²} r^{N−1} dr = Γ(N/2)/2
            let exact = [0.5, PI.sqrt() / 4.0, 0.5][dim - 2];
            let err = |cells: usize| {
                let g = RadialGrid::new(dim, 8.0, cells, Spacing::Uniform).unwrap();
                let v: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
                (g.integrate(&v) - exact).abs()
            };
            let ratio = err(100) / err(200);
            assert!(ratio > 12.0, "{dim}: {ratio} {}", err(100));
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(RadialGrid::new(1, 1.0, 32, Spacing::Uniform).is_err());
        assert!(RadialGrid::new(3, 0.0, 32, Spacing::Uniform).is_err());
        assert!(RadialGrid::new(3, 1.0, 8, Spacing::Uniform).is_err());
        assert!(RadialGrid::from_nodes(3, vec![0.0, 1.0, 1.0]).is_err());
        assert!(RadialGrid::from_nodes(3, vec![0.1, 1.0, 2.0]).is_err());
    }

    #[test]
    fn graded_nodes_cluster_at_origin() {
        let g = RadialGrid::new(3, 10.0, 100, Spacing::Graded).unwrap();
        let n = g.nodes();
        assert!(n[1] - n[0] < n[100] - n[99]);
        assert_eq!(n[100], 10.0);
    }

    #[test]
    fn interpolation_is_zero_outside() {
        let g = RadialGrid::new(3, 5.0, 200, Spacing::Uniform).unwrap();
        let u = GridFunction::from_fn(g, |r| (-r * r).exp());
        assert!((u.eval_at(1.013) - (-1.013f64 * 1.013).exp()).abs() < 1e-5);
        assert_eq!(u.eval_at(6.0), 0.0);
    }
}
