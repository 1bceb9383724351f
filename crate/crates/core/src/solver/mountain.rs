use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::energy::{energy, gradient, hessian, Tridiagonal};
use super::{ProblemSpec, SolverConfig, EPS_REG};
use crate::error::{Error, Result};
use crate::radial::{sobolev_norm, GridFunction};

const MAX_DOUBLINGS: usize = 60;
const ARMIJO_C1: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_TRIES: usize = 60;
/// Newton polishing starts once the residual has dropped by this factor or
/// the level has settled to this relative change per step.
const NEWTON_SWITCH: f64 = 1e-1;
const LEVEL_SETTLED: f64 = 1e-9;
/// Newton steps may move the energy by at most this fraction of the level.
const NEWTON_LEVEL_DRIFT: f64 = 0.1;
const NEWTON_TRIES: usize = 30;
/// Descent steps to take after a failed Newton attempt before retrying.
const NEWTON_COOLDOWN: usize = 25;

/// Gaussian bump `exp(−(r/w)²)` with `u(R_max) = 0`, scaled to unit
/// Orlicz-Sobolev norm. `w = 1` for seed 0; other seeds draw `w` from
/// `[0.8, 1.25]`.
pub fn unit_bump(p: &ProblemSpec, seed: u64) -> Result<GridFunction> {
    let w = if seed == 0 {
        1.0
    } else {
        ChaCha8Rng::seed_from_u64(seed).gen_range(0.8..1.25)
    };
    let grid = p.grid().clone();
    let last = grid.len() - 1;
    let mut values: Vec<f64> = grid.nodes().iter().map(|&r| (-(r / w).powi(2)).exp()).collect();
    values[last] = 0.0;
    let u = GridFunction::new(grid, values)?;
    let norm = sobolev_norm(p.nf(), &u, Some(p.potential()))?;
    Ok(u.scaled(1.0 / norm))
}

/// Doubles `t` from 1 until `J(tφ) < 0`.
pub fn find_endpoint(p: &ProblemSpec, phi: &GridFunction) -> Result<(f64, GridFunction)> {
    if phi.is_zero() {
        return Err(Error::Precondition("find_endpoint needs φ ≠ 0".into()));
    }
    let mut t = 1.0;
    for _ in 0..=MAX_DOUBLINGS {
        let e = phi.scaled(t);
        if energy(p, &e)? < 0.0 {
            return Ok((t, e));
        }
        t *= 2.0;
    }
    Err(Error::Geometry(format!(
        "J(tφ) stayed nonnegative up to t = 2^{MAX_DOUBLINGS}; check θ and the nonlinearity"
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NehariProjection {
    pub u: GridFunction,
    /// The scale `t`, or 1 when no sign change was found.
    pub t: f64,
    pub found: bool,
}

/// Scales `u` onto the Nehari set `⟨J'(tu), tu⟩ = 0` by bisection in `t`.
pub fn nehari_project(p: &ProblemSpec, u: &GridFunction) -> Result<NehariProjection> {
    if u.is_zero() {
        return Err(Error::Precondition("nehari_project needs u ≠ 0".into()));
    }
    let dd = |t: f64| -> Result<f64> {
        let g = gradient(p, &u.scaled(t))?;
        Ok(g.iter().zip(u.values()).map(|(g, v)| g * v).sum())
    };
    let unchanged = NehariProjection {
        u: u.clone(),
        t: 1.0,
        found: false,
    };
    let mut hi = 1.0;
    let mut n = 0;
    while dd(hi)? >= 0.0 {
        hi *= 2.0;
        n += 1;
        if n > MAX_DOUBLINGS {
            return Ok(unchanged);
        }
    }
    let mut lo = hi;
    n = 0;
    loop {
        lo *= 0.5;
        let v = dd(lo)?;
        if v > 0.0 {
            break;
        }
        n += 1;
        if n > 200 || v == 0.0 && lo < f64::MIN_POSITIVE * 1e10 {
            return Ok(unchanged);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * mid {
            break;
        }
        if dd(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(NehariProjection {
        u: u.scaled(t),
        t,
        found: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MountainPassReport {
    #[serde(skip)]
    pub u: GridFunction,
    /// Mountain-pass level estimate `J(u)`.
    pub c: f64,
    /// Sup-norm of the strong residual over the free nodes.
    pub residual_norm: f64,
    pub path_energies: Vec<f64>,
    pub iterations: usize,
    pub newton_steps: usize,
    pub endpoint_scale: f64,
    pub converged: bool,
    pub u_at_origin: f64,
    /// Cutoff used for `A''` near zero arguments.
    pub eps_reg: f64,
}

/// Mass-and-stiffness matrix `ω(K + M)` on the free nodes, the metric of the
/// descent direction.
fn h1_metric(p: &ProblemSpec) -> Tridiagonal {
    let grid = p.grid();
    let omega = grid.surface_area();
    let r = grid.nodes();
    let mut diag: Vec<f64> = grid.lumped_mass().iter().map(|q| omega * q).collect();
    let mut off = Vec::with_capacity(diag.len() - 1);
    for (c, &mu) in grid.cell_measure().iter().enumerate() {
        let h = r[c + 1] - r[c];
        let k = omega * mu / (h * h);
        diag[c] += k;
        diag[c + 1] += k;
        off.push(-k);
    }
    Tridiagonal {
        sub: off.clone(),
        diag,
        sup: off,
    }
    .without_last()
}

struct Solver<'a> {
    p: &'a ProblemSpec,
    metric: Tridiagonal,
    /// `ω q_i` on the free nodes.
    mass: Vec<f64>,
    free: usize,
}

impl Solver<'_> {
    fn func(&self, v: Vec<f64>) -> Result<GridFunction> {
        GridFunction::new(self.p.grid().clone(), v)
    }

    fn energy(&self, v: &[f64]) -> Result<f64> {
        energy(self.p, &self.func(v.to_vec())?)
    }

    /// Gradient on the free nodes and the sup of the strong residual.
    fn gradient(&self, v: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut g = gradient(self.p, &self.func(v.to_vec())?)?;
        g.truncate(self.free);
        let res = g.iter().zip(&self.mass).fold(0.0, |m: f64, (g, q)| m.max((g / q).abs()));
        Ok((g, res))
    }

    fn metric_norm(&self, x: &[f64]) -> f64 {
        let sx = self.metric.apply(&x[..self.free]);
        sx.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    /// One preconditioned descent step from the path peak `v` with the path
    /// tangent `tau` projected out. The Armijo test is applied to the maximum
    /// of the re-laid path, so an accepted step lowers the path maximum.
    /// Returns the new peak and its energy.
    fn descend(&self, v: &[f64], j: f64, g: &[f64], tau: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
        let mut d: Vec<f64> = self.metric.solve(g)?.into_iter().map(|x| -x).collect();
        let tt = self.metric_norm(tau).powi(2);
        if tt > 0.0 {
            // ⟨d, τ⟩_S = −gᵀτ since d = −S⁻¹g
            let coef = -g.iter().zip(tau).map(|(a, b)| a * b).sum::<f64>() / tt;
            for (di, ti) in d.iter_mut().zip(tau) {
                *di -= coef * ti;
            }
        }
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            return Ok(None);
        }
        let mut alpha = 1.0;
        for _ in 0..ARMIJO_TRIES {
            let mut cand = v.to_vec();
            for (c, di) in cand.iter_mut().zip(&d) {
                *c += alpha * di;
            }
            if let Ok((peak, jc)) = self.project(&cand) {
                if jc <= j + ARMIJO_C1 * alpha * slope {
                    return Ok(Some((peak, jc)));
                }
            }
            alpha *= ARMIJO_SHRINK;
        }
        Ok(None)
    }

    /// A damped Newton step on the free nodes, accepted when it lowers the
    /// residual and keeps the energy near the level `j`.
    fn newton(&self, v: &[f64], j: f64, g: &[f64], res: f64) -> Result<Option<(Vec<f64>, f64)>> {
        let h = hessian(self.p, &self.func(v.to_vec())?)?.without_last();
        let step = match h.solve(g) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        let mut alpha = 1.0;
        for _ in 0..NEWTON_TRIES {
            let mut cand = v.to_vec();
            for (c, s) in cand.iter_mut().zip(&step) {
                *c -= alpha * s;
            }
            if let (Ok((_, r)), Ok(jc)) = (self.gradient(&cand), self.energy(&cand)) {
                if r < res && (jc - j).abs() <= NEWTON_LEVEL_DRIFT * j.abs() {
                    return Ok(Some((cand, jc)));
                }
            }
            alpha *= 0.5;
        }
        Ok(None)
    }
}

impl Solver<'_> {
    /// `h(t) = ⟨J'(tw), w⟩` and `h'(t)`.
    fn ray_slope(&self, w: &[f64], t: f64) -> Result<(f64, f64)> {
        let tw = self.func(w.iter().map(|x| t * x).collect())?;
        let g = gradient(self.p, &tw)?;
        let hw = hessian(self.p, &tw)?.apply(w);
        let dot = |a: &[f64]| a.iter().zip(w).map(|(x, y)| x * y).sum::<f64>();
        Ok((dot(&g), dot(&hw)))
    }

    /// The maximizer of `t ↦ J(tw)` over `t > 0`, by a bracketed Newton
    /// iteration on `h(t) = 0` started from `t = 1`.
    fn ray_peak(&self, w: &[f64]) -> Result<Option<f64>> {
        let (mut lo, mut hi) = (1.0, 1.0);
        let h1 = self.ray_slope(w, 1.0)?.0;
        if h1 > 0.0 {
            for _ in 0..=MAX_DOUBLINGS {
                hi *= 1.5;
                if self.ray_slope(w, hi)?.0 <= 0.0 {
                    break;
                }
                lo = hi;
            }
        } else {
            for _ in 0..=MAX_DOUBLINGS {
                lo /= 1.5;
                if self.ray_slope(w, lo)?.0 > 0.0 {
                    break;
                }
                hi = lo;
            }
        }
        if !(self.ray_slope(w, lo)?.0 > 0.0 && self.ray_slope(w, hi)?.0 <= 0.0) {
            return Ok(None);
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (h, dh) = self.ray_slope(w, t)?;
            if h > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let newton = t - h / dh;
            let next = if dh < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let done = (next - t).abs() <= 1e-15 * t || hi - lo <= 1e-15 * t;
            t = next;
            if done {
                break;
            }
        }
        Ok(Some(t))
    }

    /// `tw` at the ray maximum, or a geometry error when `J(tw)` has no
    /// positive interior maximum.
    fn project(&self, w: &[f64]) -> Result<(Vec<f64>, f64)> {
        let t = self.ray_peak(w)?.ok_or_else(|| {
            Error::Geometry("J(tw) has no interior maximum along the current path".into())
        })?;
        let u: Vec<f64> = w.iter().map(|x| t * x).collect();
        let j = self.energy(&u)?;
        if !(j > 0.0) {
            return Err(Error::Geometry(format!("path maximum collapsed to J = {j}")));
        }
        Ok((u, j))
    }
}

/// Mountain-pass search by path deformation.
///
/// The path is the segment from 0 through the current peak `u` to the first
/// scale `t_e u` with negative energy. The highest point of the path is found
/// by a one-dimensional Newton solve along the segment, then moved along the
/// `H¹`-preconditioned negative gradient with the path tangent removed; the
/// path is re-laid through the moved point. Close to the saddle, damped
/// Newton steps on the peak finish the solve.
pub fn mountain_pass_solve(p: &ProblemSpec, cfg: &SolverConfig) -> Result<MountainPassReport> {
    if cfg.path_points < 4 {
        return Err(Error::Precondition(format!("need at least 4 path segments, got {}", cfg.path_points)));
    }
    let grid = p.grid();
    let omega = grid.surface_area();
    let free = grid.len() - 1;
    let s = Solver {
        p,
        metric: h1_metric(p),
        mass: grid.lumped_mass()[..free].iter().map(|q| omega * q).collect(),
        free,
    };

    let phi = unit_bump(p, cfg.seed)?;
    find_endpoint(p, &phi)?;
    let (mut u, mut j) = s.project(phi.values())?;

    let mut iterations = 0;
    let mut newton_steps = 0;
    let mut cooldown = 0;
    let mut first_residual = None;
    let mut settled = false;
    let (converged, residual) = loop {
        let (g, res) = s.gradient(&u)?;
        let res0 = *first_residual.get_or_insert(res);
        if res < cfg.tol {
            break (true, res);
        }
        if iterations >= cfg.max_iter {
            break (false, res);
        }
        iterations += 1;
        if cooldown == 0 && (res < NEWTON_SWITCH * res0 || settled) {
            if let Some((cand, jc)) = s.newton(&u, j, &g, res)? {
                j = jc;
                u = cand;
                newton_steps += 1;
                continue;
            }
            cooldown = NEWTON_COOLDOWN;
        }
        cooldown = cooldown.saturating_sub(1);
        let tau = u.clone();
        let previous = j;
        let Some((peak, jc)) = s.descend(&u, j, &g, &tau)? else {
            break (false, res);
        };
        (u, j) = (peak, jc);
        settled = (previous - j).abs() <= LEVEL_SETTLED * j.abs();
    };

    let u = s.func(u)?;
    let (t_e, _) = find_endpoint(p, &u)?;
    let segs = cfg.path_points;
    let k_mid = segs / 2;
    let path_energies = (0..=segs)
        .map(|k| {
            let t = if k <= k_mid {
                k as f64 / k_mid as f64
            } else {
                1.0 + (t_e - 1.0) * (k - k_mid) as f64 / (segs - k_mid) as f64
            };
            energy(p, &u.scaled(t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MountainPassReport {
        u_at_origin: u.values()[0],
        converged: converged && j > 0.0 && !u.is_zero(),
        u,
        c: j,
        residual_norm: residual,
        path_energies,
        iterations,
        newton_steps,
        endpoint_scale: t_e,
        eps_reg: EPS_REG,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunction::{NFunction, NFunctionSpec};
    use crate::radial::{PotentialSpec, RadialGrid, Spacing};
    use crate::solver::{energy_parts, NonlinearitySpec};

    fn cubic_problem(cells: usize, r_max: f64) -> ProblemSpec {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        let grid = RadialGrid::new(3, r_max, cells, Spacing::Uniform).unwrap();
        ProblemSpec::new(nf, PotentialSpec::constant(1.0), NonlinearitySpec::pure_power(4.0), grid).unwrap()
    }

    #[test]
    fn endpoint_and_bump() {
        let p = cubic_problem(400, 10.0);
        let phi = unit_bump(&p, 0).unwrap();
        assert!((sobolev_norm(p.nf(), &phi, Some(p.potential())).unwrap() - 1.0).abs() < 1e-9);
        let (t, e) = find_endpoint(&p, &phi).unwrap();
        assert!(energy(&p, &e).unwrap() < 0.0);
        assert!(t == 1.0 || energy(&p, &phi.scaled(t / 2.0)).unwrap() >= 0.0);
        assert!(find_endpoint(&p, &GridFunction::zeros(p.grid().clone())).is_err());
    }

    #[test]
    fn nehari_closed_form_for_quadratic_energy() {
        let p = cubic_problem(400, 10.0);
        let u = GridFunction::from_fn(p.grid().clone(), |r| (-r * r).exp());
        let parts = energy_parts(&p, &u).unwrap();
        // A = t² gives ⟨J'(tu), tu⟩ = 2t²(∫|∇u|² + ∫u²) − t⁴∫u⁴ and ∫F(u) = ∫u⁴/4
        let quartic = 4.0 * parts.nonlinear;
        let expect = (2.0 * (parts.gradient_modular + parts.potential_modular) / quartic).sqrt();
        let proj = nehari_project(&p, &u).unwrap();
        assert!(proj.found);
        assert!((proj.t - expect).abs() < 1e-12 * expect, "{} {expect}", proj.t);
        let again = nehari_project(&p, &u.scaled(7.0)).unwrap();
        for (a, b) in again.u.values().iter().zip(proj.u.values()) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn small_ground_state_converges() {
        let p = cubic_problem(400, 12.0);
        let cfg = SolverConfig {
            tol: 1e-8,
            ..SolverConfig::default()
        };
        let rep = mountain_pass_solve(&p, &cfg).unwrap();
        assert!(rep.converged, "{} {} {}", rep.residual_norm, rep.iterations, rep.u_at_origin);
        assert!(rep.c > 0.0 && rep.residual_norm < 1e-8);
        assert!(rep.u.values()[0] > 5.0 && rep.u.values()[0] < 7.0, "{}", rep.u.values()[0]);
    }
}
