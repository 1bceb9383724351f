use serde::{Deserialize, Serialize};

use super::ProblemSpec;
use crate::error::{Error, Result};
use crate::nfunction::Family;
use crate::radial::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootingConfig {
    /// Initial `(undershoot, overshoot)` values of `u(0)`; found by a
    /// doubling scan from 1 when absent.
    pub bracket: Option<(f64, f64)>,
    /// Largest RK4 step.
    pub max_step: f64,
    /// Relative width at which bisection on `u(0)` stops.
    pub rel_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            bracket: None,
            max_step: 1e-3,
            rel_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    /// The decaying profile on the problem grid, set to 0 beyond
    /// `resolved_radius`.
    pub profile: GridFunction,
    pub u0: f64,
    pub bracket: (f64, f64),
    /// Radius up to which the two bracketing trajectories agree.
    pub resolved_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    /// `u` changes sign: `u(0)` too large.
    Overshoot,
    /// `u'` turns positive while `u > 0`: `u(0)` too small.
    Undershoot,
}

struct Ode {
    p: f64,
    dim: f64,
    v: f64,
    f: super::NonlinearitySpec,
}

impl Ode {
    fn a_prime(&self, t: f64) -> f64 {
        self.p * t.abs().powf(self.p - 1.0).copysign(t)
    }

    /// `u'` from the flux `w = p|u'|^{p−2}u'`.
    fn slope(&self, w: f64) -> f64 {
        (w.abs() / self.p).powf(1.0 / (self.p - 1.0)).copysign(w)
    }

    fn rhs(&self, r: f64, u: f64, w: f64) -> (f64, f64) {
        (self.slope(w), -(self.dim - 1.0) * w / r + self.v * self.a_prime(u) - self.f.f(u))
    }

    fn rk4(&self, r: f64, u: f64, w: f64, h: f64) -> (f64, f64) {
        let (k1u, k1w) = self.rhs(r, u, w);
        let (k2u, k2w) = self.rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w);
        let (k3u, k3w) = self.rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w);
        let (k4u, k4w) = self.rhs(r + h, u + h * k3u, w + h * k3w);
        (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
        )
    }

    /// Integrates from `r = 0` with `u(0) = u0`, recording `u` at the nodes
    /// until the first sign event.
    fn shoot(&self, u0: f64, nodes: &[f64], max_step: f64) -> (Option<Outcome>, Vec<f64>) {
        let mut values = vec![u0];
        // regular start: w ≈ k r with k = (V A'(u0) − f(u0))/N
        let k = (self.v * self.a_prime(u0) - self.f.f(u0)) / self.dim;
        let r0 = nodes[1] * 1e-3;
        let e = self.p / (self.p - 1.0);
        let mut u = u0 + (k.abs() / self.p).powf(1.0 / (self.p - 1.0)).copysign(k) * r0.powf(e) / e;
        let mut w = k * r0;
        let mut r = r0;
        for &target in &nodes[1..] {
            let steps = ((target - r) / max_step).ceil().max(1.0) as usize;
            let h = (target - r) / steps as f64;
            for _ in 0..steps {
                (u, w) = self.rk4(r, u, w, h);
                r += h;
                if u < 0.0 || !u.is_finite() {
                    return (Some(Outcome::Overshoot), values);
                }
                if w > 0.0 {
                    return (Some(Outcome::Undershoot), values);
                }
            }
            r = target;
            values.push(u);
        }
        (None, values)
    }
}

/// Ground state of the radial Euler-Lagrange equation for `A = |t|^p` and a
/// constant potential, by shooting on `u(0)`:
/// `(r^{N−1} w)' = r^{N−1}(V A'(u) − f(u))` with `w = A'(u')`.
pub fn shooting_oracle(p: &ProblemSpec, cfg: &ShootingConfig) -> Result<ShootingResult> {
    let Family::Power { p: exponent } = p.nf().family() else {
        return Err(Error::Precondition("the shooting oracle needs the power family".into()));
    };
    if !p.potential().is_constant() {
        return Err(Error::Precondition("the shooting oracle needs a constant potential".into()));
    }
    let ode = Ode {
        p: exponent,
        dim: p.grid().dim() as f64,
        v: p.potential().v0(),
        f: *p.nonlinearity(),
    };
    let nodes = p.grid().nodes();
    let classify = |u0: f64| ode.shoot(u0, nodes, cfg.max_step).0.unwrap_or(Outcome::Undershoot);

    let (mut lo, mut hi) = match cfg.bracket {
        Some((lo, hi)) => {
            if classify(lo) != Outcome::Undershoot || classify(hi) != Outcome::Overshoot {
                return Err(Error::Oracle(format!("[{lo}, {hi}] does not bracket the ground state")));
            }
            (lo, hi)
        }
        None => {
            let mut a = 1.0;
            let up = classify(a) == Outcome::Undershoot;
            let mut found = None;
            for _ in 0..60 {
                let b = if up { a * 2.0 } else { a * 0.5 };
                if classify(b) != classify(a) {
                    found = Some(if up { (a, b) } else { (b, a) });
                    break;
                }
                a = b;
            }
            found.ok_or_else(|| Error::Oracle("no sign change of the shooting map in [2^-60, 2^60]".into()))?
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= cfg.rel_tol * hi || mid == lo || mid == hi {
            break;
        }
        match classify(mid) {
            Outcome::Undershoot => lo = mid,
            Outcome::Overshoot => hi = mid,
        }
    }

    let (_, a) = ode.shoot(lo, nodes, cfg.max_step);
    let (_, b) = ode.shoot(hi, nodes, cfg.max_step);
    let u0 = 0.5 * (lo + hi);
    let mut values = vec![0.0; nodes.len()];
    let mut resolved = 0;
    for i in 0..a.len().min(b.len()) {
        if (a[i] - b[i]).abs() > 1e-8 * u0 {
            break;
        }
        values[i] = 0.5 * (a[i] + b[i]);
        resolved = i;
    }
    Ok(ShootingResult {
        profile: GridFunction::new(p.grid().clone(), values)?,
        u0,
        bracket: (lo, hi),
        resolved_radius: nodes[resolved],
    })
}
