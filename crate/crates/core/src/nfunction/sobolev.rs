use super::{NFunction, OrliczFunction};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, hermite};

/// Log-range of the tabulation variable `τ = A^{-1}(s)`.
const TAU_MIN: f64 = 1e-12;
const TAU_MAX: f64 = 1e12;
const CELLS_PER_DECADE: usize = 100;
const GAUSS_POINTS: usize = 8;

/// A value read from the `A*` table, flagged when it came from the power-law
/// continuation beyond the tabulated range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarValue {
    pub value: f64,
    pub extrapolated: bool,
}

/// Tabulated Sobolev conjugate `A*` of an N-function in dimension `N`,
/// defined through its inverse `G(s) = ∫₀^s A^{-1}(σ) σ^{-(N+1)/N} dσ`.
///
/// The integral is taken in the variable `x = ln τ` with `σ = A(τ)`, where it
/// reads `∫ τ² a(τ) A(τ)^{-1/N-1} τ dx`; the integrand decays geometrically
/// as `x → −∞`, so a uniform grid in `x` is a graded grid in `σ`. The part
/// below the table is integrated in closed form from the local power law.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevConjugate {
    base: NFunction,
    dim: usize,
    l_star: f64,
    m_star: f64,
    ln_t: Vec<f64>,
    ln_s: Vec<f64>,
    /// d ln s / d ln t at each node, equal to `a*(t)t²/A*(t)`.
    slope: Vec<f64>,
}

fn star_exponent(e: f64, n: f64) -> f64 {
    if e < n {
        e * n / (n - e)
    } else {
        f64::INFINITY
    }
}

impl SobolevConjugate {
    pub fn build(base: &NFunction, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::param("N >= 2", dim as f64));
        }
        let n = dim as f64;
        let e0 = base.growth_ratio(TAU_MIN);
        if e0 >= n {
            return Err(Error::Divergence(format!(
                "∫₀ A^{{-1}}(s)/s^((N+1)/N) ds diverges: A ~ t^{e0:.4} near 0 with N = {dim} (needs exponent < N)"
            )));
        }
        let e_inf = base.growth_ratio(TAU_MAX);
        if e_inf > n * (1.0 + 1e-9) {
            return Err(Error::Divergence(format!(
                "∫^∞ A^{{-1}}(s)/s^((N+1)/N) ds converges (A ~ t^{e_inf:.4} at infinity, N = {dim}); A* is not an N-function"
            )));
        }

        let power = 1.0 + 1.0 / n;
        let integrand = |x: f64| -> f64 {
            let tau = x.exp();
            let a = base.eval(tau);
            (2.0 * x + base.flux(tau).ln() - power * a.ln()).exp()
        };

        let (xa, xb) = (TAU_MIN.ln(), TAU_MAX.ln());
        let cells = (CELLS_PER_DECADE as f64 * (TAU_MAX / TAU_MIN).log10()).round() as usize;
        let hx = (xb - xa) / cells as f64;
        let (gx, gw) = gauss_legendre(GAUSS_POINTS);

        let mut ln_t = Vec::with_capacity(cells + 1);
        let mut ln_s = Vec::with_capacity(cells + 1);
        let mut slope = Vec::with_capacity(cells + 1);

        let mut g = integrand(xa) / (1.0 - e0 / n);
        for j in 0..=cells {
            let x = xa + hx * j as f64;
            if j > 0 {
                let x0 = x - hx;
                let cell: f64 = gx
                    .iter()
                    .zip(&gw)
                    .map(|(&z, &w)| w * integrand(x0 + 0.5 * hx * (z + 1.0)))
                    .sum();
                g += 0.5 * hx * cell;
            }
            let tau = x.exp();
            let s = base.eval(tau);
            if !(g.is_finite() && s.is_finite() && s > 0.0) {
                return Err(Error::Consistency(format!("non-finite table entry at τ = {tau:e}")));
            }
            ln_t.push(g.ln());
            ln_s.push(s.ln());
            slope.push(g * s.powf(1.0 / n) / tau);
        }
        if ln_t.windows(2).any(|w| w[1] <= w[0]) || ln_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Consistency("Sobolev conjugate table is not strictly monotone".into()));
        }
        Ok(SobolevConjugate {
            base: base.clone(),
            dim,
            l_star: star_exponent(base.l(), n),
            m_star: star_exponent(base.m(), n),
            ln_t,
            ln_s,
            slope,
        })
    }

    pub fn base(&self) -> &NFunction {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `l* = lN/(N−l)`.
    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    /// `m* = mN/(N−m)`, infinite when `m >= N`.
    pub fn m_star(&self) -> f64 {
        self.m_star
    }

    /// Range of `t` covered by the table.
    pub fn table_range(&self) -> (f64, f64) {
        (self.ln_t[0].exp(), self.ln_t[self.ln_t.len() - 1].exp())
    }

    /// Tabulated `(t, A*(t))` pairs.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ln_t.iter().zip(&self.ln_s).map(|(a, b)| (a.exp(), b.exp()))
    }

    fn lookup(xs: &[f64], ys: &[f64], d: impl Fn(usize) -> f64, x: f64) -> (f64, bool) {
        let last = xs.len() - 1;
        if x < xs[0] {
            return (ys[0] + d(0) * (x - xs[0]), true);
        }
        if x > xs[last] {
            return (ys[last] + d(last) * (x - xs[last]), true);
        }
        let i = xs.partition_point(|&v| v <= x).clamp(1, last) - 1;
        let (y, _) = hermite(xs[i], xs[i + 1], ys[i], ys[i + 1], d(i), d(i + 1), x);
        (y, false)
    }

    /// `A*(t)`. Outside the table the value follows the power law whose
    /// exponent is the end-point value of `a*(t)t²/A*(t)`.
    pub fn eval(&self, t: f64) -> StarValue {
        let t = t.abs();
        if t == 0.0 {
            return StarValue {
                value: 0.0,
                extrapolated: false,
            };
        }
        let (ln_s, extrapolated) = Self::lookup(&self.ln_t, &self.ln_s, |i| self.slope[i], t.ln());
        StarValue {
            value: ln_s.exp(),
            extrapolated,
        }
    }

    /// `G(s) = A*^{-1}(s)`.
    pub fn inverse(&self, s: f64) -> Result<StarValue> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::Domain(format!("A*^-1 needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(StarValue {
                value: 0.0,
                extrapolated: false,
            });
        }
        let (ln_t, extrapolated) = Self::lookup(&self.ln_s, &self.ln_t, |i| 1.0 / self.slope[i], s.ln());
        Ok(StarValue {
            value: ln_t.exp(),
            extrapolated,
        })
    }

    /// `(A*)'(t) = a*(t)t`, computed from the inverse relation as
    /// `A*(t)^{(N+1)/N} / A^{-1}(A*(t))`.
    pub fn derivative(&self, t: f64) -> Result<StarValue> {
        let t = t.abs();
        let star = self.eval(t);
        if star.value == 0.0 {
            return Ok(star);
        }
        if star.extrapolated {
            // derivative of the continuation itself
            let end = if t < self.table_range().0 { 0 } else { self.slope.len() - 1 };
            return Ok(StarValue {
                value: self.slope[end] * star.value / t,
                extrapolated: true,
            });
        }
        let n = self.dim as f64;
        let tau = self.base.inverse(star.value)?;
        Ok(StarValue {
            value: star.value.powf(1.0 + 1.0 / n) / tau,
            extrapolated: star.extrapolated,
        })
    }

    /// `a*(|t|)t²/A*(t)`, which lies in `[l*, m*]`.
    pub fn growth_ratio(&self, t: f64) -> Result<StarValue> {
        let star = self.eval(t);
        let d = self.derivative(t)?;
        Ok(StarValue {
            value: d.value * t.abs() / star.value,
            extrapolated: star.extrapolated,
        })
    }
}

impl OrliczFunction for SobolevConjugate {
    fn value(&self, t: f64) -> f64 {
        self.eval(t).value
    }
    fn flux(&self, t: f64) -> f64 {
        self.derivative(t).map(|v| v.value).unwrap_or(f64::NAN)
    }
    fn exponents(&self) -> (f64, f64) {
        (self.l_star, self.m_star)
    }
}
