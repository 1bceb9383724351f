//! Small numerical kernels shared by the other modules: safeguarded root
//! finding, Gauss-Legendre rules, cubic Hermite interpolation and a pivoted
//! tridiagonal solver.

use crate::error::{Error, Result};

/// Absolute + relative stopping tolerance for scalar root finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        // a fixed absolute floor would cap the relative accuracy of tiny roots
        Tolerance {
            abs: f64::MIN_POSITIVE,
            rel: 1e-10,
        }
    }
}

impl Tolerance {
    fn width(&self, x: f64) -> f64 {
        self.abs + self.rel * x.abs()
    }
}

/// Largest argument the bracket expansion will try before giving up.
pub const OVERFLOW_GUARD: f64 = 1e300;

/// Solves `f(t) = target` for a continuous, strictly increasing `f` on
/// `[0, inf)` with `f(0) <= target`. `f` returns `(value, derivative)`.
///
/// Brackets by doubling from `[0, 1]`, then runs Newton steps that fall back
/// to bisection whenever the Newton iterate leaves the bracket.
pub fn solve_increasing<F>(f: F, target: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if !target.is_finite() {
        return Err(Error::Domain(format!("non-finite target {target}")));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        let (fh, _) = f(hi);
        if fh >= target {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > OVERFLOW_GUARD || !fh.is_finite() {
            return Err(Error::Saturation(format!(
                "no bracket for target {target:e} below t = {hi:e}"
            )));
        }
    }
    // shrink the lower end first so tiny targets start Newton close to the root
    if lo == 0.0 {
        let mut probe = hi;
        for _ in 0..2000 {
            let next = probe * 0.5;
            if next == 0.0 || f(next).0 < target {
                lo = next;
                break;
            }
            probe = next;
            hi = next;
        }
    }
    safeguarded_newton(f, target, lo, hi, tol)
}

/// Newton iteration safeguarded by the bracket `[lo, hi]` on which
/// `f(lo) <= target <= f(hi)` for increasing `f`.
pub fn safeguarded_newton<F>(f: F, target: f64, mut lo: f64, mut hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..500 {
        let g = fx - target;
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx > 0.0 && dfx.is_finite() && {
            let xn = x - g / dfx;
            xn > lo && xn < hi && (2.0 * g).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = g / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        let done = dx.abs() <= tol.width(x) || hi - lo <= tol.width(x) * 1e-3;
        let (a, b) = f(x);
        fx = a;
        dfx = b;
        if done {
            // one more step: Newton is quadratic here, so this is nearly free accuracy
            if dfx > 0.0 && dfx.is_finite() {
                let xn = x - (fx - target) / dfx;
                if xn >= lo && xn <= hi {
                    return Ok(xn);
                }
            }
            return Ok(x);
        }
    }
    Err(Error::Numeric(format!(
        "root finder did not converge for target {target:e}"
    )))
}

/// Bisection for a sign change of `g` on `[lo, hi]`; returns the midpoint
/// of the final bracket.
pub fn bisect<G>(g: G, mut lo: f64, mut hi: f64, rel_tol: f64, max_iter: usize) -> f64
where
    G: Fn(f64) -> f64,
{
    let glo = g(lo);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let gm = g(mid);
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cubic Hermite interpolation on one interval.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, deriv)
}

/// Fritsch-Carlson limited slopes for monotone piecewise cubic interpolation.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, y.len());
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > (3.0 * del0).abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Solves a tridiagonal system `A x = rhs` with partial pivoting.
///
/// `sub[i]` is `A[i+1][i]`, `diag[i]` is `A[i][i]`, `sup[i]` is `A[i][i+1]`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert!(sub.len() + 1 == n && sup.len() + 1 == n && rhs.len() == n);
    // rows carry up to two super-diagonals after pivoting
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    du.push(0.0);
    let mut du2 = vec![0.0; n];
    let mut dl = sub.to_vec();
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if dl[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            du2[i] = du[i + 1];
            du[i + 1] *= -fact;
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
            dl[i] = fact;
        } else {
            if d[i] == 0.0 {
                return Err(Error::Numeric("singular tridiagonal system".into()));
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = fact;
            du2[i] = 0.0;
        }
    }
    if d[n - 1] == 0.0 {
        return Err(Error::Numeric("singular tridiagonal system".into()));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}
