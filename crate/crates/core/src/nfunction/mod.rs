//! N-functions `A(t) = ∫₀^|t| a(s) s ds` from four closed-form families, with
//! their complementary (Legendre) functions, inverses, growth exponents and
//! the ξ sandwich functions.

mod conjugate;
mod sobolev;

pub use conjugate::ConjugateFunction;
pub use sobolev::{SobolevConjugate, StarValue};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{solve_increasing, Tolerance};

/// Anything that can act as the Young function of an Orlicz space: an even
/// convex `Φ` with known derivative and growth exponents `(l, m)` bounding
/// `tΦ'(t)/Φ(t)`.
pub trait OrliczFunction {
    /// `Φ(|t|)`.
    fn value(&self, t: f64) -> f64;
    /// `Φ'(t)` for `t >= 0`, i.e. `a(t)t` for an N-function.
    fn flux(&self, t: f64) -> f64;
    /// Lower and upper growth exponents. The upper one may be infinite.
    fn exponents(&self) -> (f64, f64);
}

/// The four builtin families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `|t|^p`
    Power { p: f64 },
    /// `|t|^p + |t|^q`
    PowerSum { p: f64, q: f64 },
    /// `(1 + t²)^γ − 1`
    Curvature { gamma: f64 },
    /// `|t|^p ln(1 + |t|)`
    PowerLog { p: f64 },
}

/// Serialized description of an N-function, optionally tied to a dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NFunctionSpec {
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Power,
    PowerSum,
    Curvature,
    PowerLog,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(FamilyKind::Power),
            "power_sum" => Ok(FamilyKind::PowerSum),
            "curvature" => Ok(FamilyKind::Curvature),
            "power_log" => Ok(FamilyKind::PowerLog),
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }
}

impl NFunctionSpec {
    pub fn power(p: f64) -> Self {
        Self::from_family(Family::Power { p })
    }

    pub fn power_sum(p: f64, q: f64) -> Self {
        Self::from_family(Family::PowerSum { p, q })
    }

    pub fn curvature(gamma: f64) -> Self {
        Self::from_family(Family::Curvature { gamma })
    }

    pub fn power_log(p: f64) -> Self {
        Self::from_family(Family::PowerLog { p })
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn from_family(family: Family) -> Self {
        let (kind, p, q, gamma) = match family {
            Family::Power { p } => (FamilyKind::Power, Some(p), None, None),
            Family::PowerSum { p, q } => (FamilyKind::PowerSum, Some(p), Some(q), None),
            Family::Curvature { gamma } => (FamilyKind::Curvature, None, None, Some(gamma)),
            Family::PowerLog { p } => (FamilyKind::PowerLog, Some(p), None, None),
        };
        NFunctionSpec {
            family: kind,
            p,
            q,
            gamma,
            dim: None,
        }
    }

    pub fn family(&self) -> Result<Family> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Domain(format!("family {:?} needs parameter '{name}'", self.family)))
        };
        Ok(match self.family {
            FamilyKind::Power => Family::Power { p: need(self.p, "p")? },
            FamilyKind::PowerSum => Family::PowerSum {
                p: need(self.p, "p")?,
                q: need(self.q, "q")?,
            },
            FamilyKind::Curvature => Family::Curvature {
                gamma: need(self.gamma, "gamma")?,
            },
            FamilyKind::PowerLog => Family::PowerLog { p: need(self.p, "p")? },
        })
    }

    /// Checks the dimension-coupled parameter ranges of the family
    /// (`p < N`, `q < pN/(N−p)`, `γ < N/(N−2)`, `p0 < p < N−1`) and returns
    /// the names of every violated constraint.
    pub fn dimension_violations(&self, dim: usize) -> Result<Vec<String>> {
        let n = dim as f64;
        let mut out = Vec::new();
        if dim < 2 {
            out.push("N >= 2".to_string());
            return Ok(out);
        }
        match self.family()? {
            Family::Power { p } => {
                if p >= n {
                    out.push(format!("power: p < N (p = {p}, N = {dim})"));
                }
            }
            Family::PowerSum { p, q } => {
                if q >= n {
                    out.push(format!("power_sum: q < N (q = {q}, N = {dim})"));
                }
                if p < n && q >= p * n / (n - p) {
                    out.push(format!("power_sum: q < pN/(N-p) (q = {q})"));
                }
            }
            Family::Curvature { gamma } => {
                if dim > 2 && gamma >= n / (n - 2.0) {
                    out.push(format!("curvature: gamma < N/(N-2) (gamma = {gamma})"));
                }
            }
            Family::PowerLog { p } => {
                let p0 = power_log_threshold(dim);
                if p <= p0 {
                    out.push(format!("power_log: p > p0 = {p0:.6} (p = {p})"));
                }
                if p >= n - 1.0 {
                    out.push(format!("power_log: p < N-1 (p = {p}, N = {dim})"));
                }
            }
        }
        Ok(out)
    }
}

/// `p0 = (−1 + √(1 + 4N)) / 2`, the lower end of the admissible range of the
/// logarithmic family.
pub fn power_log_threshold(dim: usize) -> f64 {
    (-1.0 + (1.0 + 4.0 * dim as f64).sqrt()) / 2.0
}

/// An N-function of one of the builtin families.
#[derive(Debug, Clone, PartialEq)]
pub struct NFunction {
    family: Family,
    lower: f64,
    upper: f64,
    delta2: f64,
    tol: Tolerance,
}

impl NFunction {
    /// Builds the N-function, checking the dimension-free constraints that
    /// make it satisfy the N-function axioms and `(a1)`, `(a2)`.
    pub fn build(spec: &NFunctionSpec) -> Result<Self> {
        let family = spec.family()?;
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} finite"), v))
            }
        };
        let (lower, upper) = match family {
            Family::Power { p } => {
                finite(p, "p")?;
                if p <= 1.0 {
                    return Err(Error::param("power: 1 < p", p));
                }
                (p, p)
            }
            Family::PowerSum { p, q } => {
                finite(p, "p")?;
                finite(q, "q")?;
                if p <= 1.0 {
                    return Err(Error::param("power_sum: 1 < p", p));
                }
                if q <= p {
                    return Err(Error::param("power_sum: p < q", q));
                }
                (p, q)
            }
            Family::Curvature { gamma } => {
                finite(gamma, "gamma")?;
                if gamma <= 1.0 {
                    return Err(Error::param("curvature: 1 < gamma", gamma));
                }
                (2.0, 2.0 * gamma)
            }
            Family::PowerLog { p } => {
                finite(p, "p")?;
                if p <= 1.0 {
                    return Err(Error::param("power_log: 1 < p", p));
                }
                (p, p + 1.0)
            }
        };
        if let Some(dim) = spec.dim {
            if dim < 2 {
                return Err(Error::param("N >= 2", dim as f64));
            }
        }
        Ok(NFunction {
            family,
            lower,
            upper,
            delta2: 2f64.powf(upper),
            tol: Tolerance::default(),
        })
    }

    /// Replaces the root-finding tolerance used by inversion and conjugation.
    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn spec(&self) -> NFunctionSpec {
        NFunctionSpec::from_family(self.family)
    }

    /// Lower growth exponent `l`.
    pub fn l(&self) -> f64 {
        self.lower
    }

    /// Upper growth exponent `m`.
    pub fn m(&self) -> f64 {
        self.upper
    }

    /// Δ2 constant `K = ξ1(2) = 2^m`.
    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    /// Exponent of `A` near zero (`A(t) ~ c t^e` as `t → 0`).
    pub fn exponent_at_zero(&self) -> f64 {
        match self.family {
            Family::Power { p } | Family::PowerSum { p, .. } => p,
            Family::Curvature { .. } => 2.0,
            Family::PowerLog { p } => p + 1.0,
        }
    }

    /// Exponent of `A` at infinity.
    pub fn exponent_at_infinity(&self) -> f64 {
        match self.family {
            Family::Power { p } => p,
            Family::PowerSum { q, .. } => q,
            Family::Curvature { gamma } => 2.0 * gamma,
            Family::PowerLog { p } => p,
        }
    }

    /// `A(t)`, even in `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Power { p } => t.powf(p),
            Family::PowerSum { p, q } => t.powf(p) + t.powf(q),
            Family::Curvature { gamma } => (gamma * (t * t).ln_1p()).exp_m1(),
            Family::PowerLog { p } => t.powf(p) * t.ln_1p(),
        }
    }

    /// Density `a(t)` for `t > 0`.
    pub fn density(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.family {
            Family::Curvature { gamma } => 2.0 * gamma * (1.0 + t * t).powf(gamma - 1.0),
            _ => self.flux(t) / t,
        }
    }

    /// `a(t)t = A'(t)` for `t >= 0`; strictly increasing by `(a1)`.
    pub fn flux(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Power { p } => p * t.powf(p - 1.0),
            Family::PowerSum { p, q } => p * t.powf(p - 1.0) + q * t.powf(q - 1.0),
            Family::Curvature { gamma } => 2.0 * gamma * t * (1.0 + t * t).powf(gamma - 1.0),
            Family::PowerLog { p } => p * t.powf(p - 1.0) * t.ln_1p() + t.powf(p) / (1.0 + t),
        }
    }

    /// `(a(t)t)' = A''(t)` for `t > 0`. May be infinite at `t = 0` when the
    /// exponent near zero is below 2.
    pub fn flux_derivative(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.family {
            Family::Power { p } => p * (p - 1.0) * t.powf(p - 2.0),
            Family::PowerSum { p, q } => p * (p - 1.0) * t.powf(p - 2.0) + q * (q - 1.0) * t.powf(q - 2.0),
            Family::Curvature { gamma } => {
                2.0 * gamma * (1.0 + t * t).powf(gamma - 2.0) * (1.0 + (2.0 * gamma - 1.0) * t * t)
            }
            Family::PowerLog { p } => {
                if t == 0.0 {
                    return if p + 1.0 > 2.0 { 0.0 } else { f64::INFINITY };
                }
                let l = t.ln_1p();
                p * (p - 1.0) * t.powf(p - 2.0) * l + 2.0 * p * t.powf(p - 1.0) / (1.0 + t)
                    - t.powf(p) / ((1.0 + t) * (1.0 + t))
            }
        }
    }

    /// `a(|t|)t² / A(t)`, the quantity bracketed by `(l, m)`.
    pub fn growth_ratio(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.family {
            Family::Power { p } => p,
            Family::PowerSum { p, q } => {
                // (p t^p + q t^q)/(t^p + t^q) written in the stable ratio w = t^(q-p)
                let w = t.powf(q - p);
                if w.is_infinite() {
                    q
                } else {
                    (p + q * w) / (1.0 + w)
                }
            }
            Family::Curvature { gamma } => {
                let s = t * t;
                2.0 * gamma * s * (1.0 + s).powf(gamma - 1.0) / (gamma * s.ln_1p()).exp_m1()
            }
            Family::PowerLog { p } => {
                let l = t.ln_1p();
                if l == 0.0 {
                    p + 1.0
                } else {
                    p + t / ((1.0 + t) * l)
                }
            }
        }
    }

    /// Inverse of `A` restricted to `[0, ∞)`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 || y.is_nan() {
            return Err(Error::Domain(format!("inverse_A needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let Family::Power { p } = self.family {
            return Ok(y.powf(1.0 / p));
        }
        solve_increasing(|t| (self.eval(t), self.flux(t)), y, self.tol)
    }

    /// Solves `a(t)t = s` for `t >= 0`; this is `Ã'(s)`.
    pub fn flux_inverse(&self, s: f64) -> Result<f64> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::Domain(format!("conjugate needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        solve_increasing(|t| (self.flux(t), self.flux_derivative(t)), s, self.tol)
    }

    /// Complementary function `Ã(s) = max_{t≥0} {st − A(t)}`, evaluated at the
    /// unique maximizer `a(t*)t* = s`.
    pub fn conjugate_eval(&self, s: f64) -> Result<f64> {
        let s = s.abs();
        if s == 0.0 {
            return Ok(0.0);
        }
        let t = self.flux_inverse(s)?;
        Ok((s * t - self.eval(t)).max(0.0))
    }

    pub fn conjugate(&self) -> ConjugateFunction {
        ConjugateFunction::new(self.clone())
    }

    /// Sobolev conjugate `A*` in dimension `dim`.
    pub fn sobolev_conjugate(&self, dim: usize) -> Result<SobolevConjugate> {
        SobolevConjugate::build(self, dim)
    }

    /// ξ0 or ξ1 for this function's `(l, m)`.
    pub fn xi(&self, kind: XiKind, rho: f64) -> f64 {
        xi(kind, rho, self.lower, self.upper)
    }
}

impl OrliczFunction for NFunction {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }
    fn flux(&self, t: f64) -> f64 {
        NFunction::flux(self, t)
    }
    fn exponents(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }
}

/// Lower (`min`) or upper (`max`) member of a ξ pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiKind {
    Lower,
    Upper,
}

/// `min(ρ^lo, ρ^hi)` or `max(ρ^lo, ρ^hi)`. An infinite `hi` is allowed.
pub fn xi(kind: XiKind, rho: f64, lo: f64, hi: f64) -> f64 {
    let a = rho.powf(lo);
    let b = rho.powf(hi);
    match kind {
        XiKind::Lower => a.min(b),
        XiKind::Upper => a.max(b),
    }
}

/// Inverse of `ξ` on `[0, ∞)`.
pub fn xi_inverse(kind: XiKind, y: f64, lo: f64, hi: f64) -> f64 {
    let a = y.powf(1.0 / lo);
    let b = y.powf(1.0 / hi);
    match kind {
        // inverse of the smaller function is the larger root
        XiKind::Lower => a.max(b),
        XiKind::Upper => a.min(b),
    }
}

/// `ξ0..ξ3` selected by index: 0/1 use `(l, m)`, 2/3 use `(l*, m*)`.
pub fn xi_indexed(index: u8, rho: f64, l: f64, m: f64, l_star: f64, m_star: f64) -> Result<f64> {
    match index {
        0 => Ok(xi(XiKind::Lower, rho, l, m)),
        1 => Ok(xi(XiKind::Upper, rho, l, m)),
        2 => Ok(xi(XiKind::Lower, rho, l_star, m_star)),
        3 => Ok(xi(XiKind::Upper, rho, l_star, m_star)),
        k => Err(Error::Domain(format!("xi index must be 0..=3, got {k}"))),
    }
}

/// Infimum and supremum of the growth ratio over the supplied samples.
pub fn growth_exponents(nf: &NFunction, samples: &[f64]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in samples {
        if t <= 0.0 {
            continue;
        }
        let a = nf.eval(t);
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Numeric(format!("invalid N-function: A({t:e}) = {a:e}")));
        }
        let r = nf.growth_ratio(t);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if lo > hi {
        return Err(Error::Domain("no positive samples".into()));
    }
    Ok((lo, hi))
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn power_two_is_quadratic() {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        assert_eq!(nf.eval(3.0), 9.0);
        assert_eq!(nf.density(1.7), 2.0);
        assert_eq!((nf.l(), nf.m()), (2.0, 2.0));
        assert_eq!(nf.delta2(), 4.0);
    }

    #[test]
    fn curvature_values_at_one() {
        let nf = NFunction::build(&NFunctionSpec::curvature(2.0)).unwrap();
        assert!(close(nf.eval(1.0), 3.0, 1e-15));
        assert!(close(nf.flux(1.0), 8.0, 1e-15));
        assert!(close(nf.inverse(3.0).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn power_log_exponents() {
        let nf = NFunction::build(&NFunctionSpec::power_log(2.6)).unwrap();
        assert_eq!((nf.l(), nf.m()), (2.6, 3.6));
        // brute-force limits of the ratio
        assert!(close(nf.growth_ratio(1e-9), 3.6, 1e-8));
        assert!((nf.growth_ratio(1e100) - 2.6).abs() < 5e-3);
    }

    #[test]
    fn sampled_exponents_bracket() {
        let samples = log_space(1e-6, 1e6, 2001);
        let p3 = NFunction::build(&NFunctionSpec::power(3.0)).unwrap();
        assert_eq!(growth_exponents(&p3, &samples).unwrap(), (3.0, 3.0));
        let ps = NFunction::build(&NFunctionSpec::power_sum(2.0, 3.0)).unwrap();
        let (l, m) = growth_exponents(&ps, &samples).unwrap();
        assert!(close(l, 2.0, 1e-5) && close(m, 3.0, 1e-5), "{l} {m}");
        let cv = NFunction::build(&NFunctionSpec::curvature(1.5)).unwrap();
        let (l, m) = growth_exponents(&cv, &samples).unwrap();
        assert!(close(l, 2.0, 1e-5) && close(m, 3.0, 1e-5), "{l} {m}");
    }

    #[test]
    fn delta2_constants() {
        let ps = NFunction::build(&NFunctionSpec::power_sum(2.0, 3.0)).unwrap();
        assert_eq!(ps.delta2(), 8.0);
        let p = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        assert_eq!(p.eval(0.0), 0.0);
        for t in log_space(1e-4, 1e4, 200) {
            assert!(ps.eval(2.0 * t) <= ps.delta2() * ps.eval(t) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn conjugate_examples() {
        let p2 = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        assert!(close(p2.conjugate_eval(4.0).unwrap(), 4.0, 1e-12));
        assert_eq!(p2.conjugate_eval(0.0).unwrap(), 0.0);
        let cv = NFunction::build(&NFunctionSpec::curvature(2.0)).unwrap();
        assert!(close(cv.conjugate_eval(8.0).unwrap(), 5.0, 1e-12));
        // brute-force maximization of 8t - A(t) on a fine grid
        let brute = (0..=200_000)
            .map(|i| {
                let t = 3.0 * i as f64 / 200_000.0;
                8.0 * t - cv.eval(t)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(brute, 5.0, 1e-8));
    }

    #[test]
    fn inverse_examples_and_errors() {
        let p2 = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        assert_eq!(p2.inverse(9.0).unwrap(), 3.0);
        assert_eq!(p2.inverse(0.0).unwrap(), 0.0);
        assert!(matches!(p2.inverse(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn xi_examples() {
        let ps = NFunction::build(&NFunctionSpec::power_sum(2.0, 3.0)).unwrap();
        assert_eq!(ps.xi(XiKind::Lower, 1.0), 1.0);
        assert_eq!(ps.xi(XiKind::Upper, 1.0), 1.0);
        assert!(close(ps.xi(XiKind::Lower, 0.5), 0.125, 1e-15));
        assert!(close(ps.xi(XiKind::Upper, 0.5), 0.25, 1e-15));
        let p2 = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        assert_eq!(p2.xi(XiKind::Lower, 3.0), 9.0);
        assert_eq!(p2.xi(XiKind::Upper, 3.0), 9.0);
        assert!(xi_indexed(4, 1.0, 2.0, 2.0, 6.0, 6.0).is_err());
        assert_eq!(xi(XiKind::Lower, 0.5, 6.0, f64::INFINITY), 0.0);
        assert_eq!(xi(XiKind::Upper, 2.0, 6.0, f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn build_rejects_bad_parameters() {
        for spec in [
            NFunctionSpec::power(1.0),
            NFunctionSpec::power_sum(2.0, 1.5),
            NFunctionSpec::curvature(0.9),
            NFunctionSpec::power_log(f64::NAN),
        ] {
            assert!(matches!(NFunction::build(&spec), Err(Error::Parameter { .. })), "{spec:?}");
        }
    }

    #[test]
    fn dimension_constraints_are_named() {
        let v = NFunctionSpec::power_log(2.6).dimension_violations(3).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("N-1"));
        assert!(NFunctionSpec::power_log(1.2).dimension_violations(3).unwrap()[0].contains("p0"));
        assert!(NFunctionSpec::power_sum(2.0, 3.0).dimension_violations(4).unwrap().is_empty());
        assert!(!NFunctionSpec::power_sum(2.0, 3.0).dimension_violations(3).unwrap().is_empty());
        assert!(NFunctionSpec::curvature(1.5).dimension_violations(3).unwrap().is_empty());
    }

    #[test]
    fn spec_json_shape() {
        let spec: NFunctionSpec = serde_json::from_str(r#"{"family":"power_sum","p":2,"q":3,"dim":4}"#).unwrap();
        assert_eq!(spec.family().unwrap(), Family::PowerSum { p: 2.0, q: 3.0 });
        assert_eq!(spec.dim, Some(4));
        assert!(serde_json::from_str::<NFunctionSpec>(r#"{"family":"power","p":2,"r":1}"#).is_err());
    }
}
