use super::{CheckReport, Sampler};
use crate::error::Result;
use crate::nfunction::{log_space, xi, NFunction, OrliczFunction, SobolevConjugate, XiKind};

const T_RANGE: (f64, f64) = (1e-3, 1e3);
const RHO_RANGE: (f64, f64) = (1e-2, 1e2);

/// `st <= A(t) + Ã(s)` on log-uniform pairs, and equality (to 1e-8
/// relative) at `s = a(t)t`.
pub fn young_check(nf: &NFunction, samples: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("young");
    let mut rng = Sampler::new(seed);
    report.push(&[0.0, 1.0], 0.0, nf.conjugate_eval(1.0)?);
    for _ in 0..samples {
        let t = rng.log_uniform(T_RANGE.0, T_RANGE.1);
        let s = rng.log_uniform(T_RANGE.0, T_RANGE.1);
        report.push(&[t, s], s * t, nf.eval(t) + nf.conjugate_eval(s)?);
    }
    let mut equality = CheckReport::new("young equality");
    for t in log_space(T_RANGE.0, T_RANGE.1, samples.clamp(2, 200)) {
        let s = nf.flux(t);
        equality.push_close(&[t, s], s * t, nf.eval(t) + nf.conjugate_eval(s)?, 1e-8);
    }
    report.merge(equality);
    Ok(report)
}

/// `Ã(a(t)t) <= A(2t)` on log-spaced `t`.
pub fn lemma_f0_check(nf: &NFunction, samples: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("conjugate_of_flux");
    report.push(&[0.0], 0.0, 0.0);
    for t in log_space(T_RANGE.0, T_RANGE.1, samples.max(2)) {
        report.push(&[t], nf.conjugate_eval(nf.flux(t))?, nf.eval(2.0 * t));
    }
    Ok(report)
}

/// Which ξ sandwich to audit.
#[derive(Debug, Clone, Copy)]
pub enum Sandwich<'a> {
    /// `ξ0(ρ)A(t) <= A(ρt) <= ξ1(ρ)A(t)`.
    F1(&'a NFunction),
    /// `ξ2(ρ)A*(t) <= A*(ρt) <= ξ3(ρ)A*(t)`, sampled inside the table.
    F2(&'a SobolevConjugate),
}

pub fn sandwich_check(target: Sandwich<'_>, samples: usize, seed: u64) -> CheckReport {
    let mut rng = Sampler::new(seed);
    let (name, f, (lo, hi)): (&str, &dyn OrliczFunction, _) = match target {
        Sandwich::F1(nf) => ("sandwich_f1", nf, T_RANGE),
        Sandwich::F2(sc) => ("sandwich_f2", sc, sc.table_range()),
    };
    let (l, m) = f.exponents();
    let mut report = CheckReport::new(name);
    let mut audit = |t: f64, rho: f64| {
        let at = f.value(t);
        let art = f.value(rho * t);
        report.push(&[rho, t], xi(XiKind::Lower, rho, l, m) * at, art);
        report.push(&[rho, t], art, xi(XiKind::Upper, rho, l, m) * at);
    };
    audit(1.0, 1.0);
    for _ in 0..samples {
        match target {
            Sandwich::F1(_) => {
                let t = rng.log_uniform(lo, hi);
                let rho = rng.log_uniform(RHO_RANGE.0, RHO_RANGE.1);
                audit(t, rho);
            }
            Sandwich::F2(_) => {
                // both t and ρt inside the tabulated range
                let t = rng.log_uniform(lo, hi);
                let rt = rng.log_uniform(lo, hi);
                audit(t, rt / t);
            }
        }
    }
    report
}

/// `l* <= a*(t)t²/A*(t) <= m*` across the table, plus a few points beyond
/// each end where the extrapolation takes over.
pub fn f3_ratio_check(sc: &SobolevConjugate, samples: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("star_growth_ratio");
    let (lo, hi) = sc.table_range();
    let mut ts = log_space(lo, hi, samples.max(2));
    ts.extend([lo * 0.5, lo * 0.1, hi * 2.0, hi * 10.0]);
    for t in ts {
        let r = sc.growth_ratio(t)?.value;
        report.push(&[t], sc.l_star(), r);
        report.push(&[t], r, sc.m_star());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunction::NFunctionSpec;

    fn families() -> Vec<NFunction> {
        [
            NFunctionSpec::power(2.5),
            NFunctionSpec::power_sum(2.0, 3.0),
            NFunctionSpec::curvature(1.5),
            NFunctionSpec::power_log(2.6),
        ]
        .iter()
        .map(|s| NFunction::build(s).unwrap())
        .collect()
    }

    #[test]
    fn young_examples() {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        // t = 3, s = 6 is the equality case 18 = 9 + 9
        assert!((nf.eval(3.0) + nf.conjugate_eval(6.0).unwrap() - 18.0).abs() < 1e-9);
        assert!((nf.eval(3.0) + nf.conjugate_eval(2.0).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn pointwise_checks_pass_for_all_families() {
        for nf in families() {
            let y = young_check(&nf, 300, 7).unwrap();
            assert!(y.passed, "{}", y.summary());
            let f0 = lemma_f0_check(&nf, 300).unwrap();
            assert!(f0.passed, "{}", f0.summary());
            let s = sandwich_check(Sandwich::F1(&nf), 300, 11);
            assert!(s.passed, "{}", s.summary());
        }
    }

    #[test]
    fn power_sandwich_is_tight() {
        let nf = NFunction::build(&NFunctionSpec::power(3.0)).unwrap();
        let s = sandwich_check(Sandwich::F1(&nf), 100, 1);
        assert!(s.passed && s.worst_relative_margin.abs() < 1e-12);
    }

    #[test]
    fn star_checks() {
        let nf = NFunction::build(&NFunctionSpec::power(2.0)).unwrap();
        let sc = nf.sobolev_conjugate(3).unwrap();
        let r = f3_ratio_check(&sc, 200).unwrap();
        assert!(r.passed, "{}", r.summary());
        let s = sandwich_check(Sandwich::F2(&sc), 200, 3);
        assert!(s.passed, "{}", s.summary());
    }
}
