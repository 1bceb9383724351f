use std::io::Write;

use serde::Serialize;

use super::CheckReport;
use crate::error::{Error, Result};
use crate::nfunction::{log_space, NFunction, SobolevConjugate};
use crate::radial::{luxemburg_norm, modular, radial_gradient, window_modular, GridFunction};

/// Ratios must fall by this factor over the sampled decades.
const RATIO_DROP: f64 = 1e-3;
const DECADES: f64 = 4.0;
const RATIO_POINTS: usize = 41;

/// Audits `B(t)/A(t) → 0` as `t → 0+` and `B(t)/A*(t) → 0` as `t → ∞`:
/// both ratio sequences must be nonincreasing and end below `1e-3` times
/// their first value.
pub fn embedding_conditions_check(b: &NFunction, a: &NFunction, sc: &SobolevConjugate) -> CheckReport {
    let mut report = CheckReport::new("embedding_conditions");
    let mut trend = |ts: Vec<f64>, den: &dyn Fn(f64) -> f64| {
        let ratios: Vec<f64> = ts.iter().map(|&t| b.eval(t) / den(t)).collect();
        for k in 1..ratios.len() {
            report.push(&[ts[k]], ratios[k], ratios[k - 1]);
        }
        let last = ratios.len() - 1;
        report.push(&[ts[0], ts[last]], ratios[last], RATIO_DROP * ratios[0]);
    };
    let mut towards_zero = log_space(10f64.powf(-DECADES), 1.0, RATIO_POINTS);
    towards_zero.reverse();
    trend(towards_zero, &|t| a.eval(t));
    trend(log_space(1.0, 10f64.powf(DECADES), RATIO_POINTS), &|t| sc.eval(t).value);
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LionsRow {
    pub n: f64,
    /// `∫_{B_R(0)} A(|u_n|)`, the largest window integral for nonincreasing `u_n`.
    pub window: f64,
    pub modular_a: f64,
    pub norm_b: f64,
    /// `∫A(|u_n|) + ∫A(|∇u_n|)`.
    pub sobolev_modular: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LionsDemo {
    pub rows: Vec<LionsRow>,
    pub window_monotone: bool,
    pub norm_b_monotone: bool,
    /// `window(n_last)/window(n_first)`.
    pub window_drop: f64,
    pub norm_b_drop: f64,
    /// `max_n sobolev_modular(n)/sobolev_modular(n_first)`.
    pub sobolev_growth: f64,
    /// `max_n |sobolev_modular(n)/sobolev_modular(n_first) − 1|`.
    pub sobolev_drift: f64,
}

impl LionsDemo {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "window", "modular_A", "norm_B", "sobolev_modular"])?;
        for r in &self.rows {
            w.write_record([
                format!("{}", r.n),
                format!("{:.16e}", r.window),
                format!("{:.16e}", r.modular_a),
                format!("{:.16e}", r.norm_b),
                format!("{:.16e}", r.sobolev_modular),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tabulates the spreading sequence `u_n(r) = n^{−β} φ(r/n)` on the grid of `φ`.
pub fn lions_vanishing_demo(
    a: &NFunction,
    b: &NFunction,
    phi: &GridFunction,
    beta: f64,
    n_list: &[f64],
    radius: f64,
) -> Result<LionsDemo> {
    if !phi.is_nonincreasing() {
        return Err(Error::Precondition("φ must be radially nonincreasing".into()));
    }
    let dim = phi.grid().dim() as f64;
    if beta < dim / a.l() * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("β = {beta} is below N/l = {}", dim / a.l())));
    }
    if n_list.is_empty() || n_list.iter().any(|&n| !(n >= 1.0)) {
        return Err(Error::Precondition("n values must be >= 1".into()));
    }
    let interp = phi.interpolator();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let scale = n.powf(-beta);
        let u = GridFunction::from_fn(phi.grid().clone(), |r| scale * interp.eval(r / n));
        let modular_a = modular(a, &u, None);
        rows.push(LionsRow {
            n,
            window: window_modular(a, &u, radius),
            modular_a,
            norm_b: luxemburg_norm(b, &u, None)?,
            sobolev_modular: modular_a + modular(a, &radial_gradient(&u), None),
        });
    }
    let first = rows[0];
    let last = rows[rows.len() - 1];
    let monotone = |f: fn(&LionsRow) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    Ok(LionsDemo {
        window_monotone: monotone(|r| r.window),
        norm_b_monotone: monotone(|r| r.norm_b),
        window_drop: last.window / first.window,
        norm_b_drop: last.norm_b / first.norm_b,
        sobolev_growth: rows
            .iter()
            .map(|r| r.sobolev_modular / first.sobolev_modular)
            .fold(f64::NEG_INFINITY, f64::max),
        sobolev_drift: rows
            .iter()
            .map(|r| (r.sobolev_modular / first.sobolev_modular - 1.0).abs())
            .fold(0.0, f64::max),
        rows,
    })
}
