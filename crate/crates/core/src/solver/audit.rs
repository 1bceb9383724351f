use serde::Serialize;

use super::energy::{directional_derivative, energy, energy_parts};
use super::ProblemSpec;
use crate::error::Result;
use crate::lab::CheckReport;
use crate::nfunction::{xi, XiKind};
use crate::radial::{cell_gradient, luxemburg_weighted, GridFunction};

/// `J(tφ)` along a ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryProbe {
    pub samples: Vec<(f64, f64)>,
    /// Largest sampled energy and its scale.
    pub peak: f64,
    pub t_peak: f64,
    /// First sampled scale with negative energy, if any.
    pub t_negative: Option<f64>,
    /// Energy positive on `(0, t_peak]` and negative from `t_negative` on.
    pub passed: bool,
}

pub fn mp_geometry_probe(p: &ProblemSpec, phi: &GridFunction, ts: &[f64]) -> Result<GeometryProbe> {
    let samples = ts
        .iter()
        .map(|&t| Ok((t, energy(p, &phi.scaled(t))?)))
        .collect::<Result<Vec<_>>>()?;
    let (t_peak, peak) = samples
        .iter()
        .filter(|(t, _)| *t > 0.0)
        .fold((0.0, f64::NEG_INFINITY), |best, &(t, j)| if j > best.1 { (t, j) } else { best });
    let t_negative = samples.iter().find(|(_, j)| *j < 0.0).map(|&(t, _)| t);
    let rises = peak > 0.0 && samples.iter().filter(|(t, _)| *t > 0.0 && *t <= t_peak).all(|&(_, j)| j > 0.0);
    let falls = t_negative.is_some_and(|tn| tn > t_peak && samples.iter().filter(|(t, _)| *t >= tn).all(|&(_, j)| j < 0.0));
    Ok(GeometryProbe {
        passed: rises && falls,
        samples,
        peak,
        t_peak,
        t_negative,
    })
}

/// Audits `J(u) − ⟨J'(u), u⟩/θ >= ((θ−m)/θ)(∫A(|∇u|) + ∫V A(|u|))` and the
/// lower bound of the right side by `ξ0` of the gradient and weighted norms.
pub fn ps_inequality_check(p: &ProblemSpec, u: &GridFunction) -> Result<CheckReport> {
    let parts = energy_parts(p, u)?;
    let theta = p.nonlinearity().theta();
    let m = p.nf().m();
    let l = p.nf().l();
    let factor = (theta - m) / theta;
    let modulars = parts.gradient_modular + parts.potential_modular;
    let lhs = parts.energy() - directional_derivative(p, u, u)? / theta;
    let mut report = CheckReport::new("palais_smale_bound");
    report.push(&[theta, m], factor * modulars, lhs);

    let grid = p.grid();
    let omega = grid.surface_area();
    let cell_weights: Vec<f64> = grid.cell_measure().iter().map(|mu| omega * mu).collect();
    let grad_norm = luxemburg_weighted(p.nf(), &cell_gradient(u), &cell_weights)?;
    let node_weights: Vec<f64> = grid
        .lumped_mass()
        .iter()
        .zip(p.potential().values())
        .map(|(q, v)| omega * q * v)
        .collect();
    let norm = luxemburg_weighted(p.nf(), u.values(), &node_weights)?;
    let xi0 = |rho: f64| xi(XiKind::Lower, rho, l, m);
    report.push(&[grad_norm], xi0(grad_norm), parts.gradient_modular);
    report.push(&[norm], xi0(norm), parts.potential_modular);
    Ok(report)
}
