use std::fmt::Write as _;
use std::fs::File;

use serde::Serialize;
use serde_json::{json, Value};

use super::{CommandKind, RunConfig};
use crate::error::{Error, Result};
use crate::lab::{
    embedding_conditions_check, f3_ratio_check, lemma_f0_check, lions_vanishing_demo, sandwich_check, strauss_check,
    young_check, CheckReport, Sandwich,
};
use crate::nfunction::{log_space, NFunction};
use crate::radial::{read_csv, write_csv, GridFunction};
use crate::solver::{
    find_endpoint, mountain_pass_solve, mp_geometry_probe, ps_inequality_check, unit_bump, ProblemSpec,
};

/// A file written next to `report.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// What a command produced. The first artifact is the one `--format csv`
/// prints.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub passed: bool,
    pub result: Value,
    pub text: String,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn failure(result: Value) -> Self {
        RunOutput {
            passed: false,
            text: format!("{result}\n"),
            result,
            artifacts: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn report_lines(reports: &[CheckReport]) -> String {
    reports.iter().map(|r| format!("{}\n", r.summary())).collect()
}

pub fn execute(command: CommandKind, cfg: &RunConfig) -> Result<RunOutput> {
    let nf = NFunction::build(&cfg.nfunction)?;
    match command {
        CommandKind::Inspect => inspect(&nf, cfg),
        CommandKind::Conjugate => conjugate(&nf, cfg),
        CommandKind::Verify => verify(&nf, cfg),
        CommandKind::Strauss => strauss(&nf, cfg),
        CommandKind::Lions => lions(&nf, cfg),
        CommandKind::Solve => solve(nf, cfg),
    }
}

const TABLE_POINTS: usize = 13;

fn inspect(nf: &NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let dim = cfg.grid.dim;
    let ts = log_space(1e-3, 1e3, TABLE_POINTS);
    let rows: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| vec![t, nf.eval(t), nf.density(t), nf.flux(t), nf.growth_ratio(t)])
        .collect();
    let star = nf.sobolev_conjugate(dim);
    let (l_star, m_star) = match &star {
        Ok(sc) => (Some(sc.l_star()), Some(sc.m_star())),
        Err(_) => (None, None),
    };
    let warnings = cfg.nfunction.dimension_violations(dim)?;
    let result = json!({
        "nfunction": nf.spec(),
        "l": nf.l(),
        "m": nf.m(),
        "K": nf.delta2(),
        "dim": dim,
        // serde_json writes infinite values as null
        "l_star": l_star,
        "m_star": m_star.map(|m| if m.is_finite() { json!(m) } else { json!("inf") }),
        "sobolev_conjugate_error": star.as_ref().err().map(|e| e.to_string()),
        "dimension_warnings": warnings,
        "table": rows.iter().map(|r| json!({"t": r[0], "A": r[1], "a": r[2], "flux": r[3], "growth_ratio": r[4]})).collect::<Vec<_>>(),
    });
    let mut text = format!("{:?}\nl = {}  m = {}  K = {}\n", nf.family(), nf.l(), nf.m(), nf.delta2());
    match &star {
        Ok(sc) => writeln!(text, "N = {dim}: l* = {}  m* = {}", sc.l_star(), sc.m_star()).unwrap(),
        Err(e) => writeln!(text, "N = {dim}: {e}").unwrap(),
    }
    for w in &warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    writeln!(text, "{:>12} {:>14} {:>14} {:>14} {:>10}", "t", "A(t)", "a(t)", "a(t)t", "ratio").unwrap();
    for r in &rows {
        writeln!(text, "{:>12.4e} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.6}", r[0], r[1], r[2], r[3], r[4]).unwrap();
    }
    Ok(RunOutput {
        passed: true,
        result,
        text,
        artifacts: vec![Artifact {
            name: "table.csv".into(),
            contents: csv_table(&["t", "A", "a", "flux", "growth_ratio"], rows),
        }],
    })
}

fn conjugate(nf: &NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let dim = cfg.grid.dim;
    let sc = nf.sobolev_conjugate(dim);
    let mut rows = Vec::new();
    let mut worst_young: f64 = 0.0;
    let mut worst_star: f64 = 0.0;
    for t in log_space(1e-2, 1e2, TABLE_POINTS) {
        let s = nf.flux(t);
        let conj = nf.conjugate_eval(s)?;
        // Young's inequality is an equality at s = a(t)t
        let young_gap = (nf.eval(t) + conj - t * s).abs() / (t * s);
        worst_young = worst_young.max(young_gap);
        let (star, star_gap) = match &sc {
            Ok(sc) => {
                let v = sc.eval(t).value;
                let back = sc.inverse(v)?.value;
                (v, (back - t).abs() / t)
            }
            Err(_) => (f64::NAN, f64::NAN),
        };
        if star_gap.is_finite() {
            worst_star = worst_star.max(star_gap);
        }
        rows.push(vec![t, nf.eval(t), s, conj, young_gap, star, star_gap]);
    }
    let passed = worst_young < 1e-6 && (sc.is_err() || worst_star < 1e-6);
    let result = json!({
        "nfunction": nf.spec(),
        "dim": dim,
        "worst_young_gap": worst_young,
        "worst_star_round_trip": if sc.is_ok() { json!(worst_star) } else { Value::Null },
        "sobolev_conjugate_error": sc.as_ref().err().map(|e| e.to_string()),
        "rows": rows.iter().map(|r| json!({
            "t": r[0], "A": r[1], "s": r[2], "conjugate": r[3], "young_gap": r[4],
            "star": if r[5].is_finite() { json!(r[5]) } else { Value::Null },
            "star_round_trip": if r[6].is_finite() { json!(r[6]) } else { Value::Null },
        })).collect::<Vec<_>>(),
    });
    let mut text = format!("worst Young gap {worst_young:.3e}\n");
    match &sc {
        Ok(_) => writeln!(text, "worst A* round trip {worst_star:.3e}").unwrap(),
        Err(e) => writeln!(text, "no Sobolev conjugate: {e}").unwrap(),
    }
    writeln!(text, "{:>12} {:>14} {:>14} {:>14}", "t", "A(t)", "Ã(a(t)t)", "A*(t)").unwrap();
    for r in &rows {
        writeln!(text, "{:>12.4e} {:>14.6e} {:>14.6e} {:>14.6e}", r[0], r[1], r[3], r[5]).unwrap();
    }
    Ok(RunOutput {
        passed,
        result,
        text,
        artifacts: vec![Artifact {
            name: "conjugate.csv".into(),
            contents: csv_table(&["t", "A", "s", "conjugate", "young_gap", "star", "star_round_trip"], rows),
        }],
    })
}

fn verify(nf: &NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let (n, seed) = (cfg.samples, cfg.solver.seed);
    let mut reports = vec![
        young_check(nf, n, seed)?,
        lemma_f0_check(nf, n)?,
        sandwich_check(Sandwich::F1(nf), n, seed.wrapping_add(1)),
    ];
    let mut errors = Vec::new();
    match nf.sobolev_conjugate(cfg.grid.dim) {
        Ok(sc) => {
            reports.push(sandwich_check(Sandwich::F2(&sc), n, seed.wrapping_add(2)));
            reports.push(f3_ratio_check(&sc, n)?);
        }
        Err(e) => errors.push(format!("sobolev conjugate in dimension {}: {e}", cfg.grid.dim)),
    }
    let passed = errors.is_empty() && reports.iter().all(|r| r.passed);
    let mut text = report_lines(&reports);
    for e in &errors {
        writeln!(text, "error: {e}").unwrap();
    }
    let summary = csv_table(
        &["passed", "samples", "worst_margin", "worst_relative_margin", "violation_count"],
        reports.iter().map(|r| {
            vec![
                f64::from(u8::from(r.passed)),
                r.samples as f64,
                r.worst_margin,
                r.worst_relative_margin,
                r.violation_count as f64,
            ]
        }),
    );
    Ok(RunOutput {
        passed,
        result: json!({ "reports": to_value(&reports)?, "errors": errors }),
        text,
        artifacts: vec![Artifact {
            name: "checks.csv".into(),
            contents: summary,
        }],
    })
}

fn gaussian(cfg: &RunConfig) -> Result<GridFunction> {
    let grid = cfg.grid.build()?;
    Ok(GridFunction::from_fn(grid, |r| (-r * r).exp()))
}

fn strauss(nf: &NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let u = match &cfg.profile {
        Some(path) => read_csv(File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?, cfg.grid.dim)?,
        None => gaussian(cfg)?,
    };
    let report = strauss_check(nf, &u, cfg.r_min)?;
    Ok(RunOutput {
        passed: report.passed,
        text: format!("{}\n", report.summary()),
        result: to_value(&report)?,
        artifacts: Vec::new(),
    })
}

fn lions(nf: &NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let b = NFunction::build(&cfg.lions.b)?;
    let phi = gaussian(cfg)?;
    let beta = cfg.grid.dim as f64 / nf.l();
    let mut n_list = vec![1.0];
    while n_list[n_list.len() - 1] * 2.0 <= f64::from(cfg.lions.n_max) {
        n_list.push(n_list[n_list.len() - 1] * 2.0);
    }
    let demo = lions_vanishing_demo(nf, &b, &phi, beta, &n_list, cfg.lions.radius)?;
    let embedding = nf.sobolev_conjugate(cfg.grid.dim).map(|sc| embedding_conditions_check(&b, nf, &sc));
    let vanishing = demo.window_monotone && demo.norm_b_monotone && demo.window_drop <= 0.1 && demo.norm_b_drop <= 0.1;
    let passed = vanishing && embedding.as_ref().is_ok_and(|r| r.passed);
    let mut csv = Vec::new();
    demo.write_csv(&mut csv)?;
    let mut text = String::new();
    writeln!(text, "{:>6} {:>14} {:>14} {:>14} {:>16}", "n", "window", "modular_A", "norm_B", "sobolev_modular").unwrap();
    for r in &demo.rows {
        writeln!(text, "{:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>16.6e}", r.n, r.window, r.modular_a, r.norm_b, r.sobolev_modular).unwrap();
    }
    writeln!(text, "window drop {:.3e}  norm_B drop {:.3e}  sobolev drift {:.3e}", demo.window_drop, demo.norm_b_drop, demo.sobolev_drift).unwrap();
    match &embedding {
        Ok(r) => writeln!(text, "{}", r.summary()).unwrap(),
        Err(e) => writeln!(text, "no Sobolev conjugate: {e}").unwrap(),
    }
    Ok(RunOutput {
        passed,
        result: json!({
            "beta": beta,
            "demo": to_value(&demo)?,
            "embedding_conditions": embedding.as_ref().ok().map(to_value).transpose()?,
            "embedding_error": embedding.as_ref().err().map(|e| e.to_string()),
        }),
        text,
        artifacts: vec![Artifact {
            name: "lions.csv".into(),
            contents: String::from_utf8(csv).map_err(|e| Error::Io(e.to_string()))?,
        }],
    })
}

const PROBE_POINTS: usize = 40;

fn solve(nf: NFunction, cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.grid.build()?;
    let p = ProblemSpec::new(nf, cfg.potential.clone(), cfg.nonlinearity, grid)?;
    let phi = unit_bump(&p, cfg.solver.seed)?;
    let (t_e, _) = find_endpoint(&p, &phi)?;
    let ts: Vec<f64> = (0..=PROBE_POINTS).map(|k| 2.0 * t_e * k as f64 / PROBE_POINTS as f64).collect();
    let probe = mp_geometry_probe(&p, &phi, &ts)?;

    let report = mountain_pass_solve(&p, &cfg.solver)?;
    let ps = ps_inequality_check(&p, &report.u)?;
    let strauss = strauss_check(p.nf(), &report.u, cfg.r_min);
    let passed = report.converged && probe.passed && ps.passed && strauss.as_ref().is_ok_and(|r| r.passed);

    let mut csv = Vec::new();
    write_csv(&report.u, &mut csv)?;
    let mut text = format!(
        "c = {:.10e}\nresidual = {:.3e}  iterations = {}  newton = {}  converged = {}\nu(0) = {:.10e}\n",
        report.c, report.residual_norm, report.iterations, report.newton_steps, report.converged, report.u_at_origin
    );
    writeln!(text, "geometry probe: peak {:.6e} at t = {:.4e}, passed = {}", probe.peak, probe.t_peak, probe.passed).unwrap();
    writeln!(text, "{}", ps.summary()).unwrap();
    match &strauss {
        Ok(r) => writeln!(text, "{}", r.summary()).unwrap(),
        Err(e) => writeln!(text, "strauss: {e}").unwrap(),
    }
    Ok(RunOutput {
        passed,
        result: json!({
            "solve": to_value(&report)?,
            "geometry_probe": to_value(&probe)?,
            "ps_inequality": to_value(&ps)?,
            "strauss": strauss.as_ref().ok().map(to_value).transpose()?,
            "strauss_error": strauss.as_ref().err().map(|e| e.to_string()),
        }),
        text,
        artifacts: vec![Artifact {
            name: "solution.csv".into(),
            contents: String::from_utf8(csv).map_err(|e| Error::Io(e.to_string()))?,
        }],
    })
}
