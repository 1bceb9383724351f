//! The `orlicz` command line: a JSON run configuration, flag overrides, one
//! subcommand per task and a report envelope with a separate `meta` block.

mod commands;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::nfunction::{FamilyKind, NFunctionSpec};
use crate::radial::{PotentialSpec, Spacing};
use crate::solver::{GridConfig, NonlinearitySpec, SolverConfig};

pub use commands::{execute, Artifact, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    /// Print A, a, l, m, K and a sample table.
    Inspect,
    /// Tabulate the complementary function and the Sobolev conjugate.
    Conjugate,
    /// Run the inequality suite.
    Verify,
    /// Check the radial decay bound on a profile.
    Strauss,
    /// Tabulate a spreading sequence.
    Lions,
    /// Solve for a radial ground state and audit it.
    Solve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Settings of the `lions` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LionsConfig {
    /// The target space `B`.
    pub b: NFunctionSpec,
    /// Largest spreading factor; the sequence is `1, 2, 4, …, n_max`.
    pub n_max: u32,
    /// Window radius.
    pub radius: f64,
}

impl Default for LionsConfig {
    fn default() -> Self {
        LionsConfig {
            b: NFunctionSpec::power(4.0),
            n_max: 32,
            radius: 1.0,
        }
    }
}

/// Everything a run needs. Missing fields take their defaults; unknown
/// fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub nfunction: NFunctionSpec,
    /// Grid of every grid-based command; overrides `solver.grid`.
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub nonlinearity: NonlinearitySpec,
    pub potential: PotentialSpec,
    pub lions: LionsConfig,
    /// Random samples per `verify` check.
    pub samples: usize,
    /// Profile CSV for `strauss`; a Gaussian when absent.
    pub profile: Option<PathBuf>,
    pub r_min: f64,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            command: None,
            nfunction: NFunctionSpec::power(2.0),
            grid: solver.grid,
            solver,
            nonlinearity: NonlinearitySpec::pure_power(4.0),
            potential: PotentialSpec::default(),
            lions: LionsConfig::default(),
            samples: 1000,
            profile: None,
            r_min: 0.5,
            output_dir: None,
            format: Format::Text,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "orlicz", version, about = "N-functions, Orlicz-Sobolev norms and radial ground states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandKind>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// power, power_sum, curvature or power_log.
    #[arg(long, global = true)]
    pub family: Option<FamilyKind>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Number of grid cells M; the grid has M+1 nodes.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[arg(long, global = true)]
    pub spacing: Option<Spacing>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exponent q of the nonlinearity `f(u) = |u|^{q−2}u`.
    #[arg(long = "f-exp", global = true)]
    pub f_exp: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Output directory for `report.json` and CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Cli {
    /// The file configuration (or the defaults) with the flags applied.
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(c) = self.command {
            cfg.command = Some(c);
        }
        if let Some(family) = self.family {
            if family != cfg.nfunction.family {
                cfg.nfunction = NFunctionSpec {
                    family,
                    p: None,
                    q: None,
                    gamma: None,
                    dim: cfg.nfunction.dim,
                };
            }
        }
        let nf = &mut cfg.nfunction;
        nf.p = self.p.or(nf.p);
        nf.q = self.q.or(nf.q);
        nf.gamma = self.gamma.or(nf.gamma);
        if let Some(dim) = self.dim {
            cfg.grid.dim = dim;
        }
        if let Some(r) = self.rmax {
            cfg.grid.r_max = r;
        }
        if let Some(m) = self.nodes {
            cfg.grid.cells = m;
        }
        if let Some(s) = self.spacing {
            cfg.grid.spacing = s;
        }
        if let Some(tol) = self.tol {
            cfg.solver.tol = tol;
        }
        if let Some(seed) = self.seed {
            cfg.solver.seed = seed;
        }
        if let Some(q) = self.f_exp {
            cfg.nonlinearity = match cfg.nonlinearity {
                NonlinearitySpec::PurePower { coef, .. } => NonlinearitySpec::PurePower { q, coef },
            };
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if self.profile.is_some() {
            cfg.profile = self.profile.clone();
        }
        if self.out.is_some() {
            cfg.output_dir = self.out.clone();
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.solver.grid = cfg.grid;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Whether an error stems from the configuration rather than the run.
pub fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parameter { .. } | Error::Domain(_) | Error::Admissibility(_) | Error::Precondition(_) | Error::Io(_) | Error::Grid(_)
    )
}

/// The serialized report: `result` is deterministic, `meta` is not.
#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub command: CommandKind,
    pub passed: bool,
    pub config: &'a RunConfig,
    pub result: &'a serde_json::Value,
    pub meta: Meta,
}

#[derive(Debug, Serialize)]
pub struct Meta {
    pub timestamp_unix: u64,
    pub version: &'static str,
}

impl Meta {
    pub fn now() -> Self {
        Meta {
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Parses `args`, runs the command and writes to `stdout`/`stderr`.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let Some(command) = cfg.command else {
        let _ = writeln!(stderr, "config error: no command given (inspect, conjugate, verify, strauss, lions, solve)");
        return EXIT_CONFIG;
    };
    match execute(command, &cfg) {
        Ok(out) => match emit(command, &cfg, &out, stdout) {
            Ok(()) => {
                if out.passed {
                    EXIT_OK
                } else {
                    let _ = writeln!(stderr, "{command:?}: checks failed");
                    EXIT_FAILED
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "output error: {e}");
                EXIT_CONFIG
            }
        },
        Err(e) if is_config_error(&e) => {
            let _ = writeln!(stderr, "config error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            let failure = serde_json::json!({ "error": e.to_string() });
            let _ = writeln!(stderr, "{command:?} failed: {e}");
            let _ = emit(command, &cfg, &RunOutput::failure(failure), stdout);
            EXIT_FAILED
        }
    }
}

fn emit(command: CommandKind, cfg: &RunConfig, out: &RunOutput, stdout: &mut dyn Write) -> Result<(), Error> {
    let envelope = Envelope {
        command,
        passed: out.passed,
        config: cfg,
        result: &out.result,
        meta: Meta::now(),
    };
    let json = serde_json::to_string_pretty(&envelope).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), format!("{json}\n"))?;
        for a in &out.artifacts {
            fs::write(dir.join(&a.name), &a.contents)?;
        }
    }
    match cfg.format {
        Format::Json => writeln!(stdout, "{json}")?,
        Format::Text => write!(stdout, "{}", out.text)?,
        Format::Csv => {
            if let Some(a) = out.artifacts.first() {
                stdout.write_all(a.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}
