//! Reproducible experiment driver for the `crgjms` library.

pub mod cache;
pub mod commands;
pub mod config;
pub mod manifest;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{QAction, Run};
use crate::config::{Mode, RunConfig, Sweep};
use crate::manifest::{FileHash, RunManifest, MANIFEST_NAME};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] crgjms::Error),
    #[error("verification failed:\n  {}", .0.join("\n  "))]
    Verify(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crgjms::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::NotSolvable { .. }) => 3,
            CliError::Core(E::IllConditioned { .. } | E::Numerical(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Verify(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "crgjms", version, about = "Critical CR GJMS operator experiments on the sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Complex dimension of the CR manifold (sphere S^{2n+1}).
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Truncation degree N (blocks with p + q <= N).
    #[arg(long, global = true, default_value_t = 8)]
    pub degree: u32,
    #[arg(long, global = true, default_value_t = crgjms::qcurv::DEFAULT_TAYLOR_DEPTH)]
    pub taylor_depth: u32,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Solvability tolerance for the obstruction norm.
    #[arg(long, global = true, default_value_t = crgjms::qcurv::solver::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = crgjms::parametrix::matrix::DEFAULT_NEUMANN_DEPTH)]
    pub neumann_depth: usize,
    /// JSON file `{epsilon, terms: [{p, q, index, coefficient}]}` giving Υ.
    #[arg(long, global = true)]
    pub perturbation: Option<PathBuf>,
    /// JSON file in the same format giving Q-data for `qcurv check|solve`.
    #[arg(long, global = true)]
    pub q_data: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, env = "CRGJMS_CACHE", default_value = ".crgjms-cache")]
    pub cache: PathBuf,
    /// Inclusive degree range `N1..N2`.
    #[arg(long, global = true)]
    pub sweep: Option<Sweep>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Row parameter for the L_mu column of the eigentable.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Recompute and compare against the stored manifest instead of writing.
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (or load) the harmonic basis.
    Basis,
    /// Eigentables, and the matrix spectrum in float mode.
    Spectrum,
    /// Parametrix chain diagnostics.
    ParametrixCheck,
    /// Q-curvature computations.
    Qcurv {
        #[command(subcommand)]
        action: QcurvAction,
    },
    /// Exact identity suite on the Heisenberg group.
    HeisenbergSelftest {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        dims: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum QcurvAction {
    Compute,
    Check,
    Solve,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Basis => "basis".into(),
            Command::Spectrum => "spectrum".into(),
            Command::ParametrixCheck => "parametrix-check".into(),
            Command::Qcurv { action } => format!("qcurv {}", format!("{action:?}").to_lowercase()),
            Command::HeisenbergSelftest { .. } => "heisenberg-selftest".into(),
        }
    }
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            degree: self.degree,
            taylor_depth: self.taylor_depth,
            mode: self.mode,
            tolerance: self.tolerance,
            neumann_depth: self.neumann_depth,
            cache_dir: self.cache.clone(),
            out_dir: self.out.clone(),
            perturbation: self.perturbation.clone(),
            q_data: self.q_data.clone(),
            seed: self.seed,
            sweep: self.sweep,
            mu: self.mu.clone(),
        }
    }
}

pub fn run_command(cfg: &RunConfig, command: &Command) -> Result<Run, CliError> {
    cfg.validate()?;
    match command {
        Command::Basis => commands::cmd_basis(cfg),
        Command::Spectrum => commands::cmd_spectrum(cfg),
        Command::ParametrixCheck => commands::cmd_parametrix_check(cfg),
        Command::Qcurv { action } => commands::cmd_qcurv(
            cfg,
            match action {
                QcurvAction::Compute => QAction::Compute,
                QcurvAction::Check => QAction::Check,
                QcurvAction::Solve => QAction::Solve,
            },
        ),
        Command::HeisenbergSelftest { dims } => commands::cmd_heisenberg_selftest(cfg, dims),
    }
}

/// Runs the command, writes artifacts and the manifest (or verifies them), and
/// returns the process exit status.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.global.config();
    let started = manifest::unix_now();
    let run = run_command(&cfg, &cli.command)?;
    let outputs: Vec<FileHash> = run
        .artifacts
        .iter()
        .map(|a| FileHash { path: a.name.clone(), sha256: manifest::sha256_hex(&a.bytes), bytes: a.bytes.len() as u64 })
        .collect();
    let inputs = [&cfg.perturbation, &cfg.q_data]
        .into_iter()
        .flatten()
        .map(|p| manifest::hash_input(p))
        .collect::<Result<Vec<_>, _>>()?;
    for m in &run.messages {
        eprintln!("{m}");
    }

    if cli.global.verify {
        let stored = manifest::read_manifest(&cfg.out_dir)?;
        let mut problems = manifest::compare(&stored, &outputs, &cfg.out_dir);
        if stored.command != cli.command.name() {
            problems.push(format!("manifest was written by `{}`", stored.command));
        }
        if stored.config != cfg {
            problems.push("configuration differs from the stored run".into());
        }
        if !problems.is_empty() {
            return Err(CliError::Verify(problems));
        }
        eprintln!("verified {} files against {}", outputs.len(), cfg.out_dir.join(MANIFEST_NAME).display());
        return Ok(run.status);
    }

    let io = |e: std::io::Error| CliError::Io(e.to_string());
    fs::create_dir_all(&cfg.out_dir).map_err(io)?;
    for a in &run.artifacts {
        fs::write(cfg.out_dir.join(&a.name), &a.bytes).map_err(io)?;
    }
    let m = RunManifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name(),
        config: cfg.clone(),
        started_unix: started,
        finished_unix: manifest::unix_now(),
        inputs,
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&m).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    fs::write(cfg.out_dir.join(MANIFEST_NAME), bytes).map_err(io)?;
    Ok(run.status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_mapping() {
        use crgjms::Error as E;
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(E::WeightNotPositive { smallest_eigenvalue: -1.0 }).exit_code(), 2);
        assert_eq!(CliError::Core(E::NotSolvable { obstruction_norm: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::Core(E::IllConditioned { condition: 1e13 }).exit_code(), 4);
        assert_eq!(CliError::Verify(vec![]).exit_code(), 4);
    }

    #[test]
    fn cli_parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["crgjms", "qcurv", "solve", "--mode", "float", "--sweep", "8..10", "--mu", "-1/2"]).unwrap();
        let cfg = cli.global.config();
        assert_eq!(cfg.mode, Mode::Float);
        assert_eq!(cfg.degrees(), vec![8, 9, 10]);
        assert_eq!(cli.command.name(), "qcurv solve");
        cfg.validate().unwrap();
    }
}
