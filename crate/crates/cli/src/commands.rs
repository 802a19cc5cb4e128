use std::fs;
use std::path::Path;

use crgjms::exact::GaussRational;
use crgjms::heisenberg::selftest::run_selftest;
use crgjms::parametrix::{self, matrix, spectrum};
use crgjms::qcurv::{self, ContactPerturbation, FrameSolver, PerturbedFrame, QData, SpectralSpec};
use crgjms::sphere::export::eigentable_csv;
use crgjms::sphere::{harmonic_dimension, HarmonicBasis};
use serde::Serialize;
use serde_json::json;

use crate::cache::load_or_build;
use crate::config::{Mode, RunConfig};
use crate::CliError;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Default)]
pub struct Run {
    pub artifacts: Vec<Artifact>,
    pub status: i32,
    pub messages: Vec<String>,
}

impl Run {
    fn json<T: Serialize>(&mut self, name: String, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.artifacts.push(Artifact { name, bytes });
        Ok(())
    }

    fn text(&mut self, name: String, body: String) {
        self.artifacts.push(Artifact { name, bytes: body.into_bytes() });
    }
}

/// `stem.ext`, or `stem_N<d>.ext` inside a sweep.
fn file_name(cfg: &RunConfig, stem: &str, ext: &str, degree: u32) -> String {
    if cfg.sweep.is_some() {
        format!("{stem}_N{degree}.{ext}")
    } else {
        format!("{stem}.{ext}")
    }
}

fn read_spec(path: &Path) -> Result<SpectralSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed {}: {e}", path.display())))
}

fn perturbation(cfg: &RunConfig, degree: u32) -> Result<ContactPerturbation, CliError> {
    let pert = match &cfg.perturbation {
        None => ContactPerturbation::standard(cfg.n, degree, cfg.taylor_depth),
        Some(p) => ContactPerturbation::new(read_spec(p)?.to_function(cfg.n, degree)?, cfg.taylor_depth)?,
    };
    if cfg.mode == Mode::Exact && !pert.is_standard() {
        return Err(CliError::Config(
            "exact mode covers the standard contact form only; use --mode float with a perturbation".into(),
        ));
    }
    Ok(pert)
}

fn frame(cfg: &RunConfig, degree: u32, run: &mut Run) -> Result<(HarmonicBasis, PerturbedFrame), CliError> {
    let load = load_or_build(&cfg.cache_dir, cfg.n, degree)?;
    if !load.cache_hit {
        run.messages.push(format!("built basis n={} N={degree} in {:.3}s", cfg.n, load.build_seconds));
    }
    let f = perturbation(cfg, degree)?.frame(&load.basis)?;
    Ok((load.basis, f))
}

pub fn cmd_basis(cfg: &RunConfig) -> Result<Run, CliError> {
    let mut run = Run::default();
    for degree in cfg.degrees() {
        let load = load_or_build(&cfg.cache_dir, cfg.n, degree)?;
        let layout = load.basis.layout();
        let oracle: usize = (0..=degree).flat_map(|d| (0..=d).map(move |p| (p, d - p))).map(|(p, q)| harmonic_dimension(cfg.n, p, q)).sum();
        run.messages.push(if load.cache_hit {
            format!("basis n={} N={degree}: cache hit, rebuild time 0s", cfg.n)
        } else {
            format!("basis n={} N={degree}: built in {:.3}s", cfg.n, load.build_seconds)
        });
        let blocks: Vec<_> = layout.blocks.iter().map(|b| json!({"p": b.index.p, "q": b.index.q, "dim": b.dim})).collect();
        let summary = json!({
            "n": cfg.n,
            "degree": degree,
            "dimension": load.basis.dimension(),
            "dimension_formula": oracle,
            "matches_formula": load.basis.dimension() == oracle,
            "blocks": blocks,
        });
        run.json(file_name(cfg, "basis", "json", degree), &summary)?;
    }
    Ok(run)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Run, CliError> {
    let mut run = Run::default();
    let mu = cfg.mu.as_ref().map(|m| m.parse::<GaussRational>().unwrap().re);
    let mut points = Vec::new();
    for degree in cfg.degrees() {
        run.text(file_name(cfg, "eigentable", "csv", degree), eigentable_csv(cfg.n, degree, mu.as_ref(), cfg.mode == Mode::Exact));
        let p = crgjms::sphere::critical_gjms(cfg.n, degree);
        let spec = match cfg.mode {
            Mode::Exact => {
                perturbation(cfg, degree)?;
                spectrum::spectrum_diagonal(&p)
            }
            Mode::Float => {
                let (_, f) = frame(cfg, degree, &mut run)?;
                let s = spectrum::spectrum_matrix(&f.p_hat, &f.weight)?;
                run.text(file_name(cfg, "matrix_spectrum", "csv", degree), spectrum::spectrum_csv(&s));
                s
            }
        };
        points.push(json!({
            "degree": degree,
            "dimension": spec.dimension,
            "kernel_dimension": spec.kernel_dimension,
            "smallest_nonzero": spec.smallest_nonzero,
        }));
        run.json(file_name(cfg, "spectrum", "json", degree), &spec)?;
    }
    if cfg.sweep.is_some() {
        let vals: Vec<f64> = points.iter().filter_map(|p| p["smallest_nonzero"].as_f64()).collect();
        let first = vals.first().copied().unwrap_or(0.0);
        let worst = vals.iter().map(|v| (first - v) / first).fold(0.0, f64::max);
        run.json(
            "sweep_summary.json".into(),
            &json!({ "points": points, "max_relative_decrease": worst, "stable": worst < 0.10 }),
        )?;
    }
    Ok(run)
}

pub fn cmd_parametrix_check(cfg: &RunConfig) -> Result<Run, CliError> {
    let mut run = Run::default();
    let mut points = Vec::new();
    for degree in cfg.degrees() {
        let report = match cfg.mode {
            Mode::Exact => {
                perturbation(cfg, degree)?;
                parametrix::build_chain_diagonal(cfg.n, degree).report()
            }
            Mode::Float => {
                let (_, f) = frame(cfg, degree, &mut run)?;
                matrix::build_chain_matrix(&f.p_hat, &f.weight, cfg.neumann_depth)?.report()?
            }
        };
        let key = |k: &str| report.residuals.get(k).map(|r| r.interior);
        points.push(json!({
            "degree": degree,
            "P*G + Pi - I": key("P*G + Pi - I"),
            "P*GInf + PiInf - I": key("P*GInf + PiInf - I"),
            "PiInf - Pi": key("PiInf - Pi"),
            "R_inf": report.smoothing.r_inf.interior,
            "max_interior": report.residuals.max_interior(),
        }));
        run.messages.push(format!("N={degree}: max interior residual {:e}", report.residuals.max_interior()));
        run.text(file_name(cfg, "chain_eigenvalues", "csv", degree), spectrum::spectrum_csv(&report.spectrum));
        run.json(file_name(cfg, "chain", "json", degree), &report)?;
    }
    if cfg.sweep.is_some() {
        run.json("sweep_summary.json".into(), &json!({ "points": points }))?;
    }
    Ok(run)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QAction {
    Compute,
    Check,
    Solve,
}

pub fn cmd_qcurv(cfg: &RunConfig, action: QAction) -> Result<Run, CliError> {
    let mut run = Run::default();
    for degree in cfg.degrees() {
        let (basis, f) = frame(cfg, degree, &mut run)?;
        let q = match (&cfg.q_data, action) {
            (Some(p), QAction::Check | QAction::Solve) => QData::given(&f, read_spec(p)?.to_function(cfg.n, degree)?)?,
            _ => qcurv::qhat(&f),
        };
        match action {
            QAction::Compute => {
                let total = qcurv::total_q(&f, &q);
                run.messages.push(format!("N={degree}: total Q {:e} ({})", total.abs, if total.pass { "PASS" } else { "FAIL" }));
                run.text(file_name(cfg, "qhat", "csv", degree), qcurv::q_csv(&q.q_hat));
                run.json(file_name(cfg, "qhat", "json", degree), &json!({ "q": q, "total_q": total }))?;
            }
            QAction::Check | QAction::Solve => {
                let solver = FrameSolver::new(&f)?.with_tolerance(cfg.tolerance);
                let check = solver.solvability_check(&q);
                let name = if action == QAction::Check { "solvability" } else { "solve_report" };
                if !check.solvable || action == QAction::Check {
                    run.messages.push(format!(
                        "N={degree}: obstruction {:e} ({})",
                        check.obstruction_norm,
                        if check.solvable { "solvable" } else { "not solvable" }
                    ));
                    if !check.solvable {
                        run.status = 3;
                    }
                    run.json(file_name(cfg, name, "json", degree), &check)?;
                    continue;
                }
                let report = solver.solve_zero_q(&q, &basis)?;
                if let Some(sol) = &report.solution {
                    run.text(file_name(cfg, "upsilon_sol", "csv", degree), qcurv::q_csv(sol));
                }
                run.messages.push(format!(
                    "N={degree}: residual {:e}, final Q {:e}",
                    report.residual.as_ref().map_or(f64::NAN, |r| r.full),
                    report.final_q_norm.unwrap_or(f64::NAN)
                ));
                run.json(file_name(cfg, name, "json", degree), &report)?;
            }
        }
    }
    Ok(run)
}

pub fn cmd_heisenberg_selftest(cfg: &RunConfig, dims: &[usize]) -> Result<Run, CliError> {
    let mut run = Run::default();
    let report = run_selftest(dims, cfg.seed);
    for r in &report.results {
        run.messages.push(format!("{} n={}: {}", r.identity, r.n, if r.passed { "PASS" } else { "FAIL" }));
    }
    run.json("selftest.json".into(), &report)?;
    Ok(run)
}
