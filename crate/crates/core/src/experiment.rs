//! End-to-end experiment runner: resolve the observed data, run the chain,
//! compute the estimator report, and leave `chain.csv`, `histogram.csv`,
//! and `report.json` in the output directory.
//!
//! Everything downstream of the config is deterministic: fixed seeds, no
//! timestamps, and shortest-round-trip float formatting, so identical
//! configs produce byte-identical artifacts.

use crate::config::{ConfigError, DataSource, ExperimentConfig};
use crate::estimators::{estimate_density, full_report, DensityEstimate, EstimatorReport};
use crate::models::{synthesize_data, ModelError, Observation};
use crate::sampler::{chain_diagnostics, mh_run, Chain, ChainDiagnostics, LikelihoodSpec};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("estimators: {0}")]
    Estimator(#[from] crate::estimators::EstimatorError),
    #[error("chain csv: {0}")]
    ChainCsv(#[from] crate::sampler::ChainCsvError),
    #[error("data file {path}: {message}")]
    DataFile { path: PathBuf, message: String },
    #[error("all data values are zero, so no noise scale can be derived; set `likelihood.sigma`")]
    ZeroSigma,
    #[error("{path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
}

impl RunError {
    /// Process exit code: 1 for config problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |err| RunError::Io { path: path.to_path_buf(), err }
}

/// Observed data plus, when synthesized, the noiseless forward values.
pub struct ResolvedData {
    pub observation: Observation,
    pub clean: Option<Vec<f64>>,
}

/// Materialize the configured data source.
pub fn resolve_data(config: &ExperimentConfig) -> Result<ResolvedData, RunError> {
    let model = config.model.build();
    match &config.data {
        DataSource::Inline(values) => Ok(ResolvedData {
            observation: Observation::new(values.clone(), resolve_sigma(config, values)?)?,
            clean: None,
        }),
        DataSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            let mut values = Vec::new();
            for tok in text.split_whitespace() {
                if tok.starts_with('#') {
                    break;
                }
                values.push(tok.parse::<f64>().map_err(|_| RunError::DataFile {
                    path: path.clone(),
                    message: format!("`{tok}` is not a number"),
                })?);
            }
            if values.len() != model.observable_len() {
                return Err(RunError::DataFile {
                    path: path.clone(),
                    message: format!(
                        "{} value(s) read but the model observes {}",
                        values.len(),
                        model.observable_len()
                    ),
                });
            }
            Ok(ResolvedData {
                observation: Observation::new(values.clone(), resolve_sigma(config, &values)?)?,
                clean: None,
            })
        }
        DataSource::Synthesize { true_param, noise_kind, noise_level, data_seed } => {
            let clean = model.evaluate(true_param)?;
            let observation =
                synthesize_data(model.as_ref(), true_param, *noise_kind, *noise_level, *data_seed)?;
            Ok(ResolvedData { observation, clean: Some(clean) })
        }
    }
}

/// The likelihood noise scale: explicit `likelihood.sigma`, else 5% of the
/// largest observed magnitude.
fn resolve_sigma(config: &ExperimentConfig, values: &[f64]) -> Result<f64, RunError> {
    if let Some(s) = config.sigma {
        return Ok(s);
    }
    let max_abs = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if max_abs == 0.0 {
        return Err(RunError::ZeroSigma);
    }
    Ok(0.05 * max_abs)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub chain: Chain,
    pub density: DensityEstimate,
    pub report: EstimatorReport,
    pub diagnostics: ChainDiagnostics,
}

/// Run one seeded chain and write the three artifacts into `out_dir`.
pub fn run_single(
    config: &ExperimentConfig,
    out_dir: &Path,
    seed: u64,
) -> Result<RunOutcome, RunError> {
    let model = config.model.build();
    let resolved = resolve_data(config)?;
    let sigma = if let Some(s) = config.sigma {
        s
    } else {
        resolve_sigma(config, &resolved.observation.values)?
    };
    let like = LikelihoodSpec::new(sigma, config.exponent);
    let prior = config.prior();

    let chain = mh_run(
        model.as_ref(),
        &prior,
        &like,
        &resolved.observation,
        config.iterations,
        config.burn_in,
        seed,
        config.initial.as_deref(),
    );
    let density = estimate_density(&chain, &config.prior_lower, &config.prior_upper, &config.bins)?;
    let report = full_report(
        &chain,
        &density,
        config.epsilon,
        config.min_separation,
        Some(model.as_ref()),
        config.regions.as_deref(),
    )?;
    let diagnostics = chain_diagnostics(&chain);

    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let chain_path = out_dir.join("chain.csv");
    let f = std::fs::File::create(&chain_path).map_err(io_err(&chain_path))?;
    chain.write_csv(std::io::BufWriter::new(f)).map_err(io_err(&chain_path))?;
    let hist_path = out_dir.join("histogram.csv");
    let f = std::fs::File::create(&hist_path).map_err(io_err(&hist_path))?;
    density.write_csv(std::io::BufWriter::new(f)).map_err(io_err(&hist_path))?;
    let report_path = out_dir.join("report.json");
    let mut f = std::fs::File::create(&report_path).map_err(io_err(&report_path))?;
    writeln!(f, "{}", report.to_json_pretty()).map_err(io_err(&report_path))?;

    Ok(RunOutcome { out_dir: out_dir.to_path_buf(), chain, density, report, diagnostics })
}

/// Run the experiment: one chain into `out_dir` itself, or `chains` > 1
/// independent chains (seeds `seed`, `seed+1`, …) into `chain-i/`
/// subdirectories, concurrently. Outcomes come back in chain order.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    chains: usize,
) -> Result<Vec<RunOutcome>, RunError> {
    assert!(chains >= 1, "need at least one chain");
    if chains == 1 {
        return Ok(vec![run_single(config, out_dir, config.seed)?]);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|i| {
                let sub = out_dir.join(format!("chain-{i}"));
                let seed = config.seed.wrapping_add(i as u64);
                scope.spawn(move || run_single(config, &sub, seed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    })
}

/// Re-run the estimators over an existing chain file, as written by
/// [`run_single`], under the given config.
pub fn rerun_estimators(
    config: &ExperimentConfig,
    chain_path: &Path,
) -> Result<(Chain, DensityEstimate, EstimatorReport), RunError> {
    let f = std::fs::File::open(chain_path).map_err(io_err(chain_path))?;
    let chain = Chain::read_csv(std::io::BufReader::new(f), config.burn_in, config.seed)?;
    let model = config.model.build();
    let density = estimate_density(&chain, &config.prior_lower, &config.prior_upper, &config.bins)?;
    let report = full_report(
        &chain,
        &density,
        config.epsilon,
        config.min_separation,
        Some(model.as_ref()),
        config.regions.as_deref(),
    )?;
    Ok((chain, density, report))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("({})", parts.join(", "))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "-".into(),
    }
}

/// Human-readable run summary: global estimators up top, one row per
/// region below, forward values where the model exposes a scalar check.
pub fn render_summary(config: &ExperimentConfig, outcome: &RunOutcome) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let model = config.model.build();
    let d = &outcome.diagnostics;
    let _ = writeln!(
        s,
        "model {}  K {}  burn-in {}  seed {}  acceptance {:.3}",
        model.name(),
        config.iterations,
        config.burn_in,
        outcome.chain.seed(),
        d.acceptance_rate,
    );
    let r = &outcome.report;
    let _ = writeln!(
        s,
        "MAP {}  CM {}  F(MAP) {}  F(CM) {}",
        fmt_vec(&r.map),
        fmt_vec(&r.cm),
        fmt_opt(r.forward_at_map),
        fmt_opt(r.forward_at_cm),
    );
    if r.regions.is_empty() {
        for (i, l) in r.lmaps.iter().enumerate() {
            let _ = writeln!(s, "lmap {}  {}  height {:.4}", i + 1, fmt_vec(&l.center), l.height);
        }
    } else {
        let _ = writeln!(
            s,
            "{:>3}  {:<22} {:>10} {:>10} {:>8} {:>9} {:>9} {:>9}",
            "#", "region", "LMAP", "LCM", "mass", "peak", "F(LMAP)", "F(LCM)"
        );
        for (i, reg) in r.regions.iter().enumerate() {
            let span = format!("[{} .. {})", fmt_vec(&reg.lo), fmt_vec(&reg.hi));
            let (fl, fc) = match &reg.forward_check {
                Some(fc) => (fmt_opt(fc.lmap), fmt_opt(fc.lcm)),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                s,
                "{:>3}  {:<22} {:>10} {:>10} {:>8.4} {:>9.4} {:>9} {:>9}",
                i + 1,
                span,
                fmt_vec(&reg.lmap),
                fmt_vec(&reg.lcm),
                reg.mass,
                reg.peak_height,
                fl,
                fc,
            );
        }
    }
    s
}
