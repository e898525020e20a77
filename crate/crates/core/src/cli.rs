//! `ienergy` command line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 parameters
//! outside the range covered by the known closed forms.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{self, BoundMethod, BoundReport};
use crate::closed_forms::{SpecialKind, SpecialMeasureSpec};
use crate::energy::{energy, energy_d2beta, energy_dbeta};
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::minimizer::{
    cardinality_sweep, default_cluster_eps, minimize, sweep_to_csv, MinimizeConfig,
    DEFAULT_GRAD_TOL, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_STEP, SWEEP_GRAD_TOL,
};
use crate::output::round_sig;
use crate::params::Params;
use crate::threshold::{self, beta_grid, compare_thresholds, thresholds_to_csv};

#[derive(Debug, Parser)]
#[command(name = "ienergy", version, about = "Power-law interaction energies, bounds and minimizers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy of a measure file or of a special configuration.
    Energy(EnergyArgs),
    /// Concavity lower bounds on the minimal energy.
    Bounds(BoundsArgs),
    /// Lower bounds on the simplex transition threshold.
    Threshold(ThresholdArgs),
    /// Particle minimization.
    Minimize(MinimizeArgs),
    /// Support cardinality sweep over several beta values.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpecialArg {
    Simplex,
    CrossPolytope,
    Shell,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Measure file in the `{"n", "points", "weights"}` JSON format.
    #[arg(long, conflicts_with = "special")]
    pub measure: Option<PathBuf>,
    #[arg(long, required_unless_present = "measure")]
    pub special: Option<SpecialArg>,
    /// Ambient dimension; taken from the measure file when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Radius for cross-polytopes and shells.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Also report the first beta-derivative.
    #[arg(long)]
    pub dbeta: bool,
    /// Also report the second beta-derivative.
    #[arg(long)]
    pub d2beta: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Linear,
    Strong,
    TwoStep,
    All,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub beta: Option<f64>,
    /// `start:stop:step`, both ends included.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output format; grids default to CSV, single values to JSON.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Minimization settings. Values from `--config` are used first and
/// explicit flags replace them.
#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// JSON file with any of the flag names below as keys (underscores).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub step_init: Option<f64>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub optimize_weights: bool,
    #[arg(long)]
    pub cluster_eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma separated beta values, in the order the rows are produced.
    #[arg(long, value_delimiter = ',', required = true)]
    pub betas: Vec<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub step_init: Option<f64>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub optimize_weights: bool,
    #[arg(long)]
    pub cluster_eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Contents of a `--config` file; every key is optional.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub k: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub step_init: Option<f64>,
    pub grad_tol: Option<f64>,
    pub seed: Option<u64>,
    pub optimize_weights: Option<bool>,
    pub cluster_eps: Option<f64>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Energy(a) => cmd_energy(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Minimize(a) => cmd_minimize(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

pub fn cmd_energy(a: &EnergyArgs, out: &mut dyn Write) -> Result<()> {
    let mut report = serde_json::Map::new();
    if let Some(path) = &a.measure {
        let mu: DiscreteMeasure = serde_json::from_str(&read(path)?)?;
        let n = a.n.unwrap_or(mu.dim());
        let p = Params::new(a.alpha, a.beta, n)?;
        report.insert("energy".into(), json!(energy(&p, &mu)?));
        if a.dbeta {
            report.insert("dbeta".into(), json!(energy_dbeta(&p, &mu)?));
        }
        if a.d2beta {
            report.insert("d2beta".into(), json!(energy_d2beta(&p, &mu)?));
        }
    } else {
        let n = a.n.ok_or_else(|| Error::InvalidConfig("--n is required with --special".into()))?;
        let kind = match a.special.expect("clap enforces --special without --measure") {
            SpecialArg::Simplex => SpecialKind::Simplex,
            SpecialArg::CrossPolytope => SpecialKind::CrossPolytope,
            SpecialArg::Shell => SpecialKind::Shell,
        };
        let spec = SpecialMeasureSpec::new(kind, n, a.radius)?;
        let p = Params::new(a.alpha, a.beta, n)?;
        report.insert("energy".into(), json!(spec.energy(&p)?));
        if a.dbeta || a.d2beta {
            let mu = spec.to_measure()?;
            if a.dbeta {
                report.insert("dbeta".into(), json!(energy_dbeta(&p, &mu)?));
            }
            if a.d2beta {
                report.insert("d2beta".into(), json!(energy_d2beta(&p, &mu)?));
            }
        }
    }
    write_json(out, &round_scalars(Value::Object(report)))
}

pub fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let all = bounds::enumerate_bounds(a.alpha, a.beta, a.n)?;
    let wanted = |m: BoundMethod| match a.method {
        MethodArg::All => true,
        MethodArg::Linear => m == BoundMethod::LinearInterp,
        MethodArg::Strong => m == BoundMethod::StrongConcaveInterp,
        MethodArg::TwoStep => m == BoundMethod::TwoStep,
    };
    let reports: Vec<BoundReport> = all.iter().filter(|r| wanted(r.method)).cloned().collect();
    if reports.is_empty() {
        return Err(Error::NoAnchors { alpha: a.alpha, beta: a.beta, n: a.n });
    }
    let best = bounds::best_lower_bound(a.alpha, a.beta, a.n)?;
    let text = match a.format {
        Format::Csv => bounds::bounds_to_csv(&reports),
        Format::Json => json_text(&round_scalars(json!({ "reports": reports, "best": best })))?,
    };
    emit(out, a.out.as_deref(), &text, || {
        format!("best lower bound {} ({})", crate::output::fmt_sig(best.lower_bound), best.method)
    })
}

pub fn cmd_threshold(a: &ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(grid) = &a.grid {
        let betas = parse_grid(grid)?;
        let rows = compare_thresholds(a.n, &betas)?;
        let text = match a.format.unwrap_or(Format::Csv) {
            Format::Csv => thresholds_to_csv(&rows),
            Format::Json => json_text(&round_scalars(json!(rows)))?,
        };
        return emit(out, a.out.as_deref(), &text, || format!("{} rows", rows.len()));
    }
    let beta = a.beta.expect("clap enforces --beta without --grid");
    let star = threshold::threshold_star(a.n, beta)?;
    let dlm = threshold::threshold_dlm(a.n, beta)?;
    let value = json!({
        "n": a.n,
        "beta": beta,
        "alpha_star": star.alpha_star,
        "alpha_f": dlm.alpha_star,
        "phi_based": star,
        "f_based": dlm,
    });
    let text = match a.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&round_scalars(value))?,
        Format::Csv => thresholds_to_csv(&[threshold::ThresholdRow {
            beta,
            alpha_star_phi: star.alpha_star,
            alpha_star_f: dlm.alpha_star,
            delta: star.alpha_star - dlm.alpha_star,
        }]),
    };
    emit(out, a.out.as_deref(), &text, || {
        format!("alpha_star {} alpha_f {}", star.alpha_star, dlm.alpha_star)
    })
}

pub fn cmd_minimize(a: &MinimizeArgs, out: &mut dyn Write) -> Result<()> {
    let file = load_config(a.config.as_deref())?;
    let cfg = build_config(
        &file,
        ConfigFile {
            n: a.n,
            alpha: a.alpha,
            beta: a.beta,
            k: a.k,
            restarts: a.restarts,
            max_iters: a.max_iters,
            step_init: a.step_init,
            grad_tol: a.grad_tol,
            seed: a.seed,
            optimize_weights: a.optimize_weights.then_some(true),
            cluster_eps: a.cluster_eps,
        },
        DEFAULT_GRAD_TOL,
    )?;
    let result = minimize(&cfg)?;
    let mut value = serde_json::to_value(&result)?;
    if let Value::Object(map) = &mut value {
        for key in ["energy", "grad_norm", "support_diameter"] {
            if let Some(v) = map.get_mut(key) {
                *v = round_scalars(v.take());
            }
        }
        if let Some(c) = map.get_mut("clusters") {
            *c = round_scalars(c.take());
        }
    }
    let text = json_text(&value)?;
    emit(out, a.out.as_deref(), &text, || {
        format!(
            "energy {} clusters {} iterations {} converged {}",
            crate::output::fmt_sig(result.energy),
            result.clusters.count,
            result.iterations,
            result.converged
        )
    })
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let file = load_config(a.config.as_deref())?;
    let first = *a
        .betas
        .first()
        .ok_or_else(|| Error::InvalidConfig("--betas needs at least one value".into()))?;
    let n = a.n.or(file.n);
    let mut cfg = build_config(
        &file,
        ConfigFile {
            n,
            alpha: a.alpha,
            beta: Some(first),
            k: Some(file.k.unwrap_or(1)),
            restarts: a.restarts,
            max_iters: a.max_iters,
            step_init: a.step_init,
            grad_tol: a.grad_tol,
            seed: a.seed,
            optimize_weights: a.optimize_weights.then_some(true),
            cluster_eps: a.cluster_eps,
        },
        SWEEP_GRAD_TOL,
    )?;
    cfg.k = 1;
    let rows = cardinality_sweep(cfg.params.alpha(), cfg.params.n(), &a.betas, &cfg)?;
    let text = sweep_to_csv(&rows);
    emit(out, a.out.as_deref(), &text, || {
        let counts: Vec<String> = rows.iter().map(|r| r.cluster_count.to_string()).collect();
        format!("cluster counts {}", counts.join(","))
    })
}

/// Values in `flags` win over values in `file`.
fn build_config(file: &ConfigFile, flags: ConfigFile, grad_tol_default: f64) -> Result<MinimizeConfig> {
    let missing = |name: &str| Error::InvalidConfig(format!("--{name} is required"));
    let n = flags.n.or(file.n).ok_or_else(|| missing("n"))?;
    let alpha = flags.alpha.or(file.alpha).ok_or_else(|| missing("alpha"))?;
    let beta = flags.beta.or(file.beta).ok_or_else(|| missing("beta"))?;
    let params = Params::new(alpha, beta, n)?;
    let cluster_eps = match flags.cluster_eps.or(file.cluster_eps) {
        Some(eps) => eps,
        None => default_cluster_eps(beta)?,
    };
    let cfg = MinimizeConfig {
        params,
        k: flags.k.or(file.k).ok_or_else(|| missing("k"))?,
        restarts: flags.restarts.or(file.restarts).unwrap_or(DEFAULT_RESTARTS),
        max_iters: flags.max_iters.or(file.max_iters).unwrap_or(DEFAULT_MAX_ITERS),
        step_init: flags.step_init.or(file.step_init).unwrap_or(DEFAULT_STEP),
        grad_tol: flags.grad_tol.or(file.grad_tol).unwrap_or(grad_tol_default),
        seed: flags.seed.or(file.seed).ok_or_else(|| missing("seed"))?,
        optimize_weights: flags.optimize_weights.or(file.optimize_weights).unwrap_or(false),
        cluster_eps,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => Ok(serde_json::from_str(&read(p)?)?),
        None => Ok(ConfigFile::default()),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidConfig(format!("grid must look like start:stop:step (got {spec:?})"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    beta_grid(nums[0], nums[1], nums[2])
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Rounds every float in `v` to 12 significant digits.
fn round_scalars(v: Value) -> Value {
    match v {
        Value::Number(num) if !(num.is_i64() || num.is_u64()) => {
            num.as_f64().map(|x| json!(round_sig(x))).unwrap_or(Value::Number(num))
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_scalars).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, x)| (k, round_scalars(x))).collect())
        }
        other => other,
    }
}

fn json_text(v: &Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    Ok(text)
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    out.write_all(json_text(v)?.as_bytes())?;
    Ok(())
}

/// Writes `text` to `path` and a summary line to `out`, or `text` to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str, summary: impl FnOnce() -> String) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text)?;
            writeln!(out, "{}", summary())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
