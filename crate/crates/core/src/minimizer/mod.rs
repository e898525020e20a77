//! Particle minimization of the interaction energy over `k`-atom measures.
//!
//! [`minimize`] runs independent seeded descents from random starts in the
//! ball of radius `e^(1/beta)` and keeps the lowest energy. The diagnostics
//! in [`cluster`] turn the resulting point cloud into an estimated support
//! (single-linkage clusters) and test it for shell or simplex geometry.

pub mod cluster;
pub mod descent;
pub mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{diameter_bound, energy};
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::params::Params;

pub use cluster::{
    cluster_support, shell_diagnostics, simplex_diagnostics, ClusterSummary, ShellDiagnostics,
    SimplexDiagnostics,
};
pub use descent::{descend, energy_gradient, Descent, DescentSettings};
pub use sweep::{
    cardinality_sweep, concavity_probe, sweep_to_csv, ConcavityReport, SweepRow, SWEEP_CSV_HEADER,
};

/// Gradient tolerance for comparisons against closed forms.
pub const DEFAULT_GRAD_TOL: f64 = 1e-10;
/// Gradient tolerance for sweeps.
pub const SWEEP_GRAD_TOL: f64 = 1e-7;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_MAX_ITERS: usize = 20_000;
pub const DEFAULT_STEP: f64 = 0.1;
/// Slack allowed on top of `e^(1/beta)` before a support counts as too wide.
pub const DIAMETER_SLACK: f64 = 0.05;

/// `1e-3 * e^(1/beta)`.
pub fn default_cluster_eps(beta: f64) -> Result<f64> {
    Ok(1e-3 * diameter_bound(beta)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub params: Params,
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_tol: f64,
    pub seed: u64,
    pub optimize_weights: bool,
    pub cluster_eps: f64,
}

impl MinimizeConfig {
    /// Defaults for everything but the parameters, atom count and seed.
    pub fn new(params: Params, k: usize, seed: u64) -> Result<Self> {
        let cfg = MinimizeConfig {
            params,
            k,
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            step_init: DEFAULT_STEP,
            grad_tol: DEFAULT_GRAD_TOL,
            seed,
            optimize_weights: false,
            cluster_eps: default_cluster_eps(params.beta())?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k < 1 {
            return bad(format!("k must be at least 1 (k = {})", self.k));
        }
        if self.restarts < 1 {
            return bad(format!("restarts must be at least 1 (restarts = {})", self.restarts));
        }
        if self.max_iters < 1 {
            return bad(format!("max_iters must be at least 1 (max_iters = {})", self.max_iters));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return bad(format!("step_init must be positive (step_init = {})", self.step_init));
        }
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol must be positive (grad_tol = {})", self.grad_tol));
        }
        if !(self.cluster_eps > 0.0 && self.cluster_eps.is_finite()) {
            return bad(format!("cluster_eps must be positive (cluster_eps = {})", self.cluster_eps));
        }
        if !(self.params.beta() > 1.0) {
            return bad(format!("beta must exceed 1 (beta = {})", self.params.beta()));
        }
        Ok(())
    }

    pub fn descent_settings(&self) -> DescentSettings {
        DescentSettings {
            max_iters: self.max_iters,
            step_init: self.step_init,
            grad_tol: self.grad_tol,
            optimize_weights: self.optimize_weights,
        }
    }
}

/// Best configuration over all restarts. Serializes as the measure JSON
/// (`n`, `points`, `weights`) with the scalar fields alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    #[serde(flatten)]
    pub measure: DiscreteMeasure,
    /// Brute-force energy of `measure`.
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the restart that produced the result.
    pub restart: usize,
    pub support_diameter: f64,
    pub clusters: ClusterSummary,
}

impl MinimizeResult {
    /// Whether the support is wider than `e^(1/beta)` plus [`DIAMETER_SLACK`].
    pub fn diameter_exceeds_bound(&self, beta: f64) -> bool {
        diameter_bound(beta).is_ok_and(|d| self.support_diameter > d + DIAMETER_SLACK)
    }
}

/// Random start for restart `index`: `k` atoms uniform in the ball of radius
/// `e^(1/beta)`, uniform weights. Each restart draws from its own ChaCha
/// stream of the master seed.
pub fn initial_measure(params: &Params, k: usize, seed: u64, index: usize) -> Result<DiscreteMeasure> {
    let dim = params.n();
    let radius = diameter_bound(params.beta())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut coords = Vec::with_capacity(k * dim);
    for _ in 0..k {
        let mut dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u: f64 = rng.random();
        let scale = radius * u.powf(1.0 / dim as f64) / norm.max(f64::MIN_POSITIVE);
        dir.iter_mut().for_each(|c| *c *= scale);
        coords.extend(dir);
    }
    DiscreteMeasure::from_flat(dim, coords, None)
}

/// Runs `cfg.restarts` descents (in parallel) and returns the one with the
/// lowest energy, ties going to the lowest restart index.
pub fn minimize(cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    let settings = cfg.descent_settings();
    let runs: Vec<(f64, Descent)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let start = initial_measure(&cfg.params, cfg.k, cfg.seed, i)?;
            let run = descend(&cfg.params, &start, &settings, false)?;
            Ok((energy(&cfg.params, &run.measure)?, run))
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, (e, _)) in runs.iter().enumerate() {
        if *e < runs[best].0 {
            best = i;
        }
    }
    let (energy, run) = runs.into_iter().nth(best).expect("at least one restart");
    let clusters = cluster_support(&run.measure, cfg.cluster_eps);
    Ok(MinimizeResult {
        support_diameter: run.measure.support_diameter(),
        measure: run.measure,
        energy,
        grad_norm: run.grad_norm,
        iterations: run.iterations,
        converged: run.converged,
        restart: best,
        clusters,
    })
}
