//! Multi-run experiments: support growth as `beta` decreases toward 2 and
//! concavity / monotonicity of the estimated minimal energy in `beta`.

use serde::{Deserialize, Serialize};

use super::{minimize, shell_diagnostics, MinimizeConfig, MinimizeResult};
use crate::bounds::{best_lower_bound, strong_concavity_parameter};
use crate::error::{Error, Result};
use crate::output::fmt_sig;

/// Largest atom count tried by [`cardinality_sweep`].
pub const MAX_SWEEP_K: usize = 512;
/// Energy gain below which doubling `k` is considered pointless.
pub const SWEEP_IMPROVEMENT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub k_used: usize,
    pub cluster_count: usize,
    pub energy: f64,
    pub lower_bound: f64,
    pub radial_std: f64,
}

pub const SWEEP_CSV_HEADER: &str = "beta,k_used,cluster_count,energy,lower_bound,radial_std";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sig(r.beta),
            r.k_used,
            r.cluster_count,
            fmt_sig(r.energy),
            fmt_sig(r.lower_bound),
            fmt_sig(r.radial_std)
        ));
    }
    out
}

/// For each `beta`, minimizes with `k = 2(n+1), 4(n+1), ...` (capped at
/// [`MAX_SWEEP_K`]) until doubling lowers the energy by less than
/// [`SWEEP_IMPROVEMENT_TOL`], then reports the cluster count of the best run.
///
/// `base_cfg` supplies everything except `beta` and `k`; its `cluster_eps`
/// is used for every row.
pub fn cardinality_sweep(
    alpha: f64,
    n: usize,
    betas: &[f64],
    base_cfg: &MinimizeConfig,
) -> Result<Vec<SweepRow>> {
    let upper = if n == 1 { 3.0 } else { 4.0 };
    if !(alpha > 2.0 && alpha < upper) {
        return Err(Error::UnsupportedRange(format!(
            "cardinality sweeps need alpha in (2, {upper}) for n = {n} (alpha = {alpha})"
        )));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 2.0 && **b < alpha)) {
        return Err(Error::UnsupportedRange(format!(
            "sweep exponents must lie in (2, alpha) (beta = {b}, alpha = {alpha})"
        )));
    }
    betas
        .iter()
        .map(|&beta| {
            let params = base_cfg.params.with_beta(beta)?;
            if params.alpha() != alpha || params.n() != n {
                return Err(Error::InvalidConfig(
                    "base configuration disagrees with the sweep's alpha or n".into(),
                ));
            }
            let run = |k: usize| {
                minimize(&MinimizeConfig { params, k, ..base_cfg.clone() })
            };
            let mut k = (2 * (n + 1)).min(MAX_SWEEP_K);
            let mut best: MinimizeResult = run(k)?;
            let mut k_used = k;
            while k < MAX_SWEEP_K {
                k = (2 * k).min(MAX_SWEEP_K);
                let next = run(k)?;
                let gain = best.energy - next.energy;
                if gain > 0.0 {
                    best = next;
                    k_used = k;
                }
                if gain < SWEEP_IMPROVEMENT_TOL {
                    break;
                }
            }
            Ok(SweepRow {
                beta,
                k_used,
                cluster_count: best.clusters.count,
                energy: best.energy,
                lower_bound: best_lower_bound(alpha, beta, n)?.lower_bound,
                radial_std: shell_diagnostics(&best.measure).radial_std,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub betas: [f64; 3],
    pub energies: [f64; 3],
    /// `E(b2) - (E(b1) + E(b3))/2`; concavity makes it non-negative.
    pub slack: f64,
    /// `[E(b2) - E(b1), E(b3) - E(b2)]`; monotonicity makes both non-negative.
    pub monotone_diffs: [f64; 2],
    /// Slack lower bound implied by strong concavity with parameter
    /// `c = strong_concavity_parameter(alpha, b3, n)`:
    /// `(c/2)((b3 - b1)/2)^2 / 2`.
    pub strong_slack_target: f64,
}

/// Estimates the minimal energy at three equally spaced exponents with
/// [`minimize`] and reports midpoint concavity and monotonicity.
pub fn concavity_probe(
    alpha: f64,
    n: usize,
    betas: [f64; 3],
    cfg: &MinimizeConfig,
) -> Result<ConcavityReport> {
    let [b1, b2, b3] = betas;
    if !(b1 > 0.0 && b1 <= b2 && b2 <= b3 && b3 <= alpha) {
        return Err(Error::Domain(format!(
            "need 0 < b1 <= b2 <= b3 <= alpha (got {b1}, {b2}, {b3}, alpha = {alpha})"
        )));
    }
    if (b2 - 0.5 * (b1 + b3)).abs() > 1e-12 * b3 {
        return Err(Error::Domain(format!("b2 = {b2} is not the midpoint of [{b1}, {b3}]")));
    }
    let base = cfg.params.with_beta(b1)?;
    if base.alpha() != alpha || base.n() != n {
        return Err(Error::InvalidConfig(
            "configuration disagrees with the probe's alpha or n".into(),
        ));
    }
    let mut energies = [0.0; 3];
    for (slot, &beta) in energies.iter_mut().zip(&betas) {
        let params = cfg.params.with_beta(beta)?;
        *slot = minimize(&MinimizeConfig { params, ..cfg.clone() })?.energy;
    }
    let [e1, e2, e3] = energies;
    let c = strong_concavity_parameter(alpha, b3, n)?;
    let half_width = 0.5 * (b3 - b1);
    Ok(ConcavityReport {
        betas,
        energies,
        slack: e2 - 0.5 * (e1 + e3),
        monotone_diffs: [e2 - e1, e3 - e2],
        strong_slack_target: 0.5 * c * half_width * half_width * 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    #[test]
    fn degenerate_probe_has_zero_slack() {
        let p = Params::new(3.0, 2.5, 2).unwrap();
        let mut cfg = MinimizeConfig::new(p, 4, 3).unwrap();
        cfg.restarts = 2;
        let r = concavity_probe(3.0, 2, [2.5, 2.5, 2.5], &cfg).unwrap();
        assert_eq!(r.slack, 0.0);
        assert_eq!(r.monotone_diffs, [0.0, 0.0]);
    }

    #[test]
    fn probe_and_sweep_reject_bad_input() {
        let p = Params::new(3.0, 2.5, 2).unwrap();
        let cfg = MinimizeConfig::new(p, 4, 3).unwrap();
        assert!(concavity_probe(3.0, 2, [2.2, 2.6, 2.8], &cfg).is_err());
        assert!(concavity_probe(3.0, 2, [2.8, 2.5, 2.2], &cfg).is_err());
        assert!(matches!(
            cardinality_sweep(5.0, 2, &[2.5], &cfg),
            Err(Error::UnsupportedRange(_))
        ));
        assert!(cardinality_sweep(3.0, 2, &[1.9], &cfg).is_err());
    }

    #[test]
    fn csv_layout() {
        let row = SweepRow {
            beta: 2.5,
            k_used: 12,
            cluster_count: 3,
            energy: -0.02,
            lower_bound: -0.03,
            radial_std: 1e-9,
        };
        assert_eq!(sweep_to_csv(&[row]), format!("{SWEEP_CSV_HEADER}\n2.5,12,3,-0.02,-0.03,1e-9\n"));
    }
}
