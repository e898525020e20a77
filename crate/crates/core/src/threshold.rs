//! Lower bounds on the simplex transition threshold.
//!
//! Below the threshold `alpha_Delta(beta)` the unit simplex does not minimize
//! the energy. Two computable lower bounds are provided, each the largest
//! preimage `alpha` with `u(alpha) = u(beta)` of a unimodal function `u`:
//!
//! * [`threshold_star`] uses [`phi`], which compares the optimal cross-polytope
//!   against the simplex;
//! * [`threshold_dlm`] uses [`f_underline`], the Euler-Lagrange based family.

use std::f64::consts::{LN_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{optimal_cross_polytope_energy, simplex_energy};
use crate::error::{Error, Result};
use crate::output::fmt_sig;
use crate::params::Params;
use crate::roots::{bisect, expand_until, MAX_BISECTIONS, MAX_DOUBLINGS, X_TOL};

/// Differences within this distance of zero count as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// `phi_n(gamma) -> PHI_LIMIT` as `gamma -> infinity`.
pub const PHI_LIMIT: f64 = -SQRT_2;

/// Grid used to certify unimodality of `f_n` before trusting a bisection.
const SCAN_LO: f64 = 0.05;
const SCAN_HI: f64 = 50.0;
const SCAN_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    PhiBased,
    FBased,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub n: usize,
    pub beta: f64,
    pub alpha_star: f64,
    pub method: ThresholdMethod,
    /// Final root bracket; `(beta, beta)` when degenerate.
    pub bracket: (f64, f64),
    /// `u(alpha_star) - u(beta)`.
    pub residual: f64,
    /// No solution above `beta` exists, so `alpha_star = beta`.
    pub degenerate: bool,
}

/// `phi_n(gamma) = -((n+1)(2n-2+2^(gamma/2)) / (2n^2))^(1/gamma)`.
pub fn phi(n: usize, gamma: f64) -> Result<f64> {
    check_n(n)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("phi needs gamma > 0 (gamma = {gamma})")));
    }
    let nf = n as f64;
    // log(2n - 2 + 2^(gamma/2)) without overflowing for large gamma
    let half = 0.5 * gamma * LN_2;
    let log_sum = half + ((2.0 * nf - 2.0) * (-half).exp()).ln_1p();
    let log_inner = (nf + 1.0).ln() - (2.0 * nf * nf).ln() + log_sum;
    Ok(-(log_inner / gamma).exp())
}

/// `f_n(t)`: `(2^-1 - 2^-t)/t` for `n = 1`, otherwise
/// `(n - (2n/(n+1))^(t/2) - n((n-1)/(n+1))^(t/2)) / t`.
pub fn f_underline(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_t(t)?;
    Ok(f_numerator(n, t) / t)
}

/// Analytic `d/dt f_n(t)`.
pub fn f_underline_dt(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_t(t)?;
    let num = f_numerator(n, t);
    let dnum = if n == 1 {
        LN_2 * 2f64.powf(-t)
    } else {
        let nf = n as f64;
        let a = 2.0 * nf / (nf + 1.0);
        let b = (nf - 1.0) / (nf + 1.0);
        -0.5 * a.ln() * a.powf(t / 2.0) - 0.5 * nf * b.ln() * b.powf(t / 2.0)
    };
    Ok((dnum * t - num) / (t * t))
}

fn f_numerator(n: usize, t: f64) -> f64 {
    if n == 1 {
        0.5 - 2f64.powf(-t)
    } else {
        let nf = n as f64;
        nf - (2.0 * nf / (nf + 1.0)).powf(t / 2.0) - nf * ((nf - 1.0) / (nf + 1.0)).powf(t / 2.0)
    }
}

/// Left end `1 + (n-1)/(2n^2)` of the interval on which the peak condition is posed.
pub fn peak_condition_left_edge(n: usize) -> f64 {
    let nf = n as f64;
    1.0 + (nf - 1.0) / (2.0 * nf * nf)
}

/// `g_n(t) = -(K t - (2n-2)) log(K t - (2n-2)) + K t log t` with `K = 2n^2/(n+1)`.
///
/// `phi_n` increases exactly where `g_n(t) > 0` after the change of variables
/// `gamma = 2 log2(K t - (2n-2))`.
pub fn peak_condition(n: usize, t: f64) -> f64 {
    let (k, shift) = peak_constants(n);
    let s = k * t - shift;
    -s * s.ln() + k * t * t.ln()
}

/// `g_n''(t) = -K(2n-2) / (t (K t - (2n-2)))`, negative on the domain.
pub fn peak_condition_d2(n: usize, t: f64) -> f64 {
    let (k, shift) = peak_constants(n);
    -k * shift / (t * (k * t - shift))
}

fn peak_constants(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (2.0 * nf * nf / (nf + 1.0), 2.0 * nf - 2.0)
}

/// Unique root of [`peak_condition`] to the right of its left edge, `n >= 2`.
pub fn t0(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("t0 needs n >= 2 (n = {n})")));
    }
    let lo = peak_condition_left_edge(n);
    let hi = expand_until(lo, lo + 1.0, MAX_DOUBLINGS, |t| peak_condition(n, t) < 0.0)?;
    Ok(bisect(|t| peak_condition(n, t), lo, hi, X_TOL, MAX_BISECTIONS)?.x)
}

/// Location of the unique maximum of `phi_n`, `n >= 2`.
pub fn gamma0(n: usize) -> Result<f64> {
    let t = t0(n)?;
    let (k, shift) = peak_constants(n);
    Ok(2.0 * (k * t - shift).log2())
}

/// Largest `alpha` with `phi_n(alpha) = phi_n(beta)`, `beta >= 2`.
///
/// For `n = 1` `phi_1` is constant and the result is degenerate.
pub fn threshold_star(n: usize, beta: f64) -> Result<ThresholdResult> {
    check_n(n)?;
    check_beta(beta)?;
    if n == 1 {
        return Ok(degenerate(n, beta, ThresholdMethod::PhiBased));
    }
    let peak = gamma0(n)?;
    let u = |g: f64| phi(n, g).expect("gamma is positive");
    largest_preimage(n, beta, peak, PHI_LIMIT, ThresholdMethod::PhiBased, u)
}

/// Largest `alpha >= 2` with `f_n(alpha) = f_n(beta)`, `beta >= 2`.
pub fn threshold_dlm(n: usize, beta: f64) -> Result<ThresholdResult> {
    check_n(n)?;
    check_beta(beta)?;
    let peak = f_underline_peak(n)?;
    let limit = if n == 1 { 0.0 } else { f64::NEG_INFINITY };
    let u = |t: f64| f_underline(n, t).expect("t is positive");
    largest_preimage(n, beta, peak, limit, ThresholdMethod::FBased, u)
}

/// Argmax of `f_n`, after checking that `f_n'` changes sign exactly once on
/// the scan grid.
pub fn f_underline_peak(n: usize) -> Result<f64> {
    check_n(n)?;
    let steps = ((SCAN_HI - SCAN_LO) / SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| SCAN_LO + i as f64 * SCAN_STEP).collect();
    let slopes: Vec<f64> = grid.iter().map(|&t| f_underline_dt(n, t)).collect::<Result<_>>()?;
    let changes: Vec<usize> = slopes
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].signum() != w[1].signum())
        .map(|(i, _)| i)
        .collect();
    if changes.len() != 1 || slopes[0] <= 0.0 {
        return Err(Error::NotUnimodal { what: format!("f_{n}"), sign_changes: changes.len() });
    }
    let i = changes[0];
    let root = bisect(
        |t| f_underline_dt(n, t).expect("t is positive"),
        grid[i],
        grid[i + 1],
        X_TOL,
        MAX_BISECTIONS,
    )?;
    Ok(root.x)
}

fn largest_preimage<U>(
    n: usize,
    beta: f64,
    peak: f64,
    limit: f64,
    method: ThresholdMethod,
    u: U,
) -> Result<ThresholdResult>
where
    U: Fn(f64) -> f64,
{
    if beta >= peak {
        return Ok(degenerate(n, beta, method));
    }
    let target = u(beta);
    // Past the peak u decreases towards `limit`; a level this close to the
    // limit has no finite preimage worth chasing.
    if target <= limit + ZERO_TOL {
        return Ok(degenerate(n, beta, method));
    }
    let level = |x: f64| u(x) - target;
    let hi = expand_until(peak, peak + 1.0, MAX_DOUBLINGS, |x| level(x) < 0.0)?;
    let root = bisect(level, peak, hi, X_TOL, MAX_BISECTIONS)?;
    Ok(ThresholdResult {
        n,
        beta,
        alpha_star: root.x,
        method,
        bracket: root.bracket,
        residual: root.residual,
        degenerate: false,
    })
}

fn degenerate(n: usize, beta: f64, method: ThresholdMethod) -> ThresholdResult {
    ThresholdResult {
        n,
        beta,
        alpha_star: beta,
        method,
        bracket: (beta, beta),
        residual: 0.0,
        degenerate: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Competition {
    /// The optimal cross-polytope has strictly lower energy than the simplex.
    SimplexBeaten,
    SimplexAtLeastTied,
}

/// Both sides of the simplex versus cross-polytope comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitionDiffs {
    /// `phi_n(alpha) - phi_n(beta)`.
    pub phi_diff: f64,
    /// Optimal cross-polytope energy minus simplex energy.
    pub energy_diff: f64,
}

pub fn competition_diffs(p: &Params) -> Result<CompetitionDiffs> {
    p.require_positive_beta()?;
    let phi_diff = phi(p.n(), p.alpha())? - phi(p.n(), p.beta())?;
    let energy_diff = optimal_cross_polytope_energy(p)? - simplex_energy(p);
    Ok(CompetitionDiffs { phi_diff, energy_diff })
}

/// Checks that the two differences have opposite signs (differences within
/// [`ZERO_TOL`] of zero are compatible with either sign) and reports which
/// measure wins.
pub fn sign_check(p: &Params) -> Result<Competition> {
    let d = competition_diffs(p)?;
    let same_sign = (d.phi_diff > ZERO_TOL && d.energy_diff > ZERO_TOL)
        || (d.phi_diff < -ZERO_TOL && d.energy_diff < -ZERO_TOL);
    if same_sign {
        return Err(Error::SignViolation {
            alpha: p.alpha(),
            beta: p.beta(),
            n: p.n(),
            phi_diff: d.phi_diff,
            energy_diff: d.energy_diff,
        });
    }
    Ok(if d.energy_diff < -ZERO_TOL {
        Competition::SimplexBeaten
    } else {
        Competition::SimplexAtLeastTied
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub beta: f64,
    pub alpha_star_phi: f64,
    pub alpha_star_f: f64,
    pub delta: f64,
}

/// Both threshold bounds over a grid of `beta` values, in grid order.
pub fn compare_thresholds(n: usize, beta_grid: &[f64]) -> Result<Vec<ThresholdRow>> {
    if n < 2 {
        return Err(Error::Domain(format!("threshold comparison needs n >= 2 (n = {n})")));
    }
    beta_grid
        .par_iter()
        .map(|&beta| {
            let star = threshold_star(n, beta)?.alpha_star;
            let dlm = threshold_dlm(n, beta)?.alpha_star;
            Ok(ThresholdRow { beta, alpha_star_phi: star, alpha_star_f: dlm, delta: star - dlm })
        })
        .collect()
}

pub const THRESHOLD_CSV_HEADER: &str = "beta,alpha_star_phi,alpha_star_f,delta";

pub fn thresholds_to_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from(THRESHOLD_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(r.beta),
            fmt_sig(r.alpha_star_phi),
            fmt_sig(r.alpha_star_f),
            fmt_sig(r.delta)
        ));
    }
    out
}

/// `start, start + step, ...` up to `stop` inclusive (to rounding).
pub fn beta_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "grid needs start <= stop and step > 0 (got {start}:{stop}:{step})"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn check_n(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::Domain("dimension n must be at least 1".into()))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument must be positive (t = {t})")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta >= 2.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("threshold bounds need beta >= 2 (beta = {beta})")))
    }
}
