//! Lower bounds on the minimal energy `E_alpha(beta)` from concavity in `beta`.
//!
//! `E_alpha` is concave on `(0, alpha]`, so the chord between two exponents
//! whose minimal energies are known lies below it. On `[beta0, beta1]` it is
//! moreover strongly concave: its second derivative is at most `-c` with `c`
//! from [`strong_concavity_parameter`], which lifts the chord by
//! `t(1-t)(c/2)(beta1 - beta0)^2`.
//!
//! Known minimal energies ("anchors") come from [`known_min_energy_at`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::closed_forms::{shell_min_energy_beta2, simplex_energy};
use crate::error::{Error, Result};
use crate::output::fmt_sig;
use crate::params::Params;
use crate::roots::{bisect, MAX_BISECTIONS, X_TOL};

/// Grid size used by [`best_lower_bound`] for the two-step search.
pub const DEFAULT_TWO_STEP_GRID: usize = 64;

/// Distance within which `beta` is taken to coincide with an anchor exponent.
pub const BETA_MATCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    LinearInterp,
    StrongConcaveInterp,
    TwoStep,
}

impl BoundMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::LinearInterp => "linear_interp",
            BoundMethod::StrongConcaveInterp => "strong_concave_interp",
            BoundMethod::TwoStep => "two_step",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorSource {
    /// `E_alpha(alpha) = 0` since the kernel vanishes identically.
    ZeroAtAlpha,
    /// Spherical shell minimizer at `beta = 2`.
    ShellAtBetaTwo,
    /// Unit simplex minimizer at `beta = beta1(alpha)`.
    SimplexAtBeta1,
    /// Value supplied by the caller.
    Supplied,
    /// Lower bound at an intermediate exponent inside a two-step bound.
    TwoStepIntermediate,
}

/// A known value of (or lower bound on) `E_alpha(beta_anchor)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub beta_anchor: f64,
    pub energy: f64,
    pub source: AnchorSource,
}

impl Anchor {
    pub fn new(beta_anchor: f64, energy: f64, source: AnchorSource) -> Self {
        Anchor { beta_anchor, energy, source }
    }

    pub fn supplied(beta_anchor: f64, energy: f64) -> Self {
        Anchor::new(beta_anchor, energy, AnchorSource::Supplied)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub lower_bound: f64,
    pub method: BoundMethod,
    pub anchors: Vec<Anchor>,
}

pub const BOUND_CSV_HEADER: &str =
    "alpha,beta,n,method,lower_bound,anchor0_beta,anchor0_E,anchor1_beta,anchor1_E";

impl BoundReport {
    pub fn csv_row(&self) -> String {
        let anchor = |i: usize| {
            self.anchors
                .get(i)
                .map(|a| (fmt_sig(a.beta_anchor), fmt_sig(a.energy)))
                .unwrap_or_default()
        };
        let (b0, e0) = anchor(0);
        let (b1, e1) = anchor(1);
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_sig(self.alpha),
            fmt_sig(self.beta),
            self.n,
            self.method,
            fmt_sig(self.lower_bound),
            b0,
            e0,
            b1,
            e1
        )
    }
}

pub fn bounds_to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(BOUND_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Chord bound `(1-t) E0 + t E1` at `beta = (1-t) beta0 + t beta1`.
pub fn linear_interpolation_bound(
    alpha: f64,
    n: usize,
    lo: Anchor,
    hi: Anchor,
    beta: f64,
) -> Result<BoundReport> {
    let t = interpolation_weight(alpha, &lo, &hi, beta)?;
    Ok(BoundReport {
        alpha,
        beta,
        n,
        lower_bound: chord(&lo, &hi, t),
        method: BoundMethod::LinearInterp,
        anchors: vec![lo, hi],
    })
}

/// `c = (1/(2 beta1^2)) (n/(n+1)) (1/beta1 - 1/alpha)`, the magnitude of the
/// upper bound on the second `beta`-derivative of the energy.
pub fn strong_concavity_parameter(alpha: f64, beta1: f64, n: usize) -> Result<f64> {
    if !(beta1 > 0.0 && beta1 <= alpha) {
        return Err(Error::Domain(format!(
            "strong concavity needs 0 < beta1 <= alpha (beta1 = {beta1}, alpha = {alpha})"
        )));
    }
    if n < 1 {
        return Err(Error::Domain("dimension n must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(0.5 / (beta1 * beta1) * nf / (nf + 1.0) * (1.0 / beta1 - 1.0 / alpha))
}

/// Chord bound lifted by `t(1-t)(c/2)(beta1 - beta0)^2`.
pub fn strong_interpolation_bound(
    alpha: f64,
    n: usize,
    lo: Anchor,
    hi: Anchor,
    beta: f64,
) -> Result<BoundReport> {
    let t = interpolation_weight(alpha, &lo, &hi, beta)?;
    let c = strong_concavity_parameter(alpha, hi.beta_anchor, n)?;
    let width = hi.beta_anchor - lo.beta_anchor;
    Ok(BoundReport {
        alpha,
        beta,
        n,
        lower_bound: chord(&lo, &hi, t) + t * (1.0 - t) * 0.5 * c * width * width,
        method: BoundMethod::StrongConcaveInterp,
        anchors: vec![lo, hi],
    })
}

/// Strong interpolation through an intermediate exponent.
///
/// With `E_alpha(alpha) = 0` as the outer anchor the concavity parameter
/// vanishes, so instead: for every `beta1'` on a uniform interior grid of
/// `(beta, alpha)`, bound `E_alpha(beta1')` from below using `(lo, alpha)`,
/// then bound `E_alpha(beta)` using `(lo, beta1')`. Returns the best bound;
/// its second anchor is the chosen `beta1'`.
pub fn two_step_bound(
    alpha: f64,
    n: usize,
    lo: Anchor,
    beta: f64,
    grid_size: usize,
) -> Result<BoundReport> {
    if grid_size < 2 {
        return Err(Error::InvalidConfig(format!("grid_size must be at least 2 (got {grid_size})")));
    }
    if !(lo.beta_anchor < beta && beta < alpha) {
        return Err(Error::Domain(format!(
            "two-step bound needs beta0 < beta < alpha (beta0 = {}, beta = {beta}, alpha = {alpha})",
            lo.beta_anchor
        )));
    }
    let outer = Anchor::new(alpha, 0.0, AnchorSource::ZeroAtAlpha);
    let mut best: Option<BoundReport> = None;
    for i in 1..grid_size {
        let mid_beta = beta + (alpha - beta) * i as f64 / grid_size as f64;
        let mid = strong_interpolation_bound(alpha, n, lo, outer, mid_beta)?;
        let mid_anchor = Anchor::new(mid_beta, mid.lower_bound, AnchorSource::TwoStepIntermediate);
        let candidate = strong_interpolation_bound(alpha, n, lo, mid_anchor, beta)?;
        if best.as_ref().is_none_or(|b| candidate.lower_bound > b.lower_bound) {
            best = Some(candidate);
        }
    }
    let mut report = best.expect("grid has at least one interior point");
    report.method = BoundMethod::TwoStep;
    report.anchors.push(outer);
    Ok(report)
}

/// Smallest `beta` with `c^alpha/alpha = c^beta/beta`, where `c = 3/2` for
/// `n = 1` and `c = sqrt(2)` for `n >= 2`.
///
/// Defined for `alpha` in `[1/log c, 3)` (n = 1) or `[1/log c, 4)` (n >= 2);
/// at the left end, where `c^x/x` has its minimum, the root is `alpha` itself.
pub fn beta1_of_alpha(alpha: f64, n: usize) -> Result<f64> {
    let (ln_c, upper) = beta1_constants(n)?;
    let edge = 1.0 / ln_c;
    if !(alpha >= edge && alpha < upper) {
        return Err(Error::Domain(format!(
            "beta1(alpha) is defined for alpha in [{edge}, {upper}) when n = {n} (alpha = {alpha})"
        )));
    }
    if alpha == edge {
        return Ok(alpha);
    }
    // log(c^x / x) - log(c^alpha / alpha): positive left of the root, negative at the edge.
    let log_gap = |x: f64| (x - alpha) * ln_c - (x / alpha).ln();
    let mut lo = 0.5 * edge;
    while log_gap(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::RootNotBracketed { lo, hi: edge, f_lo: log_gap(lo), f_hi: log_gap(edge) });
        }
    }
    Ok(bisect(log_gap, lo, edge, X_TOL, MAX_BISECTIONS)?.x)
}

/// `c^beta/beta - c^alpha/alpha` for the `beta1` equation.
pub fn beta1_residual(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let (ln_c, _) = beta1_constants(n)?;
    Ok((beta * ln_c).exp() / beta - (alpha * ln_c).exp() / alpha)
}

fn beta1_constants(n: usize) -> Result<(f64, f64)> {
    match n {
        0 => Err(Error::Domain("dimension n must be at least 1".into())),
        1 => Ok((1.5f64.ln(), 3.0)),
        _ => Ok((0.5 * std::f64::consts::LN_2, 4.0)),
    }
}

/// The exact minimal energy at `(alpha, beta, n)` when one of the known
/// minimizers applies: zero at `beta = alpha`, the spherical shell at
/// `beta = 2` (`n >= 2`, `alpha` in `(2, 4)`), or the unit simplex at
/// `beta = beta1(alpha)`.
pub fn known_min_energy_at(alpha: f64, beta: f64, n: usize) -> Option<Anchor> {
    known_anchors(alpha, n)
        .into_iter()
        .find(|a| (a.beta_anchor - beta).abs() <= BETA_MATCH_TOL)
}

/// All anchors available for fixed `alpha` and `n`, sorted by exponent.
pub fn known_anchors(alpha: f64, n: usize) -> Vec<Anchor> {
    let mut anchors = Vec::new();
    if n >= 2 && alpha > 2.0 && alpha < 4.0 {
        if let Ok(e) = shell_min_energy_beta2(alpha, n) {
            anchors.push(Anchor::new(2.0, e, AnchorSource::ShellAtBetaTwo));
        }
    }
    if let Ok(b1) = beta1_of_alpha(alpha, n) {
        if b1 < alpha {
            if let Ok(p) = Params::new(alpha, b1, n) {
                anchors.push(Anchor::new(b1, simplex_energy(&p), AnchorSource::SimplexAtBeta1));
            }
        }
    }
    if alpha > 0.0 && alpha.is_finite() {
        anchors.push(Anchor::new(alpha, 0.0, AnchorSource::ZeroAtAlpha));
    }
    anchors.sort_by(|a, b| a.beta_anchor.total_cmp(&b.beta_anchor));
    anchors
}

/// Every bound obtainable from the known anchors: linear and strong bounds
/// for each anchor pair enclosing `beta`, plus the two-step bound whenever
/// the pair's upper anchor is `alpha`.
pub fn enumerate_bounds(alpha: f64, beta: f64, n: usize) -> Result<Vec<BoundReport>> {
    if !(beta >= 2.0 && beta <= alpha) {
        return Err(Error::UnsupportedRange(format!(
            "bounds are available for 2 <= beta <= alpha (alpha = {alpha}, beta = {beta})"
        )));
    }
    let anchors = known_anchors(alpha, n);
    let mut reports = Vec::new();
    for (i, lo) in anchors.iter().enumerate() {
        for hi in &anchors[i + 1..] {
            if !(lo.beta_anchor <= beta && beta <= hi.beta_anchor) {
                continue;
            }
            reports.push(linear_interpolation_bound(alpha, n, *lo, *hi, beta)?);
            reports.push(strong_interpolation_bound(alpha, n, *lo, *hi, beta)?);
            if hi.source == AnchorSource::ZeroAtAlpha && lo.beta_anchor < beta && beta < alpha {
                reports.push(two_step_bound(alpha, n, *lo, beta, DEFAULT_TWO_STEP_GRID)?);
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::NoAnchors { alpha, beta, n });
    }
    Ok(reports)
}

/// The largest of [`enumerate_bounds`].
pub fn best_lower_bound(alpha: f64, beta: f64, n: usize) -> Result<BoundReport> {
    let reports = enumerate_bounds(alpha, beta, n)?;
    let mut best = reports[0].clone();
    for r in &reports[1..] {
        if r.lower_bound > best.lower_bound {
            best = r.clone();
        }
    }
    Ok(best)
}

fn interpolation_weight(alpha: f64, lo: &Anchor, hi: &Anchor, beta: f64) -> Result<f64> {
    let (b0, b1) = (lo.beta_anchor, hi.beta_anchor);
    if !(b0 > 0.0 && b0 < b1 && b1 <= alpha && b0 <= beta && beta <= b1) {
        return Err(Error::Domain(format!(
            "interpolation needs 0 < beta0 <= beta <= beta1 <= alpha with beta0 < beta1 \
             (beta0 = {b0}, beta = {beta}, beta1 = {b1}, alpha = {alpha})"
        )));
    }
    Ok((beta - b0) / (b1 - b0))
}

fn chord(lo: &Anchor, hi: &Anchor, t: f64) -> f64 {
    (1.0 - t) * lo.energy + t * hi.energy
}
