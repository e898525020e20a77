//! Unit simplices, cross-polytopes and spherical shells.
//!
//! Simplex and cross-polytope measures are built explicitly so their closed
//! form energies can be checked against [`crate::energy::energy`]. Shells are
//! not discrete and only appear through closed-form energies and radii.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    Simplex,
    CrossPolytope,
    Shell,
}

/// One of the three special measure families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialMeasureSpec {
    pub kind: SpecialKind,
    pub n: usize,
    /// Present exactly when `kind` is not `Simplex`.
    pub radius: Option<f64>,
}

impl SpecialMeasureSpec {
    pub fn new(kind: SpecialKind, n: usize, radius: Option<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("dimension n must be at least 1".into()));
        }
        match (kind, radius) {
            (SpecialKind::Simplex, None) => {}
            (SpecialKind::Simplex, Some(_)) => {
                return Err(Error::InvalidParams("the unit simplex takes no radius".into()))
            }
            (_, None) => {
                return Err(Error::InvalidParams(format!("{kind:?} requires a radius")))
            }
            (_, Some(r)) => check_radius(r)?,
        }
        Ok(SpecialMeasureSpec { kind, n, radius })
    }

    /// The discrete measure, for the two discrete families.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        match self.kind {
            SpecialKind::Simplex => simplex_measure(self.n),
            SpecialKind::CrossPolytope => cross_polytope_measure(self.n, self.radius_or_err()?),
            SpecialKind::Shell => Err(Error::Domain(
                "a spherical shell is not a discrete measure".into(),
            )),
        }
    }

    /// Closed-form energy of this measure.
    pub fn energy(&self, p: &Params) -> Result<f64> {
        if p.n() != self.n {
            return Err(Error::InvalidParams(format!(
                "measure dimension {} differs from n = {}",
                self.n,
                p.n()
            )));
        }
        match self.kind {
            SpecialKind::Simplex => Ok(simplex_energy(p)),
            SpecialKind::CrossPolytope => cross_polytope_energy(p, self.radius_or_err()?),
            SpecialKind::Shell => shell_energy(p, self.radius_or_err()?),
        }
    }

    fn radius_or_err(&self) -> Result<f64> {
        self.radius
            .ok_or_else(|| Error::InvalidParams(format!("{:?} requires a radius", self.kind)))
    }
}

/// Centred regular unit simplex in `R^n`: `n + 1` atoms of mass `1/(n+1)` at
/// mutual distance 1, each at distance `sqrt(n/(2n+2))` from the origin.
pub fn simplex_measure(n: usize) -> Result<DiscreteMeasure> {
    if n < 1 {
        return Err(Error::InvalidParams("dimension n must be at least 1".into()));
    }
    // Coordinates of e_i / sqrt(2) in R^{n+1} expressed in the Helmert basis
    // of the hyperplane orthogonal to (1, ..., 1).
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let points = (0..=n)
        .map(|i| {
            (1..=n)
                .map(|k| {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    match i.cmp(&k) {
                        std::cmp::Ordering::Less => scale / norm,
                        std::cmp::Ordering::Equal => -scale * k as f64 / norm,
                        std::cmp::Ordering::Greater => 0.0,
                    }
                })
                .collect()
        })
        .collect();
    DiscreteMeasure::uniform(points)
}

/// `1/2 * n/(n+1) * (1/alpha - 1/beta)`; all pair distances are 1.
pub fn simplex_energy(p: &Params) -> f64 {
    let n = p.n() as f64;
    0.5 * n / (n + 1.0) * (1.0 / p.alpha() - 1.0 / p.beta())
}

/// `2n` atoms `±r e_i` of mass `1/(2n)`.
pub fn cross_polytope_measure(n: usize, r: f64) -> Result<DiscreteMeasure> {
    if n < 1 {
        return Err(Error::InvalidParams("dimension n must be at least 1".into()));
    }
    check_radius(r)?;
    let mut points = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[i] = sign * r;
            points.push(x);
        }
    }
    DiscreteMeasure::uniform(points)
}

/// Energy of the cross-polytope of radius `r`.
pub fn cross_polytope_energy(p: &Params, r: f64) -> Result<f64> {
    p.require_positive_beta()?;
    check_radius(r)?;
    let (a, b, n) = (p.alpha(), p.beta(), p.n() as f64);
    let ca = (2.0 * n - 2.0) * 2f64.powf(a / 2.0) + 2f64.powf(a);
    let cb = (2.0 * n - 2.0) * 2f64.powf(b / 2.0) + 2f64.powf(b);
    Ok((ca * r.powf(a) / a - cb * r.powf(b) / b) / (4.0 * n))
}

/// Radius minimizing [`cross_polytope_energy`].
///
/// For `n = 1` the cross-polytope is two atoms and the radius is exactly 1/2.
pub fn optimal_cross_polytope_radius(p: &Params) -> Result<f64> {
    p.require_positive_beta()?;
    if p.n() == 1 {
        return Ok(0.5);
    }
    let log_ratio = cross_log_ratio(p);
    Ok((-0.5 * LN_2 + log_ratio / (p.alpha() - p.beta())).exp())
}

/// `inf_r` of the cross-polytope energy.
pub fn optimal_cross_polytope_energy(p: &Params) -> Result<f64> {
    p.require_positive_beta()?;
    let (a, b, n) = (p.alpha(), p.beta(), p.n() as f64);
    let ln_a = (2.0 * n - 2.0 + 2f64.powf(b / 2.0)).ln();
    // (A^a / B^b)^(1/(a-b)) = A * (A/B)^(b/(a-b))
    let log_prefactor = ln_a + b * cross_log_ratio(p) / (a - b);
    Ok(log_prefactor.exp() / (4.0 * n) * (1.0 / a - 1.0 / b))
}

/// `log(A/B)` with `A = 2n-2+2^(beta/2)`, `B = 2n-2+2^(alpha/2)`, accurate as alpha -> beta.
fn cross_log_ratio(p: &Params) -> f64 {
    let (a, b, n) = (p.alpha(), p.beta(), p.n() as f64);
    let big_b = 2.0 * n - 2.0 + 2f64.powf(a / 2.0);
    let diff = -2f64.powf(b / 2.0) * ((a - b) * LN_2 / 2.0).exp_m1();
    (diff / big_b).ln_1p()
}

/// Minimal energy at `beta = 2` for `n >= 2`, `alpha` in `(2, 4)`, attained by a
/// spherical shell.
pub fn shell_min_energy_beta2(alpha: f64, n: usize) -> Result<f64> {
    if n < 2 || !(alpha > 2.0 && alpha < 4.0) {
        return Err(Error::Domain(format!(
            "shell energy at beta = 2 needs n >= 2 and alpha in (2, 4) (alpha = {alpha}, n = {n})"
        )));
    }
    let d = n as f64;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let first = (ln_gamma(d / 2.0) + ln_gamma((d + alpha - 1.0) / 2.0)
        - ln_gamma((2.0 * d + alpha - 2.0) / 2.0))
        .exp();
    let inner = (ln_gamma((d + 1.0) / 2.0) + ln_gamma((2.0 * d + alpha - 2.0) / 2.0)
        - ln_gamma((d + alpha - 1.0) / 2.0)
        - ln_gamma(d))
    .exp();
    Ok(-(2f64.powf(d - 3.0) / sqrt_pi)
        * first
        * (0.5 - 1.0 / alpha)
        * inner.powf(alpha / (alpha - 2.0)))
}

/// Radius of the spherical shell that minimizes the energy in the shell regime
/// `n >= 2`, `2 <= alpha <= 4`, `beta_min(alpha, n) <= beta <= 2`.
///
/// The value equals the stationary radius of [`shell_energy`].
pub fn shell_radius(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("shell radius needs n >= 2 (n = {n})")));
    }
    let d = n as f64;
    let beta_min = (-10.0 + 3.0 * alpha + 7.0 * d - alpha * d - d * d) / (d + alpha - 3.0);
    if !((2.0..=4.0).contains(&alpha) && beta <= 2.0 && beta >= beta_min && alpha > beta) {
        return Err(Error::Domain(format!(
            "shell regime needs 2 <= alpha <= 4 and {beta_min} <= beta <= 2 with alpha > beta \
             (alpha = {alpha}, beta = {beta})"
        )));
    }
    let log_ratio = ln_gamma((d + beta - 1.0) / 2.0) + ln_gamma((2.0 * d + alpha - 2.0) / 2.0)
        - ln_gamma((d + alpha - 1.0) / 2.0)
        - ln_gamma((2.0 * d + beta - 2.0) / 2.0);
    Ok(0.5 * (log_ratio / (alpha - beta)).exp())
}

/// `E|X - Y|^s` for `X, Y` independent and uniform on the unit sphere of `R^d`.
fn sphere_distance_moment(s: f64, d: usize) -> f64 {
    let d = d as f64;
    (s * LN_2 + ln_gamma((s + d - 1.0) / 2.0) + ln_gamma(d - 1.0)
        - ln_gamma((d - 1.0) / 2.0)
        - ln_gamma(s / 2.0 + d - 1.0))
    .exp()
}

/// Energy of the uniform distribution on the sphere of radius `r` in `R^n`, `n >= 2`.
pub fn shell_energy(p: &Params, r: f64) -> Result<f64> {
    check_shell(p)?;
    check_radius(r)?;
    let (a, b) = (p.alpha(), p.beta());
    let ma = sphere_distance_moment(a, p.n());
    let mb = sphere_distance_moment(b, p.n());
    Ok(0.5 * (ma * r.powf(a) / a - mb * r.powf(b) / b))
}

/// Radius minimizing [`shell_energy`] over all spheres.
pub fn optimal_shell_radius(p: &Params) -> Result<f64> {
    check_shell(p)?;
    let ma = sphere_distance_moment(p.alpha(), p.n());
    let mb = sphere_distance_moment(p.beta(), p.n());
    Ok((mb / ma).powf(1.0 / (p.alpha() - p.beta())))
}

fn check_shell(p: &Params) -> Result<()> {
    p.require_positive_beta()?;
    if p.n() < 2 {
        return Err(Error::Domain("spherical shells need n >= 2".into()));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive and finite (r = {r})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::energy;
    use crate::measure::distance;

    fn p(alpha: f64, beta: f64, n: usize) -> Params {
        Params::new(alpha, beta, n).unwrap()
    }

    #[test]
    fn simplex_geometry() {
        for n in 1..=7 {
            let m = simplex_measure(n).unwrap();
            assert_eq!(m.len(), n + 1);
            let radius = (n as f64 / (2.0 * n as f64 + 2.0)).sqrt();
            for i in 0..=n {
                let x = m.point(i);
                assert!((distance(x, &vec![0.0; n]) - radius).abs() < 1e-14);
                for j in (i + 1)..=n {
                    assert!((distance(x, m.point(j)) - 1.0).abs() < 1e-14);
                }
            }
            assert!(m.centroid().iter().all(|c| c.abs() < 1e-15));
        }
        let m1 = simplex_measure(1).unwrap();
        let mut xs: Vec<f64> = m1.points().map(|x| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 0.5).abs() < 1e-15 && (xs[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn simplex_energy_values() {
        assert!((simplex_energy(&p(4.0, 2.0, 2)) + 1.0 / 12.0).abs() < 1e-16);
        assert!((simplex_energy(&p(4.0, 2.0, 1)) + 1.0 / 16.0).abs() < 1e-16);
        assert!(simplex_energy(&p(2.0 + 1e-12, 2.0, 3)).abs() < 1e-12);
        let m = simplex_measure(2).unwrap();
        assert!((energy(&p(4.0, 2.0, 2), &m).unwrap() + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn cross_polytope_layout() {
        let m = cross_polytope_measure(2, 1.0).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.weights(), &[0.25; 4]);
        let m3 = cross_polytope_measure(3, 2.0).unwrap();
        let nearest = (1..6)
            .map(|j| distance(m3.point(0), m3.point(j)))
            .fold(f64::INFINITY, f64::min);
        assert!((nearest - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        // n = 1 at radius 1/2 is the 1-simplex.
        let e_cross = energy(&p(4.0, 2.0, 1), &cross_polytope_measure(1, 0.5).unwrap()).unwrap();
        assert!((e_cross + 1.0 / 16.0).abs() < 1e-16);
        assert!(cross_polytope_measure(2, 0.0).is_err());
    }

    #[test]
    fn cross_polytope_energy_matches_oracle() {
        let q = p(4.0, 2.0, 1);
        assert!((cross_polytope_energy(&q, 0.5).unwrap() + 1.0 / 16.0).abs() < 1e-16);
        let q = p(5.5, 1.3, 4);
        let oracle = energy(&q, &cross_polytope_measure(4, 0.8).unwrap()).unwrap();
        let closed = cross_polytope_energy(&q, 0.8).unwrap();
        assert!((oracle - closed).abs() < 1e-14 * oracle.abs());
    }

    #[test]
    fn optimal_cross_polytope() {
        let q = p(4.0, 2.0, 2);
        let r = optimal_cross_polytope_radius(&q).unwrap();
        assert!((r - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let e = optimal_cross_polytope_energy(&q).unwrap();
        // (1/8) * 4^2 / 6 * (-1/4)
        assert!((e + 1.0 / 12.0).abs() < 1e-15);
        assert!((cross_polytope_energy(&q, r).unwrap() - e).abs() < 1e-15);
        for (a, b) in [(3.0, 2.5), (7.0, 0.6), (2.0001, 2.0)] {
            let q = p(a, b, 1);
            assert!((optimal_cross_polytope_radius(&q).unwrap() - 0.5).abs() < 1e-12);
            let diff = optimal_cross_polytope_energy(&q).unwrap() - simplex_energy(&q);
            assert!(diff.abs() < 1e-15 * simplex_energy(&q).abs().max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn alpha_close_to_beta_is_finite() {
        let r_lim = optimal_cross_polytope_radius(&p(3.0 + 1e-9, 3.0, 3)).unwrap();
        let r_near = optimal_cross_polytope_radius(&p(3.0 + 1e-4, 3.0, 3)).unwrap();
        assert!(r_lim.is_finite() && r_lim > 0.0);
        assert!((r_lim - r_near).abs() < 1e-4);
        let e = optimal_cross_polytope_energy(&p(3.0 + 1e-9, 3.0, 3)).unwrap();
        assert!(e < 0.0 && e > -1e-9);
    }

    #[test]
    fn shell_energy_at_beta_two() {
        let e = shell_min_energy_beta2(3.0, 2).unwrap();
        assert!((e + 0.0578).abs() < 5e-5, "{e}");
        assert!(shell_min_energy_beta2(2.0 + 1e-9, 3).unwrap().abs() < 1e-8);
        assert!(shell_min_energy_beta2(4.0, 2).is_err());
        assert!(shell_min_energy_beta2(3.0, 1).is_err());
    }

    #[test]
    fn shell_radius_matches_stationary_shell() {
        let r = shell_radius(4.0, 2.0, 2).unwrap();
        assert!((r - (1.0f64 / 3.0).sqrt()).abs() < 1e-13, "{r}");
        for (a, b, n) in [(3.0, 2.0, 2), (3.5, 1.5, 3), (2.5, 1.0, 4)] {
            let q = p(a, b, n);
            let direct = shell_radius(a, b, n).unwrap();
            let stationary = optimal_shell_radius(&q).unwrap();
            assert!((direct - stationary).abs() < 1e-13 * direct);
        }
        assert!(shell_radius(5.0, 2.0, 2).is_err());
        assert!(shell_radius(3.0, 2.5, 2).is_err());
        assert!(shell_radius(3.0, 2.0, 1).is_err());
    }

    #[test]
    fn special_spec_validation() {
        assert!(SpecialMeasureSpec::new(SpecialKind::Simplex, 2, Some(1.0)).is_err());
        assert!(SpecialMeasureSpec::new(SpecialKind::Shell, 2, None).is_err());
        assert!(SpecialMeasureSpec::new(SpecialKind::CrossPolytope, 2, Some(-1.0)).is_err());
        let shell = SpecialMeasureSpec::new(SpecialKind::Shell, 2, Some(0.5)).unwrap();
        assert!(shell.to_measure().is_err());
        let q = p(4.0, 2.0, 2);
        let simplex = SpecialMeasureSpec::new(SpecialKind::Simplex, 2, None).unwrap();
        assert!((simplex.energy(&q).unwrap() + 1.0 / 12.0).abs() < 1e-16);
    }
}
