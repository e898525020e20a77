//! Kernel evaluation and the pairwise interaction energy.
//!
//! `energy` is the brute-force double sum over all ordered pairs of atoms,
//! diagonal included. Every closed form in the crate is checked against it.

use crate::error::{Error, Result};
use crate::measure::{distance, DiscreteMeasure};
use crate::params::Params;

/// `W(r) = r^alpha/alpha - r^beta/beta`, with `W(0) = 0` when `beta > 0`.
pub fn kernel_value(p: &Params, r: f64) -> Result<f64> {
    check_distance(r)?;
    let (a, b) = (p.alpha(), p.beta());
    if b == 0.0 {
        return Err(Error::Domain("r^beta/beta is undefined at beta = 0".into()));
    }
    if r == 0.0 {
        if b > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!(
            "kernel is singular at r = 0 for beta = {b} <= 0"
        )));
    }
    Ok(r.powf(a) / a - r.powf(b) / b)
}

/// `d/dbeta W(r) = r^beta (1 - log r^beta) / beta^2`, zero at `r = 0`.
pub fn kernel_dbeta(p: &Params, r: f64) -> Result<f64> {
    check_distance(r)?;
    p.require_positive_beta()?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let b = p.beta();
    let s = b * r.ln();
    Ok(s.exp() * (1.0 - s) / (b * b))
}

/// `d^2/dbeta^2 W(r) = -r^beta ((log r^beta)^2 - 2 log r^beta + 2) / beta^3`, zero at `r = 0`.
pub fn kernel_d2beta(p: &Params, r: f64) -> Result<f64> {
    check_distance(r)?;
    p.require_positive_beta()?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let b = p.beta();
    let s = b * r.ln();
    Ok(-s.exp() * (s * s - 2.0 * s + 2.0) / (b * b * b))
}

/// `1/2 sum_i sum_j w_i w_j W(|x_i - x_j|)` over all ordered pairs.
pub fn energy(p: &Params, mu: &DiscreteMeasure) -> Result<f64> {
    pair_sum(p, mu, kernel_value)
}

/// First derivative of the energy in `beta`, `mu` held fixed.
pub fn energy_dbeta(p: &Params, mu: &DiscreteMeasure) -> Result<f64> {
    pair_sum(p, mu, kernel_dbeta)
}

/// Second derivative of the energy in `beta`. Never positive.
pub fn energy_d2beta(p: &Params, mu: &DiscreteMeasure) -> Result<f64> {
    pair_sum(p, mu, kernel_d2beta)
}

/// Support diameter bound `e^(1/beta)` satisfied by every global minimizer.
pub fn diameter_bound(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta > 0 required (beta = {beta})")));
    }
    Ok((1.0 / beta).exp())
}

fn pair_sum(
    p: &Params,
    mu: &DiscreteMeasure,
    kernel: fn(&Params, f64) -> Result<f64>,
) -> Result<f64> {
    check_dim(p, mu)?;
    let w = mu.weights();
    let mut total = 0.0;
    for (xi, wi) in mu.points().zip(w) {
        let mut row = 0.0;
        for (xj, wj) in mu.points().zip(w) {
            row += wj * kernel(p, distance(xi, xj))?;
        }
        total += wi * row;
    }
    Ok(0.5 * total)
}

pub(crate) fn check_dim(p: &Params, mu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != p.n() {
        return Err(Error::InvalidMeasure(format!(
            "measure lives in dimension {} but n = {}",
            mu.dim(),
            p.n()
        )));
    }
    Ok(())
}

fn check_distance(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("distance must be finite and non-negative (r = {r})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, beta: f64, n: usize) -> Params {
        Params::new(alpha, beta, n).unwrap()
    }

    #[test]
    fn kernel_values() {
        let q = p(4.0, 2.0, 2);
        assert_eq!(kernel_value(&q, 0.0).unwrap(), 0.0);
        assert_eq!(kernel_value(&q, 1.0).unwrap(), -0.25);
        assert_eq!(kernel_value(&q, 2.0).unwrap(), 2.0);
        assert!(kernel_value(&q, -1.0).is_err());
    }

    #[test]
    fn nonpositive_beta_kernel() {
        let q = p(2.0, -0.5, 2);
        assert!(kernel_value(&q, 0.0).is_err());
        // 1/2 - 1/(-0.5)
        assert!((kernel_value(&q, 1.0).unwrap() - 2.5).abs() < 1e-15);
        assert!(kernel_dbeta(&q, 1.0).is_err());
        assert!(kernel_d2beta(&q, 1.0).is_err());
        assert!(kernel_value(&p(2.0, 0.0, 2), 1.0).is_err());
    }

    #[test]
    fn beta_derivatives_of_kernel() {
        let q = p(4.0, 2.0, 2);
        assert_eq!(kernel_dbeta(&q, 0.0).unwrap(), 0.0);
        assert_eq!(kernel_dbeta(&q, 1.0).unwrap(), 0.25);
        assert!(kernel_dbeta(&q, 0.5f64.exp()).unwrap().abs() < 1e-15);
        assert_eq!(kernel_d2beta(&q, 1.0).unwrap(), -0.25);
        assert_eq!(kernel_d2beta(&q, 0.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let got = kernel_d2beta(&p(4.0, 1.0, 2), e).unwrap();
        assert!((got + e).abs() < 1e-14, "{got}");
    }

    #[test]
    fn energy_of_small_measures() {
        let q = p(4.0, 2.0, 1);
        let one = DiscreteMeasure::uniform(vec![vec![0.3]]).unwrap();
        assert_eq!(energy(&q, &one).unwrap(), 0.0);
        assert_eq!(energy_d2beta(&q, &one).unwrap(), 0.0);

        // Four ordered pairs, two at distance 1 with weight 1/4 each.
        let two = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        let want = 0.25 * (1.0 / 4.0 - 1.0 / 2.0);
        assert!((energy(&q, &two).unwrap() - want).abs() < 1e-16);
        assert!((energy_d2beta(&q, &two).unwrap() + 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let q = p(4.0, 2.0, 3);
        let m = DiscreteMeasure::uniform(vec![vec![0.0, 1.0]]).unwrap();
        assert!(energy(&q, &m).is_err());
    }

    #[test]
    fn diameter_bound_values() {
        assert!((diameter_bound(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert!((diameter_bound(2.0).unwrap() - 1.6487212707001282).abs() < 1e-15);
        assert!(diameter_bound(1e6).unwrap() < diameter_bound(10.0).unwrap());
        assert!(diameter_bound(0.0).is_err());
    }
}
