//! Gradient of the energy in the particle positions and the backtracking
//! descent loop.

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::params::Params;

/// Halvings tried before a line search is declared stalled.
pub const MAX_HALVINGS: usize = 60;
/// Step growth after an accepted move.
pub const STEP_GROWTH: f64 = 1.5;

/// `dE/dx_i = sum_{j != i} w_i w_j (r^(alpha-2) - r^(beta-2)) (x_i - x_j)`, one
/// vector per atom. Coincident atoms contribute nothing.
pub fn energy_gradient(p: &Params, mu: &DiscreteMeasure) -> Result<Vec<Vec<f64>>> {
    require_smooth(p)?;
    crate::energy::check_dim(p, mu)?;
    let mut forces = vec![0.0; mu.coords().len()];
    unit_mass_forces(p, mu.dim(), mu.coords(), mu.weights(), &mut forces);
    let w = mu.weights();
    Ok(forces
        .chunks_exact(mu.dim())
        .zip(w)
        .map(|(f, wi)| f.iter().map(|c| wi * c).collect())
        .collect())
}

pub(crate) fn require_smooth(p: &Params) -> Result<()> {
    if p.beta() > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "position gradients need beta > 1 (beta = {})",
            p.beta()
        )))
    }
}

/// Settings of a single descent run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentSettings {
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_tol: f64,
    pub optimize_weights: bool,
}

/// Outcome of [`descend`].
#[derive(Clone, Debug)]
pub struct Descent {
    pub measure: DiscreteMeasure,
    /// Initial energy plus the accumulated accepted changes.
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Tracked energy after every accepted step, starting with the initial
    /// energy. Non-increasing: every accepted step has a negative computed
    /// change, which may vanish when added to the total. Empty unless requested.
    pub trace: Vec<f64>,
}

/// Gradient descent with backtracking from `start`.
///
/// Each atom moves along its unit-mass force `-(1/w_i) dE/dx_i`, so the
/// step scale does not depend on the number of atoms. The reported
/// `grad_norm` is the largest unit-mass force (plus, with weight updates,
/// the largest `w_i |p_i - <p>|` where `p_i = dE/dw_i`). A trial step is
/// accepted only if it lowers the energy, otherwise it is halved. Position
/// moves are judged by [`energy_change`], which stays accurate for changes
/// far below the round-off of the energy itself. After an
/// accepted step the step grows by [`STEP_GROWTH`]. Weight updates are
/// multiplicative (`w_i <- w_i exp(-eta p_i)`, renormalized) with their own
/// backtracking step.
pub fn descend(
    p: &Params,
    start: &DiscreteMeasure,
    settings: &DescentSettings,
    record_trace: bool,
) -> Result<Descent> {
    require_smooth(p)?;
    crate::energy::check_dim(p, start)?;
    let dim = start.dim();
    let k = start.len();
    let mut x = start.coords().to_vec();
    let mut w = start.weights().to_vec();
    let mut forces = vec![0.0; x.len()];
    let mut potential = vec![0.0; k];
    let mut shift = vec![0.0; x.len()];
    let mut trial_w = vec![0.0; k];

    let mut e = fast_energy(p, dim, &x, &w);
    let mut trace = Vec::new();
    if record_trace {
        trace.push(e);
    }
    let mut step = settings.step_init;
    let mut eta = settings.step_init;
    let mut iterations = 0;
    let mut grad_norm;
    let mut converged = false;

    loop {
        grad_norm = unit_mass_forces(p, dim, &x, &w, &mut forces);
        if settings.optimize_weights {
            grad_norm = grad_norm.max(weight_residual(p, dim, &x, &w, &mut potential));
        }
        if grad_norm <= settings.grad_tol {
            converged = true;
            break;
        }
        if iterations >= settings.max_iters {
            break;
        }

        let mut moved = false;
        for _ in 0..MAX_HALVINGS {
            for (d, fi) in shift.iter_mut().zip(&forces) {
                *d = -step * fi;
            }
            let change = energy_change(p, dim, &x, &shift, &w);
            if change < 0.0 {
                x.iter_mut().zip(&shift).for_each(|(xi, d)| *xi += d);
                e += change;
                step *= STEP_GROWTH;
                moved = true;
                break;
            }
            step *= 0.5;
        }

        if settings.optimize_weights {
            weight_residual(p, dim, &x, &w, &mut potential);
            for _ in 0..MAX_HALVINGS {
                let floor = potential.iter().cloned().fold(f64::INFINITY, f64::min);
                let mut total = 0.0;
                for ((t, wi), pi) in trial_w.iter_mut().zip(&w).zip(&potential) {
                    *t = wi * (-eta * (pi - floor)).exp();
                    total += *t;
                }
                trial_w.iter_mut().for_each(|t| *t /= total);
                let change = fast_energy(p, dim, &x, &trial_w) - fast_energy(p, dim, &x, &w);
                if change < 0.0 {
                    std::mem::swap(&mut w, &mut trial_w);
                    e += change;
                    eta *= STEP_GROWTH;
                    moved = true;
                    break;
                }
                eta *= 0.5;
            }
        }

        if !moved {
            break;
        }
        iterations += 1;
        if record_trace {
            trace.push(e);
        }
    }

    if settings.optimize_weights {
        // Renormalize against drift so the measure validates.
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= total);
    }
    let measure = DiscreteMeasure::from_flat(dim, x, Some(w))?;
    Ok(Descent { measure, energy: e, grad_norm, iterations, converged, trace })
}

/// `sum_{i<j} w_i w_j W(r_ij)`, valid for `beta > 0`.
pub(crate) fn fast_energy(p: &Params, dim: usize, x: &[f64], w: &[f64]) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let (ha, hb) = (0.5 * a, 0.5 * b);
    let k = w.len();
    let mut total = 0.0;
    for i in 0..k {
        let xi = &x[i * dim..(i + 1) * dim];
        let mut row = 0.0;
        for j in (i + 1)..k {
            let s = sq_dist(xi, &x[j * dim..(j + 1) * dim]);
            if s > 0.0 {
                let ls = s.ln();
                row += w[j] * ((ha * ls).exp() / a - (hb * ls).exp() / b);
            }
        }
        total += w[i] * row;
    }
    total
}

/// `E(x + dx) - E(x)`, summed pairwise as `W(r') - W(r)` with
/// `r'^s - r^s = r^s expm1((s/2) ln_1p((r'^2 - r^2)/r^2))` and
/// `r'^2 - r^2 = 2 d.delta + |delta|^2`, so small changes keep their
/// relative accuracy.
pub(crate) fn energy_change(p: &Params, dim: usize, x: &[f64], dx: &[f64], w: &[f64]) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let (ha, hb) = (0.5 * a, 0.5 * b);
    let k = w.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut row = 0.0;
        for j in (i + 1)..k {
            let (mut s, mut ds) = (0.0, 0.0);
            for c in 0..dim {
                let d = x[i * dim + c] - x[j * dim + c];
                let delta = dx[i * dim + c] - dx[j * dim + c];
                s += d * d;
                ds += delta * (2.0 * d + delta);
            }
            let change = if s == 0.0 {
                if ds > 0.0 {
                    let ls = ds.ln();
                    (ha * ls).exp() / a - (hb * ls).exp() / b
                } else {
                    0.0
                }
            } else {
                let ls = s.ln();
                let (ra, rb) = ((ha * ls).exp(), (hb * ls).exp());
                let rel = ds / s;
                if rel <= -1.0 {
                    rb / b - ra / a
                } else {
                    let u = rel.ln_1p();
                    ra / a * (ha * u).exp_m1() - rb / b * (hb * u).exp_m1()
                }
            };
            row += w[j] * change;
        }
        total += w[i] * row;
    }
    total
}

/// Writes `(1/w_i) dE/dx_i` into `out` and returns the largest norm.
fn unit_mass_forces(p: &Params, dim: usize, x: &[f64], w: &[f64], out: &mut [f64]) -> f64 {
    let (ha, hb) = (0.5 * (p.alpha() - 2.0), 0.5 * (p.beta() - 2.0));
    let k = w.len();
    out.iter_mut().for_each(|o| *o = 0.0);
    for i in 0..k {
        for j in (i + 1)..k {
            let (xi, xj) = (&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim]);
            let s = sq_dist(xi, xj);
            if s == 0.0 {
                continue;
            }
            let ls = s.ln();
            let c = (ha * ls).exp() - (hb * ls).exp();
            for d in 0..dim {
                let diff = c * (xi[d] - xj[d]);
                out[i * dim + d] += w[j] * diff;
                out[j * dim + d] -= w[i] * diff;
            }
        }
    }
    out.chunks_exact(dim)
        .map(|f| f.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Fills `potential[i] = dE/dw_i = sum_j w_j W(r_ij)` and returns
/// `max_i w_i |potential_i - sum_j w_j potential_j|`.
fn weight_residual(p: &Params, dim: usize, x: &[f64], w: &[f64], potential: &mut [f64]) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let k = w.len();
    potential.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..k {
        for j in (i + 1)..k {
            let s = sq_dist(&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim]);
            if s == 0.0 {
                continue;
            }
            let ls = s.ln();
            let kern = (0.5 * a * ls).exp() / a - (0.5 * b * ls).exp() / b;
            potential[i] += w[j] * kern;
            potential[j] += w[i] * kern;
        }
    }
    let mean: f64 = w.iter().zip(potential.iter()).map(|(wi, pi)| wi * pi).sum();
    w.iter()
        .zip(potential.iter())
        .map(|(wi, pi)| wi * (pi - mean).abs())
        .fold(0.0, f64::max)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::energy;

    #[test]
    fn single_atom_and_unit_pair() {
        let p = Params::new(3.0, 2.0, 2).unwrap();
        let one = DiscreteMeasure::uniform(vec![vec![0.3, -1.0]]).unwrap();
        assert_eq!(energy_gradient(&p, &one).unwrap(), vec![vec![0.0, 0.0]]);
        let pair = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![0.6, 0.8]]).unwrap();
        for g in energy_gradient(&p, &pair).unwrap() {
            assert!(g.iter().all(|c| c.abs() < 1e-15));
        }
    }

    #[test]
    fn pair_closer_than_one_repels() {
        let p = Params::new(3.0, 2.5, 1).unwrap();
        let pair = DiscreteMeasure::uniform(vec![vec![0.0], vec![0.5]]).unwrap();
        let g = energy_gradient(&p, &pair).unwrap();
        // Descent moves atom 0 to the left.
        assert!(g[0][0] > 0.0 && g[1][0] < 0.0);
    }

    #[test]
    fn rejects_rough_kernels() {
        let p = Params::new(3.0, 1.0, 2).unwrap();
        let mu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0]]).unwrap();
        assert!(energy_gradient(&p, &mu).is_err());
    }

    #[test]
    fn fast_energy_matches_oracle() {
        let p = Params::new(3.5, 2.2, 2).unwrap();
        let mu = DiscreteMeasure::new(
            vec![vec![0.0, 0.0], vec![0.4, 0.1], vec![-0.3, 0.9], vec![0.4, 0.1]],
            Some(vec![0.1, 0.2, 0.3, 0.4]),
        )
        .unwrap();
        let fast = fast_energy(&p, 2, mu.coords(), mu.weights());
        let exact = energy(&p, &mu).unwrap();
        assert!((fast - exact).abs() <= 1e-14 * exact.abs());
    }

    #[test]
    fn energy_change_matches_difference() {
        let p = Params::new(3.5, 2.2, 2).unwrap();
        let x = [0.0, 0.0, 0.4, 0.1, -0.3, 0.9, 0.4, 0.1];
        let w = [0.1, 0.2, 0.3, 0.4];
        let dx = [0.01, -0.02, 0.0, 0.03, -0.01, 0.0, 0.02, 0.02];
        let moved: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let direct = fast_energy(&p, 2, &moved, &w) - fast_energy(&p, 2, &x, &w);
        let change = energy_change(&p, 2, &x, &dx, &w);
        assert!((change - direct).abs() < 1e-15);
        // Collapsing two atoms onto each other.
        let collapse = [0.0, 0.0, -0.4, -0.1, 0.0, 0.0, 0.0, 0.0];
        let merged: Vec<f64> = x.iter().zip(&collapse).map(|(a, b)| a + b).collect();
        let direct = fast_energy(&p, 2, &merged, &w) - fast_energy(&p, 2, &x, &w);
        assert!((energy_change(&p, 2, &x, &collapse, &w) - direct).abs() < 1e-15);
    }

    #[test]
    fn descent_lowers_energy_monotonically() {
        let p = Params::new(4.0, 2.5, 2).unwrap();
        let start = DiscreteMeasure::uniform(vec![
            vec![0.0, 0.0],
            vec![0.3, 0.0],
            vec![0.1, 0.5],
            vec![-0.2, 0.4],
        ])
        .unwrap();
        let settings = DescentSettings {
            max_iters: 500,
            step_init: 0.1,
            grad_tol: 1e-10,
            optimize_weights: true,
        };
        let run = descend(&p, &start, &settings, true).unwrap();
        assert!(run.trace.windows(2).all(|t| t[1] <= t[0]));
        assert!(run.trace.last().unwrap() < &run.trace[0]);
        let exact = energy(&p, &run.measure).unwrap();
        assert!((exact - run.energy).abs() < 1e-15);
        assert_eq!(run.trace.len(), run.iterations + 1);
    }
}
