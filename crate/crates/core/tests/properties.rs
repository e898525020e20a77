use proptest::prelude::*;

use interaction_energy::bounds::{
    linear_interpolation_bound, strong_interpolation_bound, two_step_bound, Anchor,
};
use interaction_energy::closed_forms::{
    cross_polytope_energy, cross_polytope_measure, optimal_cross_polytope_energy,
    optimal_cross_polytope_radius, simplex_energy,
};
use interaction_energy::energy::{energy, energy_d2beta};
use interaction_energy::minimizer::{
    cluster_support, descend, energy_gradient, initial_measure, DescentSettings,
};
use interaction_energy::threshold::{phi, sign_check, threshold_dlm, threshold_star, Competition};
use interaction_energy::{DiscreteMeasure, Params};

fn measure_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = DiscreteMeasure> {
    (1..=max_n, 1..=max_k).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(prop::collection::vec(-1.5f64..1.5, n), k),
            prop::collection::vec(0.05f64..1.0, k),
        )
            .prop_map(|(points, raw)| {
                let total: f64 = raw.iter().sum();
                let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
                let rest: f64 = w[1..].iter().sum();
                w[0] = 1.0 - rest;
                DiscreteMeasure::new(points, Some(w)).unwrap()
            })
    })
}

fn exponents() -> impl Strategy<Value = (f64, f64)> {
    (0.3f64..4.0, 0.1f64..4.0).prop_map(|(beta, gap)| (beta + gap, beta))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Householder reflection `I - 2 v v^T / |v|^2`.
fn reflect(x: &[f64], v: &[f64]) -> Vec<f64> {
    let vv: f64 = v.iter().map(|c| c * c).sum();
    let xv: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    x.iter().zip(v).map(|(a, b)| a - 2.0 * xv / vv * b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn energy_is_permutation_invariant(mu in measure_strategy(3, 7), (a, b) in exponents(), rot in 0usize..7) {
        let p = Params::new(a, b, mu.dim()).unwrap();
        let k = mu.len();
        let order: Vec<usize> = (0..k).map(|i| (i + rot) % k).rev().collect();
        let pts = order.iter().map(|&i| mu.point(i).to_vec()).collect();
        let w = order.iter().map(|&i| mu.weights()[i]).collect();
        let permuted = DiscreteMeasure::new(pts, Some(w)).unwrap();
        prop_assert!(close(energy(&p, &mu).unwrap(), energy(&p, &permuted).unwrap(), 1e-12));
    }

    #[test]
    fn energy_is_isometry_invariant(
        mu in measure_strategy(3, 7),
        (a, b) in exponents(),
        shift in prop::collection::vec(-3.0f64..3.0, 3),
        axis in prop::collection::vec(0.1f64..1.0, 3),
    ) {
        let p = Params::new(a, b, mu.dim()).unwrap();
        let n = mu.dim();
        let moved = mu
            .map_points(|x| {
                let y = reflect(x, &axis[..n]);
                y.iter().zip(&shift).map(|(c, s)| c + s).collect()
            })
            .unwrap();
        prop_assert!(close(energy(&p, &mu).unwrap(), energy(&p, &moved).unwrap(), 1e-12));
    }

    #[test]
    fn energy_scaling_covariance(mu in measure_strategy(3, 6), (a, b) in exponents(), s in 0.2f64..3.0) {
        let p = Params::new(a, b, mu.dim()).unwrap();
        let scaled = mu.map_points(|x| x.iter().map(|c| s * c).collect()).unwrap();
        let w = mu.weights();
        let mut want = 0.0;
        for i in 0..mu.len() {
            for j in 0..mu.len() {
                let r: f64 = mu.point(i).iter().zip(mu.point(j)).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
                if r > 0.0 {
                    want += 0.5 * w[i] * w[j] * (s.powf(a) * r.powf(a) / a - s.powf(b) * r.powf(b) / b);
                }
            }
        }
        let got = energy(&p, &scaled).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-3), "{} vs {}", got, want);
    }

    #[test]
    fn d2beta_matches_second_difference(mu in measure_strategy(3, 6), beta in 1.5f64..3.0, gap in 0.2f64..3.0) {
        let p = Params::new(beta + gap, beta, mu.dim()).unwrap();
        let h = 1e-4;
        let e = |b: f64| energy(&p.with_beta(b).unwrap(), &mu).unwrap();
        let fd = (e(beta + h) - 2.0 * e(beta) + e(beta - h)) / (h * h);
        let d2 = energy_d2beta(&p, &mu).unwrap();
        // The difference quotient carries about 1e-16 / h^2 of cancellation noise.
        prop_assert!((fd - d2).abs() <= 1e-6 * d2.abs() + 1e-7, "{} vs {}", fd, d2);
    }

    #[test]
    fn d2beta_sign_and_differential_inequality(mu in measure_strategy(4, 6), (a, b) in exponents()) {
        let p = Params::new(a, b, mu.dim()).unwrap();
        let d2 = energy_d2beta(&p, &mu).unwrap();
        let e = energy(&p, &mu).unwrap();
        prop_assert!(d2 <= 0.0);
        prop_assert!(d2 <= e / (b * b) + 1e-15 * e.abs());
    }

    #[test]
    fn gradient_matches_central_differences(mu in measure_strategy(3, 6), beta in 1.2f64..3.0, gap in 0.2f64..3.0) {
        let p = Params::new(beta + gap, beta, mu.dim()).unwrap();
        let grad = energy_gradient(&p, &mu).unwrap();
        let scale = grad.iter().flatten().fold(1e-8f64, |m, g| m.max(g.abs()));
        let h = 1e-6;
        for i in 0..mu.len() {
            for d in 0..mu.dim() {
                let at = |s: f64| {
                    let mut pts: Vec<Vec<f64>> = mu.points().map(<[f64]>::to_vec).collect();
                    pts[i][d] += s;
                    energy(&p, &DiscreteMeasure::new(pts, Some(mu.weights().to_vec())).unwrap()).unwrap()
                };
                let fd = (at(h) - at(-h)) / (2.0 * h);
                prop_assert!((fd - grad[i][d]).abs() <= 1e-5 * scale, "{} vs {}", fd, grad[i][d]);
            }
        }
    }

    #[test]
    fn cross_polytope_optimum(n in 1usize..=6, (a, b) in exponents()) {
        let p = Params::new(a, b, n).unwrap();
        let r = optimal_cross_polytope_radius(&p).unwrap();
        let best = optimal_cross_polytope_energy(&p).unwrap();
        prop_assert!(close(best, cross_polytope_energy(&p, r).unwrap(), 1e-12));
        let measure = cross_polytope_measure(n, r).unwrap();
        prop_assert!(close(best, energy(&p, &measure).unwrap(), 1e-12));
        for f in [0.9, 0.99, 1.01, 1.1] {
            prop_assert!(cross_polytope_energy(&p, f * r).unwrap() >= best);
        }
        if n == 1 {
            prop_assert_eq!(r, 0.5);
            prop_assert!(close(best, simplex_energy(&p), 1e-14));
        }
    }

    #[test]
    fn sign_lemma_holds(n in 1usize..=5, beta in 0.01f64..8.0, frac in 0.001f64..1.0) {
        let alpha = beta + frac * (12.0 - beta);
        let p = Params::new(alpha, beta, n).unwrap();
        prop_assert!(sign_check(&p).is_ok());
    }

    #[test]
    fn below_threshold_the_simplex_loses(n in 2usize..=5, beta in 2.0f64..2.7, frac in 0.01f64..0.99) {
        let star = threshold_star(n, beta).unwrap();
        prop_assume!(!star.degenerate);
        let alpha = beta + frac * (star.alpha_star - beta);
        let p = Params::new(alpha, beta, n).unwrap();
        prop_assert_eq!(sign_check(&p).unwrap(), Competition::SimplexBeaten);
    }

    #[test]
    fn threshold_residuals(n in 2usize..=6, beta in 2.0f64..2.8) {
        let star = threshold_star(n, beta).unwrap();
        if !star.degenerate {
            let r = phi(n, star.alpha_star).unwrap() - phi(n, beta).unwrap();
            prop_assert!(r.abs() < 1e-10);
        }
        let dlm = threshold_dlm(n, beta).unwrap();
        prop_assert!(dlm.alpha_star >= beta);
    }

    #[test]
    fn strong_bound_dominates_linear(
        e0 in -0.2f64..0.0,
        rise in 0.0f64..0.1,
        b0 in 1.0f64..2.5,
        width in 0.1f64..1.5,
        t in 0.0f64..=1.0,
        slack in 0.0f64..1.0,
    ) {
        let b1 = b0 + width;
        let alpha = b1 + slack;
        let lo = Anchor::supplied(b0, e0);
        let hi = Anchor::supplied(b1, e0 + rise);
        let beta = (b0 + t * width).min(b1);
        let lin = linear_interpolation_bound(alpha, 2, lo, hi, beta).unwrap().lower_bound;
        let strong = strong_interpolation_bound(alpha, 2, lo, hi, beta).unwrap().lower_bound;
        prop_assert!(strong >= lin);
        if slack > 0.0 && beta > b0 && beta < b1 {
            prop_assert!(strong > lin);
        }
    }

    #[test]
    fn two_step_beats_the_plain_chord(e0 in -0.2f64..-0.01, b in 2.05f64..3.4, grid in 2usize..40) {
        let alpha = 3.5;
        let lo = Anchor::supplied(2.0, e0);
        let outer = Anchor::supplied(alpha, 0.0);
        let chord = linear_interpolation_bound(alpha, 2, lo, outer, b).unwrap().lower_bound;
        let two = two_step_bound(alpha, 2, lo, b, grid).unwrap().lower_bound;
        prop_assert!(two >= chord - 1e-15);
    }

    #[test]
    fn clustering_masses_sum_to_one(mu in measure_strategy(3, 12), eps in 1e-3f64..2.0) {
        let c = cluster_support(&mu, eps);
        prop_assert!((c.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(c.count >= 1 && c.count <= mu.len());
        prop_assert_eq!(c.representatives.len(), c.count);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn descent_never_raises_energy(seed in any::<u64>(), beta in 1.5f64..2.9, k in 2usize..10) {
        let p = Params::new(3.5, beta, 2).unwrap();
        let start = initial_measure(&p, k, seed, 0).unwrap();
        let settings = DescentSettings { max_iters: 300, step_init: 0.1, grad_tol: 1e-10, optimize_weights: false };
        let run = descend(&p, &start, &settings, true).unwrap();
        prop_assert!(run.trace.windows(2).all(|t| t[1] <= t[0]));
        let before = energy(&p, &start).unwrap();
        let after = energy(&p, &run.measure).unwrap();
        prop_assert!(after <= before + 1e-15);
        prop_assert!((after - run.energy).abs() <= 1e-13);
        prop_assert!(run.converged || run.iterations == settings.max_iters || run.grad_norm > settings.grad_tol);
    }
}
