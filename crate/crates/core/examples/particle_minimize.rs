//! Particle minimization compared with the closed-form candidates.

use interaction_energy::bounds::best_lower_bound;
use interaction_energy::closed_forms::{optimal_cross_polytope_energy, simplex_energy};
use interaction_energy::minimizer::{minimize, simplex_diagnostics, MinimizeConfig};
use interaction_energy::Params;

fn main() -> interaction_energy::Result<()> {
    for (alpha, beta) in [(4.0, 2.5), (3.0, 2.5), (3.5, 2.2)] {
        let p = Params::new(alpha, beta, 2)?;
        let res = minimize(&MinimizeConfig::new(p, 12, 7)?)?;
        let diag = simplex_diagnostics(&res.measure, 0.1);
        // No anchors are known at alpha = 4.
        let lower = best_lower_bound(alpha, beta, 2)
            .map_or("n/a".to_string(), |b| format!("{:.10}", b.lower_bound));
        println!(
            "alpha {alpha} beta {beta}: E = {:.10} (simplex {:.10}, cross {:.10}, lower bound {lower})",
            res.energy,
            simplex_energy(&p),
            optimal_cross_polytope_energy(&p)?,
        );
        println!(
            "  {} clusters, grad {:.1e} after {} steps, max |d - 1| {:?}",
            res.clusters.count, res.grad_norm, res.iterations, diag.max_distance_deviation
        );
    }
    Ok(())
}
