//! Simplex versus optimally scaled cross-polytope, and the `phi_n` sign test
//! that predicts which one wins.

use interaction_energy::closed_forms::{
    cross_polytope_measure, optimal_cross_polytope_energy, optimal_cross_polytope_radius,
    simplex_energy,
};
use interaction_energy::energy::energy;
use interaction_energy::threshold::{competition_diffs, sign_check};
use interaction_energy::Params;

fn main() -> interaction_energy::Result<()> {
    println!("alpha  beta  n  r*        E_cross        E_simplex      phi diff      winner");
    for (alpha, beta, n) in [(3.0, 2.5, 2), (4.0, 2.5, 2), (3.0, 2.2, 3), (5.0, 3.0, 4)] {
        let p = Params::new(alpha, beta, n)?;
        let r = optimal_cross_polytope_radius(&p)?;
        let cross = optimal_cross_polytope_energy(&p)?;
        debug_assert!((energy(&p, &cross_polytope_measure(n, r)?)? - cross).abs() < 1e-12);
        let d = competition_diffs(&p)?;
        println!(
            "{alpha:<6} {beta:<5} {n}  {r:.6}  {cross:+.8e}  {:+.8e}  {:+.3e}  {:?}",
            simplex_energy(&p),
            d.phi_diff,
            sign_check(&p)?
        );
    }
    Ok(())
}
