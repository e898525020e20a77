//! Shell and simplex geometry of minimizers close to `beta = 2`.

use interaction_energy::closed_forms::shell_radius;
use interaction_energy::minimizer::{
    minimize, shell_diagnostics, simplex_diagnostics, MinimizeConfig, SWEEP_GRAD_TOL,
};
use interaction_energy::Params;

fn main() -> interaction_energy::Result<()> {
    let mut cfg = MinimizeConfig::new(Params::new(3.0, 2.05, 2)?, 64, 7)?;
    cfg.restarts = 4;
    cfg.grad_tol = SWEEP_GRAD_TOL;
    let shell = shell_diagnostics(&minimize(&cfg)?.measure);
    println!(
        "alpha 3, beta 2.05: radius {:.5} +- {:.2e} (beta = 2 shell radius {:.5})",
        shell.radial_mean,
        shell.radial_std,
        shell_radius(3.0, 2.0, 2)?
    );

    let mut cfg = MinimizeConfig::new(Params::new(4.5, 1.9, 2)?, 60, 7)?;
    cfg.restarts = 4;
    // Below beta = 2 the atoms spread into blobs instead of collapsing.
    let simplex = simplex_diagnostics(&minimize(&cfg)?.measure, 0.1);
    println!(
        "alpha 4.5, beta 1.9: {} blobs, max |d - 1| = {:?}",
        simplex.cluster_count, simplex.max_distance_deviation
    );
    Ok(())
}
