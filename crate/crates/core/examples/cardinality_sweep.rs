//! Estimated support size as `beta` decreases toward 2 at `alpha = 3.5`.
//!
//! Takes a few seconds in release mode.

use interaction_energy::minimizer::{cardinality_sweep, sweep_to_csv, MinimizeConfig, SWEEP_GRAD_TOL};
use interaction_energy::Params;

fn main() -> interaction_energy::Result<()> {
    let mut cfg = MinimizeConfig::new(Params::new(3.5, 2.5, 2)?, 1, 7)?;
    cfg.grad_tol = SWEEP_GRAD_TOL;
    let rows = cardinality_sweep(3.5, 2, &[2.5, 2.2, 2.1, 2.05], &cfg)?;
    print!("{}", sweep_to_csv(&rows));
    Ok(())
}
