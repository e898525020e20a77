//! Brute-force energy of a small weighted configuration and its `beta` derivatives.
//!
//! cargo run --example energy_oracle

use interaction_energy::energy::{energy, energy_d2beta, energy_dbeta, kernel_value};
use interaction_energy::{DiscreteMeasure, Params};

fn main() -> interaction_energy::Result<()> {
    let p = Params::new(3.0, 2.0, 2)?;
    let mu = DiscreteMeasure::new(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.8]],
        Some(vec![0.5, 0.25, 0.25]),
    )?;

    println!("W(1) = {}", kernel_value(&p, 1.0)?);
    let e = energy(&p, &mu)?;
    let d2 = energy_d2beta(&p, &mu)?;
    println!("E        = {e:.12}");
    println!("dE/dbeta = {:.12}", energy_dbeta(&p, &mu)?);
    println!("d2E      = {d2:.12}  (E/beta^2 = {:.12})", e / (p.beta() * p.beta()));
    Ok(())
}
