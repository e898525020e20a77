//! Both simplex-threshold lower bounds over `beta` in `[2, 4]`, as CSV.

use interaction_energy::threshold::{beta_grid, compare_thresholds, gamma0, thresholds_to_csv};

fn main() -> interaction_energy::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    eprintln!("n = {n}, phi_n peaks at gamma0 = {:.6}", gamma0(n)?);
    let rows = compare_thresholds(n, &beta_grid(2.0, 4.0, 0.05)?)?;
    print!("{}", thresholds_to_csv(&rows));
    Ok(())
}
