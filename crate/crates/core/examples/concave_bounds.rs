//! Every available lower bound on the minimal energy at one `(alpha, beta, n)`.
//!
//! cargo run --example concave_bounds -- 3.5 2.5 2

use interaction_energy::bounds::{best_lower_bound, bounds_to_csv, enumerate_bounds, known_anchors};

fn main() -> interaction_energy::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (alpha, beta, n) = match args.as_slice() {
        [a, b, n] => (*a, *b, *n as usize),
        _ => (3.5, 2.5, 2),
    };
    for a in known_anchors(alpha, n) {
        println!("anchor beta = {:.6}  E = {:+.10}  ({:?})", a.beta_anchor, a.energy, a.source);
    }
    print!("{}", bounds_to_csv(&enumerate_bounds(alpha, beta, n)?));
    let best = best_lower_bound(alpha, beta, n)?;
    println!("best: {} = {:.10}", best.method, best.lower_bound);
    Ok(())
}
