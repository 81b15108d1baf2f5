//! The Laplace-transformed wave function ψ̄(x, p), three ways: matching
//! plane waves at the edges, the Green-function representation, and the
//! resonance sum. Pass a momentum on the command line, e.g.
//!
//!     cargo run --example laplace_routes -- 2.0 0.5

use gamow::barrier::{find_resonances, BarrierParams};
use gamow::laplace::*;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let p = Complex64::new(*args.first().unwrap_or(&2.0), *args.get(1).unwrap_or(&0.5));
    let params = BarrierParams::cfg0();
    let k = 3.0;
    let set = ResonanceSet::from_table(&find_resonances(&params, 800)?, k)?;

    println!("{:>6} {:>4} {:>40} {:>10} {:>10} {:>10}", "x", "", "ψ̄ (matching)", "green", "N=400", "subtr.");
    for x in [-1.0, -0.2, 0.0, 0.3, 0.5, 1.0, 1.4, 2.5] {
        let direct = psi_bar_direct(&params, k, x, p)?;
        let green = psi_bar_green(&params, k, x, p)?;
        let series = p_psi_bar_series(&set, x, p, 400)? / p;
        let subtracted = p_psi_bar_subtracted(&set, x, p, 400, 3)? / p;
        println!(
            "{x:>6} {:>4} {:>40.14} {:>10.1e} {:>10.1e} {:>10.1e}",
            Region::of(&params, x).label(),
            direct,
            (green - direct).norm(),
            (series - direct).norm(),
            (subtracted - direct).norm()
        );
    }
    Ok(())
}
