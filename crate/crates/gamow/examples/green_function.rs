//! The outgoing Green function of the barrier, in closed form and as a sum
//! over resonance poles.
//!
//! The plain pole series converges like 1/N. Subtracting the first Taylor
//! terms at p = 0 speeds that up and also gives the right value on the
//! diagonal and at the edges. At (0, L) the plain sum does converge, but
//! it misses a constant of size 1/2mV.

use gamow::barrier::{find_resonances, BarrierParams};
use gamow::greenfn::{green_closed, green_pole_series, green_subtracted_series, green_zero_momentum};
use num_complex::Complex64;

fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let poles = find_resonances(&params, 2000)?.poles;
    let p = Complex64::new(1.5, 0.0);

    println!("G(0,0,0) = {:.12}", green_zero_momentum(&params, 0.0, 0.0));
    for (x, y) in [(0.3, 0.7), (0.0, 0.0), (0.0, 1.0)] {
        let exact = green_closed(&params, x, y, p)?;
        println!("\nG({x}, {y}; p = 1.5) = {exact:.12}");
        println!("{:>6} {:>12} {:>12}", "pairs", "plain", "subtracted");
        for n in [125, 250, 500, 1000, 2000] {
            // the plain series is refused where it does not converge to G
            let plain = match green_pole_series(&params, x, y, p, &poles, n) {
                Ok(a) => format!("{:.3e}", (a - exact).norm()),
                Err(_) => "refused".into(),
            };
            let b = green_subtracted_series(&params, x, y, p, &poles, n)?;
            println!("{n:>6} {plain:>12} {:>12.3e}", (b - exact).norm());
        }
    }
    Ok(())
}
