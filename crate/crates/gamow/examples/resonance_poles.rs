//! Locate the Gamow poles of the canonical barrier and print the first few
//! together with their complex norms.
//!
//!     cargo run --example resonance_poles -- 1600

use gamow::barrier::{find_resonances, resonance_norm_by_quadrature, BarrierParams};
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let count: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(40);
    let params = BarrierParams::cfg0();

    let start = Instant::now();
    let table = find_resonances(&params, count)?;
    println!("{count} pole pairs in {:.2?}", start.elapsed());

    println!("{:>4} {:>22} {:>22} {:>10}", "n", "p_n", "N_n", "|D|/scale");
    for pole in table.positive().take(8) {
        println!(
            "{:>4} {:>10.6}{:+.6}i {:>10.3}{:+.3}i {:>10.1e}",
            pole.n, pole.p.re, pole.p.im, pole.norm.re, pole.norm.im, pole.residual
        );
    }

    let worst = table.poles.iter().map(|p| p.residual).fold(0.0, f64::max);
    println!("largest scaled residual: {worst:.2e}");

    let p1 = table.get(1);
    let by_quad = resonance_norm_by_quadrature(&params, p1, 64);
    println!("N_1 closed form {:.10}, by quadrature {:.10}", p1.norm, by_quad);
    Ok(())
}
