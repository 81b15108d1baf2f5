//! |ψ(x, t)|² across the barrier as the plane wave switches on at t = 0.
//! Writes CSV to stdout: `cargo run --example evolve > psi.csv`.

use gamow::barrier::{find_resonances, BarrierParams};
use gamow::evolution::{psi_t, SeriesControl, TimePoint};
use gamow::laplace::ResonanceSet;

fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let set = ResonanceSet::from_table(&find_resonances(&params, 800)?, 3.0)?;
    let control = SeriesControl::default();

    println!("t,x,abs2,re_psi,im_psi,pairs");
    for t in [0.02, 0.1, 0.5, 2.0] {
        let time = TimePoint::new(&params, t)?;
        for i in 0..=60 {
            let x = -1.0 + 0.05 * i as f64;
            let s = psi_t(&set, x, time, &control)?;
            println!("{t},{x:.2},{:.10},{:.10},{:.10},{}", s.psi.norm_sqr(), s.psi.re, s.psi.im, s.pairs_used);
        }
    }
    Ok(())
}
