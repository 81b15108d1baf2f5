//! Transmission through the barrier: tunnelling below the top, and the
//! over-barrier resonances where |T| = 1.

use gamow::barrier::BarrierParams;
use gamow::stationary::{reflection, transmission};

fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let top = params.kappa();
    println!("barrier top at k = {top:.4}");
    println!("{:>6} {:>10} {:>10}", "k", "|T|²", "|R|²");
    for i in 1..=40 {
        let k = 0.25 * i as f64;
        let t = transmission(&params, k)?.norm_sqr();
        let r = reflection(&params, k)?.norm_sqr();
        let mark = if (k - top).abs() < 0.125 { "  <- top" } else { "" };
        println!("{k:>6.2} {t:>10.6} {r:>10.6}{mark}");
    }
    // full transmission where k'L = nπ
    for n in 1..=3 {
        let kp = n as f64 * std::f64::consts::PI / params.l;
        let k = (kp * kp + params.kappa2()).sqrt();
        println!("k'L = {n}π, k = {k:.6}: |T|² = {:.15}", transmission(&params, k)?.norm_sqr());
    }
    Ok(())
}
