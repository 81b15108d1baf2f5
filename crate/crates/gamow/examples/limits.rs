//! Short times: ψ → e^{ikx}. Long times: ψ → the stationary in-state,
//! approached like t^(−1/2).

use gamow::barrier::{find_resonances, BarrierParams};
use gamow::evolution::{large_time_pair, psi_t, stationary_limit, SeriesControl, TimePoint};
use gamow::laplace::ResonanceSet;
use num_complex::Complex64;

fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let k = 3.0;
    let set = ResonanceSet::from_table(&find_resonances(&params, 800)?, k)?;
    let control = SeriesControl::default();
    let x = 0.5;

    for t in [0.1, 0.01, 0.001] {
        let psi = psi_t(&set, x, TimePoint::new(&params, t)?, &control)?.psi;
        println!("t = {t:<6} |ψ − e^(ikx)| = {:.4}", (psi - Complex64::from_polar(1.0, k * x)).norm());
    }
    for t in [5.0, 50.0, 500.0] {
        let time = TimePoint::new(&params, t)?;
        let psi = psi_t(&set, x, time, &control)?.psi;
        let limit = stationary_limit(&params, k, x, time)?;
        let pair = large_time_pair(&params, k, 2.5, time)?;
        println!(
            "t = {t:<6} |ψ/ψ_∞ − 1| = {:.2e}   far-side momentum-pair remainder {:.3e}",
            (psi / limit - 1.0).norm(),
            pair.norm()
        );
    }
    Ok(())
}
