//! Cross-check the resonance expansion against direct numerical inversion
//! of the Laplace transform along a Bromwich contour.

use gamow::barrier::{find_resonances, BarrierParams};
use gamow::evolution::{psi_t, ExpansionForm, SeriesControl, TimePoint};
use gamow::laplace::ResonanceSet;
use gamow::oracle::{causality_check, oracle_psi, ContourSpec};

fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let k = 3.0;
    let set = ResonanceSet::from_table(&find_resonances(&params, 800)?, k)?;
    let spec = ContourSpec::default();

    println!("{:>5} {:>5} {:>38} {:>9} {:>9} {:>9}", "x", "t", "oracle", "± err", "subtr.", "printed");
    for t in [0.05, 0.2, 1.0] {
        let time = TimePoint::new(&params, t)?;
        for x in [-0.5, 0.5, 1.5] {
            let o = oracle_psi(&params, k, x, t, &spec)?;
            let sub = psi_t(&set, x, time, &SeriesControl::fixed(800, ExpansionForm::default()))?.psi;
            let lit = psi_t(&set, x, time, &SeriesControl::fixed(800, ExpansionForm::Printed))?.psi;
            println!(
                "{x:>5} {t:>5} {:>38.14} {:>9.1e} {:>9.1e} {:>9.1e}",
                o.value,
                o.error,
                (sub - o.value).norm(),
                (lit - o.value).norm()
            );
        }
    }

    // Nothing has arrived before the wave is switched on.
    let c = causality_check(&params, k, 0.5, -0.1, &spec)?;
    println!("\n|ψ(0.5, −0.1)| = {:.1e}", c.psi.value.norm());
    Ok(())
}
