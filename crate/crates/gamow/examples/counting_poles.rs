use gamow::barrier::{find_resonances, BarrierParams, Rect};
use gamow::oracle::count_zeros;

// Count resonances inside boxes by the argument principle and compare with
// what the root finder returned.
fn main() -> Result<(), gamow::error::GamowError> {
    let params = BarrierParams::cfg0();
    let table = find_resonances(&params, 60)?;
    for re_hi in [5.0, 20.0, 60.0, 120.0] {
        let rect = Rect::new(0.0, re_hi, -8.0, -1e-3);
        let found = table.positive().filter(|p| rect.contains(p.p)).count();
        println!("0 < Re p < {re_hi:<5}: winding number {}, root finder {found}", count_zeros(&params, &rect)?);
    }
    Ok(())
}
