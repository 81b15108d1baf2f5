//! The complex error function and the scaled erfc the kernels are built on.

use gamow::cxmath::{erfc, faddeeva_w, moshinsky, scaled_erfc};
use num_complex::Complex64;

fn main() -> Result<(), gamow::error::GamowError> {
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(6.0, 0.01),
        Complex64::new(-3.0, -2.0),
    ] {
        println!("w({z:>8.2}) = {:.15}", faddeeva_w(z)?);
    }

    // e^{y²}erfc(y) stays bounded where erfc(y) alone would underflow
    for y in [3.0, 30.0, 300.0] {
        let y = Complex64::new(y, 0.0);
        let s = scaled_erfc(y)?;
        println!("y = {:>5}: erfc {:.3e}, scaled {:.12e}", y.re, erfc(y)?.re, s.value.re);
    }
    let s = scaled_erfc(Complex64::new(-4.0, 0.5))?;
    println!("y = −4+0.5i: reflected {}, growing {}, |value| {:.3e}", s.reflected, s.growing, s.value.norm());

    // free-particle shutter solution, k = 3, m = 1/2
    for t in [0.01, 0.1, 1.0] {
        let m = moshinsky(1.0, Complex64::new(3.0, 0.0), t, 0.5)?;
        println!("M(x=1, k=3, t={t}) = {m:.8}");
    }
    Ok(())
}
