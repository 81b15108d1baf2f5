//! Complex error-function family: the Faddeeva function `w(z)`, the scaled
//! complementary error function `e^{y²} erfc(y)` and the Moshinsky function.
//!
//! Every time-dependent kernel in this crate reduces to `w` evaluated somewhere
//! in the complex plane, frequently at points where `erfc` itself over- or
//! underflows. The scaled forms below are therefore the only entry points the
//! rest of the crate uses.

use crate::error::{GamowError, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// 2/√π
const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_573_9;
const MAX_EXP_ARG: f64 = 708.503_061_461_606;
const MAX_TRIG_ARG: f64 = 3.537_118_876_014_22e15;

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
///
/// Region-split evaluation after Poppe & Wijers: a Taylor expansion of the
/// scaled Dawson form close to the origin, a truncated Laplace continued
/// fraction far away, and the Gautschi "ladder" combination of the two in the
/// intermediate annulus. The lower half plane is reached through
/// `w(-z) = 2e^{-z²} - w(z)`, which is where overflow can occur.
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GamowError::Domain(format!("w(z) needs finite z, got {z}")));
    }
    let xabs = z.re.abs();
    let yabs = z.im.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let small = qrho < 0.085264;
    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);

    if small {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0i64;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i64;
            nu = (16.0 + 26.0 * qrho).round() as i64;
        }
        let h2 = 2.0 * h;
        let ladder = h > 0.0;
        let mut qlambda = if ladder { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if ladder && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if h == 0.0 {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        } else {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if z.im < 0.0 {
        if small {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            let xq = -xquad;
            if yquad > MAX_TRIG_ARG || xq > MAX_EXP_ARG {
                return Err(GamowError::Overflow(format!(
                    "w({z}) needs 2e^(-z^2) with |exponent| {xq:.1}"
                )));
            }
            let w1 = 2.0 * xq.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if z.re > 0.0 {
            v = -v;
        }
    } else if z.re < 0.0 {
        v = -v;
    }
    Ok(Complex64::new(u, v))
}

/// Result of [`scaled_erfc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledErfc {
    /// `e^{y²} erfc(y)`
    pub value: Complex64,
    /// The reflection `2e^{y²} − e^{y²}erfc(−y)` was needed (Re y < 0).
    pub reflected: bool,
    /// The reflected branch dominates and grows like `e^{Re y²}`
    /// (`|arg y| > 3π/4`).
    pub growing: bool,
}

/// `e^{y²} erfc(y)`, evaluated as `w(iy)` so that neither factor is ever
/// formed on its own.
///
/// In the sector `|arg y| < 3π/4` the result is bounded and behaves like
/// `1/(√π y)` at infinity. Outside it the reflection
/// `e^{y²}erfc(y) = 2e^{y²} − e^{y²}erfc(−y)` takes over and the result is
/// exponentially large; the `growing` flag reports that case.
pub fn scaled_erfc(y: Complex64) -> Result<ScaledErfc> {
    let iy = Complex64::new(-y.im, y.re);
    let reflected = y.re < 0.0;
    let y2 = y * y;
    let growing = reflected && y2.re > 0.0;
    let value = if reflected {
        // w(iy) = 2 e^{y²} − w(−iy); do it here so the overflow message names y
        if y2.re > MAX_EXP_ARG {
            return Err(GamowError::Overflow(format!(
                "e^(y^2) erfc(y) at y = {y}: reflected branch exceeds range"
            )));
        }
        2.0 * y2.exp() - faddeeva_w(-iy)?
    } else {
        faddeeva_w(iy)?
    };
    Ok(ScaledErfc { value, reflected, growing })
}

/// Moshinsky function
/// `M(x,q,t) = ½ e^{imx²/2t} w(i e^{−iπ/4} √(m/2t) (x − tq/m))`.
pub fn moshinsky(x: f64, q: Complex64, t: f64, m: f64) -> Result<Complex64> {
    if !(t > 0.0) || !(m > 0.0) {
        return Err(GamowError::Domain(format!(
            "moshinsky needs t > 0 and m > 0 (t = {t}, m = {m})"
        )));
    }
    let phase = Complex64::from_polar(1.0, m * x * x / (2.0 * t));
    let arg = Complex64::i()
        * Complex64::from_polar(1.0, -FRAC_PI_4)
        * (m / (2.0 * t)).sqrt()
        * (x - t * q / m);
    Ok(0.5 * phase * faddeeva_w(arg)?)
}

/// Complementary error function through the scaled form; only used where a
/// literal `erfc` appears in a printed formula.
pub fn erfc(z: Complex64) -> Result<Complex64> {
    let s = scaled_erfc(z)?;
    Ok((-z * z).exp() * s.value)
}

/// `1/√π`
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_9;

/// Below this |z| [`faddeeva_tail`] refuses: the asymptotic series it sums
/// is no longer accurate to double precision.
pub const TAIL_MIN_ABS: f64 = 8.0;

/// `w(z)` minus the first `skip` terms of its asymptotic series
/// `(i/√π z) Σ_m (2m−1)!!/(2z²)^m`, for `Im z ≥ 0` and `|z| ≥ 8`.
///
/// Forming the same difference from `w` itself would lose about
/// `(2|z|²)^skip` in relative accuracy; kernels at large momenta need
/// exactly that difference.
pub fn faddeeva_tail(z: Complex64, skip: usize) -> Result<Complex64> {
    if z.im < 0.0 || !(z.norm() >= TAIL_MIN_ABS) {
        return Err(GamowError::Domain(format!("faddeeva_tail needs Im z ≥ 0 and |z| ≥ {TAIL_MIN_ABS}, got {z}")));
    }
    let inv2z2 = 1.0 / (2.0 * z * z);
    let mut term = Complex64::new(1.0, 0.0);
    for m in 1..=skip {
        term *= (2 * m - 1) as f64 * inv2z2;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for m in skip..skip + 80 {
        if m > skip {
            term *= (2 * m - 1) as f64 * inv2z2;
        }
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    Ok(Complex64::new(0.0, FRAC_1_SQRT_PI) / z * sum)
}

/// Leading terms of the asymptotic series
/// `e^{y²}erfc(y) ~ 1/(√π y) Σ (−1)^m (2m−1)!!/(2y²)^m`, truncated before
/// the smallest term. Used only as an independent cross-check.
pub fn scaled_erfc_asymptotic(y: Complex64, max_terms: usize) -> Complex64 {
    let inv2y2 = 1.0 / (2.0 * y * y);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for m in 1..max_terms {
        let next = -term * (2 * m - 1) as f64 * inv2y2;
        if next.norm() >= last {
            break;
        }
        last = next.norm();
        term = next;
        sum += term;
    }
    sum * FRAC_1_SQRT_PI / y
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // mpmath, 30 digits: exp(-z^2) erfc(-iz)
    const REF: &[(f64, f64, f64, f64)] = &[
        (0.5, 0.5, 0.53315670791217491, 0.23048823138445841),
        (2.0, 0.1, 0.040201398161451289, 0.33158268733456308),
        (-3.0, 1.0, 0.065317777289046967, -0.17391831541634897),
        (5.5, -0.3, -0.0058788635396342504, 0.10402870067058795),
        (-1.2, -2.5, 235.50706108452368, 68.509207654481144),
        (6.2, 0.02, 0.00030581615414978976, 0.092230434718801864),
        (0.01, 9.0, 0.062307649386432317, 6.8401263151951952e-5),
        (30.0, 2.0, 0.0012502716123336107, 0.018733294380844758),
        (-8.0, -0.5, -0.0044967053700597688, -0.070800110618922254),
        (0.001, 0.001, 0.99887162233541125, 0.0011263806715998665),
        (4.0, 4.0, 0.071570433426365329, 0.069374518613771461),
        (0.0, -1.0, 5.0089800807622835, 0.0),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(x, y, re, im) in REF {
            let w = faddeeva_w(c(x, y)).unwrap();
            let exact = c(re, im);
            let rel = (w - exact).norm() / exact.norm();
            assert!(rel < 1e-12, "w({x},{y}) = {w}, want {exact}, rel {rel:e}");
        }
    }

    #[test]
    fn origin_and_imaginary_unit() {
        assert_eq!(faddeeva_w(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let wi = faddeeva_w(c(0.0, 1.0)).unwrap();
        assert!((wi - c(0.427_583_576_155_807_0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn reflection_overflows_loudly() {
        assert!(matches!(faddeeva_w(c(0.0, -40.0)), Err(GamowError::Overflow(_))));
    }

    #[test]
    fn scaled_erfc_large_real() {
        let s = scaled_erfc(c(100.0, 0.0)).unwrap();
        assert!(!s.reflected);
        assert!((s.value.re - 0.005_641_613_782_989_433).abs() < 1e-17);
        let big = scaled_erfc(c(1e8, 0.0)).unwrap().value;
        assert!((big.re * 1e8 / FRAC_1_SQRT_PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_matches_w_where_cancellation_is_mild() {
        for z in [c(8.0, 0.5), c(-6.0, 6.0), c(0.0, 9.0), c(11.0, 0.0)] {
            let lead = Complex64::new(0.0, FRAC_1_SQRT_PI) / z;
            let t = faddeeva_tail(z, 1).unwrap();
            let d = faddeeva_w(z).unwrap() - lead;
            assert!((t - d).norm() <= 1e-13 * lead.norm(), "{z}");
        }
        let z = c(9.0, 2.0);
        assert!((faddeeva_tail(z, 0).unwrap() - faddeeva_w(z).unwrap()).norm() <= 1e-15);
        assert!(faddeeva_tail(c(3.0, 1.0), 0).is_err());
        assert!(faddeeva_tail(c(10.0, -1.0), 0).is_err());
    }

    #[test]
    fn scaled_erfc_reflection_flags() {
        let y = Complex64::from_polar(2.0, 3.0 * FRAC_PI_4 + 0.05);
        let s = scaled_erfc(y).unwrap();
        assert!(s.reflected && s.growing);
        let inside = scaled_erfc(Complex64::from_polar(2.0, 0.6 * PI)).unwrap();
        assert!(inside.reflected && !inside.growing);
    }

    #[test]
    fn moshinsky_rejects_nonpositive_time() {
        assert!(moshinsky(0.1, c(1.0, 0.0), 0.0, 0.5).is_err());
        let m0 = moshinsky(0.0, c(0.0, 0.0), 0.7, 0.5).unwrap();
        assert!((m0 - c(0.5, 0.0)).norm() < 1e-15);
    }
}
