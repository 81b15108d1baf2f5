//! Green function of `[∂²ₓ + p² − 2mV]G = δ(x − y)` on [0, L] with outgoing
//! (resonant) boundary conditions, and its pole expansions.
//!
//! The closed form is written with `c(z) = cos(p′z)` and `S(z) = sin(p′z)/p′`,
//! which are even in p′. That makes it independent of the square-root branch
//! and regular at p′ = 0:
//!
//! ```text
//! u₀(x) = c(x) − ip S(x)          (satisfies the condition at x = 0)
//! u_L(y) = c(L−y) − ip S(L−y)     (satisfies the condition at x = L)
//! G(x,y,p) = u₀(min) u_L(max) / W(p)
//! ```
//!
//! with `W = 2ip c(L) + (p² + p′²) S(L)`. The jump of ∂ₓG at x = y is +1.

use crate::barrier::{
    denominator_scale, resonant_u_frame, wronskian, BarrierParams, EvenTrig, MomentumFrame,
    ResonancePole,
};
use crate::error::{GamowError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Solutions of the homogeneous equation obeying the left / right outgoing
/// condition, evaluated at a point.
pub(crate) fn u_left(params: &BarrierParams, p: Complex64, x: f64) -> Complex64 {
    let t = EvenTrig::new(p * p - params.kappa2(), x);
    t.c - I * p * t.s
}

pub(crate) fn u_right(params: &BarrierParams, p: Complex64, y: f64) -> Complex64 {
    u_left(params, p, params.l - y)
}

fn check_interval(params: &BarrierParams, x: f64, name: &str) -> Result<()> {
    if !(0.0..=params.l).contains(&x) {
        return Err(GamowError::Domain(format!("{name} = {x} outside [0, L]")));
    }
    Ok(())
}

/// |W| below this multiple of its natural size counts as "on a pole".
const POLE_PROXIMITY: f64 = 1e-12;

pub(crate) fn pole_check(params: &BarrierParams, p: Complex64, w: Complex64) -> Result<()> {
    // D = 2ip′W; compare against the scale of D's two terms, divided back by
    // |2p′| (bounded away from zero so p′ = 0 is not flagged).
    let f = MomentumFrame::new(params, p);
    let scale = denominator_scale(params, &f) / (2.0 * f.pp.norm()).max(1.0);
    if w.norm() < POLE_PROXIMITY * scale {
        return Err(GamowError::PoleProximity { p, residual: w.norm() });
    }
    Ok(())
}

/// G(x, y, p) for x, y ∈ [0, L].
pub fn green_closed(params: &BarrierParams, x: f64, y: f64, p: Complex64) -> Result<Complex64> {
    check_interval(params, x, "x")?;
    check_interval(params, y, "y")?;
    if p == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(green_zero_momentum(params, x, y), 0.0));
    }
    let w = wronskian(params, p);
    pole_check(params, p, w)?;
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    Ok(u_left(params, p, a) * u_right(params, p, b) / w)
}

/// ∂ₓG(x, y, p), analytic, taking x on the side indicated by `above`
/// (x > y or x < y) when x = y.
pub fn green_dx(params: &BarrierParams, x: f64, y: f64, p: Complex64, above: bool) -> Result<Complex64> {
    let w = wronskian(params, p);
    pole_check(params, p, w)?;
    let k2 = p * p - params.kappa2();
    // d/dz [c(z) − ipS(z)] = −s² S(z) − ip c(z)
    let du = |z: f64| {
        let t = EvenTrig::new(k2, z);
        -k2 * t.s - I * p * t.c
    };
    if x > y || (x == y && above) {
        // x is the larger argument: d/dx u_L(x) = −u₀′(L − x)
        Ok(u_left(params, p, y) * (-du(params.l - x)) / w)
    } else {
        Ok(du(x) * u_right(params, p, y) / w)
    }
}

/// G(x, y, 0) from the hyperbolic closed form.
pub fn green_zero_momentum(params: &BarrierParams, x: f64, y: f64) -> f64 {
    let k = params.kappa();
    let l = params.l;
    let diff = (x - y).abs();
    -((k * (l - (x + y))).cosh() + (k * (l - diff)).cosh()) / (2.0 * k * (k * l).sinh())
}

/// ∂ₚG(x, y, p) at p = 0, closed form.
///
/// At p = 0 the even functions c, S have vanishing p-derivative, so only the
/// explicit `−ipS` terms and `W′(0) = 2i cosh(κL)` contribute.
pub fn green_dp_zero(params: &BarrierParams, x: f64, y: f64) -> Complex64 {
    let k = params.kappa();
    let l = params.l;
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    let ua = (k * a).cosh();
    let ub = (k * (l - b)).cosh();
    let sa = (k * a).sinh() / k;
    let sb = (k * (l - b)).sinh() / k;
    let w0 = -k * (k * l).sinh();
    let dw0 = 2.0 * I * (k * l).cosh();
    (-I * sa * ub - I * ua * sb) / w0 - ua * ub * dw0 / (w0 * w0)
}

/// The closed forms for special arguments, transcribed literally. They carry
/// the opposite overall sign to the Green function defined by the jump +1
/// (see the crate README); callers compare them with `−green_closed`.
pub mod printed {
    use super::*;
    use crate::barrier::denominator_in_frame;

    pub fn g_0x(params: &BarrierParams, x: f64, p: Complex64) -> Complex64 {
        let f = MomentumFrame::new(params, p);
        let d = denominator_in_frame(params, &f);
        let l = params.l;
        I / d * (f.minus * (I * f.pp * (l - x)).exp() - f.plus * (-I * f.pp * (l - x)).exp())
    }

    pub fn g_lx(params: &BarrierParams, x: f64, p: Complex64) -> Complex64 {
        let f = MomentumFrame::new(params, p);
        let d = denominator_in_frame(params, &f);
        I / d * (f.minus * (I * f.pp * x).exp() - f.plus * (-I * f.pp * x).exp())
    }

    pub fn g_0l(params: &BarrierParams, p: Complex64) -> Complex64 {
        let f = MomentumFrame::new(params, p);
        -I * 2.0 * f.pp / denominator_in_frame(params, &f)
    }

    pub fn g_00(params: &BarrierParams, p: Complex64) -> Complex64 {
        g_0x(params, 0.0, p)
    }

    /// The general expression, sign as printed.
    pub fn g_xy(params: &BarrierParams, x: f64, y: f64, p: Complex64) -> Complex64 {
        let f = MomentumFrame::new(params, p);
        let d = denominator_in_frame(params, &f);
        let l = params.l;
        let e = |z: Complex64| (I * f.pp * z).exp();
        let sum = Complex64::new(l - (x + y), 0.0);
        let diff = Complex64::new((x - y).abs(), 0.0);
        I / (2.0 * f.pp * d)
            * (params.kappa2() * (e(sum) + e(-sum))
                - f.plus * f.plus * (-I * f.pp * l).exp() * e(diff)
                - f.minus * f.minus * (I * f.pp * l).exp() * e(-diff))
    }

    /// −coth(Lκ)/κ
    pub fn g_00_zero(params: &BarrierParams) -> f64 {
        let k = params.kappa();
        -1.0 / (k * (k * params.l).tanh())
    }

    /// −(i/4mV)(3 + cosh 2Lκ)/sinh Lκ, as printed.
    pub fn dp_g_00_zero(params: &BarrierParams) -> Complex64 {
        let k = params.kappa();
        let l = params.l;
        -I / (4.0 * params.m * params.v) * (3.0 + (2.0 * l * k).cosh()) / (l * k).sinh()
    }

    /// The same with the sinh squared, which is what the closed form gives.
    pub fn dp_g_00_zero_squared(params: &BarrierParams) -> Complex64 {
        let k = params.kappa();
        let l = params.l;
        -I / (4.0 * params.m * params.v) * (3.0 + (2.0 * l * k).cosh()) / (l * k).sinh().powi(2)
    }
}

/// Residue of G at p_n: u_n(x)u_n(y)/N_n.
pub fn residue(params: &BarrierParams, pole: &ResonancePole, x: f64, y: f64) -> Complex64 {
    let f = pole.frame(params);
    resonant_u_frame(params, &f, x) * resonant_u_frame(params, &f, y) / pole.norm
}

fn is_exceptional(params: &BarrierParams, x: f64, y: f64) -> bool {
    (x == 0.0 && y == 0.0) || (x == params.l && y == params.l)
}

/// Truncated Mittag-Leffler series Σ C_n/(p − p_n) over the first `pairs`
/// (n, −n) pairs.
pub fn green_pole_series(
    params: &BarrierParams,
    x: f64,
    y: f64,
    p: Complex64,
    poles: &[ResonancePole],
    pairs: usize,
) -> Result<Complex64> {
    check_interval(params, x, "x")?;
    check_interval(params, y, "y")?;
    if is_exceptional(params, x, y) {
        return Err(GamowError::Domain(format!(
            "G({x},{y},p) grows like |p|; use green_subtracted_series"
        )));
    }
    let poles = take_pairs(poles, pairs)?;
    Ok(poles.iter().map(|q| residue(params, q, x, y) / (p - q.p)).sum())
}

/// Series with two subtractions at p = 0:
/// p² Σ C_n/(p_n²(p − p_n)) + G(x,y,0) + p ∂ₚG(x,y,0).
pub fn green_subtracted_series(
    params: &BarrierParams,
    x: f64,
    y: f64,
    p: Complex64,
    poles: &[ResonancePole],
    pairs: usize,
) -> Result<Complex64> {
    check_interval(params, x, "x")?;
    check_interval(params, y, "y")?;
    let poles = take_pairs(poles, pairs)?;
    let sum: Complex64 =
        poles.iter().map(|q| residue(params, q, x, y) / (q.p * q.p * (p - q.p))).sum();
    Ok(p * p * sum + green_zero_momentum(params, x, y) + p * green_dp_zero(params, x, y))
}

pub(crate) fn take_pairs(poles: &[ResonancePole], pairs: usize) -> Result<&[ResonancePole]> {
    if 2 * pairs > poles.len() {
        return Err(GamowError::InsufficientPoles { needed: pairs, available: poles.len() / 2 });
    }
    Ok(&poles[..2 * pairs])
}

/// Which stationary in-solution to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InSide {
    /// φ^in_r from G(0, x, p), 0 < x ≤ L
    Right,
    /// φ^in_l from G(L, x, p), 0 ≤ x < L
    Left,
}

/// φ^in(x) recovered from G: G(0,x,p) = (−i/2p)√(2π)√(p/m) φ^in_r(x) and the
/// same with G(L,x,p) for φ^in_l.
pub fn scattering_from_green(params: &BarrierParams, side: InSide, x: f64, p: f64) -> Result<Complex64> {
    if !(p > 0.0) {
        return Err(GamowError::Domain(format!("scattering momentum must be positive, got {p}")));
    }
    let g = match side {
        InSide::Right => green_closed(params, 0.0, x, p.into())?,
        InSide::Left => green_closed(params, params.l, x, p.into())?,
    };
    let factor = (-I / (2.0 * p)) * (2.0 * PI).sqrt() * (p / params.m).sqrt();
    Ok(g / factor)
}

/// Taylor coefficients h_0 … h_{n−1} of an analytic function at the origin,
/// from the trapezoidal rule on a circle of radius `r` (exponentially
/// accurate while `r` stays inside the disc of analyticity).
pub fn taylor_coefficients<F: Fn(Complex64) -> Complex64>(
    f: F,
    n: usize,
    r: f64,
    points: usize,
) -> Vec<Complex64> {
    let samples: Vec<(Complex64, Complex64)> = (0..points)
        .map(|j| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
            (e, f(r * e))
        })
        .collect();
    (0..n)
        .map(|k| {
            let s: Complex64 = samples.iter().map(|(e, v)| v * e.powi(-(k as i32))).sum();
            s / (points as f64 * r.powi(k as i32))
        })
        .collect()
}
