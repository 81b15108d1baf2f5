//! Brute-force cross-checks that share nothing with the pole machinery.
//!
//! * [`oracle_psi`] inverts the Laplace transform numerically:
//!   `ψ(x,t) = (1/2πm) ∫ p e^{−iτp²} ψ̄(x,p) dp` along a path just above the
//!   real axis, with ψ̄ taken from the matching solve only.
//! * [`causality_check`] evaluates the same integral for t < 0 on a path
//!   pushed into the first quadrant, where it must vanish.
//! * [`kernel_by_quadrature`] integrates the kernel definitions
//!   `I_j(X,q) = (1/iπ) ∫ p^j/(p−q) e^{−iτp²+iXp} dp` directly.
//! * [`count_zeros`] counts resonances in a box by the argument principle.
//!
//! # Contour
//!
//! The central segment runs from −P to P at height ε. Beyond it the
//! Gaussian factor only decays off the real axis, in the second and fourth
//! quadrants. The left tail turns into the second quadrant, which holds no
//! singularity. The fourth quadrant holds the resonance poles, whose depth
//! grows only like ln|p|, so no straight ray clears them. The default right
//! tail therefore follows half the asymptotic pole depth,
//! `ε − ½ ln(1 + 2r²/mV)/L`, which stays above every pole and still makes
//! `e^{−iτp²}` decay like a power of e^{−τ r ln r}.

use crate::barrier::{find_resonances, wronskian, wronskian_with_derivative, BarrierParams, Rect};
use crate::error::{GamowError, Result};
use crate::evolution::KernelKind;
use crate::laplace::psi_bar_direct;
use crate::quad::{adaptive, Quadrature};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How the path leaves the central segment on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailShape {
    /// Follow half the asymptotic resonance depth (always pole-free).
    LogDepth,
    /// Straight ray at `angle` below the real axis. Refused with
    /// [`GamowError::PoleSweep`] if a resonance lies in the swept wedge
    /// before the tail is truncated. Resonance depth grows only like
    /// ln|p|, so steep rays are refused almost always; shallow ones pass
    /// over the near poles and sweep only those whose residues are
    /// already below the truncation level.
    Rotated { angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourSpec {
    /// Height of the central segment above the real axis.
    pub eps: f64,
    /// Half-width of the central segment; `None` picks
    /// `max(3k, 8, 1.2|X|/2τ)`, past the stationary point of `e^{−iτp²+iXp}`.
    pub p_max: Option<f64>,
    /// Initial panels per unit of path length (each is then bisected
    /// adaptively).
    pub panels_per_unit: f64,
    pub tail: TailShape,
    /// Target absolute error of the whole integral.
    pub tolerance: f64,
    pub max_depth: u32,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            eps: 1e-3,
            p_max: None,
            panels_per_unit: 1.0,
            tail: TailShape::LogDepth,
            tolerance: 1e-10,
            max_depth: 14,
        }
    }
}

impl ContourSpec {
    /// Same path with every initial panel halved.
    pub fn refined(&self) -> Self {
        ContourSpec { panels_per_unit: 2.0 * self.panels_per_unit, ..*self }
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        ContourSpec { eps, ..*self }
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: &str| {
            Err(GamowError::Config { field: format!("contour.{field}"), message: message.into() })
        };
        if !(self.eps > 0.0 && self.eps < 0.1) {
            return bad("eps", "must lie in (0, 0.1)");
        }
        if let Some(p) = self.p_max {
            if !(p.is_finite() && p > 0.0) {
                return bad("p_max", "must be positive");
            }
        }
        if !(self.panels_per_unit > 0.0 && self.panels_per_unit.is_finite()) {
            return bad("panels_per_unit", "must be positive");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance", "must be positive");
        }
        if let TailShape::Rotated { angle } = self.tail {
            if !(angle < 0.0 && angle > -std::f64::consts::FRAC_PI_2) {
                return bad("tail.angle", "must lie in (−π/2, 0)");
            }
        }
        Ok(())
    }
}

/// An integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: Complex64,
    /// Panel-refinement discrepancy plus the bound on the discarded tails.
    pub error: f64,
    pub evaluations: usize,
}

/// A parametrised path piece `z(r)`, `r ∈ [a, b]`.
struct Leg<'a> {
    z: &'a dyn Fn(f64) -> (Complex64, Complex64),
    a: f64,
    b: f64,
    /// Extra panel breakpoints (parameter values).
    breaks: Vec<f64>,
}

/// Integrates `f` along the legs, panel by panel; the first error raised by
/// `f` aborts the integration.
fn integrate_legs<F>(f: F, legs: &[Leg], spec: &ContourSpec) -> Result<OracleValue>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut panels: Vec<(usize, f64, f64)> = Vec::new();
    for (li, leg) in legs.iter().enumerate() {
        let mut cuts = vec![leg.a, leg.b];
        let n = ((leg.b - leg.a).abs() * spec.panels_per_unit).ceil().max(1.0) as usize;
        cuts.extend((1..n).map(|j| leg.a + (leg.b - leg.a) * j as f64 / n as f64));
        cuts.extend(leg.breaks.iter().copied().filter(|r| *r > leg.a.min(leg.b) && *r < leg.a.max(leg.b)));
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if leg.b < leg.a {
            cuts.reverse();
        }
        panels.extend(cuts.windows(2).map(|w| (li, w[0], w[1])));
    }
    let per_panel = spec.tolerance / panels.len() as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    for (li, a, b) in panels {
        let leg = &legs[li];
        let mut failure = None;
        let q: Quadrature = adaptive(
            |r| {
                let (z, dz) = (leg.z)(r);
                match f(z) {
                    Ok(v) => v * dz,
                    Err(e) => {
                        failure.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            a,
            b,
            per_panel * (b - a).abs().max(1.0),
            spec.max_depth,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        value += q.value;
        error += q.error;
        evaluations += q.evaluations;
    }
    Ok(OracleValue { value, error, evaluations })
}

/// Offset of x from the nearest barrier edge (0 inside).
fn edge_offset(params: &BarrierParams, x: f64) -> f64 {
    if x > params.l {
        x - params.l
    } else if x < 0.0 {
        -x
    } else {
        0.0
    }
}

fn log_depth(params: &BarrierParams, eps: f64, p_max: f64, r: f64) -> (f64, f64) {
    // depth and its derivative in r
    let mv = params.m * params.v;
    let ramp = ((r - p_max) / 3.0).clamp(0.0, 1.0);
    let dramp = if r > p_max && r < p_max + 3.0 { 1.0 / 3.0 } else { 0.0 };
    let g = 0.5 * (1.0 + 2.0 * r * r / mv).ln() / params.l;
    let dg = 0.5 / params.l * (4.0 * r / mv) / (1.0 + 2.0 * r * r / mv);
    (eps - g * ramp, -(dg * ramp + g * dramp))
}

/// Resonances that could interfere with the right tail: all poles with real
/// part up to where the tail is truncated.
fn check_right_tail(params: &BarrierParams, spec: &ContourSpec, p_max: f64, reach: f64) -> Result<()> {
    let upto = p_max + reach;
    let count = (upto * params.l / PI).ceil() as usize + 2;
    let table = find_resonances(params, count)?;
    for pole in table.positive() {
        let p = pole.p;
        if p.re <= p_max || p.re > p_max + reach {
            continue;
        }
        let swept = match spec.tail {
            TailShape::LogDepth => p.im > log_depth(params, spec.eps, p_max, p.re).0,
            TailShape::Rotated { angle } => {
                let rel = p - Complex64::new(p_max, spec.eps);
                rel.arg() > angle
            }
        };
        if swept {
            return Err(GamowError::PoleSweep { pole: p });
        }
    }
    Ok(())
}

/// ψ(x, t) by numerical inversion of the Laplace transform.
pub fn oracle_psi(params: &BarrierParams, k: f64, x: f64, t: f64, spec: &ContourSpec) -> Result<OracleValue> {
    spec.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(GamowError::Domain(format!("oracle needs t > 0, got {t} (see causality_check)")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(GamowError::Domain(format!("incident momentum must be positive, got {k}")));
    }
    let tau = t / (2.0 * params.m);
    let big_x = edge_offset(params, x);
    let p_max = spec.p_max.unwrap_or_else(|| (3.0 * k).max(8.0).max(1.2 * big_x / (2.0 * tau)));
    if p_max <= k {
        return Err(GamowError::Config { field: "contour.p_max".into(), message: "must exceed k".into() });
    }
    let eps = spec.eps;
    let pref = 1.0 / (2.0 * PI * params.m);
    let f = |p: Complex64| -> Result<Complex64> {
        Ok(pref * p * (-I * tau * p * p).exp() * psi_bar_direct(params, k, x, p)?)
    };

    let central = |r: f64| (Complex64::new(r, eps), Complex64::new(1.0, 0.0));
    // Left tail into the second quadrant, where |e^{−iτp²}| ≈ e^{−τr²}.
    let dl = Complex64::from_polar(1.0, 3.0 * FRAC_PI_4);
    let left = move |r: f64| (Complex64::new(-p_max, eps) + r * dl, dl);
    let left_len = (40.0 / tau).sqrt() + 5.0;
    // Right tail: stop once |e^{−iτp²+iXp}| = e^{depth·(2τr − X)} < e^{−40}.
    let depth_at = |r: f64| match spec.tail {
        TailShape::LogDepth => log_depth(params, eps, p_max, r).0,
        TailShape::Rotated { angle } => eps + (r - p_max) * angle.tan(),
    };
    let mut right_end = p_max + 3.0;
    while (-depth_at(right_end)) * (2.0 * tau * right_end - big_x) < 40.0 {
        right_end += 1.0 + 0.25 * (right_end - p_max);
        if right_end > 1e7 {
            return Err(GamowError::Tolerance { requested: spec.tolerance, achieved: f64::INFINITY });
        }
    }
    check_right_tail(params, spec, p_max, right_end - p_max)?;
    let right_log = move |r: f64| {
        let (d, dd) = log_depth(params, eps, p_max, r);
        (Complex64::new(r, d), Complex64::new(1.0, dd))
    };
    let right_ray = move |r: f64| {
        let angle = match spec.tail {
            TailShape::Rotated { angle } => angle,
            TailShape::LogDepth => 0.0,
        };
        let d = Complex64::from_polar(1.0, angle);
        (Complex64::new(p_max, eps) + (r - p_max) * d, d)
    };
    let right: &dyn Fn(f64) -> (Complex64, Complex64) = match spec.tail {
        TailShape::LogDepth => &right_log,
        TailShape::Rotated { .. } => &right_ray,
    };

    let legs = [
        Leg { z: &left, a: left_len, b: 0.0, breaks: vec![] },
        Leg { z: &central, a: -p_max, b: p_max, breaks: vec![-k, k] },
        Leg { z: right, a: p_max, b: right_end, breaks: vec![p_max + 3.0] },
    ];
    let mut out = integrate_legs(f, &legs, spec)?;
    // Discarded ends: the integrand there is below e^{−40} times a modest
    // prefactor; bound it by its value.
    let end_l = f(left(left_len).0)?.norm() / tau.sqrt();
    let end_r = f(right(right_end).0)?.norm() * 10.0;
    out.error += end_l + end_r;
    if !out.value.re.is_finite() || !out.value.im.is_finite() {
        return Err(GamowError::Overflow(format!("oracle integral at x = {x}, t = {t}")));
    }
    if out.error > 100.0 * spec.tolerance {
        return Err(GamowError::Tolerance { requested: spec.tolerance, achieved: out.error });
    }
    Ok(out)
}

/// The t < 0 integral on a path through the first quadrant, where the
/// Gaussian decays for negative τ: in along `e^{3iπ/8}`, out along
/// `e^{iπ/8}`. Both legs are reported; causality requires their sum to
/// vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalityReport {
    pub psi: OracleValue,
    pub incoming: Complex64,
    pub outgoing: Complex64,
}

pub fn causality_check(params: &BarrierParams, k: f64, x: f64, t: f64, spec: &ContourSpec) -> Result<CausalityReport> {
    spec.validate()?;
    if !(t.is_finite() && t < 0.0) {
        return Err(GamowError::Domain(format!("causality check needs t < 0, got {t}")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(GamowError::Domain(format!("incident momentum must be positive, got {k}")));
    }
    let tau = t / (2.0 * params.m);
    let pref = 1.0 / (2.0 * PI * params.m);
    let f = |p: Complex64| -> Result<Complex64> {
        Ok(pref * p * (-I * tau * p * p).exp() * psi_bar_direct(params, k, x, p)?)
    };
    // |e^{−iτp²}| = e^{τ r² sin 2θ}; also allow for e^{|X| r} growth of the
    // exterior waves.
    let big_x = edge_offset(params, x) + params.l;
    let s = (2.0 * FRAC_PI_8).sin();
    let a = tau.abs() * s;
    let len = (big_x + (big_x * big_x + 4.0 * a * 40.0).sqrt()) / (2.0 * a) + 5.0;
    let d_in = Complex64::from_polar(1.0, 3.0 * FRAC_PI_8);
    let d_out = Complex64::from_polar(1.0, FRAC_PI_8);
    let leg_in = move |r: f64| (r * d_in, d_in);
    let leg_out = move |r: f64| (r * d_out, d_out);
    let inc = integrate_legs(&f, &[Leg { z: &leg_in, a: len, b: 0.0, breaks: vec![] }], spec)?;
    let out = integrate_legs(&f, &[Leg { z: &leg_out, a: 0.0, b: len, breaks: vec![] }], spec)?;
    Ok(CausalityReport {
        psi: OracleValue {
            value: inc.value + out.value,
            error: inc.error + out.error,
            evaluations: inc.evaluations + out.evaluations,
        },
        incoming: inc.value,
        outgoing: out.value,
    })
}

/// `I_j(X, q)` from its integral definition, for `q` strictly below the
/// path (resonance poles, or ±k taken as having a vanishing negative
/// imaginary part). The tails are rotated into the second and fourth
/// quadrants beyond `|p| = P`, with P past both `|q|` and the stationary
/// point.
pub fn kernel_by_quadrature(kind: KernelKind, big_x: f64, q: Complex64, tau: f64, spec: &ContourSpec) -> Result<OracleValue> {
    spec.validate()?;
    if !(tau > 0.0) {
        return Err(GamowError::Domain(format!("kernel needs τ > 0, got {tau}")));
    }
    if q.im > 0.0 {
        return Err(GamowError::Domain(format!("kernel pole q = {q} must not lie above the path")));
    }
    let power = match kind {
        KernelKind::I0 => 0,
        KernelKind::I1 => 1,
        KernelKind::I2 => 2,
        KernelKind::I => {
            return Err(GamowError::Domain("the q-free kernel I has no pole form; use I1 − q I0".into()))
        }
    };
    let eps = spec.eps;
    let p_max = spec.p_max.unwrap_or_else(|| (2.0 * q.norm() + 5.0).max(8.0).max(1.5 * big_x.abs() / (2.0 * tau)));
    let f = |p: Complex64| -> Result<Complex64> {
        Ok(p.powi(power) / (p - q) * (-I * tau * p * p + I * big_x * p).exp() / (I * PI))
    };
    let dl = Complex64::from_polar(1.0, 3.0 * FRAC_PI_4);
    let dr = Complex64::from_polar(1.0, -FRAC_PI_4);
    let left = move |r: f64| (Complex64::new(-p_max, eps) + r * dl, dl);
    let right = move |r: f64| (Complex64::new(p_max, eps) + r * dr, dr);
    let central = |r: f64| (Complex64::new(r, eps), Complex64::new(1.0, 0.0));
    // e^{−τ r² − … }: along either ray the exponent is ≤ −τr² + |X| r.
    let len = (big_x.abs() + (big_x * big_x + 160.0 * tau).sqrt()) / (2.0 * tau) + 5.0;
    let legs = [
        Leg { z: &left, a: len, b: 0.0, breaks: vec![] },
        Leg { z: &central, a: -p_max, b: p_max, breaks: vec![q.re] },
        Leg { z: &right, a: 0.0, b: len, breaks: vec![] },
    ];
    integrate_legs(f, &legs, spec)
}

/// Number of resonances (zeros of W, equivalently of D) inside `rect`.
///
/// Refuses with [`GamowError::BoundaryTooClose`] when a zero lies within
/// 1e−8 of the boundary, and with [`GamowError::NonIntegerWinding`] when the
/// phase sampling did not close to an integer.
pub fn count_zeros(params: &BarrierParams, rect: &Rect) -> Result<usize> {
    if !(rect.re_lo < rect.re_hi && rect.im_lo < rect.im_hi) {
        return Err(GamowError::Domain("count_zeros needs a non-degenerate box".into()));
    }
    boundary_scan(params, rect)?;
    let w = crate::barrier::winding(&|z| wronskian(params, z), rect, 64)?;
    let n = w.round();
    if (w - n).abs() > 0.05 || n < 0.0 {
        return Err(GamowError::NonIntegerWinding { winding: w });
    }
    Ok(n as usize)
}

fn distance_to_boundary(rect: &Rect, z: Complex64) -> f64 {
    let dx = (z.re - rect.re_lo).abs().min((z.re - rect.re_hi).abs());
    let dy = (z.im - rect.im_lo).abs().min((z.im - rect.im_hi).abs());
    let inside_x = z.re >= rect.re_lo && z.re <= rect.re_hi;
    let inside_y = z.im >= rect.im_lo && z.im <= rect.im_hi;
    match (inside_x, inside_y) {
        (true, true) => dx.min(dy),
        (true, false) => dy,
        (false, true) => dx,
        (false, false) => dx.hypot(dy),
    }
}

/// Walks the boundary; wherever the Newton step |W/W′| is comparable to
/// the sampling step, polishes to the nearby zero and measures its distance
/// to the boundary.
fn boundary_scan(params: &BarrierParams, rect: &Rect) -> Result<()> {
    let corners = rect.corners();
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let n = (((b - a).norm() / 0.02).ceil() as usize).max(32);
        let h = (b - a).norm() / n as f64;
        for j in 0..=n {
            let z0 = a + (b - a) * (j as f64 / n as f64);
            let (w, dw) = wronskian_with_derivative(params, z0);
            if w.norm() == 0.0 {
                return Err(GamowError::BoundaryTooClose { distance: 0.0 });
            }
            if (w / dw).norm() > 2.0 * h {
                continue;
            }
            let mut z = z0;
            for _ in 0..50 {
                let (w, dw) = wronskian_with_derivative(params, z);
                let step = w / dw;
                z -= step;
                if step.norm() < 1e-15 * z.norm().max(1.0) {
                    break;
                }
            }
            if wronskian(params, z).norm() < 1e-8 * wronskian(params, z0).norm().max(1.0) {
                let d = distance_to_boundary(rect, z);
                if d < 1e-8 {
                    return Err(GamowError::BoundaryTooClose { distance: d });
                }
            }
        }
    }
    Ok(())
}
