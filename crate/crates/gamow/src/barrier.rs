//! Square-barrier configuration, the resonance denominator and the Gamow
//! poles together with their resonant functions and complex norms.

use crate::error::{GamowError, Result};
use crate::quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Physical configuration in units with ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierParams {
    /// particle mass
    pub m: f64,
    /// barrier height
    #[serde(rename = "V")]
    pub v: f64,
    /// barrier width
    #[serde(rename = "L")]
    pub l: f64,
}

impl BarrierParams {
    pub fn new(m: f64, v: f64, l: f64) -> Result<Self> {
        for (name, val) in [("m", m), ("V", v), ("L", l)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(GamowError::Config {
                    field: name.into(),
                    message: format!("must be positive and finite, got {val}"),
                });
            }
        }
        Ok(BarrierParams { m, v, l })
    }

    /// m = 0.5, V = 10, L = 1: α = 1 and τ = t, which keeps hand checks simple.
    pub fn cfg0() -> Self {
        BarrierParams { m: 0.5, v: 10.0, l: 1.0 }
    }

    /// α = 2m
    pub fn alpha(&self) -> f64 {
        2.0 * self.m
    }

    /// κ² = 2mV
    pub fn kappa2(&self) -> f64 {
        2.0 * self.m * self.v
    }

    pub fn kappa(&self) -> f64 {
        self.kappa2().sqrt()
    }
}

/// A momentum together with p′ = √(p² − 2mV) (principal branch), ⊕ = p + p′
/// and ⊖ = p − p′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumFrame {
    pub p: Complex64,
    pub pp: Complex64,
    pub plus: Complex64,
    pub minus: Complex64,
}

impl MomentumFrame {
    pub fn new(params: &BarrierParams, p: Complex64) -> Self {
        let pp = (p * p - params.kappa2()).sqrt();
        // The smaller of p ± p′ is formed from ⊕⊖ = 2mV, not by cancellation.
        let (plus, minus) = if (p + pp).norm() >= (p - pp).norm() {
            let plus = p + pp;
            (plus, params.kappa2() / plus)
        } else {
            let minus = p - pp;
            (params.kappa2() / minus, minus)
        };
        MomentumFrame { p, pp, plus, minus }
    }

    /// Same momentum, other sign of p′.
    pub fn flipped(&self) -> Self {
        MomentumFrame { p: self.p, pp: -self.pp, plus: self.minus, minus: self.plus }
    }
}

/// `cos(s ℓ)` and `sin(s ℓ)/s` as functions of `s²`; both are even in `s`, so
/// the square-root branch never matters and `s = 0` is harmless.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EvenTrig {
    pub c: Complex64,
    pub s: Complex64,
    /// d(sin(sℓ)/s)/d(s²)
    pub ds: Complex64,
}

impl EvenTrig {
    pub fn new(s2: Complex64, len: f64) -> Self {
        let s = s2.sqrt();
        let z = s2 * len * len;
        let c = (s * len).cos();
        if z.norm() < 1e-3 {
            let sn = len * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
            let ds = len.powi(3) * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0);
            EvenTrig { c, s: sn, ds }
        } else {
            let sn = (s * len).sin() / s;
            let ds = (len * c - sn) / (2.0 * s2);
            EvenTrig { c, s: sn, ds }
        }
    }
}

/// `D(p) = ⊖² e^{ip′L} − ⊕² e^{−ip′L}` with the principal p′.
pub fn denominator_d(params: &BarrierParams, p: Complex64) -> Complex64 {
    denominator_in_frame(params, &MomentumFrame::new(params, p))
}

pub fn denominator_in_frame(params: &BarrierParams, f: &MomentumFrame) -> Complex64 {
    let e = (I * f.pp * params.l).exp();
    f.minus * f.minus * e - f.plus * f.plus / e
}

/// Scale used to judge smallness of D: the size of its two terms,
/// |⊖|²|e^{ip′L}| + |⊕|²|e^{−ip′L}|.
pub fn denominator_scale(params: &BarrierParams, f: &MomentumFrame) -> f64 {
    let g = (-f.pp.im * params.l).exp();
    f.minus.norm_sqr() * g + f.plus.norm_sqr() / g
}

/// Branch-free form of the resonance condition,
/// `W(p) = 2ip cos(p′L) + (p² + p′²) sin(p′L)/p′`, an entire function of p
/// with `D(p) = 2i p′ W(p)`. Its zeros are exactly the Gamow poles and, unlike
/// D, it does not vanish at p′ = 0.
pub fn wronskian(params: &BarrierParams, p: Complex64) -> Complex64 {
    let s2 = p * p - params.kappa2();
    let t = EvenTrig::new(s2, params.l);
    2.0 * I * p * t.c + (p * p + s2) * t.s
}

/// W(p) and dW/dp.
pub fn wronskian_with_derivative(params: &BarrierParams, p: Complex64) -> (Complex64, Complex64) {
    let l = params.l;
    let s2 = p * p - params.kappa2();
    let t = EvenTrig::new(s2, l);
    let w = 2.0 * I * p * t.c + (p * p + s2) * t.s;
    let dc = -l * p * t.s; // d cos(sL)/dp
    let ds = 2.0 * p * t.ds;
    let dw = 2.0 * I * t.c + 2.0 * I * p * dc + 4.0 * p * t.s + (p * p + s2) * ds;
    (w, dw)
}

/// A Gamow momentum with its norm and the scaled residual |D(p_n)|/scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole {
    pub n: i32,
    pub p: Complex64,
    pub norm: Complex64,
    pub residual: f64,
}

impl ResonancePole {
    /// Builds the record for momentum `p`, computing norm and residual.
    pub fn at(params: &BarrierParams, n: i32, p: Complex64) -> Self {
        let f = MomentumFrame::new(params, p);
        let residual = denominator_in_frame(params, &f).norm() / denominator_scale(params, &f);
        ResonancePole { n, p, norm: norm_closed(params, p), residual }
    }

    /// p_{−n} = −p_n*
    pub fn mirror(&self, params: &BarrierParams) -> Self {
        ResonancePole::at(params, -self.n, -self.p.conj())
    }

    pub fn frame(&self, params: &BarrierParams) -> MomentumFrame {
        MomentumFrame::new(params, self.p)
    }
}

fn norm_closed(params: &BarrierParams, p: Complex64) -> Complex64 {
    -8.0 * params.m * params.v * (p * params.l + 2.0 * I)
}

/// The located poles, stored pairwise as `[p_1, p_{−1}, p_2, p_{−2}, …]`.
#[derive(Debug, Clone)]
pub struct PoleTable {
    pub params: BarrierParams,
    pub poles: Vec<ResonancePole>,
}

impl PoleTable {
    /// Number of (n, −n) pairs.
    pub fn pairs(&self) -> usize {
        self.poles.len() / 2
    }

    /// Pole with index `n` (n ≠ 0, |n| ≤ pairs()).
    pub fn get(&self, n: i32) -> &ResonancePole {
        assert!(n != 0 && n.unsigned_abs() as usize <= self.pairs());
        let base = 2 * (n.unsigned_abs() as usize - 1);
        &self.poles[if n > 0 { base } else { base + 1 }]
    }

    /// The first `pairs` pairs, in pairing order.
    pub fn truncated(&self, pairs: usize) -> Result<&[ResonancePole]> {
        if pairs > self.pairs() {
            return Err(GamowError::InsufficientPoles { needed: pairs, available: self.pairs() });
        }
        Ok(&self.poles[..2 * pairs])
    }

    pub fn positive(&self) -> impl Iterator<Item = &ResonancePole> {
        self.poles.iter().step_by(2)
    }
}

/// Axis-aligned rectangle in the complex momentum plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Rect { re_lo, re_hi, im_lo, im_hi }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    fn split(&self, frac: f64) -> [Rect; 2] {
        if self.re_hi - self.re_lo >= self.im_hi - self.im_lo {
            let mid = self.re_lo + frac * (self.re_hi - self.re_lo);
            [Rect { re_hi: mid, ..*self }, Rect { re_lo: mid, ..*self }]
        } else {
            let mid = self.im_lo + frac * (self.im_hi - self.im_lo);
            [Rect { im_hi: mid, ..*self }, Rect { im_lo: mid, ..*self }]
        }
    }

    pub(crate) fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }

    fn err(&self, reason: impl Into<String>) -> GamowError {
        GamowError::Convergence {
            re_lo: self.re_lo,
            re_hi: self.re_hi,
            im_lo: self.im_lo,
            im_hi: self.im_hi,
            reason: reason.into(),
        }
    }
}

/// Winding number of `f` around the counter-clockwise boundary of `rect`,
/// following the phase continuously. Each edge is bisected until successive
/// samples differ in phase by less than `max_step` radians.
pub(crate) fn winding<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &Rect,
    min_samples_per_edge: usize,
) -> Result<f64> {
    const MAX_STEP: f64 = 0.4;
    const MAX_DEPTH: u32 = 40;
    let corners = rect.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let mut prev_z = a;
        let mut prev_f = f(a);
        let mut fmax = prev_f.norm();
        let mut fmin = fmax;
        for j in 1..=min_samples_per_edge {
            let z = a + (b - a) * (j as f64 / min_samples_per_edge as f64);
            let fz = f(z);
            // bisect between prev_z and z as needed
            let mut stack = vec![(prev_z, prev_f, z, fz, 0u32)];
            while let Some((za, fa, zb, fb, depth)) = stack.pop() {
                let dphi = (fb / fa).arg();
                if dphi.abs() <= MAX_STEP {
                    total += dphi;
                    fmax = fmax.max(fb.norm());
                    fmin = fmin.min(fb.norm());
                } else if depth >= MAX_DEPTH {
                    return Err(GamowError::BoundaryTooClose { distance: (zb - za).norm() });
                } else {
                    let zm = 0.5 * (za + zb);
                    let fm = f(zm);
                    stack.push((zm, fm, zb, fb, depth + 1));
                    stack.push((za, fa, zm, fm, depth + 1));
                }
            }
            prev_z = z;
            prev_f = fz;
        }
        if !(fmin > 0.0) || !fmin.is_finite() || !fmax.is_finite() {
            return Err(GamowError::BoundaryTooClose { distance: 0.0 });
        }
    }
    Ok(total / (2.0 * PI))
}

fn count_w(params: &BarrierParams, rect: &Rect) -> Result<usize> {
    let w = winding(&|z| wronskian(params, z), rect, 24)?;
    let n = w.round();
    if (w - n).abs() > 0.05 || n < 0.0 {
        return Err(GamowError::NonIntegerWinding { winding: w });
    }
    Ok(n as usize)
}

/// Final polish of a located pole on the logarithmic form of D = 0,
///
/// ```text
/// F = p′L − πm + 2i ln(⊕/κ) = 0,    F′(p′) = L + 2i/p,
/// ```
///
/// which stays well conditioned where the two terms of W cancel to
/// rounding (deep poles, |⊖/⊕|² down at 1e−16). The integer m is read off
/// the starting point; the result is kept only if Newton converges well
/// within the pole spacing π/L.
fn polish(params: &BarrierParams, p0: Complex64) -> Complex64 {
    let l = params.l;
    let kappa = params.kappa();
    let f0 = MomentumFrame::new(params, p0);
    if f0.plus.norm() < f0.minus.norm() || p0.norm() < 2.0 * kappa {
        return p0;
    }
    let m = ((f0.pp * l + 2.0 * I * (f0.plus / kappa).ln()) / PI).re.round();
    let mut pp = f0.pp;
    for _ in 0..20 {
        let p = (pp * pp + params.kappa2()).sqrt();
        let f = pp * l - PI * m + 2.0 * I * ((p + pp) / kappa).ln();
        let step = f / (l + 2.0 * I / p);
        pp -= step;
        if step.norm() <= 1e-14 * pp.norm() {
            let p = (pp * pp + params.kappa2()).sqrt();
            let f = pp * l - PI * m + 2.0 * I * ((p + pp) / kappa).ln();
            let pp = pp - f / (l + 2.0 * I / p);
            let p = (pp * pp + params.kappa2()).sqrt();
            return if (p - p0).norm() <= 0.1 * PI / l { p } else { p0 };
        }
    }
    p0
}

/// Newton's method on W started at `z0`, abandoned if it leaves `fence`.
fn newton(params: &BarrierParams, z0: Complex64, fence: &Rect) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..60 {
        let (w, dw) = wronskian_with_derivative(params, z);
        if dw.norm() == 0.0 {
            return None;
        }
        let step = w / dw;
        z -= step;
        if !fence.contains(z) {
            return None;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            // one more step to polish
            let (w, dw) = wronskian_with_derivative(params, z);
            return Some(z - w / dw);
        }
    }
    None
}

fn isolate(
    params: &BarrierParams,
    rect: Rect,
    expected: usize,
    depth: u32,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    if expected == 0 {
        return Ok(());
    }
    if depth > 40 {
        return Err(rect.err("subdivision depth exhausted"));
    }
    if expected == 1 {
        let grown = Rect::new(
            rect.re_lo - 1e-9,
            rect.re_hi + 1e-9,
            rect.im_lo - 1e-9,
            rect.im_hi + 1e-9,
        );
        if let Some(z) = newton(params, rect.center(), &grown) {
            out.push(z);
            return Ok(());
        }
    }
    // A root lying on the cut makes the counts unreliable; move the cut.
    let mut attempt = 0;
    let (halves, counts) = loop {
        let halves = rect.split([0.5, 0.43, 0.57, 0.37][attempt]);
        match (count_w(params, &halves[0]), count_w(params, &halves[1])) {
            (Ok(a), Ok(b)) => break (halves, [a, b]),
            (Err(e), _) | (_, Err(e)) if attempt == 3 => return Err(e),
            _ => attempt += 1,
        }
    };
    if counts[0] + counts[1] != expected {
        return Err(rect.err(format!(
            "argument principle gives {expected} but halves give {} + {}",
            counts[0], counts[1]
        )));
    }
    for (h, c) in halves.iter().zip(counts) {
        isolate(params, *h, c, depth + 1, out)?;
    }
    Ok(())
}

/// Lower bound for Im p_n over Re p ≤ x. From D = 0 one has
/// Im p′ = −ln(|⊕|²/2mV)/L and |p − p′| ≤ κ, so a box reaching this depth
/// contains every pole with real part below x.
fn depth_bound(params: &BarrierParams, x: f64) -> f64 {
    let k = params.kappa();
    let mut d = 1.0;
    for _ in 0..4 {
        let r = 2.0 * (x + d) + k;
        d = ((r * r / params.kappa2()).ln().max(0.0)) / params.l + k + 1.0;
    }
    d
}

/// Locates the first `count` poles in the fourth quadrant, ordered by real
/// part, and appends their mirrors `p_{−n} = −p_n*`.
///
/// The quadrant is cut into strips of width π/L centred on the large-n
/// positions nπ/L; each strip's zero count comes from the argument principle,
/// and strips holding more than one zero are bisected until every box holds
/// exactly one, which Newton's method then polishes.
pub fn find_resonances(params: &BarrierParams, count: usize) -> Result<PoleTable> {
    if count == 0 {
        return Err(GamowError::Domain("pole count must be at least 1".into()));
    }
    let width = PI / params.l;
    let mut found: Vec<Complex64> = Vec::with_capacity(count + 4);
    let mut lo = 0.0;
    let mut hi = 0.5 * width;
    while found.len() < count {
        let depth = depth_bound(params, hi);
        let mut strip = Rect::new(lo, hi, -depth, 0.0);
        let mut n = count_w(params, &strip);
        // A pole on the right edge: nudge that edge (the left edge was the
        // previous strip's right edge and has already been accepted).
        let mut nudge = 0;
        while let Err(GamowError::BoundaryTooClose { .. } | GamowError::NonIntegerWinding { .. }) = n
        {
            nudge += 1;
            if nudge > 8 {
                return Err(strip.err("could not place strip edge away from a root"));
            }
            strip.re_hi = hi + 0.01 * width * nudge as f64;
            n = count_w(params, &strip);
        }
        let n = n?;
        let mut roots = Vec::with_capacity(n);
        isolate(params, strip, n, 0, &mut roots)?;
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        for r in roots {
            if found.iter().any(|q| (q - r).norm() <= 1e-8 * r.norm()) {
                return Err(strip.err(format!("duplicate root {r}")));
            }
            found.push(r);
        }
        lo = strip.re_hi;
        hi = lo + width;
    }
    found.truncate(count);
    let mut poles = Vec::with_capacity(2 * count);
    for (i, p) in found.into_iter().enumerate() {
        let p = polish(params, p);
        let pos = ResonancePole::at(params, i as i32 + 1, p);
        if !(p.im < 0.0 && p.arg() > -PI / 4.0) {
            return Err(GamowError::Convergence {
                re_lo: p.re,
                re_hi: p.re,
                im_lo: p.im,
                im_hi: p.im,
                reason: "pole outside the sector −π/4 < arg p < 0".into(),
            });
        }
        let neg = pos.mirror(params);
        poles.push(pos);
        poles.push(neg);
    }
    log::debug!("located {count} pole pairs");
    Ok(PoleTable { params: *params, poles })
}

/// Resonant function u_n(x) in the normalisation B = −2p′_n.
pub fn resonant_u(params: &BarrierParams, pole: &ResonancePole, x: f64) -> Complex64 {
    let f = pole.frame(params);
    resonant_u_frame(params, &f, x)
}

pub(crate) fn resonant_u_frame(params: &BarrierParams, f: &MomentumFrame, x: f64) -> Complex64 {
    let l = params.l;
    if x < 0.0 {
        -2.0 * f.pp * (-I * f.p * x).exp()
    } else if x <= l {
        f.minus * (I * f.pp * x).exp() - f.plus * (-I * f.pp * x).exp()
    } else {
        (f.minus * (-I * f.minus * l).exp() - f.plus * (-I * f.plus * l).exp()) * (I * f.p * x).exp()
    }
}

/// N_n = −8mV(p_n L + 2i)
pub fn resonance_norm(params: &BarrierParams, pole: &ResonancePole) -> Complex64 {
    norm_closed(params, pole.p)
}

/// The defining expression i(u_n²(0) + u_n²(L)) + 2p_n ∫₀ᴸ u_n² dx with a
/// composite Gauss–Legendre rule.
pub fn resonance_norm_by_quadrature(
    params: &BarrierParams,
    pole: &ResonancePole,
    panels: usize,
) -> Complex64 {
    let f = pole.frame(params);
    let u0 = resonant_u_frame(params, &f, 0.0);
    let ul = resonant_u_frame(params, &f, params.l);
    let rule = GaussLegendre::new(16);
    let integral = rule.composite(
        |x| {
            let u = resonant_u_frame(params, &f, x);
            u * u
        },
        0.0,
        params.l,
        panels,
    );
    I * (u0 * u0 + ul * ul) + 2.0 * pole.p * integral
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_is_proportional_to_w() {
        let prm = BarrierParams::cfg0();
        for p in [Complex64::new(2.0, -0.3), Complex64::new(-7.0, -2.0), Complex64::new(0.4, 1.1)] {
            let f = MomentumFrame::new(&prm, p);
            let d = denominator_d(&prm, p);
            let w = wronskian(&prm, p);
            assert!((d - 2.0 * I * f.pp * w).norm() < 1e-12 * d.norm());
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let prm = BarrierParams::cfg0();
        for p in [Complex64::new(3.7, -0.9), Complex64::new(3.1623, 1e-4), Complex64::new(11.0, -4.0)] {
            let h = 1e-3;
            let w = |z| wronskian(&prm, z);
            let fd = (w(p - 2.0 * h) - 8.0 * w(p - h) + 8.0 * w(p + h) - w(p + 2.0 * h)) / (12.0 * h);
            let (_, dw) = wronskian_with_derivative(&prm, p);
            assert!((fd - dw).norm() < 1e-8 * dw.norm(), "{p}: {fd} vs {dw}");
        }
    }

    #[test]
    fn first_poles_of_cfg0() {
        let prm = BarrierParams::cfg0();
        let t = find_resonances(&prm, 3).unwrap();
        let want = [
            Complex64::new(3.795_737_143_315_730_3, -0.937_837_763_389_603),
            Complex64::new(6.149_923_476_282_732, -2.458_555_281_942_191_4),
            Complex64::new(9.160_717_044_723_544, -3.412_728_683_251_194_7),
        ];
        for (n, w) in want.iter().enumerate() {
            let p = t.get(n as i32 + 1).p;
            assert!((p - w).norm() < 1e-12 * w.norm(), "p_{} = {p}", n + 1);
            assert!((t.get(-(n as i32) - 1).p + w.conj()).norm() < 1e-13);
        }
    }
}
