//! Laplace-domain solution ψ̄(x, p) for the initial plane wave `e^{ikx}`.
//!
//! Three independent evaluations are provided:
//!
//! * [`psi_bar_direct`] solves the 4×4 matching system for the piecewise
//!   amplitudes;
//! * [`psi_bar_green`] writes ψ̄ through the resonant Green function, as a
//!   volume integral (done analytically) plus two surface terms;
//! * [`p_psi_bar_series`] and [`ExpansionPlan`] expand p·ψ̄ in the Gamow poles.
//!
//! The particular solution in the barrier, `iα e^{ikx}/(p′² − k²)`, and the
//! exterior one, `iα e^{ikx}/(p² − k²)`, are shared by all routes.

use crate::barrier::{
    resonant_u_frame, wronskian, BarrierParams, EvenTrig, PoleTable, ResonancePole,
};
use crate::error::{GamowError, Result};
use crate::greenfn::{self, green_closed, pole_check, taylor_coefficients};
use crate::quad::gl20;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which piece of the real line a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// x < 0
    I,
    /// 0 ≤ x ≤ L
    II,
    /// x > L
    III,
}

impl Region {
    pub fn of(params: &BarrierParams, x: f64) -> Region {
        if x < 0.0 {
            Region::I
        } else if x <= params.l {
            Region::II
        } else {
            Region::III
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        }
    }
}

/// How a point is reached by the pole expansions: the expansion is done at the
/// barrier point `y` and carried to `x` by `e^{ip·offset}`.
///
/// Points outside use the nearest edge (`y = 0` with offset `−x`, or `y = L`
/// with offset `x − L`). The edges themselves are treated as exterior points
/// with zero offset, where the interior sums would involve the slowly
/// converging `u_n(0)²` or `u_n(L)²` products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub region: Region,
    pub y: f64,
    pub offset: f64,
}

impl Anchor {
    pub fn new(params: &BarrierParams, x: f64) -> Self {
        if x <= 0.0 {
            Anchor { region: Region::I, y: 0.0, offset: -x }
        } else if x >= params.l {
            Anchor { region: Region::III, y: params.l, offset: x - params.l }
        } else {
            Anchor { region: Region::II, y: x, offset: 0.0 }
        }
    }

    pub fn exterior(&self) -> bool {
        self.region != Region::II
    }
}

fn check_momentum(k: f64, p: Complex64, kappa2: f64) -> Result<()> {
    let scale = k * k + p.norm_sqr();
    if (p * p - k * k).norm() < 1e-6 * scale.max(1.0) {
        return Err(GamowError::NearIncidentMomentum { p });
    }
    if (p * p - kappa2 - k * k).norm() < 1e-12 * scale.max(1.0) {
        return Err(GamowError::Domain(format!(
            "p = {p} puts the in-barrier particular solution at resonance (p′ = ±k)"
        )));
    }
    Ok(())
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(GamowError::Domain(format!("incident momentum must be positive, got {k}")));
    }
    Ok(())
}

/// Amplitudes of the piecewise solution
///
/// ```text
/// x < 0      ψ̄ = B e^{−ipx}        + c  e^{ikx}
/// 0 ≤ x ≤ L  ψ̄ = M cos(p′x) + N sin(p′x)/p′ + c′ e^{ikx}
/// x > L      ψ̄ = A e^{ip(x−L)}     + c  e^{ikx}
/// ```
///
/// with `c = iα/(p² − k²)` and `c′ = iα/(p′² − k²)`. The barrier part uses
/// the even pair cos, sin/p′ so nothing depends on the branch of p′, and `A`
/// is referred to x = L so it never carries an `e^{ipL}` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub p: Complex64,
    pub k: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub m: Complex64,
    pub n: Complex64,
    /// exterior particular coefficient c
    pub c_out: Complex64,
    /// barrier particular coefficient c′
    pub c_in: Complex64,
}

impl AmplitudeSet {
    pub fn eval(&self, params: &BarrierParams, x: f64) -> Complex64 {
        let p = self.p;
        let wave = (I * self.k * x).exp();
        if x < 0.0 {
            self.b * (-I * p * x).exp() + self.c_out * wave
        } else if x <= params.l {
            let t = EvenTrig::new(p * p - params.kappa2(), x);
            self.m * t.c + self.n * t.s + self.c_in * wave
        } else {
            self.a * (I * p * (x - params.l)).exp() + self.c_out * wave
        }
    }

    /// ∂ₓψ̄, with the left-sided (`from_left`) or right-sided value at the
    /// two edges.
    pub fn eval_dx(&self, params: &BarrierParams, x: f64, from_left: bool) -> Complex64 {
        let p = self.p;
        let k = self.k;
        let wave = I * k * (I * k * x).exp();
        let inside = (x > 0.0 || (x == 0.0 && !from_left)) && (x < params.l || (x == params.l && from_left));
        if x < 0.0 || (x == 0.0 && from_left) {
            -I * p * self.b * (-I * p * x).exp() + self.c_out * wave
        } else if inside {
            let s2 = p * p - params.kappa2();
            let t = EvenTrig::new(s2, x);
            -s2 * self.m * t.s + self.n * t.c + self.c_in * wave
        } else {
            I * p * self.a * (I * p * (x - params.l)).exp() + self.c_out * wave
        }
    }
}

fn matching_system(params: &BarrierParams, k: f64, p: Complex64) -> (Matrix4<Complex64>, Vector4<Complex64>, Complex64, Complex64) {
    let alpha = params.alpha();
    let l = params.l;
    let s2 = p * p - params.kappa2();
    let c = I * alpha / (p * p - k * k);
    let c2 = I * alpha / (s2 - k * k);
    let t = EvenTrig::new(s2, l);
    let ekl = (I * k * l).exp();
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // unknowns (B, M, N, A)
    #[rustfmt::skip]
    let mat = Matrix4::new(
        one,     -one,      z,    z,
        -I * p,   z,       -one,  z,
        z,        t.c,      t.s, -one,
        z,       -s2 * t.s, t.c, -I * p,
    );
    let rhs = Vector4::new(c2 - c, I * k * (c2 - c), (c - c2) * ekl, I * k * (c - c2) * ekl);
    (mat, rhs, c, c2)
}

/// Solves the matching conditions at x = 0 and x = L.
pub fn amplitudes(params: &BarrierParams, k: f64, p: Complex64) -> Result<AmplitudeSet> {
    check_k(k)?;
    check_momentum(k, p, params.kappa2())?;
    pole_check(params, p, wronskian(params, p))?;
    let (mat, rhs, c_out, c_in) = matching_system(params, k, p);
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or(GamowError::PoleProximity { p, residual: 0.0 })?;
    Ok(AmplitudeSet { p, k, b: sol[0], m: sol[1], n: sol[2], a: sol[3], c_out, c_in })
}

/// Determinant of the matching system written in the exponential basis
/// `e^{±ip′x}` inside the barrier (and `A` referred to x = L). Its ratio to
/// D(p) does not depend on p.
pub fn matching_determinant(params: &BarrierParams, p: Complex64) -> Complex64 {
    let l = params.l;
    let s = (p * p - params.kappa2()).sqrt();
    let ep = (I * s * l).exp();
    let em = (-I * s * l).exp();
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let mat = Matrix4::new(
        one,    -one,       -one,        z,
        -I * p, -I * s,      I * s,      z,
        z,       ep,         em,        -one,
        z,       I * s * ep, -I * s * em, -I * p,
    );
    mat.determinant()
}

/// ψ̄(x, p) from the matching solve.
pub fn psi_bar_direct(params: &BarrierParams, k: f64, x: f64, p: Complex64) -> Result<Complex64> {
    Ok(amplitudes(params, k, p)?.eval(params, x))
}

/// ∫_a^b e^{iqx} dx
pub(crate) fn int_exp(q: Complex64, a: f64, b: f64) -> Complex64 {
    let h = b - a;
    if h == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (I * q * a).exp() * h * expm1_over(I * q * h)
}

/// (e^z − 1)/z
fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 0.2 {
        // Horner on Σ zⁿ/(n+1)!
        let mut acc = Complex64::new(1.0, 0.0);
        for n in (1..=14).rev() {
            acc = 1.0 + acc * z / (n as f64 + 1.0);
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// (∫ cos(p′x) e^{iqx}, ∫ sin(p′x)/p′ e^{iqx}) over [a, b], given p′².
fn trig_moments(s2: Complex64, q: f64, a: f64, b: f64) -> (Complex64, Complex64) {
    let s = s2.sqrt();
    let ep = int_exp(q + s, a, b);
    let em = int_exp(q - s, a, b);
    let ic = 0.5 * (ep + em);
    let reach = a.abs().max(b.abs());
    let is = if (s * reach).norm() > 1e-3 {
        (ep - em) / (2.0 * I * s)
    } else {
        // p′ ≈ 0: the divided difference cancels; integrate the smooth
        // integrand instead.
        let panels = 1 + (q.abs() * (b - a) / 3.0).ceil() as usize;
        gl20().composite(|x| EvenTrig::new(s2, x).s * Complex64::from_polar(1.0, q * x), a, b, panels)
    };
    (ic, is)
}

/// ∫_a^b u₀(x′) e^{ikx′} dx′ with u₀ = cos − ip sin/p′.
fn int_u_left(params: &BarrierParams, k: f64, p: Complex64, a: f64, b: f64) -> Complex64 {
    let (ic, is) = trig_moments(p * p - params.kappa2(), k, a, b);
    ic - I * p * is
}

/// ∫_a^b u_L(x′) e^{ikx′} dx′ with u_L(x′) = u₀(L − x′).
fn int_u_right(params: &BarrierParams, k: f64, p: Complex64, a: f64, b: f64) -> Complex64 {
    let l = params.l;
    let (ic, is) = trig_moments(p * p - params.kappa2(), -k, l - b, l - a);
    (I * k * l).exp() * (ic - I * p * is)
}

/// ∫₀ᴸ G(x′, y, p) e^{ikx′} dx′ in closed form.
pub fn green_volume_integral(params: &BarrierParams, k: f64, y: f64, p: Complex64) -> Result<Complex64> {
    if !(0.0..=params.l).contains(&y) {
        return Err(GamowError::Domain(format!("y = {y} outside [0, L]")));
    }
    let w = wronskian(params, p);
    pole_check(params, p, w)?;
    let left = greenfn::u_right(params, p, y) * int_u_left(params, k, p, 0.0, y);
    let right = greenfn::u_left(params, p, y) * int_u_right(params, k, p, y, params.l);
    Ok((left + right) / w)
}

/// The labelled pieces of the Green-function route.
///
/// Only `surface_0` and `free` survive in the shutter problem (a wave
/// confined to x < 0 initially): there the volume integral and the surface
/// term at x = L are absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTerms {
    /// iα ∫₀ᴸ G(x′, y, p) e^{ikx′} dx′ (propagated outside)
    pub volume: Complex64,
    /// −α e^{ikL} G(L, y, p)/(p + k) (propagated outside)
    pub surface_l: Complex64,
    /// −α G(0, y, p)/(p − k) (propagated outside)
    pub surface_0: Complex64,
    /// exterior only: iα/(p² − k²) (e^{ikx} − e^{ip·offset} e^{iky})
    pub free: Complex64,
}

impl GreenTerms {
    pub fn total(&self) -> Complex64 {
        self.volume + self.surface_l + self.surface_0 + self.free
    }
}

/// The Green-route decomposition of ψ̄(x, p).
pub fn psi_bar_green_terms(params: &BarrierParams, k: f64, x: f64, p: Complex64) -> Result<GreenTerms> {
    check_k(k)?;
    check_momentum(k, p, params.kappa2())?;
    let alpha = params.alpha();
    let l = params.l;
    let region = Region::of(params, x);
    let (y, phase) = match region {
        Region::II => (x, Complex64::new(1.0, 0.0)),
        Region::I => (0.0, (-I * p * x).exp()),
        Region::III => (l, (I * p * (x - l)).exp()),
    };
    let volume = I * alpha * green_volume_integral(params, k, y, p)? * phase;
    let surface_l =
        -alpha * (I * k * l).exp() * green_closed(params, l, y, p)? / (p + k) * phase;
    let surface_0 = -alpha * green_closed(params, 0.0, y, p)? / (p - k) * phase;
    let free = if region == Region::II {
        Complex64::new(0.0, 0.0)
    } else {
        I * alpha / (p * p - k * k) * ((I * k * x).exp() - phase * (I * k * y).exp())
    };
    Ok(GreenTerms { volume, surface_l, surface_0, free })
}

/// ψ̄(x, p) through the Green function.
pub fn psi_bar_green(params: &BarrierParams, k: f64, x: f64, p: Complex64) -> Result<Complex64> {
    Ok(psi_bar_green_terms(params, k, x, p)?.total())
}

/// ∫₀ᴸ u_n(x) e^{ikx} dx: u_n is a sum of two exponentials.
pub fn overlap_weight(params: &BarrierParams, k: f64, pole: &ResonancePole) -> Complex64 {
    let f = pole.frame(params);
    let l = params.l;
    f.minus * int_exp(f.pp + k, 0.0, l) - f.plus * int_exp(k - f.pp, 0.0, l)
}

/// The same weight by composite Gauss–Legendre quadrature.
pub fn overlap_weight_by_quadrature(params: &BarrierParams, k: f64, pole: &ResonancePole, panels: usize) -> Complex64 {
    let f = pole.frame(params);
    crate::quad::GaussLegendre::new(16).composite(
        |x| resonant_u_frame(params, &f, x) * Complex64::from_polar(1.0, k * x),
        0.0,
        params.l,
        panels,
    )
}

/// A Gamow pole with the quantities every expansion needs.
#[derive(Debug, Clone, Copy)]
pub struct ResonantTerm {
    pub pole: ResonancePole,
    /// u_n(0)
    pub u0: Complex64,
    /// u_n(L)
    pub ul: Complex64,
    /// ∫₀ᴸ u_n e^{ikx} dx
    pub weight: Complex64,
}

/// Pole data for a fixed barrier and incident momentum, in pairing order.
#[derive(Debug, Clone)]
pub struct ResonanceSet {
    pub params: BarrierParams,
    pub k: f64,
    pub terms: Vec<ResonantTerm>,
}

impl ResonanceSet {
    pub fn new(params: &BarrierParams, k: f64, poles: &[ResonancePole]) -> Result<Self> {
        check_k(k)?;
        let terms = poles
            .iter()
            .map(|pole| {
                let f = pole.frame(params);
                ResonantTerm {
                    pole: *pole,
                    u0: resonant_u_frame(params, &f, 0.0),
                    ul: resonant_u_frame(params, &f, params.l),
                    weight: overlap_weight(params, k, pole),
                }
            })
            .collect();
        Ok(ResonanceSet { params: *params, k, terms })
    }

    pub fn from_table(table: &PoleTable, k: f64) -> Result<Self> {
        Self::new(&table.params, k, &table.poles)
    }

    pub fn pairs(&self) -> usize {
        self.terms.len() / 2
    }

    pub fn truncated(&self, pairs: usize) -> Result<&[ResonantTerm]> {
        if 2 * pairs > self.terms.len() {
            return Err(GamowError::InsufficientPoles { needed: pairs, available: self.pairs() });
        }
        Ok(&self.terms[..2 * pairs])
    }

    /// u_n at an arbitrary point of [0, L].
    pub fn u(&self, term: &ResonantTerm, y: f64) -> Complex64 {
        if y == 0.0 {
            term.u0
        } else if y == self.params.l {
            term.ul
        } else {
            resonant_u_frame(&self.params, &term.pole.frame(&self.params), y)
        }
    }

    /// The large-|p| constant missed by pole sums that end on a barrier edge,
    /// 1/(2mV). See [`p_psi_bar_series`].
    pub fn edge_constant(&self) -> f64 {
        1.0 / self.params.kappa2()
    }
}

/// Truncated pole expansion of p·ψ̄(x, p) in the form obtained by expanding
/// each Green function of the Green route separately.
///
/// Inside the barrier this is a plain rearrangement. Outside, the sums that
/// end on the barrier edge (`Σ u_n(L) W_n/N_n/(p − p_n)` and its mirror,
/// and the `G(0, L, p)` series) converge to their Green functions minus a
/// constant `1/(2mV)`; those constants are added back here. Without them the
/// exterior series would converge to the wrong function.
pub fn p_psi_bar_series(set: &ResonanceSet, x: f64, p: Complex64, pairs: usize) -> Result<Complex64> {
    let prm = &set.params;
    let k = set.k;
    check_momentum(k, p, prm.kappa2())?;
    let alpha = prm.alpha();
    let l = prm.l;
    let ekl = (I * k * l).exp();
    let cinf = set.edge_constant();
    let terms = set.truncated(pairs)?;
    let anchor = Anchor::new(prm, x);
    let g = |a: f64, b: f64, q: f64| green_closed(prm, a, b, q.into());
    let zero = Complex64::new(0.0, 0.0);
    match anchor.region {
        Region::II => {
            let mut sum = zero;
            for t in terms {
                let pn = t.pole.p;
                let ux = set.u(t, x) / t.pole.norm;
                sum += I * alpha * p / (p - pn) * ux * t.weight
                    - alpha * ekl * pn / ((p - pn) * (k + pn)) * t.ul * ux
                    + alpha * pn / ((p - pn) * (k - pn)) * t.u0 * ux;
            }
            Ok(sum + alpha * k / (p + k) * g(l, x, -k)? * ekl - alpha * k / (p - k) * g(0.0, x, k)?)
        }
        Region::III => {
            let e = (I * p * (x - l)).exp();
            let mut sum = zero;
            for t in terms {
                let pn = t.pole.p;
                let n = t.pole.norm;
                sum += I * alpha * p / (p - pn) * t.ul / n * t.weight
                    - alpha * ekl * p * p / ((p - pn) * pn * (k + pn)) * t.ul * t.ul / n
                    + alpha * pn / ((p - pn) * (k - pn)) * t.u0 * t.ul / n;
            }
            let fixed = -alpha * p / k * g(l, l, 0.0)? * ekl
                + p * p / (p + k) * alpha / k * g(l, l, -k)? * ekl
                + alpha * k / (k - p) * g(0.0, l, k)?;
            let edge = -I * alpha * cinf * ekl * p - alpha * cinf;
            let free = I * alpha / 2.0 * (1.0 / (p + k) + 1.0 / (p - k)) * ((I * k * x).exp() - e * ekl);
            Ok((sum + fixed + edge) * e + free)
        }
        Region::I => {
            let e = (-I * p * x).exp();
            let mut sum = zero;
            for t in terms {
                let pn = t.pole.p;
                let n = t.pole.norm;
                sum += I * alpha * p / (p - pn) * t.u0 / n * t.weight
                    - alpha * ekl * pn / ((k + pn) * (p - pn)) * t.ul * t.u0 / n
                    + alpha * p * p / ((p - pn) * pn * (k - pn)) * t.u0 * t.u0 / n;
            }
            let fixed = alpha * k / (p + k) * g(l, 0.0, -k)? * ekl + alpha * p / k * g(0.0, 0.0, 0.0)?
                - alpha * p * p / (k * (p - k)) * g(0.0, 0.0, k)?;
            let edge = -I * alpha * cinf * p - alpha * cinf * ekl;
            let shift = -I * alpha * p / (p * p - k * k);
            Ok((sum + fixed + edge + shift) * e + I * alpha * p / (p * p - k * k) * (I * k * x).exp())
        }
    }
}

/// Default number of subtractions at p = 0.
pub const DEFAULT_ORDER: usize = 3;

/// Pole expansion of `h(p) = p·B(p)` with `order` subtractions at the
/// origin, where `B` is ψ̄ at the anchor point minus (outside the barrier)
/// the exterior particular term:
///
/// ```text
/// h(p) = Σ_{j<M} h_j p^j + p^M Σ_q Res_q / (q^M (p − q))
/// ```
///
/// The sum runs over the Gamow poles and ±k. Since `h` grows at most
/// linearly, any `M ≥ 2` gives a convergent series, and every extra order
/// adds a power of `1/p_n` to the terms. The coefficients `h_j` come from a
/// Cauchy integral on a circle inside the first singularity.
#[derive(Debug, Clone)]
pub struct ExpansionPlan {
    pub anchor: Anchor,
    pub order: usize,
    pub k: f64,
    pub alpha: f64,
    pub x: f64,
    /// h_0 … h_{M−1}
    pub taylor: Vec<Complex64>,
    /// (p_n, Res h) in pairing order
    pub poles: Vec<(Complex64, Complex64)>,
    /// (−k, Res h) and (k, Res h)
    pub incident: [(Complex64, Complex64); 2],
}

impl ExpansionPlan {
    pub fn new(set: &ResonanceSet, x: f64, pairs: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(GamowError::Domain("expansion order must be at least 1".into()));
        }
        let prm = &set.params;
        let k = set.k;
        let alpha = prm.alpha();
        let l = prm.l;
        let ekl = (I * k * l).exp();
        let anchor = Anchor::new(prm, x);
        let y = anchor.y;
        let eky = (I * k * y).exp();
        let ext = if anchor.exterior() { 1.0 } else { 0.0 };
        let terms = set.truncated(pairs)?;

        let poles = terms
            .iter()
            .map(|t| {
                let pn = t.pole.p;
                let uy = set.u(t, y) / t.pole.norm;
                let res = pn
                    * (I * alpha * uy * t.weight
                        - alpha * ekl * t.ul * uy / (pn + k)
                        - alpha * t.u0 * uy / (pn - k));
                (pn, res)
            })
            .collect();
        let kk = Complex64::from(k);
        let res_minus = alpha * k * ekl * green_closed(prm, l, y, -kk)? - ext * I * alpha / 2.0 * eky;
        let res_plus = -alpha * k * green_closed(prm, 0.0, y, kk)? - ext * I * alpha / 2.0 * eky;

        // nearest singularities of h: ±k and p_1
        let first = set.terms.first().map_or(f64::INFINITY, |t| t.pole.p.norm());
        let radius = 0.5 * k.min(first);
        let h = |p: Complex64| -> Complex64 {
            let b = anchor_value(prm, k, y, p).unwrap_or(Complex64::new(f64::NAN, 0.0));
            p * (b - ext * I * alpha * eky / (p * p - k * k))
        };
        let taylor = taylor_coefficients(h, order, radius, 64);
        if taylor.iter().any(|c| !c.is_finite()) {
            return Err(GamowError::Domain(format!(
                "Taylor circle of radius {radius} hit a singular point"
            )));
        }
        Ok(ExpansionPlan {
            anchor,
            order,
            k,
            alpha,
            x,
            taylor,
            poles,
            incident: [(-kk, res_minus), (kk, res_plus)],
        })
    }

    /// All (q, Res) pairs: the Gamow poles followed by −k and k.
    pub fn singularities(&self) -> impl Iterator<Item = &(Complex64, Complex64)> {
        self.poles.iter().chain(self.incident.iter())
    }

    /// h(p) from the expansion.
    pub fn h(&self, p: Complex64) -> Complex64 {
        let poly = self.taylor.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * p + c);
        let m = self.order as i32;
        let tail: Complex64 = self.singularities().map(|(q, r)| r / (q.powi(m) * (p - q))).sum();
        poly + p.powi(m) * tail
    }

    /// p·ψ̄(x, p) from the expansion.
    pub fn p_psi_bar(&self, p: Complex64) -> Complex64 {
        let phase = (I * p * self.anchor.offset).exp();
        let mut v = self.h(p) * phase;
        if self.anchor.exterior() {
            v += p * I * self.alpha * (I * self.k * self.x).exp() / (p * p - self.k * self.k);
        }
        v
    }
}

/// ψ̄ at a barrier point by the Green route, without the checks for ±k (the
/// Taylor circle never comes near them).
fn anchor_value(params: &BarrierParams, k: f64, y: f64, p: Complex64) -> Result<Complex64> {
    let alpha = params.alpha();
    let l = params.l;
    Ok(I * alpha * green_volume_integral(params, k, y, p)?
        - alpha * (I * k * l).exp() * green_closed(params, l, y, p)? / (p + k)
        - alpha * green_closed(params, 0.0, y, p)? / (p - k))
}

/// Convenience: the subtracted expansion evaluated at one momentum.
pub fn p_psi_bar_subtracted(set: &ResonanceSet, x: f64, p: Complex64, pairs: usize, order: usize) -> Result<Complex64> {
    check_momentum(set.k, p, set.params.kappa2())?;
    Ok(ExpansionPlan::new(set, x, pairs, order)?.p_psi_bar(p))
}
