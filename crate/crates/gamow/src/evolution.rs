//! Time-domain solution ψ(x, t) from the pole expansions.
//!
//! Every momentum integral reduces to one kernel family. With the offset
//! `X` (0 inside the barrier, x − L on the right, −x on the left),
//!
//! ```text
//! E   = e^{iX²/4τ},  b = e^{iπ/4}/√(πτ),  ξ = X/2τ
//! y_q = e^{−iπ/4} (X − 2τq)/√(4τ)
//! I0(q) = −E · e^{y²}erfc(y) = −2 M(X, q, t)
//! I1(q) = q I0 − E b
//! I2(q) = q² I0 − E b (q + ξ)
//! ```
//!
//! and the q-free moments `m_j = −bE P_j(ξ)` with `P_0 = 1`,
//! `P_{j+1} = ξ P_j − (i/2τ) P_j′`. The time integral of a simple pole
//! subtracted `M` times is the kernel `K_M(q) = q^M I0 + Σ_{j<M} q^{M−1−j} m_j`.

use crate::barrier::{BarrierParams, ResonancePole};
use crate::cxmath::{faddeeva_tail, faddeeva_w, scaled_erfc, FRAC_1_SQRT_PI, TAIL_MIN_ABS};
use crate::error::{GamowError, Result};
use crate::greenfn::green_closed;
use crate::laplace::{int_exp, Anchor, ExpansionPlan, Region, ResonanceSet, ResonantTerm, DEFAULT_ORDER};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A time together with the reduced time τ = t/2m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePoint {
    pub t: f64,
    pub tau: f64,
}

impl TimePoint {
    pub fn new(params: &BarrierParams, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(GamowError::Domain(format!("time must be positive, got {t}")));
        }
        Ok(TimePoint { t, tau: t / (2.0 * params.m) })
    }
}

/// The four kernel types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// the q-free integral, `−b ξ E`
    I,
    I0,
    I1,
    I2,
}

/// A kernel evaluation at position `x` (offset x − L) and momentum `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRequest {
    pub kind: KernelKind,
    pub x: f64,
    /// ignored for [`KernelKind::I`]
    pub q: Complex64,
    pub tau: f64,
}

/// Kernels for one offset and one τ.
#[derive(Debug, Clone, Copy)]
pub struct Kernels {
    pub offset: f64,
    pub tau: f64,
    e: Complex64,
    b: Complex64,
    xi: f64,
}

impl Kernels {
    pub fn new(offset: f64, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(GamowError::Domain(format!("τ must be positive, got {tau}")));
        }
        Ok(Kernels {
            offset,
            tau,
            e: Complex64::from_polar(1.0, offset * offset / (4.0 * tau)),
            b: Complex64::from_polar(FRAC_1_SQRT_PI / tau.sqrt(), FRAC_PI_4),
            xi: offset / (2.0 * tau),
        })
    }

    /// y_q
    pub fn y(&self, q: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, -FRAC_PI_4) * (self.offset - 2.0 * self.tau * q) / (4.0 * self.tau).sqrt()
    }

    /// I0(q). In the left half of the y plane `e^{y²}erfc(y)` is
    /// `2e^{y²} − w(−iy)`; the `E·e^{y²}` product is formed as one exponential
    /// `e^{iXq − iτq²}` so it cannot overflow on its own.
    pub fn i0(&self, q: Complex64) -> Result<Complex64> {
        let y = self.y(q);
        if y.re >= 0.0 {
            Ok(-self.e * faddeeva_w(I * y)?)
        } else {
            let arg = I * self.offset * q - I * self.tau * q * q;
            if arg.re > 700.0 {
                return Err(GamowError::Overflow(format!("kernel I0 at q = {q}, τ = {}", self.tau)));
            }
            Ok(-2.0 * arg.exp() + self.e * faddeeva_w(-I * y)?)
        }
    }

    /// `K_M(q)` without cancellation, once |y_q| is large enough to split
    /// off the asymptotic series of I0 in `s = q − ξ`; `None` below that.
    ///
    /// With `I0 = bE Σ_{m<S} (2m−1)!! aᵐ / s^{2m+1} + R_S`, `a = −i/2τ`,
    /// the non-negative powers of `s` in `q^M I0` cancel the moment
    /// polynomial exactly, leaving `q^M R_S` plus the negative powers.
    fn subtracted_far(&self, order: usize, q: Complex64) -> Result<Option<Complex64>> {
        let y = self.y(q);
        if y.norm() < TAIL_MIN_ABS {
            return Ok(None);
        }
        let skip = order / 2 + 1;
        let rest = if y.re >= 0.0 {
            -self.e * faddeeva_tail(I * y, skip)?
        } else {
            let arg = I * self.offset * q - I * self.tau * q * q;
            if arg.re > 700.0 {
                return Err(GamowError::Overflow(format!("kernel I0 at q = {q}, τ = {}", self.tau)));
            }
            -2.0 * arg.exp() + self.e * faddeeva_tail(-I * y, skip)?
        };
        let s = q - self.xi;
        let a = -I / (2.0 * self.tau);
        let mut poly = Complex64::new(0.0, 0.0);
        let mut coef = Complex64::new(1.0, 0.0); // (2m−1)!! aᵐ
        for m in 0..skip {
            if m > 0 {
                coef *= (2 * m - 1) as f64 * a;
            }
            let mut binom = 1.0;
            for i in 0..=order.min(2 * m) {
                if i > 0 {
                    binom *= (order + 1 - i) as f64 / i as f64;
                }
                poly += coef * binom * self.xi.powi((order - i) as i32) * s.powi(i as i32 - 2 * m as i32 - 1);
            }
        }
        Ok(Some(q.powi(order as i32) * rest + self.e * self.b * poly))
    }

    pub fn i1(&self, q: Complex64) -> Result<Complex64> {
        match self.subtracted_far(1, q)? {
            Some(v) => Ok(v),
            None => Ok(q * self.i0(q)? - self.e * self.b),
        }
    }

    pub fn i2(&self, q: Complex64) -> Result<Complex64> {
        match self.subtracted_far(2, q)? {
            Some(v) => Ok(v),
            None => Ok(q * q * self.i0(q)? - self.e * self.b * (q + self.xi)),
        }
    }

    /// The q-free kernel, `−b ξ E` (= m₁).
    pub fn i(&self) -> Complex64 {
        -self.b * self.xi * self.e
    }

    /// `−bE` (= m₀).
    pub fn j(&self) -> Complex64 {
        -self.b * self.e
    }

    /// m_0 … m_{n−1}
    pub fn moments(&self, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n);
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        let c = -I / (2.0 * self.tau);
        for _ in 0..n {
            let val = poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * self.xi + a);
            out.push(-self.b * self.e * val);
            // P ← ξP − (i/2τ)P′
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (d, a) in poly.iter().enumerate() {
                next[d + 1] += a;
                if d > 0 {
                    next[d - 1] += c * d as f64 * a;
                }
            }
            poly = next;
        }
        out
    }

    /// K_M(q), given at least M moments.
    pub fn subtracted(&self, order: usize, q: Complex64, moments: &[Complex64]) -> Result<Complex64> {
        if let Some(v) = self.subtracted_far(order, q)? {
            return Ok(v);
        }
        let mut acc = q.powi(order as i32) * self.i0(q)?;
        for (j, mj) in moments.iter().take(order).enumerate() {
            acc += q.powi((order - 1 - j) as i32) * mj;
        }
        Ok(acc)
    }
}

/// One kernel by request; `x` is the position, the offset is x − L.
pub fn kernel(req: &KernelRequest, params: &BarrierParams) -> Result<Complex64> {
    let kr = Kernels::new(req.x - params.l, req.tau)?;
    match req.kind {
        KernelKind::I => Ok(kr.i()),
        KernelKind::I0 => kr.i0(req.q),
        KernelKind::I1 => kr.i1(req.q),
        KernelKind::I2 => kr.i2(req.q),
    }
}

/// How the pole sums are organised in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExpansionForm {
    /// The term-by-term form: each Green function of the Green route
    /// expanded on its own (with the edge constants outside the barrier).
    /// Pair terms decay like 1/n², so the error falls like 1/N with a
    /// constant that grows as τ → 0.
    Printed,
    /// One expansion of p·ψ̄ with `order` subtractions at p = 0; pair terms
    /// decay like n^{−(order+2)}.
    Subtracted { order: usize },
}

impl Default for ExpansionForm {
    fn default() -> Self {
        ExpansionForm::Subtracted { order: DEFAULT_ORDER }
    }
}

/// Truncation policy for the pole sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesControl {
    /// maximum number of (n, −n) pairs
    pub pairs: usize,
    /// stop once three consecutive pair terms are below this fraction of
    /// the running sum; 0 sums all `pairs`
    pub tail_tolerance: f64,
    /// below this τ the exact t → 0 value is returned instead of a sum;
    /// `None` means 1e−5·2mL²
    pub tau_min: Option<f64>,
    pub form: ExpansionForm,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { pairs: 800, tail_tolerance: 1e-6, tau_min: None, form: ExpansionForm::default() }
    }
}

impl SeriesControl {
    pub fn with_pairs(pairs: usize) -> Self {
        SeriesControl { pairs, ..Default::default() }
    }

    /// Sum exactly `pairs` pairs, no early stop.
    pub fn fixed(pairs: usize, form: ExpansionForm) -> Self {
        SeriesControl { pairs, tail_tolerance: 0.0, tau_min: None, form }
    }

    pub fn tau_min(&self, params: &BarrierParams) -> f64 {
        self.tau_min.unwrap_or(1e-5 * 2.0 * params.m * params.l * params.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quality {
    Converged,
    /// all pairs used and the last pair is still above tolerance
    TailAboveTolerance,
    /// τ below τ_min: the t → 0 value e^{ikx} was returned
    ShortTimeLimit,
}

/// ψ(x, t) with bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    pub region: Region,
    pub x: f64,
    pub t: f64,
    pub psi: Complex64,
    /// |last pair term| × pairs used: a crude bound on the omitted tail
    pub tail_estimate: f64,
    pub pairs_used: usize,
    pub quality: Quality,
}

/// Pairwise accumulation with the stopping rule of [`SeriesControl`].
struct PairSum {
    sum: Complex64,
    quiet: u32,
    pairs: usize,
    last: f64,
    tol: f64,
}

impl PairSum {
    fn new(base: Complex64, tol: f64) -> Self {
        PairSum { sum: base, quiet: 0, pairs: 0, last: 0.0, tol }
    }

    /// Adds one pair; returns true when the series may stop.
    fn push(&mut self, term: Complex64) -> bool {
        self.sum += term;
        self.pairs += 1;
        self.last = term.norm();
        if self.tol > 0.0 && self.last <= self.tol * self.sum.norm() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= 3
    }

    fn tail(&self) -> f64 {
        self.last * self.pairs as f64
    }
}

/// ψ(x, t) from the resonance expansion.
pub fn psi_t(set: &ResonanceSet, x: f64, time: TimePoint, control: &SeriesControl) -> Result<WaveSample> {
    let prm = &set.params;
    let region = Region::of(prm, x);
    if time.tau < control.tau_min(prm) {
        return Ok(WaveSample {
            region,
            x,
            t: time.t,
            psi: Complex64::from_polar(1.0, set.k * x),
            tail_estimate: 0.0,
            pairs_used: 0,
            quality: Quality::ShortTimeLimit,
        });
    }
    let pairs = control.pairs.min(set.pairs());
    if pairs < control.pairs {
        return Err(GamowError::InsufficientPoles { needed: control.pairs, available: set.pairs() });
    }
    let acc = match control.form {
        ExpansionForm::Subtracted { order } => subtracted_sum(set, x, time, pairs, order, control.tail_tolerance)?,
        ExpansionForm::Printed => printed_sum(set, x, time, pairs, control.tail_tolerance)?,
    };
    let stopped_early = acc.pairs < pairs;
    let quality = if stopped_early || acc.last <= control.tail_tolerance * acc.sum.norm() {
        Quality::Converged
    } else {
        Quality::TailAboveTolerance
    };
    if quality == Quality::TailAboveTolerance && control.tail_tolerance > 0.0 {
        log::warn!(
            "ψ({x}, {}) : last pair {:.2e} above tolerance after {} pairs",
            time.t,
            acc.last,
            acc.pairs
        );
    }
    Ok(WaveSample {
        region,
        x,
        t: time.t,
        psi: acc.sum,
        tail_estimate: acc.tail(),
        pairs_used: acc.pairs,
        quality,
    })
}

/// Free-wave part common to the exterior regions: the inverse transform of
/// `iα e^{ikx} p/(p² − k²)`.
fn exterior_free(set: &ResonanceSet, x: f64, tau: f64) -> Result<Complex64> {
    let k = Complex64::from(set.k);
    let k0 = Kernels::new(0.0, tau)?;
    Ok(-0.5 * (I * set.k * x).exp() * (k0.i0(-k)? + k0.i0(k)?))
}

fn subtracted_sum(set: &ResonanceSet, x: f64, time: TimePoint, pairs: usize, order: usize, tol: f64) -> Result<PairSum> {
    let plan = ExpansionPlan::new(set, x, pairs, order)?;
    evaluate_plan(set, &plan, time, tol)
}

/// Time-domain value of an [`ExpansionPlan`].
fn evaluate_plan(set: &ResonanceSet, plan: &ExpansionPlan, time: TimePoint, tol: f64) -> Result<PairSum> {
    let kr = Kernels::new(plan.anchor.offset, time.tau)?;
    let m = plan.order;
    let mom = kr.moments(m + 1);
    let scale = I / plan.alpha;
    let mut base: Complex64 = plan.taylor.iter().zip(&mom).map(|(h, mj)| h * mj).sum();
    for (q, r) in plan.incident.iter() {
        base += r / q.powi(m as i32) * kr.subtracted(m, *q, &mom)?;
    }
    base *= scale;
    if plan.anchor.exterior() {
        base += exterior_free(set, plan.x, time.tau)?;
    }
    let mut acc = PairSum::new(base, tol);
    for pair in plan.poles.chunks(2) {
        let mut term = Complex64::new(0.0, 0.0);
        for (q, r) in pair {
            term += r / q.powi(m as i32) * kr.subtracted(m, *q, &mom)?;
        }
        if acc.push(scale * term) {
            break;
        }
    }
    Ok(acc)
}

/// The term-by-term series. Outside the barrier it includes the two
/// edge-constant corrections `1/(2mV)` (see [`crate::laplace::p_psi_bar_series`]).
fn printed_sum(set: &ResonanceSet, x: f64, time: TimePoint, pairs: usize, tol: f64) -> Result<PairSum> {
    let prm = &set.params;
    let k = set.k;
    let kc = Complex64::from(k);
    let l = prm.l;
    let ekl = (I * k * l).exp();
    let cinf = set.edge_constant();
    let anchor = Anchor::new(prm, x);
    let kr = Kernels::new(anchor.offset, time.tau)?;
    let terms = set.truncated(pairs)?;
    let g = |a: f64, b: f64, q: f64| green_closed(prm, a, b, q.into());
    match anchor.region {
        Region::II => {
            let base = I * k * g(l, x, -k)? * ekl * kr.i0(-kc)? - I * k * g(0.0, x, k)? * kr.i0(kc)?;
            let mut acc = PairSum::new(base, tol);
            for pair in terms.chunks(2) {
                let mut term = Complex64::new(0.0, 0.0);
                for t in pair {
                    let pn = t.pole.p;
                    let ux = set.u(t, x) / t.pole.norm;
                    let s0 = kr.i0(pn)?;
                    term += -ux * t.weight * kr.i1(pn)? - I * ekl * pn / (k + pn) * t.ul * ux * s0
                        + I * pn / (k - pn) * t.u0 * ux * s0;
                }
                if acc.push(term) {
                    break;
                }
            }
            Ok(acc)
        }
        Region::III => {
            let mut base = -I * g(l, l, 0.0)? * ekl / k * kr.i() + I * g(l, l, -k)? * ekl / k * kr.i2(-kc)?
                - I * k * g(0.0, l, k)? * kr.i0(kc)?;
            base += exterior_free(set, x, time.tau)? + 0.5 * ekl * (kr.i0(-kc)? + kr.i0(kc)?);
            base += cinf * ekl * kr.i() - I * cinf * kr.j();
            let mut acc = PairSum::new(base, tol);
            for pair in terms.chunks(2) {
                let mut term = Complex64::new(0.0, 0.0);
                for t in pair {
                    let pn = t.pole.p;
                    let n = t.pole.norm;
                    term += -t.ul / n * t.weight * kr.i1(pn)?
                        - I * ekl / (pn * (k + pn)) * t.ul * t.ul / n * kr.i2(pn)?
                        + I * pn / (k - pn) * t.u0 * t.ul / n * kr.i0(pn)?;
                }
                if acc.push(term) {
                    break;
                }
            }
            Ok(acc)
        }
        Region::I => {
            let mut base = I * k * g(l, 0.0, -k)? * ekl * kr.i0(-kc)? + I / k * g(0.0, 0.0, 0.0)? * kr.i()
                - I / k * g(0.0, 0.0, k)? * kr.i2(kc)?;
            base += exterior_free(set, x, time.tau)? + 0.5 * (kr.i0(kc)? + kr.i0(-kc)?);
            base += cinf * kr.i() - I * cinf * ekl * kr.j();
            let mut acc = PairSum::new(base, tol);
            for pair in terms.chunks(2) {
                let mut term = Complex64::new(0.0, 0.0);
                for t in pair {
                    let pn = t.pole.p;
                    let n = t.pole.norm;
                    term += -t.u0 / n * t.weight * kr.i1(pn)?
                        - I * ekl * pn / (k + pn) * t.ul * t.u0 / n * kr.i0(pn)?
                        + I / (pn * (k - pn)) * t.u0 * t.u0 / n * kr.i2(pn)?;
                }
                if acc.push(term) {
                    break;
                }
            }
            Ok(acc)
        }
    }
}

/// The time-dependent factors multiplying each term of the series, for the
/// barrier (offset 0) and the right-hand region.
#[derive(Debug, Clone, PartialEq)]
pub enum BracketFactors {
    Inside {
        a_n: Vec<Complex64>,
        b: Complex64,
        b_n: Vec<Complex64>,
        s: Complex64,
        s_n: Vec<Complex64>,
    },
    Right {
        a_n: Vec<Complex64>,
        b_0: Complex64,
        b_minus_k: Complex64,
        b_n: Vec<Complex64>,
        s: Complex64,
        s_n: Vec<Complex64>,
        c: [Complex64; 4],
    },
}

impl BracketFactors {
    /// Flat (label, value) listing in a fixed order, pole factors indexed by
    /// their pole label n.
    pub fn entries(&self, poles: &[ResonantTerm]) -> Vec<(String, Complex64)> {
        let mut out = Vec::new();
        let label = |name: &str, i: usize| format!("{name}[{}]", poles[i].pole.n);
        match self {
            BracketFactors::Inside { a_n, b, b_n, s, s_n } => {
                out.push(("B_II".to_string(), *b));
                out.push(("S_II".to_string(), *s));
                for i in 0..a_n.len() {
                    out.push((label("A_II", i), a_n[i]));
                    out.push((label("B_II", i), b_n[i]));
                    out.push((label("S_II", i), s_n[i]));
                }
            }
            BracketFactors::Right { a_n, b_0, b_minus_k, b_n, s, s_n, c } => {
                out.push(("B_III_0".to_string(), *b_0));
                out.push(("B_III_-k".to_string(), *b_minus_k));
                out.push(("S_III".to_string(), *s));
                for (j, cj) in c.iter().enumerate() {
                    out.push((format!("C_III_{}", j + 1), *cj));
                }
                for i in 0..a_n.len() {
                    out.push((label("A_III", i), a_n[i]));
                    out.push((label("B_III", i), b_n[i]));
                    out.push((label("S_III", i), s_n[i]));
                }
            }
        }
        out
    }
}

fn bracket_region(params: &BarrierParams, x: f64) -> Result<Region> {
    match Region::of(params, x) {
        Region::I => Err(GamowError::Domain(
            "bracket factors are tabulated for the barrier and the right-hand region only".into(),
        )),
        r => Ok(r),
    }
}

/// Bracket factors through the kernels: `A^{II}_n = I1(L, p_n)`,
/// `B^{II} = I0(L, −k)`, `B^{II}_n = S^{II}_n = I0(L, p_n)`,
/// `S^{II} = I0(L, k)`; on the right `A^{III}_n = I1(x, p_n)`,
/// `B^{III}_0 = I(x)`, `B^{III}_{−k} = I2(x, −k)`, `B^{III}_n = I2(x, p_n)`,
/// `S^{III} = I0(x, k)`, `S^{III}_n = I0(x, p_n)`, and
/// `C_{1..4} = I0(L, −k), I0(L, k), I0(x, −k), I0(x, k)`.
pub fn bracket_factors(set: &ResonanceSet, x: f64, time: TimePoint, pairs: usize) -> Result<BracketFactors> {
    let prm = &set.params;
    let region = bracket_region(prm, x)?;
    let terms = set.truncated(pairs)?;
    let kc = Complex64::from(set.k);
    let at_l = Kernels::new(0.0, time.tau)?;
    match region {
        Region::II => {
            let mut a_n = Vec::with_capacity(terms.len());
            let mut b_n = Vec::with_capacity(terms.len());
            for t in terms {
                a_n.push(at_l.i1(t.pole.p)?);
                b_n.push(at_l.i0(t.pole.p)?);
            }
            Ok(BracketFactors::Inside { a_n, b: at_l.i0(-kc)?, s_n: b_n.clone(), b_n, s: at_l.i0(kc)? })
        }
        _ => {
            let kr = Kernels::new(x - prm.l, time.tau)?;
            let mut a_n = Vec::new();
            let mut b_n = Vec::new();
            let mut s_n = Vec::new();
            for t in terms {
                a_n.push(kr.i1(t.pole.p)?);
                b_n.push(kr.i2(t.pole.p)?);
                s_n.push(kr.i0(t.pole.p)?);
            }
            Ok(BracketFactors::Right {
                a_n,
                b_0: kr.i(),
                b_minus_k: kr.i2(-kc)?,
                b_n,
                s: kr.i0(kc)?,
                s_n,
                c: [at_l.i0(-kc)?, at_l.i0(kc)?, kr.i0(-kc)?, kr.i0(kc)?],
            })
        }
    }
}

/// Which reading of the explicit erfc forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transcription {
    /// Character for character, including the two entries that disagree
    /// with their kernels: `A^{II}_n` (erfc argument without p_n and phase
    /// `e^{−iπ/4}`) and `B^{III}_{−k}` (`e^{y_k²}` in place of `e^{y_{−k}²}`).
    AsPrinted,
    /// The same forms with those two entries repaired.
    Corrected,
}

/// The explicit erfc forms of the bracket factors. The combination
/// `e^{−iτq²} erfc(i√(iτ)q)` is evaluated as `e^{z²}erfc(z)` at
/// `z = i√(iτ)q`, which is the same number without the overflow.
pub fn printed_bracket_factors(
    set: &ResonanceSet,
    x: f64,
    time: TimePoint,
    pairs: usize,
    variant: Transcription,
) -> Result<BracketFactors> {
    let prm = &set.params;
    let region = bracket_region(prm, x)?;
    let terms = set.truncated(pairs)?;
    let tau = time.tau;
    let k = set.k;
    let kc = Complex64::from(k);
    let sqrt_i_tau = Complex64::from_polar(tau.sqrt(), FRAC_PI_4);
    // e^{−iτq²} erfc(i√(iτ) q)
    let erfc_form = |q: Complex64| -> Result<Complex64> { Ok(scaled_erfc(I * sqrt_i_tau * q)?.value) };
    let root_pi_tau = (std::f64::consts::PI * tau).sqrt();
    let e_m = Complex64::from_polar(1.0, -FRAC_PI_4);
    let e_p = Complex64::from_polar(1.0, FRAC_PI_4);
    let b_ii = -erfc_form(-kc)?;
    let s_ii = -erfc_form(kc)?;
    match region {
        Region::II => {
            let mut a_n = Vec::new();
            let mut b_n = Vec::new();
            for t in terms {
                let pn = t.pole.p;
                a_n.push(match variant {
                    Transcription::AsPrinted => {
                        let e = (-I * tau * pn * pn).exp();
                        -pn * e * crate::cxmath::erfc(I * sqrt_i_tau)? - e_m / root_pi_tau
                    }
                    Transcription::Corrected => -pn * erfc_form(pn)? - e_p / root_pi_tau,
                });
                b_n.push(-erfc_form(pn)?);
            }
            Ok(BracketFactors::Inside { a_n, b: b_ii, s_n: b_n.clone(), b_n, s: s_ii })
        }
        _ => {
            let xl = x - prm.l;
            let phase = Complex64::from_polar(1.0, xl * xl / (4.0 * tau));
            let kr = Kernels::new(xl, tau)?;
            let se = |q: Complex64| -> Result<Complex64> { Ok(scaled_erfc(kr.y(q))?.value) };
            let b = e_p / root_pi_tau;
            let xi = xl / (2.0 * tau);
            let mut a_n = Vec::new();
            let mut b_n = Vec::new();
            let mut s_n = Vec::new();
            for t in terms {
                let pn = t.pole.p;
                a_n.push(-phase * (pn * se(pn)? + b));
                b_n.push(-phase * (pn * pn * se(pn)? + b * (pn + xi)));
                s_n.push(-phase * se(pn)?);
            }
            let yk = kr.y(kc);
            let ymk = kr.y(-kc);
            let b_minus_k = match variant {
                // e^{y_k²} erfc(y_{−k}) = e^{y_k² − y_{−k}²} · e^{y_{−k}²}erfc(y_{−k})
                Transcription::AsPrinted => -phase * (k * k * (yk * yk - ymk * ymk).exp() * se(-kc)? + b * (-k + xi)),
                Transcription::Corrected => -phase * (k * k * se(-kc)? + b * (-k + xi)),
            };
            Ok(BracketFactors::Right {
                a_n,
                b_0: -b * xi * phase,
                b_minus_k,
                b_n,
                s: -phase * se(kc)?,
                s_n,
                c: [b_ii, s_ii, -phase * se(-kc)?, -phase * se(kc)?],
            })
        }
    }
}

/// Largest |kernel − printed| / max(1, |kernel|) entry of two factor sets.
pub fn bracket_deviation(
    kernel_route: &BracketFactors,
    printed: &BracketFactors,
    poles: &[ResonantTerm],
) -> (String, f64) {
    kernel_route
        .entries(poles)
        .into_iter()
        .zip(printed.entries(poles))
        .map(|((name, a), (_, b))| (name, (a - b).norm() / a.norm().max(1.0)))
        .fold((String::new(), 0.0), |acc, e| if e.1 > acc.1 { e } else { acc })
}

/// The stationary in-state the solution approaches as t → ∞:
/// `2ik G(0, x, k) e^{−iτk²}` in the barrier, `T e^{ikx} e^{−iτk²}` on the
/// right with `T = 2ik G(0, L, k) e^{−ikL}`, and
/// `(e^{ikx} + R e^{−ikx}) e^{−iτk²}` on the left with `R = 2ik G(0,0,k) − 1`.
pub fn stationary_limit(params: &BarrierParams, k: f64, x: f64, time: TimePoint) -> Result<Complex64> {
    let kc = Complex64::from(k);
    let l = params.l;
    let phase = Complex64::from_polar(1.0, -time.tau * k * k);
    let v = match Region::of(params, x) {
        Region::II => 2.0 * I * kc * green_closed(params, 0.0, x, kc)?,
        Region::III => {
            let t = 2.0 * I * kc * green_closed(params, 0.0, l, kc)? * (-I * kc * l).exp();
            t * (I * kc * x).exp()
        }
        Region::I => {
            let r = 2.0 * I * kc * green_closed(params, 0.0, 0.0, kc)? - 1.0;
            (I * kc * x).exp() + r * (-I * kc * x).exp()
        }
    };
    Ok(v * phase)
}

/// The two right-hand terms `−½e^{ikx}C_2 + ½e^{ikL}C_4`, which cancel only
/// asymptotically: their sum decays like τ^{−1/2}.
pub fn large_time_pair(params: &BarrierParams, k: f64, x: f64, time: TimePoint) -> Result<Complex64> {
    let kc = Complex64::from(k);
    let c2 = Kernels::new(0.0, time.tau)?.i0(kc)?;
    let c4 = Kernels::new(x - params.l, time.tau)?.i0(kc)?;
    Ok(-0.5 * (I * kc * x).exp() * c2 + 0.5 * (I * kc * params.l).exp() * c4)
}

/// Completeness-type sums over the resonant functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumRule {
    /// |Σ u_n(L) u_n(x)/N_n|, expected 0
    B,
    /// |Σ u_n(0) u_n(x)/N_n|, expected 0
    S,
    /// |Σ u_n(x) ⟨u_n, f⟩/N_n − f(x)| for f = sin(πx/L)
    Delta,
    /// |Σ p_n u_n(x) ⟨u_n, f⟩/N_n − f(x)|, the form that does hold
    DeltaMoment,
}

/// ∫₀ᴸ u_n(x) sin(πx/L) dx
fn sine_overlap(params: &BarrierParams, pole: &ResonancePole) -> Complex64 {
    let f = pole.frame(params);
    let l = params.l;
    let q = std::f64::consts::PI / l;
    let sin_exp = |a: Complex64| (int_exp(a + q, 0.0, l) - int_exp(a - q, 0.0, l)) / (2.0 * I);
    f.minus * sin_exp(f.pp) - f.plus * sin_exp(-f.pp)
}

/// Pair-by-pair partial sums of a sum rule at x ∈ (0, L), with the value
/// the rule predicts.
fn sum_rule_partials(set: &ResonanceSet, which: SumRule, x: f64, pairs: usize) -> Result<(Vec<Complex64>, f64)> {
    let prm = &set.params;
    if !(x > 0.0 && x < prm.l) {
        return Err(GamowError::Domain(format!("sum rules are evaluated inside (0, L), got x = {x}")));
    }
    let terms = set.truncated(pairs)?;
    let target = match which {
        SumRule::B | SumRule::S => 0.0,
        SumRule::Delta | SumRule::DeltaMoment => (std::f64::consts::PI * x / prm.l).sin(),
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(pairs);
    for pair in terms.chunks(2) {
        for t in pair {
            let ux = set.u(t, x) / t.pole.norm;
            sum += match which {
                SumRule::B => t.ul * ux,
                SumRule::S => t.u0 * ux,
                SumRule::Delta => ux * sine_overlap(prm, &t.pole),
                SumRule::DeltaMoment => t.pole.p * ux * sine_overlap(prm, &t.pole),
            };
        }
        out.push(sum);
    }
    Ok((out, target))
}

/// |partial sum − predicted value| after `pairs` pairs.
///
/// The B and S sums have terms of size `|p_n|^{1−2x/L}`: they hold as
/// distributional identities, not as convergent series. At x = L/2 the
/// partial sums keep modulus 1/√(2mV) with a rotating phase. The literal
/// δ sum tends to zero, so its residual tends to |f(x)|. Use
/// [`sum_rule_residual_averaged`] and [`SumRule::DeltaMoment`] for the
/// forms that converge.
pub fn sum_rule_residual(set: &ResonanceSet, which: SumRule, x: f64, pairs: usize) -> Result<f64> {
    let (sums, target) = sum_rule_partials(set, which, x, pairs)?;
    Ok(sums.last().map_or(target, |s| (s - target).norm()))
}

/// The same residual for the arithmetic mean of the first `pairs` partial
/// sums (Cesàro summation).
pub fn sum_rule_residual_averaged(set: &ResonanceSet, which: SumRule, x: f64, pairs: usize) -> Result<f64> {
    let (sums, target) = sum_rule_partials(set, which, x, pairs)?;
    if sums.is_empty() {
        return Ok(target);
    }
    let mean: Complex64 = sums.iter().sum::<Complex64>() / sums.len() as f64;
    Ok((mean - target).norm())
}
