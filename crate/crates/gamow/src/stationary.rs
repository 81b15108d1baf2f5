//! Stationary scattering states at real momentum, δ-normalised in energy.
//!
//! Each state obeys one homogeneous condition:
//!
//! | kind   | condition              | fixed amplitudes        |
//! |--------|------------------------|-------------------------|
//! | in_r   | ∂φ(L) = ikφ(L)         | incident e^{ikx} = 1, nothing enters from the right |
//! | in_l   | ∂φ(0) = −ikφ(0)        | incident e^{−ik(x−L)} = 1, nothing enters from the left |
//! | out_r  | ∂φ(0) = ikφ(0)         | outgoing e^{ik(x−L)} = 1, no e^{−ikx} on the left |
//! | out_l  | ∂φ(L) = −ikφ(L)        | outgoing e^{−ikx} = 1, no e^{ik(x−L)} on the right |
//!
//! `r`/`l` name the direction the impinging wave moves in (right-moving
//! comes from the left). The right-hand plane waves are phase-referenced at
//! x = L; the reported transmission amplitude is the coefficient of
//! `e^{ikx}` itself.

use crate::barrier::{BarrierParams, EvenTrig};
use crate::error::{GamowError, Result};
use crate::greenfn::green_closed;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatteringKind {
    InR,
    InL,
    OutR,
    OutL,
}

/// A scattering state
///
/// ```text
/// x < 0      a₁ e^{ikx} + b₁ e^{−ikx}
/// 0 ≤ x ≤ L  M cos(k′x) + N sin(k′x)/k′
/// x > L      a₃ e^{ik(x−L)} + b₃ e^{−ik(x−L)}
/// ```
///
/// times `(2π)^{−1/2}(m/k)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub kind: ScatteringKind,
    pub k: f64,
    pub a1: Complex64,
    pub b1: Complex64,
    pub m: Complex64,
    pub n: Complex64,
    pub a3: Complex64,
    pub b3: Complex64,
    params: BarrierParams,
}

impl ScatteringSolution {
    /// Solves the matching conditions for the chosen kind.
    pub fn new(params: &BarrierParams, kind: ScatteringKind, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(GamowError::Domain(format!("scattering momentum must be positive, got {k}")));
        }
        let l = params.l;
        let s2 = Complex64::from(k * k - params.kappa2());
        let t = EvenTrig::new(s2, l);
        let ik = I * k;
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        // Rows: ψ(0), ψ′(0), ψ(L), ψ′(L) continuity, columns over
        // (a₁, b₁, M, N, a₃, b₃).
        #[rustfmt::skip]
        let full = [
            [one,  one, -one,       z,    z,    z],
            [ik,  -ik,   z,        -one,  z,    z],
            [z,    z,    t.c,       t.s, -one, -one],
            [z,    z,   -s2 * t.s,  t.c, -ik,   ik],
        ];
        // (fixed column, its value, other fixed column that is zero)
        let (fixed, zero) = match kind {
            ScatteringKind::InR => (0, 5),
            ScatteringKind::InL => (5, 0),
            ScatteringKind::OutR => (4, 1),
            ScatteringKind::OutL => (1, 4),
        };
        let free: Vec<usize> = (0..6).filter(|c| *c != fixed && *c != zero).collect();
        let mut mat = Matrix4::<Complex64>::zeros();
        let mut rhs = Vector4::<Complex64>::zeros();
        for r in 0..4 {
            for (j, c) in free.iter().enumerate() {
                mat[(r, j)] = full[r][*c];
            }
            rhs[r] = -full[r][fixed];
        }
        let sol = mat.lu().solve(&rhs).ok_or_else(|| {
            GamowError::Domain(format!("scattering matching system singular at k = {k}"))
        })?;
        let mut coef = [z; 6];
        coef[fixed] = one;
        for (j, c) in free.iter().enumerate() {
            coef[*c] = sol[j];
        }
        Ok(ScatteringSolution {
            kind,
            k,
            a1: coef[0],
            b1: coef[1],
            m: coef[2],
            n: coef[3],
            a3: coef[4],
            b3: coef[5],
            params: *params,
        })
    }

    /// (2π)^{−1/2}(m/k)^{1/2}
    pub fn normalization(&self) -> f64 {
        (self.params.m / self.k).sqrt() / (2.0 * PI).sqrt()
    }

    /// Reflection amplitude of an in-state (b₁ for in_r, a₃ for in_l).
    pub fn reflection(&self) -> Complex64 {
        match self.kind {
            ScatteringKind::InR | ScatteringKind::OutL => self.b1,
            ScatteringKind::InL | ScatteringKind::OutR => self.a3,
        }
    }

    /// Transmission amplitude: the transmitted wave over the incident one,
    /// both continued as plane waves to a common origin.
    pub fn transmission(&self) -> Complex64 {
        match self.kind {
            ScatteringKind::InR | ScatteringKind::OutL => self.a3 * (-I * self.k * self.params.l).exp(),
            ScatteringKind::InL | ScatteringKind::OutR => self.b1 * (-I * self.k * self.params.l).exp(),
        }
    }

    /// P and Q of the form P e^{ik′x} + Q e^{−ik′x} inside the barrier
    /// (principal k′; undefined at k′ = 0, where `None` is returned).
    pub fn barrier_amplitudes(&self) -> Option<(Complex64, Complex64)> {
        let kp = Complex64::from(self.k * self.k - self.params.kappa2()).sqrt();
        if kp.norm() <= 1e-7 * self.k {
            return None;
        }
        let h = self.n / (I * kp);
        Some((0.5 * (self.m + h), 0.5 * (self.m - h)))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let k = self.k;
        let l = self.params.l;
        let raw = if x < 0.0 {
            self.a1 * (I * k * x).exp() + self.b1 * (-I * k * x).exp()
        } else if x <= l {
            let t = EvenTrig::new(Complex64::from(k * k - self.params.kappa2()), x);
            self.m * t.c + self.n * t.s
        } else {
            self.a3 * (I * k * (x - l)).exp() + self.b3 * (-I * k * (x - l)).exp()
        };
        raw * self.normalization()
    }

    /// ∂ₓφ; at the edges the barrier-side derivative is returned.
    pub fn eval_dx(&self, x: f64) -> Complex64 {
        let k = self.k;
        let l = self.params.l;
        let ik = I * k;
        let raw = if x < 0.0 {
            ik * (self.a1 * (ik * x).exp() - self.b1 * (-ik * x).exp())
        } else if x <= l {
            let s2 = Complex64::from(k * k - self.params.kappa2());
            let t = EvenTrig::new(s2, x);
            -s2 * self.m * t.s + self.n * t.c
        } else {
            ik * (self.a3 * (ik * (x - l)).exp() - self.b3 * (-ik * (x - l)).exp())
        };
        raw * self.normalization()
    }
}

/// φ(x) for the given kind.
pub fn scattering_phi(params: &BarrierParams, kind: ScatteringKind, k: f64, x: f64) -> Result<Complex64> {
    Ok(ScatteringSolution::new(params, kind, k)?.eval(x))
}

/// T(k) = 2ik G(0, L, k) e^{−ikL}
pub fn transmission(params: &BarrierParams, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(GamowError::Domain(format!("transmission needs k > 0, got {k}")));
    }
    let kc = Complex64::from(k);
    Ok(2.0 * I * kc * green_closed(params, 0.0, params.l, kc)? * (-I * kc * params.l).exp())
}

/// R(k) = 2ik G(0, 0, k) − 1
pub fn reflection(params: &BarrierParams, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(GamowError::Domain(format!("reflection needs k > 0, got {k}")));
    }
    let kc = Complex64::from(k);
    Ok(2.0 * I * kc * green_closed(params, 0.0, 0.0, kc)? - 1.0)
}
