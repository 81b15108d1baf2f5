//! Gauss–Legendre quadrature for complex-valued integrands on real intervals.
//!
//! Paths in the complex plane are handled by the caller: parametrise the path
//! by a real variable and fold the Jacobian into the integrand.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Tricomi initial guesses. Converges to
    /// full double precision for any n used here (n ≤ a few hundred).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        panels: usize,
    ) -> Complex64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|j| self.integrate(&mut f, a + j as f64 * h, a + (j + 1) as f64 * h))
            .sum()
    }
}

/// Shared 20-point rule used by the adaptive driver.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum of |coarse − refined| over accepted panels.
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive bisection with the 20-point rule: a panel is accepted when its
/// value agrees with the sum over its two halves to within
/// `abs_tol · width / (b − a)`. Panels that hit `max_depth` are accepted
/// anyway and their discrepancy still enters the error estimate.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Quadrature {
    let rule = gl20();
    let total = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut evaluations = 0;
    let mut stack = vec![(a, b, rule.integrate(&mut f, a, b), 0u32)];
    evaluations += rule.nodes.len();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    // Depth-first with a LIFO stack; accumulation order is deterministic.
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        evaluations += 2 * rule.nodes.len();
        let refined = left + right;
        let diff = (refined - coarse).norm();
        if diff <= abs_tol * (hi - lo).abs() / total || depth >= max_depth {
            value += refined;
            error += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Quadrature { value, error, evaluations }
}
