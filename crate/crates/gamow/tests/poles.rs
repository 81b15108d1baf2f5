use gamow::barrier::*;
use gamow::greenfn::green_closed;
use gamow::oracle::count_zeros;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn forty_pairs_located_and_counted() {
    let prm = BarrierParams::cfg0();
    let start = Instant::now();
    let table = find_resonances(&prm, 40).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(table.poles.len(), 80);
    for n in 1..=40 {
        let p = table.get(n);
        let m = table.get(-n);
        assert!(p.p.arg() < 0.0 && p.p.arg() > -FRAC_PI_4, "arg p_{n} = {}", p.p.arg());
        let a = m.p.arg().rem_euclid(2.0 * PI);
        assert!(a > PI && a < 5.0 * FRAC_PI_4);
        assert!((m.p + p.p.conj()).norm() <= 1e-12 * p.p.norm());
        assert!(p.residual <= 1e-10 && m.residual <= 1e-10);
        if n > 1 {
            assert!(p.p.re > table.get(n - 1).p.re);
        }
    }
    let deepest = table.poles.iter().map(|p| p.p.im).fold(0.0, f64::min);
    let right = table.get(40).p.re + 1.5;
    let all = count_zeros(&prm, &Rect::new(0.0, right, deepest - 1.0, -1e-3)).unwrap();
    assert_eq!(all, 40);
}

#[test]
fn counting_boxes() {
    let prm = BarrierParams::cfg0();
    let t = find_resonances(&prm, 11).unwrap();
    let p1 = t.get(1).p;
    let p2 = t.get(2).p;
    assert_eq!(count_zeros(&prm, &Rect::new(0.1, p1.re + 1.0, p1.im - 1.0, -0.01)).unwrap(), 1);
    assert_eq!(count_zeros(&prm, &Rect::new(-20.0, 20.0, 0.05, 4.0)).unwrap(), 0);
    // two disjoint one-pole boxes add up
    let a = Rect::new(p1.re - 0.5, p1.re + 0.5, p1.im - 0.5, p1.im + 0.5);
    let b = Rect::new(p2.re - 0.5, p2.re + 0.5, p2.im - 0.5, p2.im + 0.5);
    let both = count_zeros(&prm, &a).unwrap() + count_zeros(&prm, &b).unwrap();
    assert_eq!(both, 2);
    let deepest = t.truncated(10).unwrap().iter().map(|p| p.p.im).fold(0.0, f64::min);
    let edge = 0.5 * (t.get(10).p.re + t.get(11).p.re);
    assert_eq!(count_zeros(&prm, &Rect::new(0.0, edge, deepest - 1.0, -1e-3)).unwrap(), 10);
}

#[test]
fn norm_identity() {
    let prm = BarrierParams::cfg0();
    let t = find_resonances(&prm, 10).unwrap();
    for n in 1..=10 {
        for pole in [t.get(n), t.get(-n)] {
            let closed = c(-8.0 * prm.m * prm.v, 0.0) * (pole.p * prm.l + c(0.0, 2.0));
            assert!((pole.norm - closed).norm() <= 1e-12 * closed.norm());
            let quad = resonance_norm_by_quadrature(&prm, pole, 64);
            assert!((quad - closed).norm() <= 1e-9 * closed.norm(), "n = {}", pole.n);
        }
        // N_{−n} = −conj(N_n)
        assert!((t.get(-n).norm + t.get(n).norm.conj()).norm() <= 1e-12 * t.get(n).norm.norm());
    }
}

#[test]
fn frame_and_denominator_identities() {
    let prm = BarrierParams::cfg0();
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..10_000 {
        let p = c(rng.gen_range(-30.0..30.0), rng.gen_range(-10.0..10.0));
        let f = MomentumFrame::new(&prm, p);
        let prod = f.plus * f.minus;
        assert!((prod - prm.kappa2()).norm() <= 1e-13 * (p.norm_sqr() + prm.kappa2()));
    }
    for _ in 0..20 {
        let p = c(rng.gen_range(-8.0..8.0), rng.gen_range(-3.0..3.0));
        let f = MomentumFrame::new(&prm, p);
        let d = denominator_in_frame(&prm, &f);
        let flipped = denominator_in_frame(&prm, &f.flipped());
        assert!((d + flipped).norm() <= 1e-13 * d.norm());
    }
    // V → 0: D = −4p² e^{−ipL}
    let free = BarrierParams::new(1.0, 1e-300, 1.0).unwrap();
    for p in [c(1.3, 0.2), c(2.0, -0.7)] {
        let want = -4.0 * p * p * (-Complex64::i() * p).exp();
        assert!((denominator_d(&free, p) - want).norm() < 1e-12 * want.norm());
    }
}

#[test]
fn resonant_functions_satisfy_outgoing_conditions() {
    let prm = BarrierParams::cfg0();
    let t = find_resonances(&prm, 5).unwrap();
    let l = prm.l;
    let h = 1e-5 * l;
    for pole in &t.poles {
        let u = |x: f64| resonant_u(&prm, pole, x);
        // one-sided stencils from inside the barrier; u'' jumps at the edges
        let d5 = |x: f64, s: f64| {
            let f = |j: f64| u(x + s * j * h);
            s * (-25.0 * f(0.0) + 48.0 * f(1.0) - 36.0 * f(2.0) + 16.0 * f(3.0) - 3.0 * f(4.0)) / (12.0 * h)
        };
        let i = Complex64::i();
        // the two outer regions share a derivative with the barrier region
        assert!((u(-1e-12) - u(0.0)).norm() < 1e-9 * u(0.0).norm());
        assert!((u(l + 1e-12) - u(l)).norm() < 1e-9 * u(l).norm());
        assert!((u(0.0) + 2.0 * pole.frame(&prm).pp).norm() < 1e-13 * u(0.0).norm());
        assert!((d5(0.0, 1.0) + i * pole.p * u(0.0)).norm() <= 1e-8 * (pole.p * u(0.0)).norm());
        assert!((d5(l, -1.0) - i * pole.p * u(l)).norm() <= 1e-8 * (pole.p * u(l)).norm());
        // u'' + (p² − 2mV) u = 0 inside
        let hh = 1e-3 * l;
        for x in [0.3 * l, 0.7 * l] {
            let d2 = (-u(x - 2.0 * hh) + 16.0 * u(x - hh) - 30.0 * u(x) + 16.0 * u(x + hh) - u(x + 2.0 * hh))
                / (12.0 * hh * hh);
            let res = d2 + (pole.p * pole.p - prm.kappa2()) * u(x);
            assert!(res.norm() <= 1e-5 * (d2.norm() + u(x).norm()), "n = {}", pole.n);
        }
    }
}

/// (p − p_n) G(x, y, p) → u_n(x) u_n(y)/N_n, by quadratic extrapolation
/// from three approach points.
#[test]
fn residues_of_the_green_function() {
    let prm = BarrierParams::cfg0();
    let t = find_resonances(&prm, 10).unwrap();
    let (x, y) = (0.3 * prm.l, 0.7 * prm.l);
    for pole in t.positive() {
        let dir = Complex64::from_polar(1.0, 0.7);
        let f = |h: f64| {
            let p = pole.p + h * dir;
            (p - pole.p) * green_closed(&prm, x, y, p).unwrap()
        };
        let h = 1e-3;
        // Richardson for f(0) from f(h), f(2h), f(3h)
        let r = 3.0 * f(h) - 3.0 * f(2.0 * h) + f(3.0 * h);
        let want = resonant_u(&prm, pole, x) * resonant_u(&prm, pole, y) / pole.norm;
        assert!((r - want).norm() <= 1e-6 * want.norm(), "n = {}: {r} vs {want}", pole.n);
    }
}

/// Deep poles, where the two terms of W cancel to rounding, checked against
/// a 50-digit root of D.
#[test]
fn deep_poles_are_accurate() {
    let prm = BarrierParams::cfg0();
    let table = find_resonances(&prm, 3200).unwrap();
    assert!(table.poles.iter().all(|p| p.residual <= 1e-10));
    let want = c(10053.093504352401740653523526202978659951398863719, -17.514982742558698148791616833367251177133916258796);
    assert!((table.get(3200).p - want).norm() <= 1e-12 * want.norm());
    for n in 2..=3200 {
        let gap = (table.get(n).p - table.get(n - 1).p).re;
        assert!(gap > 2.0 && gap < 3.2, "n = {n}: gap {gap}");
    }
}
