//! Acceptance report: one PASS/FAIL line per criterion, at the canonical
//! configuration (m = 0.5, V = 10, L = 1, k = 3).
//!
//! Four criteria fail as literally worded (3, 6, 8, 9). Each of them asks for
//! an identity that does not hold for the formulas as written, and the
//! detail lines show the measured value next to the form that does hold.
//! Those four are listed in `EXPECTED_FAIL`; the process exits non-zero only
//! when any other criterion fails, so a regression still breaks the build.

use gamow::barrier::*;
use gamow::cxmath::{faddeeva_w, scaled_erfc, FRAC_1_SQRT_PI};
use gamow::evolution::*;
use gamow::greenfn::{self, printed};
use gamow::laplace::*;
use gamow::oracle::*;
use gamow::quad::adaptive;
use gamow::stationary::{self, ScatteringKind, ScatteringSolution};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

const K: f64 = 3.0;
const EXPECTED_FAIL: [u32; 4] = [3, 6, 8, 9];

struct Report {
    id: u32,
    title: &'static str,
    pass: bool,
    details: Vec<String>,
}

impl Report {
    fn new(id: u32, title: &'static str) -> Self {
        Report { id, title, pass: true, details: Vec::new() }
    }

    /// Records one gated measurement.
    fn check(&mut self, label: &str, ok: bool, measured: String) {
        self.pass &= ok;
        self.details.push(format!("{} {label}: {measured}", if ok { "ok  " } else { "FAIL" }));
    }

    /// Records a measurement that does not decide the verdict.
    fn note(&mut self, text: String) {
        self.details.push(format!("     {text}"));
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn cfg() -> BarrierParams {
    BarrierParams::cfg0()
}

fn pole_location() -> Report {
    let mut r = Report::new(1, "pole location (40 pairs)");
    let prm = cfg();
    let start = Instant::now();
    let table = find_resonances(&prm, 40).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut sector = true;
    let mut mirror = 0.0f64;
    let mut residual = 0.0f64;
    for n in 1..=40 {
        let (p, m) = (table.get(n), table.get(-n));
        sector &= p.p.arg() > -FRAC_PI_4 && p.p.arg() < 0.0;
        mirror = mirror.max((m.p + p.p.conj()).norm() / p.p.norm());
        residual = residual.max(p.residual).max(m.residual);
    }
    let deepest = table.poles.iter().map(|p| p.p.im).fold(0.0, f64::min);
    let rect = Rect::new(0.0, table.get(40).p.re + 1.5, deepest - 1.0, -1e-3);
    let count = count_zeros(&prm, &rect);
    r.check("−π/4 < arg p_n < 0 for n = 1..40", sector, format!("{sector}"));
    r.check("mirror |p_−n + p_n*|/|p_n| ≤ 1e−12", mirror <= 1e-12, format!("{mirror:.1e}"));
    r.check("scaled |D(p_n)| ≤ 1e−10", residual <= 1e-10, format!("{residual:.1e}"));
    r.check("argument-principle count = 40", matches!(count, Ok(40)), format!("{count:?}"));
    r.check("runtime < 5 s", secs < 5.0, format!("{secs:.3} s"));
    r
}

fn norm_identity() -> Report {
    let mut r = Report::new(2, "norm identity N_n = −8mV(p_n L + 2i)");
    let prm = cfg();
    let table = find_resonances(&prm, 10).unwrap();
    let worst = (1..=10)
        .map(|n| {
            let pole = table.get(n);
            let closed = -8.0 * prm.m * prm.v * (pole.p * prm.l + c(0.0, 2.0));
            rel(resonance_norm_by_quadrature(&prm, pole, 64), closed)
        })
        .fold(0.0, f64::max);
    r.check("definitional integral vs closed form, n = 1..10", worst <= 1e-9, format!("{worst:.1e} (≤ 1e−9)"));
    r
}

fn green_closed_form() -> Report {
    let mut r = Report::new(3, "Green function closed form and special values");
    let prm = cfg();
    let l = prm.l;
    let i = Complex64::i();
    let momenta = [c(0.8, 0.0), c(2.0, 0.5), c(3.3, -0.4), c(-1.7, 1.1), c(5.0, 2.0)];
    let pts = [0.0, 0.2, 0.5, 0.8, 1.0];
    let (mut sym, mut rbc, mut jump) = (0.0f64, 0.0f64, 0.0f64);
    for p in momenta {
        for &x in &pts {
            for &y in &pts {
                let a = greenfn::green_closed(&prm, x, y, p).unwrap();
                sym = sym.max((a - greenfn::green_closed(&prm, y, x, p).unwrap()).norm());
            }
            let g0 = greenfn::green_closed(&prm, 0.0, x, p).unwrap();
            let gl = greenfn::green_closed(&prm, l, x, p).unwrap();
            rbc = rbc
                .max((greenfn::green_dx(&prm, 0.0, x, p, false).unwrap() + i * p * g0).norm())
                .max((greenfn::green_dx(&prm, l, x, p, true).unwrap() - i * p * gl).norm());
        }
        for y in [0.2, 0.5, 0.9] {
            let d = greenfn::green_dx(&prm, y, y, p, true).unwrap() - greenfn::green_dx(&prm, y, y, p, false).unwrap();
            jump = jump.max((d - 1.0).norm());
        }
    }
    r.check("symmetry G(x,y) = G(y,x)", sym <= 1e-12, format!("{sym:.1e}"));
    r.check("outgoing boundary conditions ≤ 1e−8", rbc <= 1e-8, format!("{rbc:.1e}"));
    r.check("∂ₓG jump = 1 to 1e−6", jump <= 1e-6, format!("{jump:.1e}"));

    // Special values as printed, against G itself and against −G.
    let mut literal = 0.0f64;
    let mut flipped = 0.0f64;
    for p in momenta {
        let pairs = [
            (printed::g_0x(&prm, 0.4, p), greenfn::green_closed(&prm, 0.0, 0.4, p).unwrap()),
            (printed::g_lx(&prm, 0.4, p), greenfn::green_closed(&prm, l, 0.4, p).unwrap()),
            (printed::g_0l(&prm, p), greenfn::green_closed(&prm, 0.0, l, p).unwrap()),
            (printed::g_00(&prm, p), greenfn::green_closed(&prm, 0.0, 0.0, p).unwrap()),
            (printed::g_xy(&prm, 0.3, 0.7, p), greenfn::green_closed(&prm, 0.3, 0.7, p).unwrap()),
        ];
        for (pr, g) in pairs {
            literal = literal.max(rel(pr, g));
            flipped = flipped.max(rel(pr, -g));
        }
    }
    let g000 = greenfn::green_zero_momentum(&prm, 0.0, 0.0);
    let g000_dev = (printed::g_00_zero(&prm) - g000).abs();
    let dp = greenfn::green_dp_zero(&prm, 0.0, 0.0);
    let dp_literal = rel(printed::dp_g_00_zero(&prm), dp);
    let dp_squared = rel(printed::dp_g_00_zero_squared(&prm), dp);
    r.check("G(0,0,0) = −coth(Lκ)/κ = −0.3173…", g000_dev <= 1e-12, format!("{g000_dev:.1e} (G = {g000:.10})"));
    r.check("p-dependent special values as printed", literal <= 1e-12, format!("{literal:.2} relative"));
    r.check("∂ₚG(0,0,0) as printed (single sinh)", dp_literal <= 1e-12, format!("{dp_literal:.2} relative"));
    r.note(format!(
        "the printed p-forms equal −G to {flipped:.1e}: opposite overall sign to the G whose \
         p → 0 limit is the printed −coth(Lκ)/κ"
    ));
    r.note(format!("∂ₚG(0,0,0) with sinh² in the denominator matches to {dp_squared:.1e}"));
    r
}

fn mittag_leffler() -> Report {
    let mut r = Report::new(4, "Mittag-Leffler convergence");
    let prm = cfg();
    let poles = find_resonances(&prm, 1000).unwrap().poles;
    let p = c(2.0, 0.0);
    let exact = greenfn::green_closed(&prm, 0.3, 0.7, p).unwrap();
    let dev = |n| (greenfn::green_pole_series(&prm, 0.3, 0.7, p, &poles, n).unwrap() - exact).norm();
    let (a, b) = (dev(500), dev(1000));
    r.check("plain series at (0.3, 0.7), p = 2: 500 → 1000 pairs", a <= 1e-3 && b < a, format!("{a:.2e} → {b:.2e}"));
    let p = c(1.5, 0.0);
    let exact = greenfn::green_closed(&prm, 0.0, 0.0, p).unwrap();
    let dev = |n| (greenfn::green_subtracted_series(&prm, 0.0, 0.0, p, &poles, n).unwrap() - exact).norm();
    let (a, b) = (dev(500), dev(1000));
    r.check("subtracted series at (0, 0), p = 1.5: 500 → 1000 pairs", a <= 1e-3 && b < a, format!("{a:.2e} → {b:.2e}"));
    r
}

fn route_equivalence() -> Report {
    let mut r = Report::new(5, "route equivalence in the p domain");
    let prm = cfg();
    let xs = [
        [-2.0, -1.1, -0.5, -0.2, -0.01],
        [0.0, 0.25, 0.5, 0.75, 1.0],
        [1.01, 1.2, 1.5, 2.1, 3.0],
    ];
    let momenta = [c(0.7, 0.3), c(1.5, 1.0), c(2.4, 0.2), c(4.5, 2.0), c(-1.2, 0.8)];
    let set = ResonanceSet::from_table(&find_resonances(&prm, 800).unwrap(), K).unwrap();
    let mut worst = 0.0f64;
    let mut improved = 0;
    let mut total = 0;
    let mut worst_ratio = 0.0f64;
    for x in xs.iter().flatten() {
        for &p in &momenta {
            let d = psi_bar_direct(&prm, K, *x, p).unwrap();
            worst = worst.max(rel(psi_bar_green(&prm, K, *x, p).unwrap(), d));
            let pd = p * d;
            let a = (p_psi_bar_series(&set, *x, p, 400).unwrap() - pd).norm();
            let b = (p_psi_bar_series(&set, *x, p, 800).unwrap() - pd).norm();
            total += 1;
            if b < a {
                improved += 1;
            }
            worst_ratio = worst_ratio.max(b / a);
        }
    }
    r.check("Green route vs matching route, 3 × 5 × 5 grid", worst <= 1e-9, format!("{worst:.1e} relative (≤ 1e−9)"));
    r.check(
        "pole series improves 400 → 800 pairs at every point",
        improved == total,
        format!("{improved}/{total}, worst ratio {worst_ratio:.3}"),
    );
    r
}

fn bracket_factors_check() -> Report {
    let mut r = Report::new(6, "bracket factors: explicit erfc forms vs kernels");
    let prm = cfg();
    let set = ResonanceSet::from_table(&find_resonances(&prm, 20).unwrap(), K).unwrap();
    let terms = set.truncated(20).unwrap();
    let (mut lit, mut lit_name) = (0.0f64, String::new());
    let mut fixed = 0.0f64;
    for x in [0.3, 0.5, 0.7, 1.5, 2.5] {
        for t in [0.05, 0.2, 1.0] {
            let time = TimePoint::new(&prm, t).unwrap();
            let kern = bracket_factors(&set, x, time, 20).unwrap();
            let a = printed_bracket_factors(&set, x, time, 20, Transcription::AsPrinted).unwrap();
            let b = printed_bracket_factors(&set, x, time, 20, Transcription::Corrected).unwrap();
            let (name, d) = bracket_deviation(&kern, &a, terms);
            if d > lit {
                lit = d;
                lit_name = name;
            }
            fixed = fixed.max(bracket_deviation(&kern, &b, terms).1);
        }
    }
    r.check("forms as printed, 15 (x, t) points × 20 pairs", lit <= 1e-9, format!("{lit:.1e} (worst entry {lit_name})"));
    r.note("A^II_n as printed drops p_n from the erfc argument and has e^{−iπ/4} for e^{+iπ/4};".into());
    r.note("B^III_−k as printed carries e^{y_k²} where the kernel has e^{y_−k²}".into());
    r.note(format!("with those two entries repaired every factor matches its kernel to {fixed:.1e}"));
    r
}

fn time_domain() -> Report {
    let mut r = Report::new(7, "time domain: resonance expansion vs numerical inversion");
    let prm = cfg();
    let set = ResonanceSet::from_table(&find_resonances(&prm, 1600).unwrap(), K).unwrap();
    let xs = [-1.5, -0.5, 0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.5];
    let ts = [0.05, 0.2, 1.0];
    let spec = ContourSpec::default();
    let form = ExpansionForm::default();
    let (mut d800, mut d1600, mut printed_dev) = (0.0f64, 0.0f64, 0.0f64);
    let mut max_psi = 0.0f64;
    let mut no_worse = true;
    for &t in &ts {
        let time = TimePoint::new(&prm, t).unwrap();
        for &x in &xs {
            let o = oracle_psi(&prm, K, x, t, &spec).unwrap();
            max_psi = max_psi.max(o.value.norm());
            let a = (psi_t(&set, x, time, &SeriesControl::fixed(800, form)).unwrap().psi - o.value).norm();
            let b = (psi_t(&set, x, time, &SeriesControl::fixed(1600, form)).unwrap().psi - o.value).norm();
            let pr = psi_t(&set, x, time, &SeriesControl::fixed(1600, ExpansionForm::Printed)).unwrap().psi;
            printed_dev = printed_dev.max((pr - o.value).norm());
            // both are at the oracle's own accuracy; allow for that
            no_worse &= b <= a + o.error + 1e-12;
            d800 = d800.max(a);
            d1600 = d1600.max(b);
        }
    }
    let gate = 1e-2 * max_psi;
    r.check("27 points, 800 pairs: max |ψ − ψ_oracle| ≤ 1e−2·max|ψ|", d800 <= gate, format!("{d800:.1e} (≤ {gate:.1e})"));
    r.check("1600 pairs no worse pointwise", no_worse, format!("max {d1600:.1e}"));
    r.note(format!("non-gating target 1e−3·max|ψ|: {}", if d800 <= 1e-3 * max_psi { "met" } else { "missed" }));
    r.note(format!("term-by-term series at 1600 pairs: max deviation {printed_dev:.1e}"));
    r
}

fn limits() -> Report {
    let mut r = Report::new(8, "short- and long-time limits");
    let prm = cfg();
    let set = ResonanceSet::from_table(&find_resonances(&prm, 800).unwrap(), K).unwrap();
    let control = SeriesControl::default();
    let xs = [-1.5, -0.5, 0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.5];
    let mut monotone = true;
    let mut at_half = Vec::new();
    for &x in &xs {
        let mut last = f64::INFINITY;
        for t in [0.1, 0.01, 0.001] {
            let time = TimePoint::new(&prm, t).unwrap();
            let d = (psi_t(&set, x, time, &control).unwrap().psi - Complex64::from_polar(1.0, K * x)).norm();
            monotone &= d < last;
            last = d;
            if x == 0.5 {
                at_half.push(d);
            }
        }
    }
    r.check(
        "|ψ − e^{ikx}| decreases over t = 0.1, 0.01, 0.001 at all 9 points",
        monotone,
        format!("x = 0.5: {:.3} → {:.3} → {:.4}", at_half[0], at_half[1], at_half[2]),
    );
    let time = TimePoint::new(&prm, 50.0).unwrap();
    let worst = xs
        .iter()
        .map(|&x| rel(psi_t(&set, x, time, &control).unwrap().psi, stationary_limit(&prm, K, x, time).unwrap()))
        .fold(0.0, f64::max);
    r.check("t = 50 vs stationary in-state, relative ≤ 1e−3", worst <= 1e-3, format!("{worst:.1e}"));
    let pair50 = [1.5, 2.5].map(|x| large_time_pair(&prm, K, x, time).unwrap().norm());
    let worst_pair = pair50[0].max(pair50[1]);
    r.check("C₂/C₄ cancellation at t = 50 to 1e−6", worst_pair <= 1e-6, format!("{worst_pair:.1e}"));
    let t800 = TimePoint::new(&prm, 800.0).unwrap();
    let ratio = pair50[1] / large_time_pair(&prm, K, 2.5, t800).unwrap().norm();
    let needed = 50.0 * (worst_pair / 1e-6f64).powi(2);
    r.note(format!(
        "the pair decays like t^(−1/2) (t 50 → 800 shrinks it by {ratio:.2}, expected 4); \
         1e−6 would need t ≈ {needed:.0e}"
    ));
    r
}

fn sum_rules() -> Report {
    let mut r = Report::new(9, "sum rules and δ completeness at x = L/2");
    let prm = cfg();
    let set = ResonanceSet::from_table(&find_resonances(&prm, 800).unwrap(), K).unwrap();
    let lit = |w, n| sum_rule_residual(&set, w, 0.5, n).unwrap();
    let avg = |w, n| sum_rule_residual_averaged(&set, w, 0.5, n).unwrap();
    for (name, w) in [("Σ u_n(L)u_n(x)/N_n", SumRule::B), ("Σ u_n(0)u_n(x)/N_n", SumRule::S)] {
        let (a, b) = (lit(w, 400), lit(w, 800));
        r.check(&format!("{name} partial sums, 400 → 800 pairs"), b < a && b <= 1e-2, format!("{a:.4} → {b:.4}"));
    }
    let (a, b) = (lit(SumRule::Delta, 400), lit(SumRule::Delta, 800));
    r.check("smeared δ completeness Σ u_n(x)⟨u_n, f⟩/N_n", b < a && b <= 5e-2, format!("{a:.4} → {b:.4}"));
    r.note(format!(
        "terms of the u_n(L)u_n(x) and u_n(0)u_n(x) sums have modulus |p_n|^(1−2x/L): at x = L/2 the partial \
         sums keep modulus 1/√(2mV) = {:.4} and only rotate",
        1.0 / prm.kappa()
    ));
    r.note(format!(
        "Cesàro means: B {:.1e} → {:.1e}, S {:.1e} → {:.1e}",
        avg(SumRule::B, 400),
        avg(SumRule::B, 800),
        avg(SumRule::S, 400),
        avg(SumRule::S, 800)
    ));
    r.note(format!(
        "Σ u_n(x)⟨u_n, f⟩/N_n tends to 0, not f; the weighted form Σ p_n u_n(x)⟨u_n, f⟩/N_n = f holds: {:.1e} → {:.1e}",
        lit(SumRule::DeltaMoment, 400),
        lit(SumRule::DeltaMoment, 800)
    ));
    r
}

fn scattering() -> Report {
    let mut r = Report::new(10, "stationary scattering states");
    let prm = cfg();
    let (mut flux, mut route, mut extract) = (0.0f64, 0.0f64, 0.0f64);
    for k in [1.0, 3.0, 5.0] {
        let s = ScatteringSolution::new(&prm, ScatteringKind::InR, k).unwrap();
        flux = flux.max((s.reflection().norm_sqr() + s.transmission().norm_sqr() - 1.0).abs());
        route = route.max((stationary::transmission(&prm, k).unwrap() - s.transmission()).norm());
        for x in [0.1, 0.4, 0.7, 1.0] {
            let g = greenfn::scattering_from_green(&prm, greenfn::InSide::Right, x, k).unwrap();
            extract = extract.max((g - s.eval(x)).norm());
        }
    }
    r.check("|R|² + |T|² = 1 at k = 1, 3, 5", flux <= 1e-12, format!("{flux:.1e}"));
    r.check("T from G(0, L, k) vs matching amplitudes", route <= 1e-11, format!("{route:.1e}"));
    r.check("φ_in from G(0, x, k) vs direct φ_in", extract <= 1e-10, format!("{extract:.1e}"));
    r
}

fn special_functions() -> Report {
    let mut r = Report::new(11, "complex error function");
    let w0 = (faddeeva_w(c(0.0, 0.0)).unwrap() - 1.0).norm();
    r.check("w(0) = 1", w0 <= 1e-14, format!("{w0:.1e}"));
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut conj = 0.0f64;
    for _ in 0..1000 {
        let z = c(rng.gen_range(-8.0..8.0), rng.gen_range(-4.5..4.5));
        let rhs = faddeeva_w(-z).unwrap().conj();
        conj = conj.max((faddeeva_w(z.conj()).unwrap() - rhs).norm() / (1.0 + rhs.norm()));
    }
    r.check("w(z*) = w(−z)* over 1000 random points", conj <= 1e-13, format!("{conj:.1e}"));
    let z = c(0.0, 1.0);
    let q = adaptive(|u| Complex64::i() / PI * (-u * u).exp() / (z - u), -12.0, 12.0, 1e-15, 30).value;
    let wi = (faddeeva_w(z).unwrap() - q).norm();
    r.check("w(i) vs its integral representation by quadrature", wi <= 1e-10, format!("{wi:.1e}"));
    let mut worst = 0.0f64;
    let mut y: f64 = 10.0;
    while y <= 1e4 {
        let v = scaled_erfc(c(y, 0.0)).unwrap().value.re;
        worst = worst.max((v * y / FRAC_1_SQRT_PI - 1.0).abs() * y * y);
        y *= 1.1;
    }
    r.check("|√π y e^{y²}erfc(y) − 1| ≤ 3/(2y²) on [10, 1e4]", worst <= 1.5, format!("max y²·dev = {worst:.4}"));
    r
}

fn causality() -> Report {
    let mut r = Report::new(12, "causality");
    let prm = cfg();
    let worst = [-1.0, 0.5, 1.5]
        .iter()
        .map(|&x| causality_check(&prm, K, x, -0.1, &ContourSpec::default()).unwrap().psi.value.norm())
        .fold(0.0, f64::max);
    r.check("|ψ(x, −0.1)| on the rotated path, x = −1, 0.5, 1.5", worst <= 1e-6, format!("{worst:.1e}"));
    r
}

fn main() {
    let start = Instant::now();
    let reports = [
        pole_location(),
        norm_identity(),
        green_closed_form(),
        mittag_leffler(),
        route_equivalence(),
        bracket_factors_check(),
        time_domain(),
        limits(),
        sum_rules(),
        scattering(),
        special_functions(),
        causality(),
    ];
    let mut unexpected = Vec::new();
    for rep in &reports {
        let expected = EXPECTED_FAIL.contains(&rep.id);
        let tag = match (rep.pass, expected) {
            (true, _) => "PASS",
            (false, true) => "FAIL (as analysed)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2} {tag}: {}", rep.id, rep.title);
        for d in &rep.details {
            println!("      {d}");
        }
        if !rep.pass && !expected {
            unexpected.push(rep.id);
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass ({:.1} s)", reports.len(), start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
