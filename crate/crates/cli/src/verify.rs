//! The `verify` suite: symbolic identities checked exactly, propagators and
//! path integrals checked numerically. Inputs come from a fixed-seed
//! generator so the report is reproducible byte for byte.

use std::f64::consts::PI;
use std::io::Write;

use ccr::heisenberg::{
    extract_affine, generator, power_rate_direct, power_rate_left, power_rate_right, power_rate_symmetrized, taylor_flow,
    time_derivative, ForceLaw, VelocityLaw, MASS, OMEGA,
};
use ccr::opalg::{apply_to_polynomial, Coeff, ComplexRational, Gen, Monomial, OpExpr, Polynomial, Word};
use ccr::pathint::{convergence_study, Reference, SECOND_ORDER_BAND};
use ccr::propagator::{closed_form_kernel, evolve_exact, gaussian_kernel, AffineFlowExact, Model};
use ccr::wavefunction::{Grid, WaveFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_cc12;

pub fn random_rational(rng: &mut impl Rng) -> ComplexRational {
    let re = ComplexRational::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    if rng.gen_bool(0.3) {
        let im = ComplexRational::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
        &re + &(&im * &ComplexRational::i())
    } else {
        re
    }
}

pub fn random_coeff(rng: &mut impl Rng) -> Coeff {
    let v = random_rational(rng);
    if rng.gen_bool(0.25) {
        let name = ["m", "w", "F0"][rng.gen_range(0..3)];
        Coeff::term(v, Monomial::param(name, rng.gen_range(-2..=2)))
    } else {
        Coeff::constant(v)
    }
}

/// Each degree up to `max_degree` present with probability 0.6.
pub fn random_polynomial(rng: &mut impl Rng, max_degree: u32) -> Polynomial {
    let mut p = Polynomial::zero();
    for d in 0..=max_degree {
        if rng.gen_bool(0.6) {
            p.add_term(d, &random_coeff(rng));
        }
    }
    p
}

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new((0..len).map(|_| if rng.gen_bool(0.5) { Gen::X } else { Gen::P }).collect())
}

pub fn random_expr(rng: &mut impl Rng, max_len: usize, max_terms: usize) -> OpExpr {
    let mut e = OpExpr::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        e.add_word(&random_word(rng, max_len), &random_coeff(rng));
    }
    e
}

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn newtonian(law: &ForceLaw) -> ccr::heisenberg::Generator {
    generator(law, &VelocityLaw::newtonian())
}

fn derivative_rules(rng: &mut ChaCha8Rng) -> Check {
    let minus_i = Coeff::constant(-&ComplexRational::i());
    let mut bad = 0;
    for _ in 0..200 {
        let o = random_polynomial(rng, 8);
        let d = o.derivative();
        let x_ok = o.to_operator(Gen::X).commutator(&OpExpr::p()) == d.to_operator(Gen::X).scale(&Coeff::i());
        let p_ok = o.to_operator(Gen::P).commutator(&OpExpr::x()) == d.to_operator(Gen::P).scale(&minus_i);
        bad += usize::from(!(x_ok && p_ok));
    }
    check("derivative-rules", bad == 0, format!("[O(X),P] = iO'(X), [O(P),X] = -iO'(P); 200 polynomials, {bad} mismatches"))
}

fn oracle(rng: &mut ChaCha8Rng) -> Check {
    let mut bad = 0;
    for _ in 0..500 {
        let e = random_expr(rng, 6, 4);
        let q = random_polynomial(rng, 8);
        bad += usize::from(apply_to_polynomial(&e, &q) != apply_to_polynomial(&e.normal_order(), &q));
    }
    check("oracle", bad == 0, format!("raw vs normal-ordered action on polynomials; 500 cases, {bad} mismatches"))
}

fn symmetrized() -> Check {
    let g = newtonian(&ForceLaw::free());
    let bad: Vec<u32> = (1..=8)
        .filter(|&n| {
            let rate = time_derivative(&OpExpr::x().pow(n), &g);
            ![power_rate_direct(n), power_rate_left(n), power_rate_right(n), power_rate_symmetrized(n)]
                .iter()
                .all(|f| rate.equals(f))
        })
        .collect();
    check("symmetrized-rate", bad.is_empty(), format!("d/dt X^n: i[G,X^n] = left = right = average for n = 1..8; failing n: {bad:?}"))
}

/// `c_k` of `X0 cos ωt + P0 sin(ωt)/(mω)`.
pub fn harmonic_coefficient(k: usize) -> OpExpr {
    let sign = ComplexRational::from_integer(if (k / 2).is_multiple_of(2) { 1 } else { -1 });
    if k.is_multiple_of(2) {
        OpExpr::from_word(Word::single(Gen::X), Coeff::term(sign, Monomial::param(OMEGA, k as i32)))
    } else {
        let params = Monomial::param(OMEGA, k as i32 - 1).mul(&Monomial::param(MASS, -1));
        OpExpr::from_word(Word::single(Gen::P), Coeff::term(sign, params))
    }
}

fn harmonic_flow() -> Check {
    let flow = taylor_flow(&OpExpr::x(), &newtonian(&ForceLaw::harmonic()), 12);
    let bad: Vec<usize> = (0..=12).filter(|&k| flow.coeff(k) != &harmonic_coefficient(k)).collect();
    check("harmonic-flow", bad.is_empty(), format!("X(t) = X0 cos wt + P0 sin(wt)/(m w) through t^12; failing orders: {bad:?}"))
}

fn ccr_preserved() -> Vec<Check> {
    [ForceLaw::free(), ForceLaw::harmonic(), ForceLaw::linear()]
        .into_iter()
        .map(|law| {
            let g = newtonian(&law);
            let x = taylor_flow(&OpExpr::x(), &g, 12);
            let p = taylor_flow(&OpExpr::p(), &g, 12);
            let b = x.commutator_series(&p);
            let ok = b[0] == OpExpr::scalar(Coeff::i()) && b[1..].iter().all(OpExpr::is_zero);
            check("ccr-preserved", ok, format!("{}: [X(t),P(t)] = i through t^12", law.label))
        })
        .collect()
}

/// Shows why the oscillator's `P0` coefficient is `sin(ωt)/(mω)`: its `t`
/// derivative at 0 must be `P0/m` for `[X, m dX/dt] = i`.
fn omega_note() -> Check {
    let mass = Coeff::param(MASS, 1);
    // t-coefficients of sin(wt)/(m w) and sin(wt)/(m w^2)
    let right = OpExpr::p().scale(&Coeff::param(MASS, -1));
    let printed = OpExpr::p().scale(&(&Coeff::param(MASS, -1) * &Coeff::param(OMEGA, -1)));
    let flow = taylor_flow(&OpExpr::x(), &newtonian(&ForceLaw::harmonic()), 1);
    let bracket = |c1: &OpExpr| OpExpr::x().commutator(&c1.scale(&mass));
    let (good, bad) = (bracket(&right), bracket(&printed));
    let ok = flow.coeff(1) == &right && good == OpExpr::scalar(Coeff::i()) && bad != good;
    check(
        "omega-denominator",
        ok,
        format!("P0 sin(wt)/(m w) gives [X, m dX/dt] = {good} at t^0; P0 sin(wt)/(m w^2) would give {bad}"),
    )
}

fn affine_numeric() -> Check {
    let mut worst: f64 = 0.0;
    for exact in flows() {
        let g = newtonian(&exact.force_law());
        let affine = extract_affine(&taylor_flow(&OpExpr::x(), &g, 16)).expect("affine model");
        for t in [0.25, 0.5, 1.0] {
            let s = affine.eval(t, &exact.params()).expect("all parameters set");
            let v = exact.values(t);
            worst = worst.max((s.alpha - v.alpha).abs()).max((s.beta - v.beta).abs()).max((s.gamma - v.gamma).abs());
        }
    }
    check("affine-values", worst < 1e-12, format!("series alpha, beta, gamma vs closed form, max diff {worst:.3e}"))
}

fn flows() -> [AffineFlowExact; 3] {
    [
        AffineFlowExact::free(1.0).expect("valid"),
        AffineFlowExact::harmonic(1.0, 1.0).expect("valid"),
        AffineFlowExact::linear(1.0, 0.5).expect("valid"),
    ]
}

fn kernel_anchors(rng: &mut ChaCha8Rng) -> Vec<Check> {
    flows()
        .iter()
        .map(|flow| {
            let t_max = match flow.model {
                Model::Harmonic { omega } => (PI - 0.05) / omega,
                _ => 3.0,
            };
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let t = rng.gen_range(0.05..t_max);
                let (xb, xa) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                let g = gaussian_kernel(flow, t).expect("away from caustics").eval(xb, xa);
                let c = closed_form_kernel(flow, t, xb, xa).expect("away from caustics");
                worst = worst.max((g - c).norm() / c.norm());
            }
            check("kernel-anchor", worst < 1e-12, format!("{}: 1000 points, max relative diff {worst:.3e}", flow.model.name()))
        })
        .collect()
}

fn free_limit() -> Check {
    let t = 1.0;
    let free = AffineFlowExact::free(1.0).expect("valid");
    let slow = AffineFlowExact::harmonic(1.0, 1e-4 / t).expect("valid");
    let mut worst: f64 = 0.0;
    for (xb, xa) in [(0.0, 0.0), (0.5, -1.0), (2.0, 1.5)] {
        let f = closed_form_kernel(&free, t, xb, xa).expect("t > 0");
        let h = closed_form_kernel(&slow, t, xb, xa).expect("wt < pi");
        worst = worst.max((h - f).norm() / f.norm());
    }
    check("free-limit", worst < 1e-6, format!("harmonic kernel at wt = 1e-4 vs free, max relative diff {worst:.3e}"))
}

fn evolve(flow: &AffineFlowExact, t: f64, psi: &WaveFunction) -> WaveFunction {
    let k = gaussian_kernel(flow, t).expect("away from caustics");
    let phase = Complex64::from_polar(1.0, flow.reference_phase(t));
    evolve_exact(&k, psi).expect("compliant grid").scaled(phase)
}

fn wavepackets() -> Vec<Check> {
    let grid = Grid::new(-10.0, 10.0, 2048).expect("valid grid");
    let psi = WaveFunction::gaussian(grid, 0.0, 0.0, 1.0);
    let out = evolve(&flows()[0], 1.0, &psi);
    // amplitude width sigma(t) = sigma sqrt(1 + t^2/(m^2 sigma^4)); spread is sigma(t)/sqrt(2)
    let expected = (1.0f64 + 1.0).sqrt() / 2f64.sqrt();
    let spread = (out.width() - expected).abs();
    let mut checks = vec![check("free-spreading", spread < 1e-6, format!("m = sigma = t = 1, spread diff {spread:.3e}"))];
    let (x0, p0) = (0.7, -0.6);
    let psi = WaveFunction::gaussian(grid, x0, p0, 1.0);
    for flow in flows() {
        let mut worst: f64 = 0.0;
        for t in [0.5, 1.0, 1.5] {
            let out = evolve(&flow, t, &psi);
            let v = flow.values(t);
            let w = flow.momentum_values(t);
            worst = worst
                .max((out.mean_x() - (v.alpha * x0 + v.beta * p0 + v.gamma)).abs())
                .max((out.mean_p() - (w.alpha * x0 + w.beta * p0 + w.gamma)).abs())
                .max((out.norm() - 1.0).abs());
        }
        checks.push(check("ehrenfest", worst < 1e-6, format!("{}: <x>, <p>, norm at t = 0.5, 1, 1.5, max diff {worst:.3e}", flow.model.name())));
    }
    checks
}

fn path_integral() -> Vec<Check> {
    let cases = [
        (AffineFlowExact::harmonic(1.0, 1.0).expect("valid"), -6.0, 1.0, 2.0, vec![4, 8, 16, 32]),
        (AffineFlowExact::linear(1.0, 1.0).expect("valid"), -7.0, -0.5, 1.0, vec![2, 4, 8, 16]),
    ];
    cases
        .into_iter()
        .map(|(flow, x_min, x0, t, steps)| {
            let grid = Grid::new(x_min, -x_min, 1024).expect("valid grid");
            let psi0 = WaveFunction::gaussian(grid, x0, 0.0, 1.0);
            let law = flow.force_law();
            let r = convergence_study(&law.force, &flow.params(), flow.mass, &psi0, t, &steps, Reference::ClosedForm(flow))
                .expect("compliant grid");
            let ratios: Vec<String> = r.rows.iter().filter_map(|row| row.ratio).map(|x| format!("{x:.3}")).collect();
            let last = r.final_error().unwrap_or(f64::INFINITY);
            let ok = r.errors_decrease() && r.asymptotic_from().is_some() && last < 1e-3 && !r.leaked();
            check(
                "path-integral",
                ok,
                format!(
                    "{}: N = {steps:?}, ratios [{}] (band {:?}), final error {last:.3e}",
                    flow.model.name(),
                    ratios.join(", "),
                    SECOND_ORDER_BAND
                ),
            )
        })
        .collect()
}

pub fn run_all() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = vec![derivative_rules(&mut rng), oracle(&mut rng), symmetrized(), harmonic_flow()];
    out.extend(ccr_preserved());
    out.push(omega_note());
    out.push(affine_numeric());
    out.extend(kernel_anchors(&mut rng));
    out.push(free_limit());
    out.extend(wavepackets());
    out.extend(path_integral());
    out
}

/// Writes one line per check and a summary; returns the failure count.
pub fn write_report(checks: &[Check], out: &mut dyn Write) -> std::io::Result<usize> {
    writeln!(out, "ccr verify (seed {SEED:#x})")?;
    for c in checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} passed, {} failed", checks.len() - failed, failed)?;
    Ok(failed)
}
