use ccr::pathint::{convergence_study, propagate, short_time_matrix, Reference};
use ccr::propagator::AffineFlowExact;
use ccr::wavefunction::{Grid, WaveFunction};

fn study(flow: AffineFlowExact, grid: Grid, x0: f64, t: f64, steps: &[usize]) -> ccr::pathint::ConvergenceReport {
    let psi0 = WaveFunction::gaussian(grid, x0, 0.0, 1.0);
    let law = flow.force_law();
    convergence_study(&law.force, &flow.params(), flow.mass, &psi0, t, steps, Reference::ClosedForm(flow)).unwrap()
}

#[test]
fn harmonic_converges_at_second_order() {
    let flow = AffineFlowExact::harmonic(1.0, 1.0).unwrap();
    let r = study(flow, Grid::new(-6.0, 6.0, 1024).unwrap(), 1.0, 2.0, &[4, 8, 16, 32]);
    for row in &r.rows {
        println!("{:>3} {:.3e} {:?}", row.steps, row.error, row.ratio);
    }
    assert!(r.errors_decrease());
    assert!(r.asymptotic_from().is_some());
    assert!(!r.leaked());
}

#[test]
fn linear_converges_at_second_order() {
    let flow = AffineFlowExact::linear(1.0, 1.0).unwrap();
    let r = study(flow, Grid::new(-7.0, 7.0, 1024).unwrap(), -0.5, 1.0, &[2, 4, 8, 16]);
    for row in &r.rows {
        println!("{:>3} {:.3e} {:?}", row.steps, row.error, row.ratio);
    }
    assert!(r.errors_decrease());
    assert!(r.asymptotic_from().is_some());
}

#[test]
fn free_chain_preserves_norm_and_mean() {
    let grid = Grid::new(-10.0, 10.0, 800).unwrap();
    let psi0 = WaveFunction::gaussian(grid, -1.0, 1.5, 1.0);
    let k = short_time_matrix(&ccr::opalg::Polynomial::zero(), &Default::default(), 1.0, 0.25, grid).unwrap();
    let out = propagate(&k, &psi0, 4).unwrap();
    assert!((out.psi.norm_sq() - 1.0).abs() < 1e-3, "{}", out.psi.norm_sq());
    assert!((out.psi.mean_x() - 0.5).abs() < 1e-3, "{}", out.psi.mean_x());
}

fn run(flow: &AffineFlowExact, grid: Grid, psi0: &WaveFunction, dt: f64, steps: usize) -> Vec<WaveFunction> {
    let k = short_time_matrix(&flow.force_law().force, &flow.params(), flow.mass, dt, grid).unwrap();
    let mut out = vec![psi0.clone()];
    for _ in 0..steps {
        let next = propagate(&k, out.last().unwrap(), 1).unwrap();
        assert!(!next.leaked());
        out.push(next.psi);
    }
    out
}

#[test]
fn discrete_ehrenfest_and_norm() {
    let grid = Grid::new(-7.0, 7.0, 700).unwrap();
    let psi0 = WaveFunction::gaussian(grid, 0.8, -0.4, 1.0);
    let dt = 0.1;
    for flow in [AffineFlowExact::harmonic(1.0, 1.2).unwrap(), AffineFlowExact::linear(1.0, 0.9).unwrap()] {
        let states = run(&flow, grid, &psi0, dt, 12);
        let force = flow.force_law().force.real_coeffs(&flow.params()).unwrap();
        for k in 1..states.len() - 1 {
            assert!((states[k].norm() - 1.0).abs() < 1e-3);
            let dp = (states[k + 1].mean_p() - states[k - 1].mean_p()) / (2.0 * dt);
            let s = &states[k];
            let mean_f: f64 = (0..grid.n)
                .map(|i| {
                    let x = grid.x(i);
                    let f: f64 = force.iter().rev().fold(0.0, |acc, c| acc * x + c);
                    f * s.samples()[i].norm_sqr() * grid.dx
                })
                .sum::<f64>()
                / s.norm_sq();
            assert!((dp - mean_f).abs() < 1e-2, "{} step {k}: {dp} vs {mean_f}", flow.model.name());
        }
    }
}

#[test]
fn linear_center_follows_trajectory() {
    let grid = Grid::new(-7.0, 7.0, 700).unwrap();
    let (x0, p0, f0) = (-1.0, 0.5, 0.8);
    let flow = AffineFlowExact::linear(1.0, f0).unwrap();
    let psi0 = WaveFunction::gaussian(grid, x0, p0, 1.0);
    let states = run(&flow, grid, &psi0, 0.1, 10);
    let t = 1.0;
    let expected = x0 + p0 * t + f0 * t * t / 2.0;
    assert!((states[10].mean_x() - expected).abs() < 1e-3, "{}", states[10].mean_x());
}

#[test]
fn free_chain_matches_closed_form() {
    let flow = AffineFlowExact::free(1.0).unwrap();
    let r = study(flow, Grid::new(-8.0, 8.0, 800).unwrap(), 0.5, 1.0, &[2, 4, 8]);
    for row in &r.rows {
        assert!(row.error < 1e-3, "{} {}", row.steps, row.error);
    }
}

#[test]
fn general_force_self_convergence() {
    use ccr::opalg::{Coeff, Polynomial};
    // F = -x - x³/10
    let force = Polynomial::from_coeffs([(1, Coeff::integer(-1)), (3, Coeff::ratio(-1, 10))]);
    let grid = Grid::new(-6.0, 6.0, 800).unwrap();
    let psi0 = WaveFunction::gaussian(grid, 0.5, 0.0, 1.0);
    let params = Default::default();
    let r = convergence_study(&force, &params, 1.0, &psi0, 1.0, &[2, 4, 8, 16], Reference::SelfConvergence).unwrap();
    assert_eq!(r.reference, "finest-run");
    assert_eq!(r.rows.len(), 3);
    assert!(r.errors_decrease());
    assert!(r.rows.iter().all(|row| row.error.is_finite()));
}
