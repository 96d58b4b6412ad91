//! Real-time path integral by time slicing.
//!
//! Over a short step `Δt` the flow `X(Δt) ≈ X0 + P0 Δt/m + F(X0) Δt²/2m`
//! yields the slice kernel
//!
//! ```text
//! K(x_i, x_j) = (m/2πiΔt)^(1/2) exp{(im/2Δt)((x_i − x_j)² + (Δt²/m)(W(x_i) + W(x_j)))} dx
//! ```
//!
//! with `W = ∫F dx`. Chaining `N` slices on a grid is the discrete path
//! integral; each intermediate position is summed over the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::opalg::{AlgebraError, ParamValues, Polynomial};
use crate::propagator::{evolve_exact, gaussian_kernel, AffineFlowExact, PropagatorError};
use crate::wavefunction::{Grid, GridError, WaveFunction};

/// Largest slice-kernel phase change between neighbouring grid points.
///
/// Above `2π` the aliased copies of the free kernel land back on the grid
/// and the chained product grows without bound.
pub const MAX_SLICE_PHASE_STEP: f64 = PI;
/// Edge probability fraction above which a propagation reports a leak.
pub const LEAK_LIMIT: f64 = 1e-6;
/// Error ratios for `N → 2N` inside this band count as second order.
pub const SECOND_ORDER_BAND: (f64, f64) = (3.2, 4.8);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathIntegralError {
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("mass must be positive and finite, got {0}")]
    BadMass(f64),
    #[error("grid too coarse for Δt = {dt}: slice phase changes by {phase_step:.4} rad per cell (limit {limit:.4})")]
    GridTooCoarse { dt: f64, phase_step: f64, limit: f64 },
    #[error("wave function has {found} samples, kernel expects {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("step list must be non-empty, positive and strictly increasing")]
    BadStepList,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// `W(x) = ∫F dx` with `W(0) = 0`.
pub fn antiderivative(force: &Polynomial) -> Polynomial {
    force.antiderivative()
}

/// Slice kernel data before it is expanded into a matrix.
#[derive(Clone, Debug)]
pub struct ShortTimeKernel {
    pub work: Polynomial,
    pub mass: f64,
    pub dt: f64,
    pub grid: Grid,
    work_values: Vec<f64>,
    max_force: f64,
}

impl ShortTimeKernel {
    pub fn new(force: &Polynomial, params: &ParamValues, mass: f64, dt: f64, grid: Grid) -> Result<Self, PathIntegralError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(PathIntegralError::BadTimeStep(dt));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(PathIntegralError::BadMass(mass));
        }
        let work = antiderivative(force);
        let w_coeffs = work.real_coeffs(params)?;
        let f_coeffs = force.real_coeffs(params)?;
        let xs = grid.points();
        let work_values = xs.iter().map(|&x| horner(&w_coeffs, x)).collect();
        let max_force = xs.iter().map(|&x| horner(&f_coeffs, x).abs()).fold(0.0, f64::max);
        Ok(Self { work, mass, dt, grid, work_values, max_force })
    }

    /// Bound on the phase change along a row or column of the kernel.
    pub fn max_phase_step(&self) -> f64 {
        self.grid.dx * (self.mass * self.grid.span() / self.dt + 0.5 * self.dt * self.max_force)
    }

    pub fn amplitude(&self) -> Complex64 {
        (Complex64::from(self.mass) / Complex64::new(0.0, 2.0 * PI * self.dt)).sqrt()
    }

    /// Entry `(i, j)` including the weight `dx`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let amp = self.amplitude() * self.grid.dx;
        self.entry_with(amp, i, j)
    }

    fn entry_with(&self, amp: Complex64, i: usize, j: usize) -> Complex64 {
        // (i − j)·dx is exact in sign, so entry(i, j) and entry(j, i) agree bitwise
        let sep = (i as f64 - j as f64) * self.grid.dx;
        let phase = self.mass * sep * sep / (2.0 * self.dt) + 0.5 * self.dt * (self.work_values[i] + self.work_values[j]);
        let (s, c) = phase.sin_cos();
        amp * Complex64::new(c, s)
    }

    pub fn matrix(&self) -> Result<KernelMatrix, PathIntegralError> {
        let phase_step = self.max_phase_step();
        if phase_step > MAX_SLICE_PHASE_STEP {
            return Err(PathIntegralError::GridTooCoarse {
                dt: self.dt,
                phase_step,
                limit: MAX_SLICE_PHASE_STEP,
            });
        }
        let n = self.grid.n;
        let amp = self.amplitude() * self.grid.dx;
        let entries: Vec<Complex64> = (0..n * n)
            .into_par_iter()
            .map(|k| self.entry_with(amp, k / n, k % n))
            .collect();
        Ok(KernelMatrix { n, entries })
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Dense `n × n` slice kernel, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    /// Bitwise `K == Kᵀ`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `K v`; rows in parallel, each summed left to right.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .par_chunks(self.n)
            .map(|row| row.iter().zip(v).fold(Complex64::new(0.0, 0.0), |acc, (k, x)| acc + k * x))
            .collect()
    }
}

pub fn short_time_matrix(force: &Polynomial, params: &ParamValues, mass: f64, dt: f64, grid: Grid) -> Result<KernelMatrix, PathIntegralError> {
    ShortTimeKernel::new(force, params, mass, dt, grid)?.matrix()
}

/// Result of `K^N ψ0`.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub psi: WaveFunction,
    pub steps: usize,
    /// Largest edge fraction seen at any step, including the start.
    pub max_edge_fraction: f64,
}

impl Propagation {
    /// True when probability reached the grid edges above [`LEAK_LIMIT`].
    pub fn leaked(&self) -> bool {
        self.max_edge_fraction > LEAK_LIMIT
    }
}

pub fn propagate(kernel: &KernelMatrix, psi0: &WaveFunction, steps: usize) -> Result<Propagation, PathIntegralError> {
    if psi0.len() != kernel.dim() {
        return Err(PathIntegralError::SizeMismatch {
            expected: kernel.dim(),
            found: psi0.len(),
        });
    }
    let grid = *psi0.grid();
    let mut psi = psi0.clone();
    let mut max_edge_fraction = psi.boundary_mass_fraction();
    for _ in 0..steps {
        psi = WaveFunction::new(grid, kernel.apply(psi.samples()))?;
        max_edge_fraction = max_edge_fraction.max(psi.boundary_mass_fraction());
    }
    Ok(Propagation { psi, steps, max_edge_fraction })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// Closed-form Gaussian propagation including its reference phase.
    ClosedForm(AffineFlowExact),
    /// The run with the largest step count.
    SelfConvergence,
}

impl Reference {
    pub fn label(&self) -> &'static str {
        match self {
            Reference::ClosedForm(_) => "closed-form",
            Reference::SelfConvergence => "finest-run",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub dt: f64,
    pub error: f64,
    /// `error(previous row) / error(this row)`.
    pub ratio: Option<f64>,
    pub edge_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub reference: &'static str,
    pub t_total: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Wave function from the largest step count.
    pub finest: WaveFunction,
}

impl ConvergenceReport {
    /// Smallest step count from which every later ratio lies in
    /// [`SECOND_ORDER_BAND`], if any ratio does.
    pub fn asymptotic_from(&self) -> Option<usize> {
        let (lo, hi) = SECOND_ORDER_BAND;
        let mut start = None;
        for w in self.rows.windows(2) {
            match w[1].ratio {
                Some(r) if (lo..=hi).contains(&r) => {
                    if start.is_none() {
                        start = Some(w[0].steps);
                    }
                }
                _ => start = None,
            }
        }
        start
    }

    pub fn errors_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.error)
    }

    pub fn leaked(&self) -> bool {
        self.rows.iter().any(|r| r.edge_fraction > LEAK_LIMIT)
    }
}

/// Runs the slice chain for every step count in `steps` at fixed `t_total`
/// and measures the L² error against `reference`.
///
/// With [`Reference::SelfConvergence`] the largest step count is the
/// reference and is not listed as a row.
pub fn convergence_study(
    force: &Polynomial,
    params: &ParamValues,
    mass: f64,
    psi0: &WaveFunction,
    t_total: f64,
    steps: &[usize],
    reference: Reference,
) -> Result<ConvergenceReport, PathIntegralError> {
    if steps.is_empty() || steps[0] == 0 || steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PathIntegralError::BadStepList);
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(PathIntegralError::BadTimeStep(t_total));
    }
    let grid = *psi0.grid();
    let run = |n: usize| -> Result<Propagation, PathIntegralError> {
        let dt = t_total / n as f64;
        let k = short_time_matrix(force, params, mass, dt, grid)?;
        propagate(&k, psi0, n)
    };
    let mut runs = Vec::with_capacity(steps.len());
    for &n in steps {
        runs.push(run(n)?);
    }
    let (target, listed) = match reference {
        Reference::ClosedForm(flow) => {
            let kernel = gaussian_kernel(&flow, t_total)?;
            let phase = Complex64::from_polar(1.0, flow.reference_phase(t_total));
            (evolve_exact(&kernel, psi0)?.scaled(phase), runs.len())
        }
        Reference::SelfConvergence => (runs[runs.len() - 1].psi.clone(), runs.len() - 1),
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(listed);
    for p in &runs[..listed] {
        let error = p.psi.l2_distance(&target)?;
        let ratio = rows.last().map(|prev| prev.error / error);
        rows.push(ConvergenceRow {
            steps: p.steps,
            dt: t_total / p.steps as f64,
            error,
            ratio,
            edge_fraction: p.max_edge_fraction,
        });
    }
    let finest = runs.pop().map(|p| p.psi).expect("non-empty step list");
    Ok(ConvergenceReport {
        reference: reference.label(),
        t_total,
        rows,
        finest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{ForceLaw, FORCE, MASS, OMEGA};
    use crate::opalg::Coeff;

    fn params() -> ParamValues {
        ParamValues::new().with(MASS, 1.0).with(OMEGA, 1.0).with(FORCE, 0.5)
    }

    #[test]
    fn antiderivative_examples() {
        let f0 = ForceLaw::linear().force;
        assert_eq!(antiderivative(&f0), Polynomial::monomial(1, Coeff::param(FORCE, 1)));
        let harm = ForceLaw::harmonic().force;
        let expected = Polynomial::monomial(2, &(&Coeff::param(MASS, 1) * &Coeff::param(OMEGA, 2)) * &Coeff::ratio(-1, 2));
        assert_eq!(antiderivative(&harm), expected);
        assert!(antiderivative(&Polynomial::zero()).is_zero());
    }

    #[test]
    fn free_diagonal_entry() {
        let grid = Grid::new(-1.0, 1.0, 21).unwrap();
        let k = ShortTimeKernel::new(&Polynomial::zero(), &params(), 1.0, 0.5, grid).unwrap();
        let expected = (Complex64::from(1.0) / Complex64::new(0.0, 2.0 * PI * 0.5)).sqrt() * grid.dx;
        assert_eq!(k.entry(4, 4), expected);
    }

    #[test]
    fn free_off_diagonal_phase() {
        // x_i − x_j = 0.1, m = 1, Δt = 0.01 → phase 0.5 rad
        let grid = Grid::new(0.0, 1.0, 11).unwrap();
        let k = ShortTimeKernel::new(&Polynomial::zero(), &params(), 1.0, 0.01, grid).unwrap();
        let ratio = k.entry(3, 2) / k.entry(3, 3);
        assert!((ratio.arg() - 0.5).abs() < 1e-12);
        assert!((ratio.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_force_phase_shift() {
        let grid = Grid::new(-1.0, 1.0, 11).unwrap();
        let dt = 0.2;
        let force = ForceLaw::linear().force;
        let free = ShortTimeKernel::new(&Polynomial::zero(), &params(), 1.0, dt, grid).unwrap();
        let lin = ShortTimeKernel::new(&force, &params(), 1.0, dt, grid).unwrap();
        let (i, j) = (2, 7);
        let gained = (lin.entry(i, j) / free.entry(i, j)).arg();
        let expected = 0.5 * dt * (0.5 * grid.x(i) + 0.5 * grid.x(j));
        assert!((gained - expected).abs() < 1e-14);
    }

    #[test]
    fn matrix_is_bitwise_symmetric() {
        let grid = Grid::new(-3.0, 2.5, 64).unwrap();
        let force = &ForceLaw::harmonic().force + &ForceLaw::linear().force;
        let k = short_time_matrix(&force, &params(), 1.0, 0.3, grid).unwrap();
        assert!(k.is_symmetric());
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = Grid::new(-5.0, 5.0, 101).unwrap();
        let err = short_time_matrix(&Polynomial::zero(), &params(), 1.0, 1e-3, grid).unwrap_err();
        assert!(matches!(err, PathIntegralError::GridTooCoarse { .. }));
    }

    #[test]
    fn zero_steps_is_identity() {
        let grid = Grid::new(-6.0, 6.0, 200).unwrap();
        let psi = WaveFunction::gaussian(grid, 0.0, 0.3, 1.0);
        let k = short_time_matrix(&Polynomial::zero(), &params(), 1.0, 0.5, grid).unwrap();
        let out = propagate(&k, &psi, 0).unwrap();
        assert_eq!(out.psi, psi);
        assert!(!out.leaked());
    }

    #[test]
    fn missing_parameter_is_reported() {
        let grid = Grid::new(-1.0, 1.0, 11).unwrap();
        let err = ShortTimeKernel::new(&ForceLaw::linear().force, &ParamValues::new(), 1.0, 0.1, grid).unwrap_err();
        assert!(matches!(err, PathIntegralError::Algebra(AlgebraError::MissingParameter(_))));
    }

    #[test]
    fn step_list_validation() {
        let grid = Grid::new(-1.0, 1.0, 11).unwrap();
        let psi = WaveFunction::gaussian(grid, 0.0, 0.0, 0.2);
        for bad in [&[][..], &[4, 4][..], &[0, 2][..], &[8, 4][..]] {
            let r = convergence_study(&Polynomial::zero(), &params(), 1.0, &psi, 1.0, bad, Reference::SelfConvergence);
            assert!(matches!(r, Err(PathIntegralError::BadStepList)));
        }
    }
}
