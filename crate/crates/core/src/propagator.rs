//! Exact Gaussian propagators for affine operator flows.
//!
//! When `X(t) = α X0 + β P0 + γ`, the position kernel
//! `U(x_b, x_a) = <x_b|U(t)|x_a>` obeys two first-order equations, one per
//! argument:
//!
//! ```text
//! i ∂U/∂x_a = ((x_b − α x_a − γ)/β) U        (X(t) acting on |x_a>)
//! ```
//!
//! and the mirror relation in `x_b`. Their joint solution is the Gaussian
//! `A exp{i(a x_b² + b x_b x_a + c x_a² + d x_b + e x_a)}` with
//! `a = c = α/(2β)`, `b = −1/β`, `d = e = γ/β`; the amplitude is fixed by
//! the `t → 0` delta-function limit up to a constant phase, taken here as the
//! principal branch of `(2πiβ)^(-1/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::heisenberg::{AffineValues, ForceLaw, FORCE, MASS, OMEGA};
use crate::opalg::ParamValues;
use crate::wavefunction::{Grid, GridError, WaveFunction};

/// `|β(t)|` at or below this is treated as a caustic.
pub const CAUSTIC_EPS: f64 = 1e-12;
/// Largest kernel phase change allowed between neighbouring grid points.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;

// Exact phasors are recomputed every RESYNC columns in evolve_exact; in
// between the column phasor is advanced by one complex multiply.
const RESYNC: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("caustic at t = {t}: |β(t)| = {beta:e} is at or below {CAUSTIC_EPS:e}")]
    CausticSingularity { t: f64, beta: f64 },
    #[error("grid too coarse: kernel phase changes by {phase_step:.4} rad per cell (limit {limit:.4})")]
    GridTooCoarse { phase_step: f64, limit: f64 },
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// The three force laws whose operator flow is exactly affine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Free,
    Harmonic { omega: f64 },
    /// Constant force `F0`.
    Linear { force: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Free => "free",
            Model::Harmonic { .. } => "harmonic",
            Model::Linear { .. } => "linear",
        }
    }
}

/// Closed-form `α(t), β(t), γ(t)` for one of the solvable models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFlowExact {
    pub model: Model,
    pub mass: f64,
}

impl AffineFlowExact {
    pub fn new(model: Model, mass: f64) -> Result<Self, PropagatorError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(PropagatorError::InvalidModel(format!("mass must be > 0, got {mass}")));
        }
        match model {
            Model::Harmonic { omega } if !(omega.is_finite() && omega > 0.0) => {
                return Err(PropagatorError::InvalidModel(format!("omega must be > 0, got {omega}")));
            }
            Model::Linear { force } if !force.is_finite() => {
                return Err(PropagatorError::InvalidModel(format!("force must be finite, got {force}")));
            }
            _ => {}
        }
        Ok(Self { model, mass })
    }

    pub fn free(mass: f64) -> Result<Self, PropagatorError> {
        Self::new(Model::Free, mass)
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self, PropagatorError> {
        Self::new(Model::Harmonic { omega }, mass)
    }

    pub fn linear(mass: f64, force: f64) -> Result<Self, PropagatorError> {
        Self::new(Model::Linear { force }, mass)
    }

    /// Coefficients of `X0`, `P0` and `1` in `X(t)`.
    pub fn values(&self, t: f64) -> AffineValues {
        let m = self.mass;
        match self.model {
            Model::Free => AffineValues { alpha: 1.0, beta: t / m, gamma: 0.0 },
            Model::Harmonic { omega } => {
                let (s, c) = (omega * t).sin_cos();
                AffineValues { alpha: c, beta: s / (m * omega), gamma: 0.0 }
            }
            Model::Linear { force } => AffineValues {
                alpha: 1.0,
                beta: t / m,
                gamma: force * t * t / (2.0 * m),
            },
        }
    }

    /// Coefficients of `X0`, `P0` and `1` in `P(t) = m dX/dt`.
    pub fn momentum_values(&self, t: f64) -> AffineValues {
        let m = self.mass;
        match self.model {
            Model::Free => AffineValues { alpha: 0.0, beta: 1.0, gamma: 0.0 },
            Model::Harmonic { omega } => {
                let (s, c) = (omega * t).sin_cos();
                AffineValues { alpha: -m * omega * s, beta: c, gamma: 0.0 }
            }
            Model::Linear { force } => AffineValues { alpha: 0.0, beta: 1.0, gamma: force * t },
        }
    }

    /// Spatially constant phase separating the Gaussian kernel from the
    /// evolution generated by `P²/2m − ∫F dX`: `U_G = e^{iφ(t)} U_kernel`.
    ///
    /// The first-order kernel equations cannot see this phase. It is zero for
    /// the free particle and the oscillator (`0 < ωt < π`), and
    /// `−F0² t³/(24 m)` for a constant force.
    pub fn reference_phase(&self, t: f64) -> f64 {
        match self.model {
            Model::Linear { force } => -force * force * t.powi(3) / (24.0 * self.mass),
            _ => 0.0,
        }
    }

    /// Symbolic force law with the same parameter names as [`Self::params`].
    pub fn force_law(&self) -> ForceLaw {
        match self.model {
            Model::Free => ForceLaw::free(),
            Model::Harmonic { .. } => ForceLaw::harmonic(),
            Model::Linear { .. } => ForceLaw::linear(),
        }
    }

    pub fn params(&self) -> ParamValues {
        let p = ParamValues::new().with(MASS, self.mass);
        match self.model {
            Model::Free => p,
            Model::Harmonic { omega } => p.with(OMEGA, omega),
            Model::Linear { force } => p.with(FORCE, force),
        }
    }
}

/// `U(x_b, x_a) = A exp{i(a x_b² + b x_b x_a + c x_a² + d x_b + e x_a)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub amplitude: Complex64,
}

impl GaussianKernel {
    pub fn eval(&self, x_b: f64, x_a: f64) -> Complex64 {
        let phase = self.a * x_b * x_b + self.b * x_b * x_a + self.c * x_a * x_a + self.d * x_b + self.e * x_a;
        self.amplitude * (Complex64::i() * phase).exp()
    }

    /// Bound on the phase change of `U` between neighbouring samples of
    /// either argument over the whole grid.
    pub fn max_phase_step(&self, grid: &Grid) -> f64 {
        let x = grid.max_abs_x();
        let along_b = 2.0 * self.a.norm() * x + self.b.norm() * x + self.d.norm();
        let along_a = 2.0 * self.c.norm() * x + self.b.norm() * x + self.e.norm();
        grid.dx * along_b.max(along_a)
    }

    /// The six coefficients in `(a, b, c, d, e, A)` order.
    pub fn coefficients(&self) -> [Complex64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.amplitude]
    }
}

pub fn gaussian_kernel(flow: &AffineFlowExact, t: f64) -> Result<GaussianKernel, PropagatorError> {
    let AffineValues { alpha, beta, gamma } = flow.values(t);
    if beta.is_nan() || beta.abs() <= CAUSTIC_EPS {
        return Err(PropagatorError::CausticSingularity { t, beta });
    }
    let quad = Complex64::new(alpha / (2.0 * beta), 0.0);
    let lin = Complex64::new(gamma / beta, 0.0);
    Ok(GaussianKernel {
        a: quad,
        b: Complex64::new(-1.0 / beta, 0.0),
        c: quad,
        d: lin,
        e: lin,
        amplitude: principal_amplitude(beta),
    })
}

/// `(2πiβ)^(-1/2)` on the principal branch, `q(1 ∓ i)` with
/// `q = (4π|β|)^(-1/2)`; both parts come from one rounding.
fn principal_amplitude(beta: f64) -> Complex64 {
    let q = (4.0 * PI * beta.abs()).sqrt().recip();
    Complex64::new(q, -beta.signum() * q)
}

/// Textbook closed forms of the three propagators, evaluated as printed:
///
/// - free: `(m/2πit)^(1/2) exp{im(x_b − x_a)²/2t}`
/// - harmonic: `(mω/2πi sin ωt)^(1/2) exp{−mω((x_b² + x_a²) cos ωt − 2 x_b x_a)/(2i sin ωt)}`
/// - constant force: `(m/2πit)^(1/2) exp{(im/2t)((x_b − x_a)² + F0 t² (x_b + x_a)/m)}`
///
/// This is an independent route to [`gaussian_kernel`], sharing only the
/// caustic check.
pub fn closed_form_kernel(flow: &AffineFlowExact, t: f64, x_b: f64, x_a: f64) -> Result<Complex64, PropagatorError> {
    let beta = flow.values(t).beta;
    if beta.is_nan() || beta.abs() <= CAUSTIC_EPS {
        return Err(PropagatorError::CausticSingularity { t, beta });
    }
    let m = flow.mass;
    let i = Complex64::i();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let dx = x_b - x_a;
    Ok(match flow.model {
        Model::Free => (Complex64::from(m) / (two_pi_i * t)).sqrt() * (i * m * dx * dx / (2.0 * t)).exp(),
        Model::Harmonic { omega } => {
            let (s, c) = (omega * t).sin_cos();
            let amp = (Complex64::from(m * omega) / (two_pi_i * s)).sqrt();
            let num = -m * omega * ((x_b * x_b + x_a * x_a) * c - 2.0 * x_b * x_a);
            amp * (Complex64::from(num) / (2.0 * i * s)).exp()
        }
        Model::Linear { force } => {
            let amp = (Complex64::from(m) / (two_pi_i * t)).sqrt();
            let bracket = dx * dx + force * t * t * (x_b + x_a) / m;
            amp * (i * m / (2.0 * t) * bracket).exp()
        }
    })
}

/// `ψ_out(x_b) = Σ_a w_a U(x_b, x_a) ψ(x_a)` with trapezoid weights `w_a`,
/// on the input grid.
///
/// Rows are evaluated in parallel; each row sums left to right, so the
/// output does not depend on the thread count.
pub fn evolve_exact(kernel: &GaussianKernel, psi: &WaveFunction) -> Result<WaveFunction, PropagatorError> {
    let grid = *psi.grid();
    let phase_step = kernel.max_phase_step(&grid);
    if phase_step > MAX_PHASE_STEP {
        return Err(PropagatorError::GridTooCoarse {
            phase_step,
            limit: MAX_PHASE_STEP,
        });
    }
    let i = Complex64::i();
    let xs = grid.points();
    let weights = grid.trapezoid_weights();
    // U = A e^{i(a x_b² + d x_b)} · e^{i b x_b x_a} · e^{i(c x_a² + e x_a)}
    let column: Vec<Complex64> = xs
        .iter()
        .zip(psi.samples())
        .zip(&weights)
        .map(|((&x, s), w)| s * *w * (i * (kernel.c * x * x + kernel.e * x)).exp())
        .collect();
    let out: Vec<Complex64> = xs
        .par_iter()
        .map(|&xb| {
            let row = kernel.amplitude * (i * (kernel.a * xb * xb + kernel.d * xb)).exp();
            let rate = i * kernel.b * xb;
            let advance = (rate * grid.dx).exp();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut z = Complex64::new(1.0, 0.0);
            for (j, u) in column.iter().enumerate() {
                if j % RESYNC == 0 {
                    z = (rate * xs[j]).exp();
                }
                acc += z * u;
                z *= advance;
            }
            row * acc
        })
        .collect();
    Ok(WaveFunction::new(grid, out)?)
}
