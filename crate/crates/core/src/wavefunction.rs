//! Uniform 1-D grids and sampled wave functions.

use num_complex::Complex64;
use thiserror::Error;

/// Fraction of the total probability allowed in the outermost samples.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-10;
/// Samples per side counted by [`WaveFunction::boundary_mass_fraction`].
pub const BOUNDARY_SAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("a grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid bounds must be finite with x_min < x_max, got [{x_min}, {x_max}]")]
    BadBounds { x_min: f64, x_max: f64 },
    #[error("{samples} samples do not fit a grid of {points} points")]
    SampleCount { samples: usize, points: usize },
    #[error("wave functions live on different grids")]
    GridMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    /// `n` points from `x_min` to `x_max` inclusive.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(GridError::BadBounds { x_min, x_max });
        }
        Ok(Self {
            x_min,
            dx: (x_max - x_min) / (n - 1) as f64,
            n,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn span(&self) -> f64 {
        self.x_max() - self.x_min
    }

    /// Largest `|x|` on the grid.
    pub fn max_abs_x(&self) -> f64 {
        self.x_min.abs().max(self.x_max().abs())
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Trapezoid weights: `dx` inside, `dx/2` at both ends.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.dx; self.n];
        w[0] = 0.5 * self.dx;
        w[self.n - 1] = 0.5 * self.dx;
        w
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self, GridError> {
        if samples.len() != grid.n {
            return Err(GridError::SampleCount {
                samples: samples.len(),
                points: grid.n,
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n).map(|i| f(grid.x(i))).collect();
        Self { grid, samples }
    }

    /// Normalized packet `(π σ²)^(-1/4) exp(-(x-x0)²/(2σ²) + i p0 x)`.
    ///
    /// `sigma` is the amplitude width; the position spread `sqrt(<x²>-<x>²)`
    /// is `sigma/√2`.
    pub fn gaussian(grid: Grid, x0: f64, p0: f64, sigma: f64) -> Self {
        let norm = (std::f64::consts::PI * sigma * sigma).powf(-0.25);
        Self::from_fn(grid, |x| {
            let u = (x - x0) / sigma;
            Complex64::new(-0.5 * u * u, p0 * x).exp() * norm
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scaled(&self, k: Complex64) -> WaveFunction {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s * k).collect(),
        }
    }

    /// `∫|ψ|² dx` by the trapezoid rule.
    pub fn norm_sq(&self) -> f64 {
        self.integrate(|_, s| s.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<x>` normalized by the current norm.
    pub fn mean_x(&self) -> f64 {
        self.integrate(|x, s| x * s.norm_sqr()) / self.norm_sq()
    }

    pub fn variance_x(&self) -> f64 {
        let mean = self.mean_x();
        self.integrate(|x, s| (x - mean).powi(2) * s.norm_sqr()) / self.norm_sq()
    }

    /// Position spread `sqrt(<x²> - <x>²)`.
    pub fn width(&self) -> f64 {
        self.variance_x().sqrt()
    }

    /// `<p> = ∫ ψ* (-i ψ') dx / ∫|ψ|²`, with `ψ'` from sixth-order central
    /// differences. The three samples at each end are skipped.
    pub fn mean_p(&self) -> f64 {
        const C: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        let s = &self.samples;
        let n = s.len();
        if n < 7 {
            return 0.0;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 3..n - 3 {
            let mut d = Complex64::new(0.0, 0.0);
            for (k, c) in C.iter().enumerate() {
                d += (s[i + k + 1] - s[i - k - 1]) * *c;
            }
            d /= self.grid.dx;
            acc += s[i].conj() * d;
        }
        // -i ∫ψ*ψ' dx, real for any normalizable ψ
        (acc * Complex64::new(0.0, -1.0)).re * self.grid.dx / self.norm_sq()
    }

    /// `∫ conj(self) other dx` (trapezoid).
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64, GridError> {
        self.check_same_grid(other)?;
        let w = self.grid.trapezoid_weights();
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .zip(&w)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    /// `‖self - other‖₂` (trapezoid).
    pub fn l2_distance(&self, other: &WaveFunction) -> Result<f64, GridError> {
        self.check_same_grid(other)?;
        let w = self.grid.trapezoid_weights();
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .zip(&w)
            .map(|((a, b), w)| (a - b).norm_sqr() * *w)
            .sum();
        Ok(s.sqrt())
    }

    /// Probability in the [`BOUNDARY_SAMPLES`] outermost samples on either
    /// side, relative to the total.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let n = self.samples.len();
        let k = BOUNDARY_SAMPLES.min(n / 2);
        let left: f64 = self.samples[..k].iter().map(Complex64::norm_sqr).sum();
        let right: f64 = self.samples[n - k..].iter().map(Complex64::norm_sqr).sum();
        let total: f64 = self.samples.iter().map(Complex64::norm_sqr).sum();
        if total == 0.0 {
            return 0.0;
        }
        left.max(right) / total
    }

    pub fn is_boundary_clean(&self) -> bool {
        self.boundary_mass_fraction() < BOUNDARY_MASS_LIMIT
    }

    fn integrate(&self, f: impl Fn(f64, Complex64) -> f64) -> f64 {
        let w = self.grid.trapezoid_weights();
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| f(self.grid.x(i), *s) * w[i])
            .sum()
    }

    fn check_same_grid(&self, other: &WaveFunction) -> Result<(), GridError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(GridError::GridMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert_eq!(Grid::new(0.0, 1.0, 1), Err(GridError::TooFewPoints(1)));
        assert!(matches!(Grid::new(1.0, 0.0, 10), Err(GridError::BadBounds { .. })));
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.dx, 0.5);
        assert_eq!(g.x_max(), 1.0);
        assert_eq!(g.trapezoid_weights(), vec![0.25, 0.5, 0.5, 0.5, 0.25]);
    }

    #[test]
    fn gaussian_moments() {
        let g = Grid::new(-12.0, 12.0, 1201).unwrap();
        let psi = WaveFunction::gaussian(g, 0.7, -1.3, 1.2);
        assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
        assert!((psi.mean_x() - 0.7).abs() < 1e-12);
        assert!((psi.width() - 1.2 / 2f64.sqrt()).abs() < 1e-12);
        assert!((psi.mean_p() + 1.3).abs() < 1e-9);
        assert!(psi.is_boundary_clean());
    }

    #[test]
    fn truncated_packet_is_flagged() {
        let g = Grid::new(-2.0, 2.0, 101).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 0.0, 1.0);
        assert!(!psi.is_boundary_clean());
    }

    #[test]
    fn distance_requires_same_grid() {
        let a = WaveFunction::gaussian(Grid::new(-5.0, 5.0, 101).unwrap(), 0.0, 0.0, 1.0);
        let b = WaveFunction::gaussian(Grid::new(-5.0, 5.0, 103).unwrap(), 0.0, 0.0, 1.0);
        assert_eq!(a.l2_distance(&b), Err(GridError::GridMismatch));
        assert_eq!(a.l2_distance(&a), Ok(0.0));
    }
}
