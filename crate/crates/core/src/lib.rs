//! Newtonian route to one-dimensional quantum dynamics.
//!
//! - [`opalg`]: exact operator algebra under `[X,P] = i`.
//! - [`heisenberg`]: evolution generator from force and velocity laws,
//!   operator time derivatives and truncated Taylor flows.
//! - [`propagator`]: Gaussian kernels for affine flows and wavepacket
//!   evolution by quadrature.
//! - [`pathint`]: time-sliced real-time path integral on a grid.

pub mod opalg;
pub mod heisenberg;
pub mod pathint;
pub mod propagator;
pub mod wavefunction;
