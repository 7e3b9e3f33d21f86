//! Simulation toolkit for the quantum Brownian motion of two coupled
//! harmonic oscillators symmetrically coupled in position and momentum to a
//! bosonic bath at zero temperature.
//!
//! The toolkit is organized around a single memory coefficient `F(t)` that
//! drives both the exact convolution-less master equation and the linear and
//! nonlinear quantum-state-diffusion (QSD) trajectory unravelings:
//!
//! - [`bath`]: spectral densities, correlation kernels and colored complex
//!   Gaussian noise realizations.
//! - [`coefficients`]: the Riccati-governed coefficient `F(t)`, its closed
//!   form for Lorentzian baths and a Volterra solver for general kernels.
//! - [`hilbert`]: truncated two-mode Fock-space operators and state
//!   preparation.
//! - [`master`]: the time-local master equation driven by `F(t)`.
//! - [`qsd`]: linear and nonlinear NMQSD trajectories and ensemble averages.
//! - [`gaussian`]: covariance matrices, symplectic spectra, logarithmic
//!   negativity and second-moment propagation.
//! - [`observables`]: scalar diagnostics (entanglement, coherence, energy,
//!   purity, trace distance).
//! - [`control`]: time-dependent coupling schedules and resonance sweeps.
//! - [`config`] / [`driver`]: experiment configuration, run dispatch and
//!   CSV/manifest output used by the `nmqsd` binary.

pub mod bath;
pub mod coefficients;
pub mod config;
pub mod control;
pub mod driver;
pub mod error;
pub mod gaussian;
pub mod hilbert;
pub mod master;
pub mod observables;
pub mod qsd;
pub mod sparse;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix (column-major).
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
