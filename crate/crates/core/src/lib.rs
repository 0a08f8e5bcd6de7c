//! Damped harmonic oscillator driven by a periodic train of delta kicks in the
//! spring constant.
//!
//! The classical mode function obeys
//!
//! ```text
//! eps'' + 2*gamma*eps' + omega0^2 * eps - 2*kappa * sum_k delta(t - k*tau) * eps = 0
//! eps(0) = 1,   eps'(0) = i*Omega
//! ```
//!
//! Between kicks the solution is a fixed pair of exponentials `exp(mu1 t)`,
//! `exp(mu2 t)`; each kick is a rank-one jump in the velocity. Propagating the
//! two expansion coefficients across kicks is a product of unimodular 2x2
//! transfer matrices, which collapses to a Chebyshev closed form. The quantity
//! of interest is the squeezing coefficient `K(t) = |eps(t)|^2`: `K < 1` means
//! the coordinate variance of the quantum oscillator has dropped below its
//! initial-state value.
//!
//! Everything analytic is cross-checked against a fixed-step RK4 integration
//! of the same equation with exact velocity jumps at the kick instants.

pub mod cli;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod oscillator;
pub mod sweep;
pub mod tolerances;
pub mod transfer;

pub use error::{Error, Result};
pub use observables::{ModeFunction, TrajectorySample};
pub use oscillator::{DampingRegime, ModeBasis, OscillatorConfig};
pub use sweep::{StabilityCell, StabilityClass, SweepRequest};
pub use transfer::{CoefficientState, TransferMatrix};
