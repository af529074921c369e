//! Nonlocal transport-diffusion on the circle `S¹ = ℝ/ℤ`:
//!
//! ```text
//! ∂_t f = D ∂_θθ f + ∂_θ((V ∗ f) f)
//! ```
//!
//! with an odd interaction kernel `V`. The crate integrates the Fourier
//! system, solves for stationary profiles by fixed-point iteration, analyses
//! linear stability of constant and multi-peak states and evaluates local
//! statistics of densities.

pub mod error;
pub mod fourier;
pub mod kernel;
pub mod measures;
pub mod peaks;
pub mod rng;
pub mod spectral;
pub mod stability;
pub mod stationary;

pub use error::{Error, Result};
pub use kernel::InteractionKernel;
pub use measures::{CircleInterval, Extremum, ExtremumKind, GridFunction};
pub use peaks::PeakConfiguration;
pub use spectral::{SolverConfig, SpectralState};
pub use stationary::{IterationOutcome, IterationProblem, IterationStatus};
