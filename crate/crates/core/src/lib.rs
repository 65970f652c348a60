//! Complex-valued trajectories of a charged anisotropic oscillator in a
//! magnetic field: eigenstate velocity fields, RK4 integration, sliding-mode
//! synchronization, and spectral and Lyapunov diagnostics.
//!
//! ```
//! use qchaos::model::{derive_params, Branch, StateField};
//! use qchaos::integrator::{integrate, PhaseState};
//!
//! let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
//! let tr = integrate(&StateField::first_excited(p), PhaseState::new(1.1, 0.0, 1.0, 0.0), 1.0, 1e-3, 10).unwrap();
//! assert_eq!(tr.len(), 101);
//! ```

pub mod cli;
pub mod control;
pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod model;

pub use error::{Error, Result};
