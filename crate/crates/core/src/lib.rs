//! Shear-stress estimates for a compressible, thin atmospheric boundary layer.
//!
//! The crate follows one pipeline from gas closures to a scalar shear
//! indicator:
//!
//! - [`thermo`]: gas constants, the Crocco temperature relation `T(u)`,
//!   power-law viscosity and the pressure/density closures.
//! - [`transform`]: the Dorodnitzyn coordinates `(ℓ, s)`, the strip variable
//!   `z = s/√ℓ`, the stream function and discrete checks of the
//!   change-of-variables identities.
//! - [`crocco`]: the quasi-linear shear ODE `τ τ'' = -K u σ(u)^(-6/25)`,
//!   solved by shooting and by a finite-difference Newton method.
//! - [`limit`]: the `ε = h/L` rescaling, residuals of the rescaled and limit
//!   equations, and the closed-form estimates `τ* = (U/h) σ₀^(19/25)`.
//! - [`pipeline`]: sounding CSV ingestion, batch evaluation and report
//!   emission used by the `strato-shear` binary.
//!
//! ```
//! use strato_shear::thermo::GasProfile;
//! use strato_shear::limit::tau_star;
//!
//! let profile = GasProfile::paper_atmosphere();
//! let t = tau_star(10.0, 1000.0, &profile.dry, 300.0).unwrap();
//! assert!((t - 9.99874e-3).abs() < 1e-8);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crocco;
pub mod error;
pub mod limit;
pub mod pipeline;
pub mod thermo;
pub mod transform;

pub use error::{Error, Result};
