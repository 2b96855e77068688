//! Discrete Dorodnitzyn coordinates, the strip map and the stream function.
//!
//! Fields live on uniform grids over `[0, L] × [0, h]`. Quadrature is the
//! composite trapezoid rule and derivatives are centred differences, so every
//! check in this module is second-order accurate in the grid spacing.

mod field;
mod identity;
mod map;
mod stream;

pub use field::ScalarField;
pub use identity::{momentum_identity_check, IdentityResiduals, Polynomial, SmoothProfile};
pub use map::{blasius_z, build_map, ell_coordinate, s_coordinate, strip_jacobian, DorodnitzynMap};
pub use stream::{
    default_divergence_tolerance, divergence_residual, stream_function, stream_function_along,
    stream_function_with_tolerance, two_path_discrepancy, IntegrationPath,
};
