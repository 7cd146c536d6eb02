//! Special functions and quadrature engines used by every other module.
//!
//! Everything here is pure and deterministic: fixed-node rules, fixed
//! summation order, no shared mutable state.

mod faddeeva;
mod quadrature;

pub use faddeeva::{erfc_complex, erfi, faddeeva};
pub use quadrature::{
    gauss_legendre, integrate_1d_complex, integrate_2d, principal_value_1d, QuadratureSpec,
};
