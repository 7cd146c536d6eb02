//! Conditional phase shift between two single-photon pulses in a spatially
//! nonlocal χ⁽²⁾ medium.
//!
//! Two photons (`b` and `c`) co-propagate at different speeds through a
//! medium whose three-wave-mixing response is nonlocal over a length `σ`.
//! The `b + c → a → b + c` conversion imprints a momentum-dependent phase
//! `2θ(k_b, k_c)` on the joint spectral amplitude; in the limit `τ = σ/σ₀ → 0`,
//! `ατ → 0` the output approaches `−1` times the input, i.e. a π conditional
//! phase shift with unit fidelity.
//!
//! The crate provides three independent routes to the output state:
//!
//! * [`analytic`] — the closed-form asymptotic solution (phase map, complex
//!   fidelity integrals, and order-of-magnitude heuristics),
//! * [`dynamics`] — direct integration of the momentum-space equations of
//!   motion, decomposed into conserved total-momentum sectors,
//! * [`approx`] — the adiabatic-elimination solution valid for `ατ ≪ 1`.
//!
//! Cross-checking the three routes against each other is the point of the
//! artifact; see the `acceptance` integration test and the book under
//! `book/` for a guided tour.
//!
//! ```
//! use phasegate::model::{DimensionlessParams, Scaling};
//! use phasegate::numerics::QuadratureSpec;
//! use phasegate::analytic::complex_fidelity_equal_ab;
//!
//! let params = DimensionlessParams::equal_ab(1.0, 0.01).unwrap();
//! let spec = QuadratureSpec::for_tau(params.tau);
//! let fid = complex_fidelity_equal_ab(&params, &spec).unwrap();
//! // deep in the pi-shift regime the overlap is close to -1
//! assert!((fid.overlap.re + 1.0).abs() < 1e-3);
//! assert!(fid.overlap.im.abs() < 1e-8);
//! ```

pub mod analytic;
pub mod approx;
pub mod dynamics;
pub mod error;
pub mod guide;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64;
