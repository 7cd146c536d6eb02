//! The user guide, included verbatim from `book/src/`.
//!
//! Each chapter of the mdbook is the doc of a module below, so every code
//! block in the book compiles and runs as a doc-test of this crate — the
//! guide cannot drift from the API.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/analytic.md")]
pub mod analytic {}

#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}

#[doc = include_str!("../../../book/src/approx.md")]
pub mod approx {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
