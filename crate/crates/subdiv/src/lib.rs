//! Analysis toolkit for level- and parameter-dependent subdivision schemes.
//!
//! The crate models masks through their Laurent symbols with exact rational
//! coefficients, checks sum rules exactly, assembles transition-matrix
//! families restricted to difference subspaces, brackets joint spectral radii
//! with certified lower/upper bounds, and turns those brackets into smoothness
//! statements for stationary and parameter-varying refinement processes.
//!
//! Start with [`presets`] for ready-made schemes, [`regularity::analyze`] for
//! the end-to-end pipeline, and the `examples/` directory for runnable tours
//! of each capability.

pub mod cli;
pub mod engine;
pub mod error;
pub mod exact;
pub mod jsr;
pub mod laurent;
pub mod presets;
pub mod regularity;
pub mod scheme;
pub(crate) mod simplex;
pub mod spectral;
pub mod sumrules;
pub mod transition;

pub use error::{Error, Result};
