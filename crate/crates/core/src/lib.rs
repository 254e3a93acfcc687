//! Exact computation of K-theoretic stable envelopes for GKM torus actions,
//! with the toric interpolation engine behind them, attractive-bundle and
//! resonance bookkeeping, and the combinatorics of the nodal degeneration.

pub mod cli;
pub mod degeneration;
pub mod envelope;
pub mod error;
pub mod exact_algebra;
pub mod gkm_model;
pub mod lattice_geometry;
pub mod toric_interpolation;

pub use error::{Error, Result};
