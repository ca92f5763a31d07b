//! Exact symbolic engine for generalized Fischer decompositions and the
//! degree-by-degree normalization of formal embeddings between BSD models
//! `W = Z·Z̄ᵗ`.

pub mod bsd;
pub mod cli;
pub mod error;
pub mod exactalg;
pub mod fischer;
pub mod mapeq;
pub mod polyring;
pub mod selftest;

pub use error::{Error, Result};
pub use exactalg::GaussianRational;
