//! Exact exterior calculus on complex charts and nilmanifolds, Hodge-theoretic
//! potentials, moment-map evaluation for balanced immersions and a spectral
//! complex Monge-Ampère solver on flat tori.

pub mod basis;
pub mod error;
pub mod hodge;
pub mod invariant;
pub mod linalg;
pub mod masolver;
pub mod moment;
pub mod scalar;
pub mod symalg;

pub use error::{Error, ParseError, Result};
pub use scalar::{GaussRat, Scalar};
