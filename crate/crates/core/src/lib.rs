//! Hermitian positive Jordan triple systems of type I and products thereof,
//! the Kähler geometry of the associated bounded symmetric domains and of their
//! compact duals, and the symplectic duality map between them.

pub mod commands;
pub mod concordance;
pub mod duality;
pub mod error;
pub mod geometry;
pub mod io;
pub mod jts;
pub mod numerics;
pub mod report;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use jts::{Domain, Element, Factor};
pub use spectral::SpectralDecomposition;
