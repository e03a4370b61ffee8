//! Genus-two Szegő kernels built by sewing lower-genus surfaces.

pub mod cli;
pub mod error;
pub mod modular;
pub mod numerics;
pub mod rho_sew;
pub mod epsilon_sew;
pub mod specialfn;

pub use error::{Error, Result};
