//! Numerical laboratory for spacelike stationary surfaces in Lorentz 4-space.

pub mod error;
pub mod mfun;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub mod config;
pub mod wdata;
pub mod ends;
pub mod curv;
pub mod locus;
pub mod catalog;
pub mod analysis;
pub mod mesh;
pub mod intersect;
pub mod suite;

pub use config::Config;
