//! Dimension-free Remez certification, Bohnenblust–Hille scans and
//! low-degree learning for functions on `Z_K^n` and observables on qudits.

pub mod bh;
pub mod config;
pub mod cyclic_fourier;
pub mod error;
pub mod l2di;
pub mod learn;
pub mod linalg;
pub mod qudit_algebra;
pub mod remez;
pub mod rng;
pub mod states;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
