//! Finite Toeplitz matrices generated by the Fisher-Hartwig symbol
//! a(z) = (z-1)^{2α} z^{β-α} e^{-i(α+β)π}: exact and asymptotic eigenpairs,
//! disorder sweeps, rank-1 perturbations, free-probability densities and
//! localization measures.

pub mod disorder;
pub mod eigen;
pub mod error;
pub mod export;
pub mod freeprob;
pub mod localization;
pub mod perturbation;
pub mod rank1;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod symbol;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use symbol::{Momentum, SymbolParams};
