//! 1-bit compressive sensing.
//!
//! Signals are observed only through the signs of random Gaussian
//! projections, `y = sign(Φx)`, and recovered with Binary Iterative Hard
//! Thresholding (BIHT) and its one-sided objective variants. The crate also
//! evaluates the closed-form recovery bounds of the model, provides
//! brute-force oracles for tiny instances, and runs reproducible
//! Monte-Carlo sweeps that emit CSV.
//!
//! Conventions used everywhere: `sign(0) = -1`, angular distances are
//! normalized to `[0, 1]`, and all logarithms are natural.

pub mod error;
pub mod harness;
pub mod measurement;
pub mod numerics;
pub mod oracle;
pub mod recon;
pub mod theory;

pub use error::{Error, Result};
pub use measurement::{
    angular_distance, flip_signs, hamming_distance, noisy_sign_map, orthant_pattern,
    reconstruction_snr, sign_map, SignVector, SNR_CAP_DB,
};
pub use numerics::{
    gaussian_matrix, hard_threshold, random_sparse_unit_signal, spectral_norm, unit_normalize,
    DenseMatrix, PrngStream, SparseSignal,
};
pub use recon::{biht, default_step, objective_eval, BihtConfig, ObjectiveVariant, ReconResult};
