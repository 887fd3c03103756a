//! Random generation, dense matrices and the sparsity projection.

mod matrix;
mod rng;
mod signal;

pub use matrix::{gaussian_matrix, parse_vector_text, spectral_norm, vector_to_text, DenseMatrix};
pub use rng::PrngStream;
pub use signal::{random_sparse_unit_signal, SparseSignal};

/// Absolute tolerance on `‖x‖₂ = 1` for unit signals.
pub const UNIT_NORM_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Best `sparsity`-term approximation: keeps the largest magnitudes and
/// zeroes the rest. Equal magnitudes keep the lower index. A `sparsity`
/// at least the length returns `v` unchanged.
pub fn hard_threshold(v: &[f64], sparsity: usize) -> Vec<f64> {
    if sparsity >= v.len() {
        return v.to_vec();
    }
    let mut out = vec![0.0; v.len()];
    if sparsity == 0 {
        return out;
    }
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.select_nth_unstable_by(sparsity - 1, |&a, &b| {
        v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b))
    });
    for &i in &idx[..sparsity] {
        out[i] = v[i];
    }
    out
}

/// `v / ‖v‖₂`, or `None` for the zero vector.
pub fn unit_normalize(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm2(v);
    if n > 0.0 {
        Some(v.iter().map(|x| x / n).collect())
    } else {
        None
    }
}
