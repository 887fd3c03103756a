use super::rng::PrngStream;
use super::{norm2, UNIT_NORM_TOL};
use crate::error::{Error, Result};

/// Unit-norm sparse vector: strictly increasing support with aligned values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    dim: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(dim: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("signal dimension must be positive".into()));
        }
        if support.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} support indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "support must be strictly increasing".into(),
            ));
        }
        if support.last().is_some_and(|&i| i >= dim) {
            return Err(Error::Parameter(format!(
                "support index out of range for dim {dim}"
            )));
        }
        let norm = norm2(&values);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Precondition(format!(
                "signal norm is {norm}, expected 1"
            )));
        }
        Ok(SparseSignal {
            dim,
            support,
            values,
        })
    }

    /// Keeps the nonzero entries of a dense unit-norm vector.
    pub fn from_dense(x: &[f64]) -> Result<Self> {
        let (support, values) = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        Self::new(x.len(), support, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

/// Uniform support of size `sparsity`, values uniform on the unit sphere of
/// that support (normalized i.i.d. Gaussians).
pub fn random_sparse_unit_signal(
    dim: usize,
    sparsity: usize,
    stream: &mut PrngStream,
) -> Result<SparseSignal> {
    if sparsity == 0 || sparsity > dim {
        return Err(Error::Parameter(format!(
            "sparsity must be in 1..={dim}, got {sparsity}"
        )));
    }
    let mut support = stream.sample_indices(dim, sparsity);
    support.sort_unstable();
    loop {
        let mut values: Vec<f64> = (0..sparsity).map(|_| stream.gaussian()).collect();
        let n = norm2(&values);
        if n > 0.0 {
            values.iter_mut().for_each(|v| *v /= n);
            return SparseSignal::new(dim, support, values);
        }
    }
}
