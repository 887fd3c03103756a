use std::fmt::Write as _;

use super::norm2;
use super::rng::PrngStream;
use crate::error::{Error, Result};

/// Row-major dense matrix of finite `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix shape must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite matrix entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::new(n, n, data)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * c).collect(),
        )
    }

    /// `Φx`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok(self.mul_vec_unchecked(x))
    }

    /// `Φᵀv`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, vector has length {}",
                self.rows,
                v.len()
            )));
        }
        Ok(self.tr_mul_vec_unchecked(v))
    }

    pub(crate) fn mul_vec_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn tr_mul_vec_unchecked(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (row, &w) in self.data.chunks_exact(self.cols).zip(v) {
            if w == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += w * a;
            }
        }
        out
    }

    /// Text form: `rows cols` on the first line, then one row per line with
    /// 17 significant digits per value.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for row in self.data.chunks_exact(self.cols) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let rows = dim("row count")?;
        let cols = dim("column count")?;
        let data = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad value {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, data)
    }
}

/// Text form of a vector: a `len 1` matrix.
pub fn vector_to_text(v: &[f64]) -> Result<String> {
    Ok(DenseMatrix::new(v.len(), 1, v.to_vec())?.to_text())
}

pub fn parse_vector_text(text: &str) -> Result<Vec<f64>> {
    let m = DenseMatrix::parse_text(text)?;
    if m.cols() != 1 {
        return Err(Error::Parse(format!(
            "expected a column vector, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.data)
}

/// `rows x cols` matrix of i.i.d. standard normals, filled row-major.
pub fn gaussian_matrix(rows: usize, cols: usize, stream: &mut PrngStream) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!(
            "matrix shape must be positive, got {rows}x{cols}"
        )));
    }
    let data = (0..rows * cols).map(|_| stream.gaussian()).collect();
    DenseMatrix::new(rows, cols, data)
}

const POWER_START_SEED: u64 = 0x5EED_0F_5EED;

/// Largest singular value by power iteration on `ΦᵀΦ`.
///
/// Stops once the relative change of the estimate drops below `tol` or after
/// `max_iter` iterations. The start vector is a fixed pseudo-random draw.
pub fn spectral_norm(m: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let mut start = PrngStream::new(POWER_START_SEED);
    let mut v: Vec<f64> = (0..m.cols()).map(|_| start.gaussian()).collect();
    let n = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n);

    let mut sigma = 0.0;
    for _ in 0..max_iter.max(1) {
        let w = m.mul_vec_unchecked(&v);
        let next = norm2(&w);
        if next == 0.0 {
            return Ok(0.0);
        }
        let z = m.tr_mul_vec_unchecked(&w);
        let zn = norm2(&z);
        if zn == 0.0 {
            return Ok(next);
        }
        v = z.into_iter().map(|x| x / zn).collect();
        let change = (next - sigma).abs() / next;
        sigma = next;
        if change < tol {
            break;
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_matrix_is_reproducible() {
        let a = gaussian_matrix(2, 3, &mut PrngStream::new(7)).unwrap();
        let b = gaussian_matrix(2, 3, &mut PrngStream::new(7)).unwrap();
        assert_eq!(a, b);
        let one = gaussian_matrix(1, 1, &mut PrngStream::new(7)).unwrap();
        assert!(one.get(0, 0).is_finite());
    }

    #[test]
    fn gaussian_matrix_moments() {
        let m = gaussian_matrix(1000, 1000, &mut PrngStream::new(7)).unwrap();
        let n = m.data().len() as f64;
        let mean = m.data().iter().sum::<f64>() / n;
        let var = m.data().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn gaussian_matrix_rejects_empty_shape() {
        let mut s = PrngStream::new(1);
        assert!(matches!(
            gaussian_matrix(0, 3, &mut s),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            gaussian_matrix(3, 0, &mut s),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn new_rejects_bad_data() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn products() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(m.mul_vec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(m.tr_mul_vec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        assert!(m.mul_vec(&[1.0]).is_err());
        assert!(m.tr_mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn spectral_norm_simple_cases() {
        let tol = 1e-10;
        let id = DenseMatrix::identity(3).unwrap();
        assert!((spectral_norm(&id, tol, 1000).unwrap() - 1.0).abs() < 1e-9);
        let d = DenseMatrix::diagonal(&[5.0, 1.0]).unwrap();
        assert!((spectral_norm(&d, tol, 1000).unwrap() - 5.0).abs() < 1e-8);
        let z = DenseMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert_eq!(spectral_norm(&z, tol, 100).unwrap(), 0.0);
        assert!(spectral_norm(&id, 0.0, 10).is_err());
    }

    #[test]
    fn spectral_norm_matches_svd() {
        let m = gaussian_matrix(50, 100, &mut PrngStream::new(11)).unwrap();
        let est = spectral_norm(&m, 1e-13, 100_000).unwrap();
        let na = nalgebra::DMatrix::from_row_slice(50, 100, m.data());
        let svd = na.singular_values();
        let exact = svd.iter().cloned().fold(0.0, f64::max);
        assert!((est - exact).abs() / exact < 1e-6, "{est} vs {exact}");
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = gaussian_matrix(3, 4, &mut PrngStream::new(3)).unwrap();
        let back = DenseMatrix::parse_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
        let v = vec![0.1, -2.0 / 3.0, 1e-300];
        assert_eq!(parse_vector_text(&vector_to_text(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn parse_text_errors() {
        assert!(DenseMatrix::parse_text("").is_err());
        assert!(DenseMatrix::parse_text("2 2\n1 2 3").is_err());
        assert!(DenseMatrix::parse_text("1 1\nabc").is_err());
        assert!(parse_vector_text("1 2\n1 2").is_err());
    }
}
