//! Brute-force references for checking the fast paths on tiny instances.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::measurement::{hamming_distance, orthant_pattern, sign_map, SignVector};
use crate::numerics::{dot, norm2, DenseMatrix, PrngStream};

const MAX_ORACLE_DIM: usize = 12;
const MAX_ORACLE_SPARSITY: usize = 2;
const RANK_TOL: f64 = 1e-10;

/// Sphere grid used by [`brute_force_decoder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Equispaced angles per 2-sparse support circle.
    pub points_per_dimension: usize,
    /// Scan every candidate (counting all consistent ones) instead of
    /// stopping at the first consistent point.
    pub supports_enumerated: bool,
}

impl GridSpec {
    pub fn new(points_per_dimension: usize) -> Result<Self> {
        let g = GridSpec {
            points_per_dimension,
            supports_enumerated: true,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.points_per_dimension < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 grid points, got {}",
                self.points_per_dimension
            )));
        }
        Ok(())
    }

    /// Angular spacing of the 2-sparse grid, `2π / points`.
    pub fn resolution(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.points_per_dimension as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub estimate: Vec<f64>,
    pub consistent_found: bool,
    /// Hamming distance between the estimate's signs and the measurements.
    pub hamming: f64,
    /// Consistent candidates seen. Exact only with `supports_enumerated`.
    pub consistent_candidates: usize,
}

/// Fails when the columns of `basis` are numerically dependent.
fn check_full_column_rank(basis: &DenseMatrix) -> Result<()> {
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(basis.cols());
    for j in 0..basis.cols() {
        let mut c = basis.column(j);
        let scale = norm2(&c);
        for q in &ortho {
            let p = dot(&c, q);
            c.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
        }
        let n = norm2(&c);
        if scale == 0.0 || n <= RANK_TOL * scale {
            return Err(Error::Parameter(format!(
                "basis column {j} is linearly dependent"
            )));
        }
        ortho.push(c.into_iter().map(|v| v / n).collect());
    }
    Ok(())
}

/// Distinct orthants hit by `basis · c` over `n_samples` Gaussian `c`.
///
/// A lower bound on the number of orthants the column span intersects.
/// Samples are drawn sequentially, so a smaller `n_samples` on the same
/// stream sees a prefix of the same points.
pub fn sampled_orthant_count(
    basis: &DenseMatrix,
    n_samples: usize,
    stream: &mut PrngStream,
) -> Result<usize> {
    if n_samples == 0 {
        return Err(Error::Parameter("n_samples must be at least 1".into()));
    }
    check_full_column_rank(basis)?;
    let mut seen: HashSet<SignVector> = HashSet::new();
    for _ in 0..n_samples {
        let c: Vec<f64> = (0..basis.cols()).map(|_| stream.gaussian()).collect();
        seen.insert(orthant_pattern(&basis.mul_vec(&c)?));
    }
    Ok(seen.len())
}

fn candidates(n: usize, sparsity: usize, points: usize) -> Box<dyn Iterator<Item = Vec<f64>>> {
    if sparsity == 1 {
        Box::new((0..n).flat_map(move |j| {
            [1.0, -1.0].into_iter().map(move |s| {
                let mut x = vec![0.0; n];
                x[j] = s;
                x
            })
        }))
    } else {
        let step = 2.0 * std::f64::consts::PI / points as f64;
        Box::new((0..n).flat_map(move |i| {
            (i + 1..n).flat_map(move |j| {
                (0..points).map(move |t| {
                    let (s, c) = (t as f64 * step).sin_cos();
                    let mut x = vec![0.0; n];
                    x[i] = c;
                    x[j] = s;
                    x
                })
            })
        }))
    }
}

/// Grid search for a consistent `sparsity`-sparse unit vector.
///
/// Candidates are visited support by support in lexicographic order; a
/// 1-sparse support contributes `+e_j` then `−e_j`, a 2-sparse support
/// `points_per_dimension` equispaced points on its unit circle. Returns the
/// first consistent candidate, or the first candidate of minimal Hamming
/// distance when none is consistent.
pub fn brute_force_decoder(
    y: &SignVector,
    phi: &DenseMatrix,
    sparsity: usize,
    grid: &GridSpec,
) -> Result<BruteForceResult> {
    grid.validate()?;
    if sparsity == 0 || sparsity > MAX_ORACLE_SPARSITY {
        return Err(Error::Tractability(format!(
            "sparsity {sparsity} outside 1..={MAX_ORACLE_SPARSITY}"
        )));
    }
    if phi.cols() > MAX_ORACLE_DIM {
        return Err(Error::Tractability(format!(
            "{} columns exceeds the limit of {MAX_ORACLE_DIM}",
            phi.cols()
        )));
    }
    if sparsity > phi.cols() {
        return Err(Error::Parameter(format!(
            "sparsity {sparsity} exceeds dimension {}",
            phi.cols()
        )));
    }
    if y.len() != phi.rows() {
        return Err(Error::Dimension(format!(
            "{} measurements for a matrix with {} rows",
            y.len(),
            phi.rows()
        )));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut first_consistent: Option<Vec<f64>> = None;
    let mut consistent_candidates = 0;
    for x in candidates(phi.cols(), sparsity, grid.points_per_dimension) {
        let d = hamming_distance(&sign_map(phi, &x)?, y)?;
        if d == 0.0 {
            consistent_candidates += 1;
            if first_consistent.is_none() {
                first_consistent = Some(x);
                if !grid.supports_enumerated {
                    break;
                }
            }
        } else if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, x));
        }
    }

    Ok(match first_consistent {
        Some(estimate) => BruteForceResult {
            estimate,
            consistent_found: true,
            hamming: 0.0,
            consistent_candidates,
        },
        None => {
            let (hamming, estimate) = best.expect("at least one candidate");
            BruteForceResult {
                estimate,
                consistent_found: false,
                hamming,
                consistent_candidates: 0,
            }
        }
    })
}

/// Central difference `(f(x + h d) − f(x − h d)) / 2h` along unit `d`.
pub fn finite_difference_direction<F>(
    objective: F,
    x: &[f64],
    direction: &[f64],
    h: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    if x.len() != direction.len() {
        return Err(Error::Dimension(
            "point and direction lengths differ".into(),
        ));
    }
    if (norm2(direction) - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("direction must have unit norm".into()));
    }
    let shifted =
        |s: f64| -> Vec<f64> { x.iter().zip(direction).map(|(a, d)| a + s * d).collect() };
    Ok((objective(&shifted(h)) - objective(&shifted(-h))) / (2.0 * h))
}
