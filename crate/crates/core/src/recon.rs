//! Binary Iterative Hard Thresholding and its one-sided objective variants.
//!
//! Each iteration takes a (sub)gradient step on a consistency objective
//! evaluated at `u = y ⊙ Φx`, then keeps the `K` largest coefficients:
//!
//! ```text
//! a = x + τ · d(x)        d = negative (sub)gradient of the objective
//! x = η_K(a)              optionally followed by x / ‖x‖₂
//! ```
//!
//! For the one-sided ℓ1 objective `d(x) = ½ Φᵀ(y − sign(Φx))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{hamming_distance, sign_map, SignVector};
use crate::numerics::{
    hard_threshold, norm2, spectral_norm, unit_normalize, DenseMatrix, SparseSignal,
};

/// Consistency objective minimized by [`biht`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveVariant {
    /// `‖[u]₋‖₁`
    OneSidedL1,
    /// `½‖[u]₋‖₂²`
    OneSidedL2,
    /// `‖[κ1 − u]₊‖₁`, requires `κ > 0`.
    Hinge { kappa: f64 },
    /// Piecewise: `0` for `u ≥ 0`, `|u|` on `[−½, 0)`, `u² + ¼` below `−½`.
    Hybrid,
}

impl ObjectiveVariant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ObjectiveVariant::Hinge { kappa } if !(kappa > 0.0 && kappa.is_finite()) => Err(
                Error::Parameter(format!("hinge margin must be positive, got {kappa}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ObjectiveVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveVariant::OneSidedL1 => f.write_str("l1"),
            ObjectiveVariant::OneSidedL2 => f.write_str("l2"),
            ObjectiveVariant::Hinge { kappa } => write!(f, "hinge:{kappa}"),
            ObjectiveVariant::Hybrid => f.write_str("hybrid"),
        }
    }
}

impl FromStr for ObjectiveVariant {
    type Err = Error;

    /// `l1`, `l2`, `hybrid`, `hinge` (κ = 1) or `hinge:<κ>`.
    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "l1" => ObjectiveVariant::OneSidedL1,
            "l2" => ObjectiveVariant::OneSidedL2,
            "hybrid" => ObjectiveVariant::Hybrid,
            "hinge" => ObjectiveVariant::Hinge { kappa: 1.0 },
            other => {
                let kappa = other
                    .strip_prefix("hinge:")
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parameter(format!("unknown variant {other:?}")))?;
                ObjectiveVariant::Hinge { kappa }
            }
        };
        v.validate()?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BihtConfig {
    pub variant: ObjectiveVariant,
    /// Step size; `None` selects [`default_step`].
    pub tau: Option<f64>,
    pub max_iter: usize,
    pub sphere_projection: bool,
    pub halt_on_consistency: bool,
}

impl Default for BihtConfig {
    fn default() -> Self {
        BihtConfig {
            variant: ObjectiveVariant::OneSidedL1,
            tau: None,
            max_iter: 100,
            sphere_projection: false,
            halt_on_consistency: true,
        }
    }
}

impl BihtConfig {
    pub fn validate(&self) -> Result<()> {
        self.variant.validate()?;
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult {
    /// Unit-norm estimate with at most `K` nonzeros.
    pub estimate: SparseSignal,
    pub iterations_run: usize,
    /// `sign(Φ · estimate)` equals the measurements.
    pub consistent: bool,
    pub final_hamming: f64,
    /// Objective of each iterate, evaluated at its unit normalization.
    pub objective_trace: Vec<f64>,
}

/// Objective value and negative (sub)gradient at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub value: f64,
    pub direction: Vec<f64>,
}

/// Value and per-measurement weights `w` with `direction = Φᵀw`, given `Φx`.
fn objective_terms(variant: ObjectiveVariant, y: &[i8], phi_x: &[f64]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let weights = y
        .iter()
        .zip(phi_x)
        .map(|(&yi, &p)| {
            let yi = f64::from(yi);
            let u = yi * p;
            // sign(0) = -1, so a zero projection violates a +1 measurement
            let violated = u < 0.0 || (p == 0.0 && yi > 0.0);
            match variant {
                ObjectiveVariant::OneSidedL1 => {
                    if u < 0.0 {
                        value -= u;
                    }
                    if violated {
                        yi
                    } else {
                        0.0
                    }
                }
                ObjectiveVariant::OneSidedL2 => {
                    if u < 0.0 {
                        value += 0.5 * u * u;
                        -yi * u
                    } else {
                        0.0
                    }
                }
                ObjectiveVariant::Hinge { kappa } => {
                    if u < kappa {
                        value += kappa - u;
                    }
                    // sign(u - κ) = -1 at u = κ keeps that row active
                    if u <= kappa {
                        yi
                    } else {
                        0.0
                    }
                }
                ObjectiveVariant::Hybrid => {
                    if u < -0.5 {
                        value += u * u + 0.25;
                        -2.0 * u * yi
                    } else {
                        if u < 0.0 {
                            value -= u;
                        }
                        if violated {
                            yi
                        } else {
                            0.0
                        }
                    }
                }
            }
        })
        .collect();
    (value, weights)
}

fn check_dims(y: &SignVector, phi: &DenseMatrix) -> Result<()> {
    if y.len() != phi.rows() {
        return Err(Error::Dimension(format!(
            "{} measurements for a matrix with {} rows",
            y.len(),
            phi.rows()
        )));
    }
    Ok(())
}

/// Evaluates `variant` at `x` and returns its value with a descent direction.
pub fn objective_eval(
    variant: ObjectiveVariant,
    y: &SignVector,
    phi: &DenseMatrix,
    x: &[f64],
) -> Result<Objective> {
    variant.validate()?;
    check_dims(y, phi)?;
    let phi_x = phi.mul_vec(x)?;
    let (value, w) = objective_terms(variant, y.bits(), &phi_x);
    Ok(Objective {
        value,
        direction: phi.tr_mul_vec_unchecked(&w),
    })
}

const STEP_NORM_TOL: f64 = 1e-6;
const STEP_NORM_MAX_ITER: usize = 200;

/// Step size used when none is configured.
///
/// With sphere projection: `1/(√M ‖Φ‖₂)`. Otherwise hinge uses `κ/‖Φ‖₂` and
/// the remaining variants `2/M`.
pub fn default_step(
    variant: ObjectiveVariant,
    sphere_projection: bool,
    phi: &DenseMatrix,
) -> Result<f64> {
    let m = phi.rows() as f64;
    let op_norm = || spectral_norm(phi, STEP_NORM_TOL, STEP_NORM_MAX_ITER);
    let tau = if sphere_projection {
        1.0 / (m.sqrt() * op_norm()?)
    } else if let ObjectiveVariant::Hinge { kappa } = variant {
        kappa / op_norm()?
    } else {
        2.0 / m
    };
    if !tau.is_finite() {
        return Err(Error::Parameter("zero matrix has no default step".into()));
    }
    Ok(tau)
}

struct Candidate {
    x: Vec<f64>,
    inconsistent: bool,
    objective: f64,
}

/// Reconstructs a `sparsity`-sparse unit vector from sign measurements.
///
/// Starts at `x = 0` and runs until the iterate is consistent (when
/// `halt_on_consistency` is set) or `max_iter` steps are done. Returns the
/// best iterate seen: consistent iterates first, then the smallest objective
/// at unit norm, earliest on ties.
pub fn biht(
    y: &SignVector,
    phi: &DenseMatrix,
    sparsity: usize,
    config: &BihtConfig,
) -> Result<ReconResult> {
    config.validate()?;
    check_dims(y, phi)?;
    let n = phi.cols();
    if sparsity == 0 || sparsity > n {
        return Err(Error::Parameter(format!(
            "sparsity must be in 1..={n}, got {sparsity}"
        )));
    }
    let tau = match config.tau {
        Some(t) => t,
        None => default_step(config.variant, config.sphere_projection, phi)?,
    };
    let bits = y.bits();

    let mut x = vec![0.0; n];
    let mut phi_x = vec![0.0; phi.rows()];
    let mut best: Option<Candidate> = None;
    let mut trace = Vec::with_capacity(config.max_iter);
    let mut iterations = 0;

    for iter in 1..=config.max_iter {
        let at_origin = x.iter().all(|&v| v == 0.0);
        // the ℓ2 gradient vanishes at the origin; leave it along the ℓ1 subgradient
        let step_variant = match config.variant {
            ObjectiveVariant::OneSidedL2 if at_origin => ObjectiveVariant::OneSidedL1,
            v => v,
        };
        let (_, w) = objective_terms(step_variant, bits, &phi_x);
        let grad = phi.tr_mul_vec_unchecked(&w);
        let a: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| xi + tau * g).collect();
        x = hard_threshold(&a, sparsity);
        if config.sphere_projection {
            if let Some(u) = unit_normalize(&x) {
                x = u;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration: iter });
        }
        iterations = iter;
        phi_x = phi.mul_vec_unchecked(&x);

        let norm = norm2(&x);
        if norm == 0.0 {
            trace.push(objective_terms(config.variant, bits, &phi_x).0);
            continue;
        }
        let unit_phi_x: Vec<f64> = phi_x.iter().map(|p| p / norm).collect();
        let objective = objective_terms(config.variant, bits, &unit_phi_x).0;
        trace.push(objective);
        let inconsistent = bits.iter().zip(&phi_x).any(|(&b, &p)| (p > 0.0) != (b > 0));

        let better = best
            .as_ref()
            .is_none_or(|b| (inconsistent, objective) < (b.inconsistent, b.objective));
        if better {
            best = Some(Candidate {
                x: x.clone(),
                inconsistent,
                objective,
            });
        }
        if !inconsistent && config.halt_on_consistency {
            break;
        }
    }

    let best = best.ok_or(Error::DegenerateEstimate)?;
    let unit = unit_normalize(&best.x).ok_or(Error::DegenerateEstimate)?;
    let final_hamming = hamming_distance(&sign_map(phi, &unit)?, y)?;
    Ok(ReconResult {
        estimate: SparseSignal::from_dense(&unit)?,
        iterations_run: iterations,
        consistent: final_hamming == 0.0,
        final_hamming,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::angular_distance;
    use crate::numerics::{gaussian_matrix, random_sparse_unit_signal, PrngStream};

    fn sv(bits: &[i8]) -> SignVector {
        SignVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn l1_value_counts_violations() {
        let phi = DenseMatrix::diagonal(&[3.0, -2.0]).unwrap();
        let o = objective_eval(
            ObjectiveVariant::OneSidedL1,
            &sv(&[1, 1]),
            &phi,
            &[1.0, 1.0],
        )
        .unwrap();
        assert_eq!(o.value, 2.0);
    }

    #[test]
    fn consistent_point_is_stationary() {
        let phi = DenseMatrix::diagonal(&[3.0, -2.0]).unwrap();
        let y = sv(&[1, -1]);
        for v in [
            ObjectiveVariant::OneSidedL1,
            ObjectiveVariant::OneSidedL2,
            ObjectiveVariant::Hybrid,
            ObjectiveVariant::Hinge { kappa: 1.0 },
        ] {
            let o = objective_eval(v, &y, &phi, &[1.0, 1.0]).unwrap();
            assert_eq!(o.value, 0.0, "{v}");
            assert_eq!(o.direction, vec![0.0, 0.0], "{v}");
        }
    }

    #[test]
    fn hybrid_piecewise_values() {
        let y = sv(&[1]);
        let phi = DenseMatrix::identity(1).unwrap();
        let at = |u: f64| {
            objective_eval(ObjectiveVariant::Hybrid, &y, &phi, &[u])
                .unwrap()
                .value
        };
        assert_eq!(at(-0.25), 0.25);
        assert_eq!(at(-1.0), 1.25);
        assert_eq!(at(-0.5), 0.5);
        let below = -0.5 - f64::EPSILON;
        assert!((at(below) - 0.5).abs() < 1e-15);
        assert_eq!(at(0.3), 0.0);
    }

    #[test]
    fn l1_subgradient_direction() {
        let phi = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let o =
            objective_eval(ObjectiveVariant::OneSidedL1, &sv(&[1]), &phi, &[-1.0, 0.0]).unwrap();
        assert_eq!(o.direction, vec![1.0, 0.0]);
    }

    #[test]
    fn l2_direction_descends_its_objective() {
        // ½(−2)² at x = (1, 1) with Φ = diag(1, −2), y = (+1, +1)
        let phi = DenseMatrix::diagonal(&[1.0, -2.0]).unwrap();
        let o = objective_eval(
            ObjectiveVariant::OneSidedL2,
            &sv(&[1, 1]),
            &phi,
            &[1.0, 1.0],
        )
        .unwrap();
        assert_eq!(o.value, 2.0);
        assert_eq!(o.direction, vec![0.0, -4.0]);
    }

    #[test]
    fn hinge_margin_is_active() {
        let phi = DenseMatrix::identity(2).unwrap();
        let o = objective_eval(
            ObjectiveVariant::Hinge { kappa: 1.0 },
            &sv(&[1, -1]),
            &phi,
            &[0.5, -3.0],
        )
        .unwrap();
        assert_eq!(o.value, 0.5);
        assert_eq!(o.direction, vec![1.0, 0.0]);
    }

    #[test]
    fn objective_rejects_mismatch() {
        let phi = DenseMatrix::identity(2).unwrap();
        assert!(
            objective_eval(ObjectiveVariant::OneSidedL1, &sv(&[1]), &phi, &[1.0, 1.0]).is_err()
        );
        assert!(objective_eval(ObjectiveVariant::OneSidedL1, &sv(&[1, 1]), &phi, &[1.0]).is_err());
        assert!(objective_eval(
            ObjectiveVariant::Hinge { kappa: 0.0 },
            &sv(&[1, 1]),
            &phi,
            &[1.0, 1.0]
        )
        .is_err());
    }

    #[test]
    fn one_iteration_by_hand() {
        let phi = DenseMatrix::identity(3).unwrap();
        let y = sv(&[1, 1, -1]);
        let cfg = BihtConfig {
            max_iter: 1,
            ..BihtConfig::default()
        };
        let r = biht(&y, &phi, 2, &cfg).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = r.estimate.to_dense();
        assert!((x[0] - h).abs() < 1e-15 && (x[1] - h).abs() < 1e-15 && x[2] == 0.0);
        assert!(r.consistent);
        assert_eq!(r.iterations_run, 1);
    }

    #[test]
    fn zero_sparsity_rejected() {
        let phi = DenseMatrix::identity(3).unwrap();
        let y = sv(&[1, 1, -1]);
        assert!(matches!(
            biht(&y, &phi, 0, &BihtConfig::default()),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            biht(&y, &phi, 4, &BihtConfig::default()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn bad_config_rejected() {
        let phi = DenseMatrix::identity(2).unwrap();
        let y = sv(&[1, 1]);
        let bad_tau = BihtConfig {
            tau: Some(-1.0),
            ..BihtConfig::default()
        };
        assert!(biht(&y, &phi, 1, &bad_tau).is_err());
        let bad_iter = BihtConfig {
            max_iter: 0,
            ..BihtConfig::default()
        };
        assert!(biht(&y, &phi, 1, &bad_iter).is_err());
    }

    #[test]
    fn all_zero_iterates_are_degenerate() {
        let phi = DenseMatrix::identity(2).unwrap();
        let y = sv(&[-1, -1]);
        assert!(matches!(
            biht(&y, &phi, 1, &BihtConfig::default()),
            Err(Error::DegenerateEstimate)
        ));
    }

    #[test]
    fn huge_step_diverges() {
        let phi = gaussian_matrix(20, 5, &mut PrngStream::new(1)).unwrap();
        let x = random_sparse_unit_signal(5, 2, &mut PrngStream::new(2))
            .unwrap()
            .to_dense();
        let y = sign_map(&phi, &x).unwrap();
        let cfg = BihtConfig {
            variant: ObjectiveVariant::OneSidedL2,
            tau: Some(1e300),
            max_iter: 50,
            halt_on_consistency: false,
            ..BihtConfig::default()
        };
        assert!(matches!(
            biht(&y, &phi, 2, &cfg),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn default_step_rules() {
        let phi = gaussian_matrix(1000, 4, &mut PrngStream::new(1)).unwrap();
        assert_eq!(
            default_step(ObjectiveVariant::OneSidedL1, false, &phi).unwrap(),
            0.002
        );

        let col = DenseMatrix::new(100, 1, vec![5.0; 100]).unwrap();
        let t = default_step(ObjectiveVariant::OneSidedL1, true, &col).unwrap();
        assert!((t - 0.002).abs() < 1e-12, "{t}");
        let t = default_step(ObjectiveVariant::Hinge { kappa: 1.0 }, false, &col).unwrap();
        assert!((t - 0.02).abs() < 1e-12, "{t}");
    }

    #[test]
    fn recovers_one_sparse_signal() {
        let (m, n) = (200, 20);
        let phi = gaussian_matrix(m, n, &mut PrngStream::new(3)).unwrap();
        let mut x = vec![0.0; n];
        x[7] = 1.0;
        let y = sign_map(&phi, &x).unwrap();
        let r = biht(&y, &phi, 1, &BihtConfig::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(angular_distance(&x, &r.estimate.to_dense()).unwrap(), 0.0);
    }

    #[test]
    fn result_invariants_across_variants() {
        let (m, n, k) = (300, 60, 4);
        let phi = gaussian_matrix(m, n, &mut PrngStream::new(9)).unwrap();
        let x = random_sparse_unit_signal(n, k, &mut PrngStream::new(10))
            .unwrap()
            .to_dense();
        let y = sign_map(&phi, &x).unwrap();
        for variant in [
            ObjectiveVariant::OneSidedL1,
            ObjectiveVariant::OneSidedL2,
            ObjectiveVariant::Hinge { kappa: 1.0 },
            ObjectiveVariant::Hybrid,
        ] {
            for sphere_projection in [false, true] {
                let cfg = BihtConfig {
                    variant,
                    sphere_projection,
                    ..BihtConfig::default()
                };
                let r = biht(&y, &phi, k, &cfg).unwrap();
                let est = r.estimate.to_dense();
                assert!((norm2(&est) - 1.0).abs() < 1e-12);
                assert!(r.estimate.sparsity() <= k);
                assert_eq!(r.consistent, r.final_hamming == 0.0);
                if r.consistent {
                    assert_eq!(sign_map(&phi, &est).unwrap(), y);
                }
                assert_eq!(r.objective_trace.len(), r.iterations_run);
            }
        }
    }

    #[test]
    fn scale_invariance_of_l1_iterates() {
        let phi = gaussian_matrix(120, 40, &mut PrngStream::new(4)).unwrap();
        let x = random_sparse_unit_signal(40, 3, &mut PrngStream::new(5))
            .unwrap()
            .to_dense();
        let y = sign_map(&phi, &x).unwrap();
        let c = 4.0;
        let cfg = BihtConfig {
            tau: Some(0.01),
            max_iter: 30,
            halt_on_consistency: false,
            ..BihtConfig::default()
        };
        let scaled_cfg = BihtConfig {
            tau: Some(0.01 / c),
            ..cfg.clone()
        };
        let a = biht(&y, &phi, 3, &cfg).unwrap();
        let b = biht(&y, &phi.scaled(c).unwrap(), 3, &scaled_cfg).unwrap();
        assert_eq!(a.estimate, b.estimate);
        for (u, v) in a.objective_trace.iter().zip(&b.objective_trace) {
            assert_eq!(u * c, *v);
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [
            ObjectiveVariant::OneSidedL1,
            ObjectiveVariant::OneSidedL2,
            ObjectiveVariant::Hinge { kappa: 0.5 },
            ObjectiveVariant::Hybrid,
        ] {
            assert_eq!(v.to_string().parse::<ObjectiveVariant>().unwrap(), v);
        }
        assert_eq!(
            "hinge".parse::<ObjectiveVariant>().unwrap(),
            ObjectiveVariant::Hinge { kappa: 1.0 }
        );
        assert!("l3".parse::<ObjectiveVariant>().is_err());
        assert!("hinge:-1".parse::<ObjectiveVariant>().is_err());
    }
}
