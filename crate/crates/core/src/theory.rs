//! Closed-form bounds of the 1-bit sensing model.
//!
//! Logarithms are natural. Sample-complexity formulas are ceiled only at the
//! final step. Orthant and quantization-point counts use exact big-integer
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be >= 0, got {v}")))
    }
}

fn check_sparsity(k: u64, n: u64, n_name: &str) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "need 1 <= K <= {n_name}, got K = {k}, {n_name} = {n}"
        )));
    }
    Ok(())
}

fn ceil_count(v: f64) -> u64 {
    v.ceil().max(1.0) as u64
}

/// Worst-case angular error floor of any decoder: `K / (2eM + 2K^{3/2})`.
pub fn lower_bound_error(k: u64, m: u64) -> Result<f64> {
    if k == 0 || m == 0 {
        return Err(Error::Parameter("K and M must be at least 1".into()));
    }
    let (k, m) = (k as f64, m as f64);
    Ok(k / (2.0 * std::f64::consts::E * m + 2.0 * k.powf(1.5)))
}

/// Measurements that separate all sparse unit pairs further apart than
/// `eps_o`: `(2/ε_o)(2K ln N + 4K ln(17/ε_o) + ln(1/η))`.
pub fn measurements_for_consistency(k: u64, n: u64, eps_o: f64, eta: f64) -> Result<u64> {
    check_sparsity(k, n, "N")?;
    check_positive("eps_o", eps_o)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Parameter(format!(
            "eta must be in (0, 1], got {eta}"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let rhs =
        (2.0 / eps_o) * (2.0 * kf * nf.ln() + 4.0 * kf * (17.0 / eps_o).ln() + (1.0 / eta).ln());
    Ok(ceil_count(rhs))
}

fn bese_rhs(k: f64, n: f64, eps: f64, eta: f64) -> f64 {
    (2.0 / (eps * eps)) * (k * n.ln() + 2.0 * k * (35.0 / eps).ln() + (2.0 / eta).ln())
}

fn check_bese_eta(eta: f64) -> Result<()> {
    // ln(2/η) stays non-negative up to η = 2
    if eta > 0.0 && eta <= 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "eta must be in (0, 2], got {eta}"
        )))
    }
}

/// Measurements for a binary ε-stable embedding of `K`-sparse vectors:
/// `(2/ε²)(K ln N + 2K ln(35/ε) + ln(2/η))`.
pub fn measurements_for_bese(k: u64, n: u64, eps: f64, eta: f64) -> Result<u64> {
    check_sparsity(k, n, "N")?;
    check_positive("eps", eps)?;
    check_bese_eta(eta)?;
    Ok(ceil_count(bese_rhs(k as f64, n as f64, eps, eta)))
}

const EPS_BISECT_TOL: f64 = 1e-9;

/// Smallest `ε ∈ (0, 1]` whose embedding requirement is met by `m`
/// measurements, to `1e-9`. Returns 1 when even `ε = 1` needs more.
pub fn bese_epsilon_given_m(k: u64, n: u64, m: u64, eta: f64) -> Result<f64> {
    check_sparsity(k, n, "N")?;
    check_bese_eta(eta)?;
    if m == 0 {
        return Err(Error::Parameter("M must be at least 1".into()));
    }
    let (kf, nf, mf) = (k as f64, n as f64, m as f64);
    let fits = |eps: f64| bese_rhs(kf, nf, eps, eta) <= mf;
    if !fits(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > EPS_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Probability bound `min(1, 2 exp(−2ε²M))` that the Hamming distance of a
/// fixed pair deviates from its angle by more than `ε`.
pub fn concentration_failure_prob(eps: f64, m: u64) -> Result<f64> {
    check_nonneg("eps", eps)?;
    if m == 0 {
        return Err(Error::Parameter("M must be at least 1".into()));
    }
    Ok((2.0 * (-2.0 * eps * eps * m as f64).exp()).min(1.0))
}

/// Expected fraction of signs flipped by `N(0, σ²)` pre-quantization noise:
/// `σ / (2 √(‖x‖² + σ²))`.
pub fn expected_flip_bound(sigma: f64, norm_x: f64) -> Result<f64> {
    check_nonneg("sigma", sigma)?;
    check_nonneg("norm_x", norm_x)?;
    if sigma == 0.0 && norm_x == 0.0 {
        return Err(Error::Parameter(
            "sigma and norm_x cannot both be zero".into(),
        ));
    }
    Ok(0.5 * sigma / (norm_x * norm_x + sigma * sigma).sqrt())
}

/// Angular error bound `σ/(2‖x‖) + γ + ε` for a consistent sparse decoder
/// fed noisy measurements.
pub fn noisy_error_bound(sigma: f64, norm_x: f64, gamma: f64, eps: f64) -> Result<f64> {
    check_nonneg("sigma", sigma)?;
    check_positive("norm_x", norm_x)?;
    check_nonneg("gamma", gamma)?;
    check_nonneg("eps", eps)?;
    Ok(sigma / (2.0 * norm_x) + gamma + eps)
}

fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        BigUint::zero()
    } else {
        binomial(BigUint::from(n), BigUint::from(k))
    }
}

/// Orthants of `R^M` met by a `K`-dimensional subspace: `2 Σ_{l<K} C(M−1, l)`.
pub fn orthant_bound_tight(m: u64, k: u64) -> Result<BigUint> {
    check_sparsity(k, m, "M")?;
    let sum = (0..k).fold(BigUint::zero(), |acc, l| acc + binom(m - 1, l));
    Ok(sum * 2u32)
}

/// Looser closed form `⌊2^K C(M, K) / (M − K + 1)⌋`.
pub fn orthant_bound_simple(m: u64, k: u64) -> Result<BigUint> {
    check_sparsity(k, m, "M")?;
    let pow = BigUint::one() << k;
    Ok(pow * binom(m, k) / BigUint::from(m - k + 1))
}

/// Distinct sign patterns usable by `K`-sparse signals: `2^K C(N,K) C(M,K)`.
pub fn quantization_points_bound(n: u64, m: u64, k: u64) -> Result<BigUint> {
    check_sparsity(k, n.min(m), "min(N, M)")?;
    let pow = BigUint::one() << k;
    Ok(pow * binom(n, k) * binom(m, k))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Real(f64),
    Integer(BigUint),
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Real(v) => write!(f, "{v}"),
            BoundValue::Integer(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundValue::Real(v) => s.serialize_f64(*v),
            BoundValue::Integer(v) => match v.to_u64() {
                Some(small) => s.serialize_u64(small),
                None => s.serialize_str(&v.to_string()),
            },
        }
    }
}

/// One evaluated bound, printed by the `bounds` subcommand as a JSON line.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub value: BoundValue,
    pub formula_citation: String,
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundReport", 4)?;
        st.serialize_field("name", &self.name)?;
        let inputs: BTreeMap<&str, serde_json::Value> = self
            .inputs
            .iter()
            .map(|(k, v)| {
                let val = serde_json::from_str::<serde_json::Number>(v)
                    .map(serde_json::Value::Number)
                    .unwrap_or_else(|_| serde_json::Value::String(v.clone()));
                (k.as_str(), val)
            })
            .collect();
        st.serialize_field("inputs", &inputs)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("formula_citation", &self.formula_citation)?;
        st.end()
    }
}

impl BoundReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("bound reports always serialize")
    }
}

/// Names accepted by [`evaluate`], with their parameter keys.
pub const BOUND_NAMES: &[(&str, &[&str])] = &[
    ("eopt", &["k", "m"]),
    ("m-consistency", &["k", "n", "eps", "eta"]),
    ("m-bese", &["k", "n", "eps", "eta"]),
    ("eps-bese", &["k", "n", "m", "eta"]),
    ("flip-bound", &["sigma", "norm_x"]),
    ("orthant-tight", &["m", "k"]),
    ("orthant-simple", &["m", "k"]),
    ("qpoints", &["n", "m", "k"]),
    ("noisy-bound", &["sigma", "norm_x", "gamma", "eps"]),
    ("conc-fail", &["eps", "m"]),
];

struct Params<'a>(&'a BTreeMap<String, String>);

impl Params<'_> {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parameter(format!("missing parameter {key}")))
    }

    fn int(&self, key: &str) -> Result<u64> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| {
            Error::Parameter(format!("{key} must be a non-negative integer, got {raw:?}"))
        })
    }

    fn real(&self, key: &str) -> Result<f64> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| Error::Parameter(format!("{key} must be a number, got {raw:?}")))
    }
}

/// Evaluates the bound called `name` on string parameters.
pub fn evaluate(name: &str, inputs: &BTreeMap<String, String>) -> Result<BoundReport> {
    let keys = BOUND_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, k)| *k)
        .ok_or_else(|| Error::Parameter(format!("unknown bound {name:?}")))?;
    if let Some(extra) = inputs.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(Error::Parameter(format!(
            "unexpected parameter {extra:?} for {name} (expects {})",
            keys.join(", ")
        )));
    }
    let p = Params(inputs);
    let (value, formula) = match name {
        "eopt" => (
            BoundValue::Real(lower_bound_error(p.int("k")?, p.int("m")?)?),
            "K / (2eM + 2K^(3/2))",
        ),
        "m-consistency" => (
            BoundValue::Integer(
                measurements_for_consistency(
                    p.int("k")?,
                    p.int("n")?,
                    p.real("eps")?,
                    p.real("eta")?,
                )?
                .into(),
            ),
            "ceil((2/eps_o)(2K ln N + 4K ln(17/eps_o) + ln(1/eta)))",
        ),
        "m-bese" => (
            BoundValue::Integer(
                measurements_for_bese(p.int("k")?, p.int("n")?, p.real("eps")?, p.real("eta")?)?
                    .into(),
            ),
            "ceil((2/eps^2)(K ln N + 2K ln(35/eps) + ln(2/eta)))",
        ),
        "eps-bese" => (
            BoundValue::Real(bese_epsilon_given_m(
                p.int("k")?,
                p.int("n")?,
                p.int("m")?,
                p.real("eta")?,
            )?),
            "min eps in (0,1] with (2/eps^2)(K ln N + 2K ln(35/eps) + ln(2/eta)) <= M",
        ),
        "flip-bound" => (
            BoundValue::Real(expected_flip_bound(p.real("sigma")?, p.real("norm_x")?)?),
            "sigma / (2 sqrt(|x|^2 + sigma^2))",
        ),
        "orthant-tight" => (
            BoundValue::Integer(orthant_bound_tight(p.int("m")?, p.int("k")?)?),
            "2 sum_{l=0}^{K-1} C(M-1, l)",
        ),
        "orthant-simple" => (
            BoundValue::Integer(orthant_bound_simple(p.int("m")?, p.int("k")?)?),
            "floor(2^K C(M, K) / (M - K + 1))",
        ),
        "qpoints" => (
            BoundValue::Integer(quantization_points_bound(
                p.int("n")?,
                p.int("m")?,
                p.int("k")?,
            )?),
            "2^K C(N, K) C(M, K)",
        ),
        "noisy-bound" => (
            BoundValue::Real(noisy_error_bound(
                p.real("sigma")?,
                p.real("norm_x")?,
                p.real("gamma")?,
                p.real("eps")?,
            )?),
            "sigma / (2|x|) + gamma + eps",
        ),
        "conc-fail" => (
            BoundValue::Real(concentration_failure_prob(p.real("eps")?, p.int("m")?)?),
            "min(1, 2 exp(-2 eps^2 M))",
        ),
        _ => unreachable!("name validated against BOUND_NAMES"),
    };
    Ok(BoundReport {
        name: name.to_string(),
        inputs: inputs.clone(),
        value,
        formula_citation: formula.to_string(),
    })
}
