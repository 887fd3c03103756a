//! Sign measurements and the distances used to score reconstructions.
//!
//! `sign(0) = -1` throughout: a measurement is `+1` only when the projection
//! is strictly positive.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{dot, DenseMatrix, PrngStream};

/// SNR reported when the reconstruction error is negligible.
pub const SNR_CAP_DB: f64 = 300.0;

const UNIT_INPUT_TOL: f64 = 1e-9;

/// Vector of ±1 measurement bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

#[inline]
fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else {
        -1
    }
}

impl SignVector {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::Parameter(format!(
                "sign entry {pos} is {}, expected +1 or -1",
                bits[pos]
            )));
        }
        Ok(SignVector(bits))
    }

    pub fn from_values(z: &[f64]) -> Self {
        SignVector(z.iter().map(|&v| sign(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| f64::from(b)).collect()
    }

    /// Text form: the length on the first line, then one `1` or `-1` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.len());
        for b in &self.0 {
            out.push_str(if *b > 0 { "1\n" } else { "-1\n" });
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let len: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing sign vector length".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad sign vector length: {e}")))?;
        let bits = tokens
            .map(|t| match t {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad sign {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if bits.len() != len {
            return Err(Error::Parse(format!(
                "header says {len} signs, found {}",
                bits.len()
            )));
        }
        Ok(SignVector(bits))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `A(x) = sign(Φx)`.
pub fn sign_map(phi: &DenseMatrix, x: &[f64]) -> Result<SignVector> {
    Ok(SignVector::from_values(&phi.mul_vec(x)?))
}

/// `sign(Φx + n)` with `n` i.i.d. `N(0, sigma²)`.
pub fn noisy_sign_map(
    phi: &DenseMatrix,
    x: &[f64],
    sigma: f64,
    stream: &mut PrngStream,
) -> Result<SignVector> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("sigma must be >= 0, got {sigma}")));
    }
    let mut z = phi.mul_vec(x)?;
    if sigma > 0.0 {
        for v in &mut z {
            *v += sigma * stream.gaussian();
        }
    }
    Ok(SignVector::from_values(&z))
}

/// Negates exactly `count` entries chosen uniformly without replacement.
pub fn flip_signs(y: &SignVector, count: usize, stream: &mut PrngStream) -> Result<SignVector> {
    if count > y.len() {
        return Err(Error::Parameter(format!(
            "cannot flip {count} of {} signs",
            y.len()
        )));
    }
    let mut bits = y.0.clone();
    for i in stream.sample_indices(y.len(), count) {
        bits[i] = -bits[i];
    }
    Ok(SignVector(bits))
}

/// Fraction of positions where `a` and `b` differ.
pub fn hamming_distance(a: &SignVector, b: &SignVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "sign vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("empty sign vectors".into()));
    }
    let diff = a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count();
    Ok(diff as f64 / a.len() as f64)
}

/// `arccos⟨x, s⟩ / π` for unit vectors.
pub fn angular_distance(x: &[f64], s: &[f64]) -> Result<f64> {
    if x.len() != s.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            x.len(),
            s.len()
        )));
    }
    for (name, v) in [("x", x), ("s", s)] {
        let n = dot(v, v).sqrt();
        if (n - 1.0).abs() > UNIT_INPUT_TOL {
            return Err(Error::Precondition(format!(
                "{name} has norm {n}, expected 1"
            )));
        }
    }
    if x == s {
        return Ok(0.0);
    }
    Ok(dot(x, s).clamp(-1.0, 1.0).acos() / std::f64::consts::PI)
}

/// `10 log₁₀(‖x‖² / ‖x − x*‖²)` in dB, capped at [`SNR_CAP_DB`].
pub fn reconstruction_snr(x: &[f64], xstar: &[f64]) -> Result<f64> {
    if x.len() != xstar.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            x.len(),
            xstar.len()
        )));
    }
    let signal = dot(x, x);
    if signal == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    let err: f64 = x.iter().zip(xstar).map(|(a, b)| (a - b) * (a - b)).sum();
    if err.sqrt() < 1e-15 * signal.sqrt() {
        return Ok(SNR_CAP_DB);
    }
    Ok((10.0 * (signal / err).log10()).min(SNR_CAP_DB))
}

/// Sign pattern identifying the orthant that contains `z`.
pub fn orthant_pattern(z: &[f64]) -> SignVector {
    SignVector::from_values(z)
}
