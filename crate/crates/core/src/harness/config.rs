use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recon::{BihtConfig, ObjectiveVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ErrorDecay,
    ConsistencyScatter,
    NoiseFlipSweep,
    ConcentrationCheck,
    NoiseSigmaCheck,
}

impl ExperimentKind {
    /// Stable id used to derive the experiment's random stream.
    pub fn stream_id(self) -> u64 {
        match self {
            ExperimentKind::ErrorDecay => 0,
            ExperimentKind::ConsistencyScatter => 1,
            ExperimentKind::NoiseFlipSweep => 2,
            ExperimentKind::ConcentrationCheck => 3,
            ExperimentKind::NoiseSigmaCheck => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ErrorDecay => "error_decay",
            ExperimentKind::ConsistencyScatter => "consistency_scatter",
            ExperimentKind::NoiseFlipSweep => "noise_flip_sweep",
            ExperimentKind::ConcentrationCheck => "concentration_check",
            ExperimentKind::NoiseSigmaCheck => "noise_sigma_check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-experiment overrides of the reconstruction settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BihtOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_projection: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halt_on_consistency: Option<bool>,
}

impl BihtOverrides {
    pub fn apply(&self, variant: ObjectiveVariant) -> BihtConfig {
        let d = BihtConfig::default();
        BihtConfig {
            variant,
            tau: self.tau.or(d.tau),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            sphere_projection: self.sphere_projection.unwrap_or(d.sphere_projection),
            halt_on_consistency: self.halt_on_consistency.unwrap_or(d.halt_on_consistency),
        }
    }
}

fn default_variants() -> Vec<ObjectiveVariant> {
    vec![ObjectiveVariant::OneSidedL1]
}

/// One Monte-Carlo sweep. Unknown JSON keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// Measurement counts as multiples of `N`, rounded half-up.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_over_n_grid: Vec<f64>,
    /// Explicit measurement counts; exclusive with `m_over_n_grid`.
    #[serde(rename = "M_grid", default, skip_serializing_if = "Vec::is_empty")]
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default = "default_variants")]
    pub variants: Vec<ObjectiveVariant>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flip_fractions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub biht: BihtOverrides,
}

/// Half-up rounding of a non-negative product to a count.
pub fn round_half_up(v: f64) -> usize {
    (v + 0.5).floor() as usize
}

impl ExperimentConfig {
    /// A config with only the required fields set.
    pub fn new(
        experiment: ExperimentKind,
        n: usize,
        k: usize,
        trials: usize,
        base_seed: u64,
    ) -> Self {
        ExperimentConfig {
            experiment,
            n,
            k,
            m_over_n_grid: Vec::new(),
            m_grid: Vec::new(),
            trials,
            base_seed,
            variants: default_variants(),
            flip_fractions: Vec::new(),
            sigmas: Vec::new(),
            biht: BihtOverrides::default(),
        }
    }

    /// Measurement counts of the sweep, in grid order.
    pub fn measurement_counts(&self) -> Vec<usize> {
        if !self.m_grid.is_empty() {
            self.m_grid.clone()
        } else {
            self.m_over_n_grid
                .iter()
                .map(|r| round_half_up(r * self.n as f64))
                .collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("{}: {msg}", self.experiment)));
        if self.n == 0 {
            return fail("N must be positive".into());
        }
        if self.k == 0 || self.k > self.n {
            return fail(format!("K must be in 1..={}, got {}", self.n, self.k));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if !self.m_grid.is_empty() && !self.m_over_n_grid.is_empty() {
            return fail("give either m_over_n_grid or M_grid, not both".into());
        }
        if self
            .m_over_n_grid
            .iter()
            .any(|r| !(*r > 0.0 && r.is_finite()))
        {
            return fail("m_over_n_grid values must be positive".into());
        }
        if self.measurement_counts().contains(&0) {
            return fail("every grid point must give at least one measurement".into());
        }
        if self.flip_fractions.iter().any(|f| !(0.0..=0.5).contains(f)) {
            return fail("flip fractions must lie in [0, 0.5]".into());
        }
        if self.sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return fail("sigmas must be non-negative".into());
        }
        for v in &self.variants {
            v.validate()?;
            self.biht.apply(*v).validate()?;
        }
        match self.experiment {
            ExperimentKind::ErrorDecay | ExperimentKind::ConsistencyScatter => {
                if self.variants.is_empty() {
                    return fail("at least one variant is required".into());
                }
            }
            ExperimentKind::NoiseFlipSweep => {
                for need in [ObjectiveVariant::OneSidedL1, ObjectiveVariant::OneSidedL2] {
                    if !self.variants.contains(&need) {
                        return fail(format!("variants must include {need}"));
                    }
                }
                if self.flip_fractions.is_empty() {
                    return fail("flip_fractions is empty".into());
                }
            }
            ExperimentKind::NoiseSigmaCheck => {
                if self.sigmas.is_empty() {
                    return fail("sigmas is empty".into());
                }
            }
            ExperimentKind::ConcentrationCheck => {}
        }
        Ok(())
    }
}

/// Parses a config document: one experiment object or an array of them.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let configs = match value {
        serde_json::Value::Array(items) => items
            .into_iter()
            .map(serde_json::from_value)
            .collect::<std::result::Result<Vec<ExperimentConfig>, _>>(
        ),
        other => serde_json::from_value(other).map(|c| vec![c]),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
