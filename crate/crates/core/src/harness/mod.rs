//! Monte-Carlo sweeps over random instances, emitted as CSV.
//!
//! Every trial owns a seed derived from
//! `(base_seed, experiment, grid_index, trial_index)`; the instance drawn
//! from that seed uses sub-stream 0 for `Φ`, 1 for the signal and 2 for
//! noise or sign flips. Trials run in parallel, but rows are always emitted
//! grid-major, then by trial index, then by variant.

mod config;
mod record;

use rand::RngCore;
use rayon::prelude::*;

pub use config::{
    load_config, parse_config, round_half_up, BihtOverrides, ExperimentConfig, ExperimentKind,
};
pub use record::{emit_csv, parse_csv, to_csv_string, TrialRecord, CSV_HEADER};

use crate::error::Result;
use crate::measurement::{
    angular_distance, flip_signs, hamming_distance, noisy_sign_map, reconstruction_snr, sign_map,
    SignVector, SNR_CAP_DB,
};
use crate::numerics::{gaussian_matrix, random_sparse_unit_signal, DenseMatrix, PrngStream};
use crate::recon::{biht, BihtConfig};

const PHI_STREAM: u64 = 0;
const SIGNAL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
/// Sub-stream of an experiment holding its fixed signal pair.
const PAIR_STREAM: u64 = u64::MAX;
const NO_VARIANT: &str = "none";

/// Seed of trial `trial_index` at grid point `grid_index`.
pub fn trial_seed(
    base_seed: u64,
    kind: ExperimentKind,
    grid_index: usize,
    trial_index: usize,
) -> u64 {
    PrngStream::new(base_seed)
        .derive(kind.stream_id())
        .derive(grid_index as u64)
        .derive(trial_index as u64)
        .next_u64()
}

struct Instance {
    phi: DenseMatrix,
    x: Vec<f64>,
    y: SignVector,
}

fn draw_instance(m: usize, n: usize, k: usize, seed: u64) -> Result<Instance> {
    let root = PrngStream::new(seed);
    let phi = gaussian_matrix(m, n, &mut root.derive(PHI_STREAM))?;
    let x = random_sparse_unit_signal(n, k, &mut root.derive(SIGNAL_STREAM))?.to_dense();
    let y = sign_map(&phi, &x)?;
    Ok(Instance { phi, x, y })
}

struct RecordBase<'a> {
    experiment: &'a str,
    m: usize,
    n: usize,
    k: usize,
    trial_index: usize,
    seed: u64,
}

/// Reconstructs from `measured` and scores against the clean signal; the
/// Hamming error is taken against `measured`.
fn reconstruct(
    base: &RecordBase<'_>,
    inst: &Instance,
    measured: &SignVector,
    config: &BihtConfig,
    flips_applied: usize,
) -> Result<TrialRecord> {
    let r = biht(measured, &inst.phi, base.k, config)?;
    let est = r.estimate.to_dense();
    Ok(TrialRecord {
        experiment: base.experiment.to_string(),
        variant: config.variant.to_string(),
        m: base.m,
        n: base.n,
        k: base.k,
        trial_index: base.trial_index,
        seed: base.seed,
        angular_error: angular_distance(&inst.x, &est)?,
        hamming_error: r.final_hamming,
        snr_db: reconstruction_snr(&inst.x, &est)?,
        iterations: r.iterations_run,
        consistent: r.consistent,
        flips_applied,
        sigma: 0.0,
    })
}

/// Draws a fresh `Φ` and signal from `seed`, measures, and reconstructs.
pub fn run_trial(
    m: usize,
    n: usize,
    k: usize,
    config: &BihtConfig,
    seed: u64,
) -> Result<TrialRecord> {
    let inst = draw_instance(m, n, k, seed)?;
    let base = RecordBase {
        experiment: "trial",
        m,
        n,
        k,
        trial_index: 0,
        seed,
    };
    reconstruct(&base, &inst, &inst.y, config, 0)
}

/// Runs `trial(grid_index, trial_index, seed)` over the whole grid in
/// parallel and concatenates the rows in deterministic order.
fn sweep<F>(cfg: &ExperimentConfig, grid_len: usize, trial: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(usize, usize, u64) -> Result<Vec<TrialRecord>> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..grid_len)
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();
    let chunks = jobs
        .par_iter()
        .map(|&(g, t)| trial(g, t, trial_seed(cfg.base_seed, cfg.experiment, g, t)))
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<TrialRecord> = chunks.into_iter().flatten().collect();
    for r in &table {
        r.validate()?;
    }
    Ok(table)
}

fn run_reconstruction_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let ms = cfg.measurement_counts();
    let name = cfg.experiment.name();
    sweep(cfg, ms.len(), |g, t, seed| {
        let m = ms[g];
        let inst = draw_instance(m, cfg.n, cfg.k, seed)?;
        let base = RecordBase {
            experiment: name,
            m,
            n: cfg.n,
            k: cfg.k,
            trial_index: t,
            seed,
        };
        cfg.variants
            .iter()
            .map(|v| reconstruct(&base, &inst, &inst.y, &cfg.biht.apply(*v), 0))
            .collect()
    })
}

/// Mean angular error versus measurement count.
pub fn run_error_decay(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_reconstruction_sweep(cfg)
}

/// Per-trial Hamming and angular errors at fixed measurement ratios.
pub fn run_consistency_scatter(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_reconstruction_sweep(cfg)
}

/// Flips `round(f·M)` measurement signs and reconstructs with every variant.
/// Grid points enumerate measurement counts, then flip fractions.
pub fn run_noise_flip_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let ms = cfg.measurement_counts();
    let fs = &cfg.flip_fractions;
    let name = cfg.experiment.name();
    sweep(cfg, ms.len() * fs.len(), |g, t, seed| {
        let (m, f) = (ms[g / fs.len()], fs[g % fs.len()]);
        let inst = draw_instance(m, cfg.n, cfg.k, seed)?;
        let flips = round_half_up(f * m as f64).min(m);
        let noisy = flip_signs(
            &inst.y,
            flips,
            &mut PrngStream::new(seed).derive(NOISE_STREAM),
        )?;
        let base = RecordBase {
            experiment: name,
            m,
            n: cfg.n,
            k: cfg.k,
            trial_index: t,
            seed,
        };
        cfg.variants
            .iter()
            .map(|v| reconstruct(&base, &inst, &noisy, &cfg.biht.apply(*v), flips))
            .collect()
    })
}

/// The experiment's fixed pair of unit signals.
pub fn concentration_pair(cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut s = PrngStream::new(cfg.base_seed)
        .derive(cfg.experiment.stream_id())
        .derive(PAIR_STREAM);
    let x = random_sparse_unit_signal(cfg.n, cfg.k, &mut s)?.to_dense();
    let y = random_sparse_unit_signal(cfg.n, cfg.k, &mut s)?.to_dense();
    Ok((x, y))
}

/// Hamming distance between the measurements of a fixed pair, one fresh
/// `Φ` per trial; `angular_error` holds the pair's angular distance.
pub fn run_concentration_check(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let ms = cfg.measurement_counts();
    let (x, s) = concentration_pair(cfg)?;
    let angle = angular_distance(&x, &s)?;
    let snr = reconstruction_snr(&x, &s)?;
    sweep(cfg, ms.len(), |g, t, seed| {
        let m = ms[g];
        let phi = gaussian_matrix(m, cfg.n, &mut PrngStream::new(seed).derive(PHI_STREAM))?;
        let d = hamming_distance(&sign_map(&phi, &x)?, &sign_map(&phi, &s)?)?;
        Ok(vec![TrialRecord {
            experiment: cfg.experiment.name().to_string(),
            variant: NO_VARIANT.to_string(),
            m,
            n: cfg.n,
            k: cfg.k,
            trial_index: t,
            seed,
            angular_error: angle,
            hamming_error: d,
            snr_db: snr,
            iterations: 0,
            consistent: d == 0.0,
            flips_applied: 0,
            sigma: 0.0,
        }])
    })
}

/// Fraction of signs flipped by pre-quantization noise of each `sigma`.
/// Grid points enumerate measurement counts, then sigmas.
pub fn run_noise_sigma_check(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let ms = cfg.measurement_counts();
    let sigmas = &cfg.sigmas;
    sweep(cfg, ms.len() * sigmas.len(), |g, t, seed| {
        let (m, sigma) = (ms[g / sigmas.len()], sigmas[g % sigmas.len()]);
        let inst = draw_instance(m, cfg.n, cfg.k, seed)?;
        let mut noise = PrngStream::new(seed).derive(NOISE_STREAM);
        let noisy = noisy_sign_map(&inst.phi, &inst.x, sigma, &mut noise)?;
        let d = hamming_distance(&noisy, &inst.y)?;
        Ok(vec![TrialRecord {
            experiment: cfg.experiment.name().to_string(),
            variant: NO_VARIANT.to_string(),
            m,
            n: cfg.n,
            k: cfg.k,
            trial_index: t,
            seed,
            angular_error: 0.0,
            hamming_error: d,
            snr_db: SNR_CAP_DB,
            iterations: 0,
            consistent: d == 0.0,
            flips_applied: 0,
            sigma,
        }])
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::ErrorDecay => run_error_decay(cfg),
        ExperimentKind::ConsistencyScatter => run_consistency_scatter(cfg),
        ExperimentKind::NoiseFlipSweep => run_noise_flip_sweep(cfg),
        ExperimentKind::ConcentrationCheck => run_concentration_check(cfg),
        ExperimentKind::NoiseSigmaCheck => run_noise_sigma_check(cfg),
    }
}

/// Runs each experiment in turn and concatenates their tables.
pub fn run_suite(configs: &[ExperimentConfig]) -> Result<Vec<TrialRecord>> {
    let mut table = Vec::new();
    for c in configs {
        table.extend(run_experiment(c)?);
    }
    Ok(table)
}
