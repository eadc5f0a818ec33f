//! Random sampling of mixers as an independent check on the optimizer.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::outcomes::{symmetric_probability, SYMMETRY_TOL};
use super::pattern::ConstraintPattern;
use super::states::BellState;
use crate::error::{Error, Result};
use crate::kraus::UnitaryMixer;
use crate::random::{haar_unitary, stream_rng, StreamRng};

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.01;
const HISTOGRAM_BINS: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Lower edge of the bin.
    pub bin: f64,
    pub count: u64,
}

#[derive(Clone, Debug)]
pub struct ScanSummary {
    pub n_samples: usize,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    /// Sample index of the first maximum.
    pub argmax_index: usize,
    pub argmax_mixer: UnitaryMixer,
    /// Non-empty bins only, ascending.
    pub histogram: Vec<HistogramBin>,
}

fn bin_index(p: f64) -> usize {
    // Values within rounding of a bin edge land in the upper bin, so 1 - 1e-15 counts as 1.
    ((p / HISTOGRAM_BIN_WIDTH + 1e-9).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

pub fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut counts = [0u64; HISTOGRAM_BINS];
    for &v in values {
        counts[bin_index(v)] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| HistogramBin {
            bin: i as f64 / 100.0,
            count: c,
        })
        .collect()
}

fn scan<S>(
    bell: BellState,
    gamma: f64,
    n_samples: usize,
    seed: u64,
    tol: f64,
    sampler: S,
) -> Result<ScanSummary>
where
    S: Fn(&mut StreamRng) -> UnitaryMixer + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mixer = sampler(&mut stream_rng(seed, i as u64));
            symmetric_probability(bell, gamma, &mixer, tol)
        })
        .collect::<Result<_>>()?;

    let mut argmax_index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[argmax_index] {
            argmax_index = i;
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / n_samples as f64;
    Ok(ScanSummary {
        n_samples,
        max: values[argmax_index],
        min,
        mean,
        argmax_index,
        argmax_mixer: sampler(&mut stream_rng(seed, argmax_index as u64)),
        histogram: histogram(&values),
    })
}

/// Symmetric probability over Haar-random mixers.
pub fn brute_force_symmetry_scan(
    bell: BellState,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<ScanSummary> {
    scan(bell, gamma, n_samples, seed, SYMMETRY_TOL, |rng| {
        UnitaryMixer::new(haar_unitary(rng, 4)).expect("Haar samples are unitary")
    })
}

/// Symmetric probability over random mixers that satisfy `pattern`.
pub fn feasible_symmetry_scan(
    bell: BellState,
    gamma: f64,
    pattern: &ConstraintPattern,
    n_samples: usize,
    seed: u64,
) -> Result<ScanSummary> {
    scan(bell, gamma, n_samples, seed, SYMMETRY_TOL, |rng| {
        pattern.sample_mixer(rng)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanStats {
    pub n_samples: usize,
    pub seed: u64,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerStats {
    pub p_opt: f64,
    pub evaluations: usize,
    pub restarts: usize,
    pub budget: usize,
    /// Optimizer is not beaten by the sampler and lies within `agreement_tol` of it.
    pub agreement: bool,
    pub agreement_tol: f64,
}

/// JSON document written by the scan and optimize commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub state: BellState,
    pub gamma: f64,
    pub pattern: ConstraintPattern,
    pub p_max: f64,
    /// Row-major `[re, im]` entries of the maximizing mixer.
    pub mixer: Vec<Complex64>,
    pub histogram: Vec<HistogramBin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerStats>,
}

impl SymmetryReport {
    pub fn from_scan(
        bell: BellState,
        gamma: f64,
        pattern: ConstraintPattern,
        seed: u64,
        summary: &ScanSummary,
    ) -> Self {
        Self {
            state: bell,
            gamma,
            pattern,
            p_max: summary.max,
            mixer: summary.argmax_mixer.matrix().as_slice().to_vec(),
            histogram: summary.histogram.clone(),
            scan: Some(ScanStats {
                n_samples: summary.n_samples,
                seed,
                max: summary.max,
                min: summary.min,
                mean: summary.mean,
            }),
            optimizer: None,
        }
    }
}
