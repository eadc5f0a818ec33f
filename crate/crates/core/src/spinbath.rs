//! Two central spins, each coupled diagonally to its own bath of
//! non-interacting spins.
//!
//! Tracing out bath `n` multiplies coherences between `|↑⟩` and `|↓⟩` of
//! central spin `n` by the decoherence factor
//! `r_n(t) = Π_k (|α_k|² e^{-2iω_k t} + |β_k|² e^{2iω_k t})`.
//! Basis order is `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`, identified with `|00⟩ … |11⟩`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::channel::{apply_dephasing_factors, DephasingFactors};
use crate::error::{check_param, Error, Result};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix};
use crate::random::stream_rng;
use crate::symmetry::BellState;

pub const NORMALIZATION_TOL: f64 = 1e-12;

/// One bath spin: initial amplitudes and coupling frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpin {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub omega: f64,
}

impl BathSpin {
    /// `|α|² e^{-2iωt} + |β|² e^{2iωt}`, with the weights divided by their
    /// sum so that the factor is exactly 1 at `t = 0` despite rounding in
    /// `|α|² + |β|²`.
    pub fn factor(&self, t: f64) -> Complex64 {
        let phase = 2.0 * self.omega * t;
        let (a, b) = (self.alpha.norm_sqr(), self.beta.norm_sqr());
        (Complex64::from_polar(a, -phase) + Complex64::from_polar(b, phase)) / (a + b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RawBathSpec {
    label: String,
    spins: Vec<BathSpin>,
}

/// A validated bath. JSON form:
/// `{"label": str, "spins": [{"alpha": [re, im], "beta": [re, im], "omega": num}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBathSpec", into = "RawBathSpec")]
pub struct BathSpec {
    label: String,
    spins: Vec<BathSpin>,
}

impl BathSpec {
    pub fn new(label: impl Into<String>, spins: Vec<BathSpin>) -> Result<Self> {
        for (index, s) in spins.iter().enumerate() {
            let norm = s.alpha.norm_sqr() + s.beta.norm_sqr();
            if (norm - 1.0).abs() > NORMALIZATION_TOL || !norm.is_finite() {
                return Err(Error::UnnormalizedSpin { index, norm });
            }
            check_param("omega", s.omega, s.omega.is_finite(), "must be finite")?;
        }
        Ok(Self {
            label: label.into(),
            spins,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spins(&self) -> &[BathSpin] {
        &self.spins
    }

    /// True when every spin starts with `|α_k| = |β_k|`.
    pub fn has_equal_amplitudes(&self) -> bool {
        self.spins
            .iter()
            .all(|s| (s.alpha.norm_sqr() - s.beta.norm_sqr()).abs() <= NORMALIZATION_TOL)
    }
}

impl TryFrom<RawBathSpec> for BathSpec {
    type Error = Error;
    fn try_from(raw: RawBathSpec) -> Result<Self> {
        Self::new(raw.label, raw.spins)
    }
}

impl From<BathSpec> for RawBathSpec {
    fn from(b: BathSpec) -> Self {
        Self {
            label: b.label,
            spins: b.spins,
        }
    }
}

/// Initial pure state `a↑↑|↑↑⟩ + a↑↓|↑↓⟩ + a↓↑|↓↑⟩ + a↓↓|↓↓⟩` of the central spins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralState {
    amplitudes: [Complex64; 4],
}

impl CentralState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::UnnormalizedState(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn bell(b: BellState) -> Self {
        Self {
            amplitudes: b.vector(),
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes).expect("normalized by construction")
    }
}

pub fn decoherence_factor(bath: &BathSpec, t: f64) -> Result<Complex64> {
    check_param("t", t, t.is_finite() && t >= 0.0, "must be finite and >= 0")?;
    Ok(bath
        .spins
        .iter()
        .fold(c64(1.0, 0.0), |acc, s| acc * s.factor(t)))
}

/// Coherence multiplier of one central spin between the bit values `x` and `y`.
fn spin_coherence(r: Complex64, x: usize, y: usize) -> Complex64 {
    match (x, y) {
        (0, 1) => r,
        (1, 0) => r.conj(),
        _ => c64(1.0, 0.0),
    }
}

/// Reduced state of the central spins after tracing out both baths.
pub fn reduced_density(
    bath_a: &BathSpec,
    bath_b: &BathSpec,
    psi0: &CentralState,
    t: f64,
) -> Result<DensityMatrix> {
    let r1 = decoherence_factor(bath_a, t)?;
    let r2 = decoherence_factor(bath_b, t)?;
    let a = &psi0.amplitudes;
    let mut rho = ComplexMatrix::zeros(4)?;
    for i in 0..4 {
        for j in 0..4 {
            let f = spin_coherence(r1, i >> 1, j >> 1) * spin_coherence(r2, i & 1, j & 1);
            rho[(i, j)] = a[i] * a[j].conj() * f;
        }
    }
    DensityMatrix::new(rho.hermitian_part())
}

/// Two copies of the same bath.
pub fn identical_bath(spec: &BathSpec) -> (BathSpec, BathSpec) {
    (spec.clone(), spec.clone())
}

/// Classical-channel counterpart of identical equal-amplitude baths.
///
/// Fails unless `r(t)` is real, which holds exactly when every spin has
/// `|α_k| = |β_k|`.
pub fn equivalent_dephasing(bath: &BathSpec, psi0: &CentralState, t: f64) -> Result<DensityMatrix> {
    let r = decoherence_factor(bath, t)?;
    if r.im.abs() > 1e-13 {
        return Err(Error::InvalidConfig(format!(
            "decoherence factor {r} is not real; no single-γ dephasing equivalent"
        )));
    }
    apply_dephasing_factors(
        &psi0.density(),
        DephasingFactors::identical(r.re.clamp(-1.0, 1.0))?,
    )
}

/// Range of coupling frequencies for [`random_bath_in`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyRange {
    pub min: f64,
    pub max: f64,
}

impl Default for FrequencyRange {
    fn default() -> Self {
        Self { min: 0.0, max: 1.0 }
    }
}

pub fn random_bath(n_spins: usize, seed: u64, equal_amplitudes: bool) -> Result<BathSpec> {
    random_bath_in(n_spins, seed, equal_amplitudes, FrequencyRange::default())
}

/// Random bath: `ω_k` uniform in `range`; amplitudes either `1/√2` each, or
/// `|α_k|²` uniform on `[0, 1]` with independent uniform phases.
pub fn random_bath_in(
    n_spins: usize,
    seed: u64,
    equal_amplitudes: bool,
    range: FrequencyRange,
) -> Result<BathSpec> {
    if n_spins == 0 {
        return Err(Error::InvalidConfig("n_spins must be >= 1".into()));
    }
    if !(range.min.is_finite() && range.max.is_finite() && range.min <= range.max) {
        return Err(Error::InvalidConfig(format!(
            "invalid frequency range [{}, {}]",
            range.min, range.max
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let omega_dist = Uniform::new_inclusive(range.min, range.max)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let spins = (0..n_spins)
        .map(|_| {
            let omega = omega_dist.sample(&mut rng);
            let (alpha, beta) = if equal_amplitudes {
                let s = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                (s, s)
            } else {
                let p: f64 = rng.random();
                let phase_a = rng.random::<f64>() * std::f64::consts::TAU;
                let phase_b = rng.random::<f64>() * std::f64::consts::TAU;
                (
                    Complex64::from_polar(p.sqrt(), phase_a),
                    Complex64::from_polar((1.0 - p).sqrt(), phase_b),
                )
            };
            BathSpin { alpha, beta, omega }
        })
        .collect();
    let kind = if equal_amplitudes { "equal" } else { "random" };
    BathSpec::new(format!("random-{kind}-n{n_spins}-seed{seed}"), spins)
}
