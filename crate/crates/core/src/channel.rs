//! Local pure-dephasing channel on two qubits driven by classical white noise.
//!
//! Each qubit couples to its own stochastic field through `σ_z`. Averaging
//! over the noise multiplies every coherence `ρ_ij` by `γ_A` when the first
//! qubit differs between `|i⟩` and `|j⟩`, and by `γ_B` when the second one
//! does, with `γ = exp(-Γ t / 2)`. Populations are untouched.

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{check_param, Error, Result};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix};
use crate::random::stream_rng;

/// Damping rates of the two local noise fields and the evaluation time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub gamma_rate_a: f64,
    pub gamma_rate_b: f64,
    pub time: f64,
}

impl ChannelParams {
    pub fn new(gamma_rate_a: f64, gamma_rate_b: f64, time: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma_rate_a", gamma_rate_a),
            ("gamma_rate_b", gamma_rate_b),
            ("time", time),
        ] {
            check_param(
                name,
                v,
                v.is_finite() && v >= 0.0,
                "must be finite and >= 0",
            )?;
        }
        Ok(Self {
            gamma_rate_a,
            gamma_rate_b,
            time,
        })
    }

    /// Both qubits see the same damping rate.
    pub fn identical(rate: f64, time: f64) -> Result<Self> {
        Self::new(rate, rate, time)
    }

    pub fn is_identical(&self) -> bool {
        self.gamma_rate_a == self.gamma_rate_b
    }

    pub fn factors(&self) -> DephasingFactors {
        DephasingFactors {
            a: (-self.time * self.gamma_rate_a / 2.0).exp(),
            b: (-self.time * self.gamma_rate_b / 2.0).exp(),
        }
    }
}

/// `γ(t) = exp(-t Γ / 2)`
pub fn gamma_factor(rate: f64, time: f64) -> Result<f64> {
    check_param(
        "rate",
        rate,
        rate.is_finite() && rate >= 0.0,
        "must be finite and >= 0",
    )?;
    check_param(
        "time",
        time,
        time.is_finite() && time >= 0.0,
        "must be finite and >= 0",
    )?;
    Ok((-time * rate / 2.0).exp())
}

/// Per-qubit coherence multipliers.
///
/// Values lie in `[-1, 1]`. The classical channel only produces `(0, 1]`,
/// while the spin-bath decoherence factor with equal amplitudes can swing
/// negative; both are completely positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingFactors {
    pub a: f64,
    pub b: f64,
}

impl DephasingFactors {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_param("gamma_a", a, a.abs() <= 1.0, "must lie in [-1, 1]")?;
        check_param("gamma_b", b, b.abs() <= 1.0, "must lie in [-1, 1]")?;
        Ok(Self { a, b })
    }

    pub fn identical(gamma: f64) -> Result<Self> {
        Self::new(gamma, gamma)
    }

    /// Multiplier applied to entry `(i, j)` in the `|00⟩,|01⟩,|10⟩,|11⟩` basis.
    pub fn attenuation(&self, i: usize, j: usize) -> f64 {
        let mut f = 1.0;
        if (i >> 1) != (j >> 1) {
            f *= self.a;
        }
        if (i & 1) != (j & 1) {
            f *= self.b;
        }
        f
    }
}

/// The dephasing map as a linear map on arbitrary 4×4 matrices.
pub fn dephase_matrix(m: &ComplexMatrix, factors: DephasingFactors) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: 4,
            right: m.dim(),
        });
    }
    let mut out = m.clone();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] *= factors.attenuation(i, j);
        }
    }
    Ok(out)
}

pub fn apply_dephasing(rho0: &DensityMatrix, params: &ChannelParams) -> Result<DensityMatrix> {
    apply_dephasing_factors(rho0, params.factors())
}

pub fn apply_dephasing_factors(
    rho0: &DensityMatrix,
    factors: DephasingFactors,
) -> Result<DensityMatrix> {
    DensityMatrix::new(dephase_matrix(rho0.matrix(), factors)?)
}

/// Sampling settings for [`monte_carlo_dephasing`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseTrajectoryConfig {
    pub n_trajectories: usize,
    pub dt: f64,
    pub seed: u64,
    /// Gyromagnetic ratio. Only `μ·n(t)` enters the dynamics, so the result
    /// does not depend on it.
    pub mu: f64,
}

impl Default for NoiseTrajectoryConfig {
    fn default() -> Self {
        Self {
            n_trajectories: 100_000,
            dt: 0.01,
            seed: 0,
            mu: 1.0,
        }
    }
}

impl NoiseTrajectoryConfig {
    fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::InvalidConfig("n_trajectories must be >= 1".into()));
        }
        check_param(
            "dt",
            self.dt,
            self.dt.is_finite() && self.dt > 0.0,
            "must be > 0",
        )?;
        check_param(
            "mu",
            self.mu,
            self.mu.is_finite() && self.mu > 0.0,
            "must be > 0",
        )?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MonteCarloEstimate {
    pub rho: DensityMatrix,
    /// Largest standard error of the mean over all real and imaginary parts.
    pub stderr: f64,
    /// Row-major `[stderr(re), stderr(im)]` per entry.
    pub entry_stderr: [[f64; 2]; 16],
}

/// Mean of `Re(ρ_ij / ρ0_ij)` over entries that differ in exactly one qubit.
///
/// Under identical rates this estimates `γ` from a dephased state `rho`.
/// Entries with `|ρ0_ij| ≤ 1e-12` are skipped; `None` if none remain.
pub fn single_flip_decay(rho: &ComplexMatrix, rho0: &ComplexMatrix) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..4usize {
        for j in 0..4usize {
            if (i ^ j).count_ones() == 1 && rho0[(i, j)].norm() > 1e-12 {
                sum += (rho[(i, j)] / rho0[(i, j)]).re;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

const CHUNK: usize = 1024;

#[derive(Clone)]
struct Moments {
    sum: [Complex64; 16],
    sum_sq: [[f64; 2]; 16],
}

impl Moments {
    fn zero() -> Self {
        Self {
            sum: [c64(0.0, 0.0); 16],
            sum_sq: [[0.0; 2]; 16],
        }
    }

    fn merge(&mut self, other: &Self) {
        for k in 0..16 {
            self.sum[k] += other.sum[k];
            self.sum_sq[k][0] += other.sum_sq[k][0];
            self.sum_sq[k][1] += other.sum_sq[k][1];
        }
    }
}

/// Accumulated phase `μ ∫ n(t') dt'` built from `steps` Wiener increments.
fn wiener_phase<R: rand::Rng + ?Sized>(
    rng: &mut R,
    increment: Option<&Normal<f64>>,
    steps: usize,
    mu: f64,
) -> f64 {
    match increment {
        Some(dist) => mu * (0..steps).map(|_| dist.sample(rng)).sum::<f64>(),
        None => 0.0,
    }
}

/// Ensemble average of `U ρ U†` over sampled noise realizations.
///
/// Each trajectory integrates the two noise fields as sums of independent
/// Gaussian increments on a grid of `round(t/dt)` steps, so the accumulated
/// phases are exactly `N(0, Γ t)`. Trajectory `i` draws from stream `i`
/// and partial sums are reduced in a fixed order, so the estimate is
/// bit-for-bit reproducible for a given seed.
pub fn monte_carlo_dephasing(
    rho0: &DensityMatrix,
    params: &ChannelParams,
    cfg: &NoiseTrajectoryConfig,
) -> Result<MonteCarloEstimate> {
    cfg.validate()?;
    let n = cfg.n_trajectories;
    if params.time == 0.0 || (params.gamma_rate_a == 0.0 && params.gamma_rate_b == 0.0) {
        return Ok(MonteCarloEstimate {
            rho: rho0.clone(),
            stderr: 0.0,
            entry_stderr: [[0.0; 2]; 16],
        });
    }

    let steps = ((params.time / cfg.dt).round() as usize).max(1);
    let h = params.time / steps as f64;
    let increment = |rate: f64| -> Result<Option<Normal<f64>>> {
        if rate == 0.0 {
            return Ok(None);
        }
        let sd = (rate * h).sqrt() / cfg.mu;
        Normal::new(0.0, sd)
            .map(Some)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    };
    let inc_a = increment(params.gamma_rate_a)?;
    let inc_b = increment(params.gamma_rate_b)?;
    let rho = rho0.matrix();

    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::zero();
            for traj in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = stream_rng(cfg.seed, traj as u64);
                let phi_a = wiener_phase(&mut rng, inc_a.as_ref(), steps, cfg.mu);
                let phi_b = wiener_phase(&mut rng, inc_b.as_ref(), steps, cfg.mu);
                // U = exp(i/2 (Φ_A σ_z⊗I + Φ_B I⊗σ_z)) is diagonal.
                let theta: [f64; 4] = std::array::from_fn(|k| {
                    let s_a = if k >> 1 == 0 { 1.0 } else { -1.0 };
                    let s_b = if k & 1 == 0 { 1.0 } else { -1.0 };
                    0.5 * (phi_a * s_a + phi_b * s_b)
                });
                for i in 0..4 {
                    for j in 0..4 {
                        let v = rho[(i, j)] * Complex64::from_polar(1.0, theta[i] - theta[j]);
                        let k = i * 4 + j;
                        acc.sum[k] += v;
                        acc.sum_sq[k][0] += v.re * v.re;
                        acc.sum_sq[k][1] += v.im * v.im;
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = Moments::zero();
    for p in &partials {
        total.merge(p);
    }

    let nf = n as f64;
    let dof = (n.max(2) - 1) as f64;
    let mut mean = ComplexMatrix::zeros(4)?;
    let mut entry_stderr = [[0.0; 2]; 16];
    let mut stderr = 0.0f64;
    for k in 0..16 {
        let m = total.sum[k] / nf;
        mean[(k / 4, k % 4)] = m;
        let var_re = ((total.sum_sq[k][0] - nf * m.re * m.re) / dof).max(0.0);
        let var_im = ((total.sum_sq[k][1] - nf * m.im * m.im) / dof).max(0.0);
        let se = [(var_re / nf).sqrt(), (var_im / nf).sqrt()];
        stderr = stderr.max(se[0]).max(se[1]);
        entry_stderr[k] = se;
    }

    Ok(MonteCarloEstimate {
        rho: DensityMatrix::new(mean)?,
        stderr,
        entry_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_density_matrix;
    use crate::random::stream_rng;
    use crate::symmetry::BellState;

    #[test]
    fn gamma_factor_values() {
        assert_eq!(gamma_factor(1.0, 0.0).unwrap(), 1.0);
        assert!((gamma_factor(2.0, 1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!(gamma_factor(1.0, 100.0).unwrap() < 1e-20);
        assert!(gamma_factor(-1.0, 1.0).is_err());
        assert!(gamma_factor(1.0, -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(-0.1, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(0.0, 0.0, f64::NAN).is_err());
        assert!(ChannelParams::identical(1.0, 2.0).unwrap().is_identical());
        assert!(!ChannelParams::new(1.0, 2.0, 2.0).unwrap().is_identical());
    }

    #[test]
    fn single_flip_decay_recovers_gamma() {
        let plus = [c64(0.5, 0.0); 4];
        let rho0 = DensityMatrix::from_pure(&plus).unwrap();
        let out =
            apply_dephasing_factors(&rho0, DephasingFactors::identical(0.3).unwrap()).unwrap();
        let g = single_flip_decay(out.matrix(), rho0.matrix()).unwrap();
        assert!((g - 0.3).abs() < 1e-15);
        assert!(single_flip_decay(out.matrix(), BellState::B1.density().matrix()).is_none());
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = stream_rng(21, 0);
        let rho = random_density_matrix(&mut rng);
        let out = apply_dephasing(&rho, &ChannelParams::identical(3.0, 0.0).unwrap()).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn b1_corners_scale_by_gamma_squared() {
        let rho = BellState::B1.density();
        let out = apply_dephasing_factors(&rho, DephasingFactors::identical(0.5).unwrap()).unwrap();
        assert!((out.get(0, 3).re - 0.125).abs() < 1e-15);
        assert!((out.get(3, 0).re - 0.125).abs() < 1e-15);
        assert!((out.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((out.get(3, 3).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn b3_center_scales_by_gamma_squared() {
        for g in [0.0, 0.3, 0.9] {
            let rho = BellState::B3.density();
            let out =
                apply_dephasing_factors(&rho, DephasingFactors::identical(g).unwrap()).unwrap();
            assert!((out.get(1, 2).re - 0.5 * g * g).abs() < 1e-15);
            assert!((out.get(1, 1).re - 0.5).abs() < 1e-15);
            assert!((out.get(2, 2).re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn distinct_rates_follow_qubit_pattern() {
        let p = ChannelParams::new(1.0, 3.0, 0.7).unwrap();
        let f = p.factors();
        let ga = (-0.35f64).exp();
        let gb = (-1.05f64).exp();
        assert!((f.a - ga).abs() < 1e-15 && (f.b - gb).abs() < 1e-15);
        assert_eq!(f.attenuation(0, 1), f.b);
        assert_eq!(f.attenuation(0, 2), f.a);
        assert_eq!(f.attenuation(0, 3), f.a * f.b);
        assert_eq!(f.attenuation(1, 2), f.a * f.b);
        assert_eq!(f.attenuation(1, 3), f.a);
        assert_eq!(f.attenuation(2, 3), f.b);
        assert_eq!(f.attenuation(2, 2), 1.0);
    }

    #[test]
    fn monte_carlo_trivial_cases() {
        let rho = BellState::B1.density();
        let cfg = NoiseTrajectoryConfig {
            n_trajectories: 10,
            ..Default::default()
        };
        let est = monte_carlo_dephasing(&rho, &ChannelParams::identical(1.0, 0.0).unwrap(), &cfg)
            .unwrap();
        assert_eq!(est.rho, rho);
        assert_eq!(est.stderr, 0.0);

        let bad = NoiseTrajectoryConfig {
            n_trajectories: 0,
            ..Default::default()
        };
        assert!(
            monte_carlo_dephasing(&rho, &ChannelParams::identical(1.0, 1.0).unwrap(), &bad)
                .is_err()
        );
    }

    #[test]
    fn monte_carlo_keeps_diagonal_states() {
        let rho = DensityMatrix::maximally_mixed();
        let cfg = NoiseTrajectoryConfig {
            n_trajectories: 2_000,
            ..Default::default()
        };
        let est =
            monte_carlo_dephasing(&rho, &ChannelParams::new(1.0, 2.5, 3.0).unwrap(), &cfg).unwrap();
        assert!(est.rho.matrix().approx_eq(rho.matrix(), 1e-14));
        assert!(est.stderr < 1e-14);
    }

    #[test]
    fn monte_carlo_b1_corner() {
        let rho = BellState::B1.density();
        let cfg = NoiseTrajectoryConfig {
            n_trajectories: 100_000,
            seed: 42,
            ..Default::default()
        };
        let est = monte_carlo_dephasing(&rho, &ChannelParams::identical(1.0, 1.0).unwrap(), &cfg)
            .unwrap();
        let exact = 0.5 * (-1.0f64).exp();
        assert!((est.rho.get(0, 3).norm() - exact).abs() <= 3.0 * est.stderr);
    }

    #[test]
    fn monte_carlo_independent_of_thread_count() {
        let rho = random_density_matrix(&mut stream_rng(1, 1));
        let params = ChannelParams::new(0.7, 1.3, 2.0).unwrap();
        let cfg = NoiseTrajectoryConfig {
            n_trajectories: 5_000,
            seed: 9,
            dt: 0.05,
            mu: 1.0,
        };
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo_dephasing(&rho, &params, &cfg).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| monte_carlo_dephasing(&rho, &params, &cfg).unwrap());
        assert_eq!(serial.rho, parallel.rho);
        assert_eq!(serial.stderr.to_bits(), parallel.stderr.to_bits());
    }

    #[test]
    fn mu_does_not_change_the_channel_statistics() {
        let rho = BellState::B1.density();
        let params = ChannelParams::identical(1.0, 1.0).unwrap();
        let mk = |mu| NoiseTrajectoryConfig {
            n_trajectories: 20_000,
            seed: 3,
            dt: 0.1,
            mu,
        };
        let a = monte_carlo_dephasing(&rho, &params, &mk(1.0)).unwrap();
        let b = monte_carlo_dephasing(&rho, &params, &mk(2.5)).unwrap();
        // Same streams, rescaled increments: identical up to rounding.
        assert!(a.rho.matrix().approx_eq(b.rho.matrix(), 1e-12));
    }
}
