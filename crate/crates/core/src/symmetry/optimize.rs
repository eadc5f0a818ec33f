//! Maximizing the symmetric-outcome probability over feasible Kraus mixers.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::outcomes::{symmetric_probability, SYMMETRY_TOL};
use super::pattern::ConstraintPattern;
use super::states::BellState;
use crate::error::{check_param, Error, Result};
use crate::kraus::UnitaryMixer;
use crate::random::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Total objective evaluations, split evenly over the restarts.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Symmetry classification tolerance.
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            budget: 60_000,
            restarts: 12,
            seed: 0,
            tol: SYMMETRY_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub p_max: f64,
    pub mixer: UnitaryMixer,
    pub evaluations: usize,
}

/// Gradient-free maximization of [`symmetric_probability`] over mixers obeying `pattern`.
///
/// Each restart runs Nelder–Mead from a random point of the feasible
/// parametrization, then re-runs it from the result with a small simplex.
/// Restart `k` uses random stream `k`; the best result (lowest restart index
/// on ties) wins.
pub fn maximize_symmetric_probability(
    bell: BellState,
    gamma: f64,
    pattern: &ConstraintPattern,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    if cfg.budget == 0 {
        return Err(Error::InvalidConfig("optimizer budget must be >= 1".into()));
    }
    check_param(
        "gamma",
        gamma,
        (0.0..=1.0).contains(&gamma),
        "must lie in [0, 1]",
    )?;
    let restarts = cfg.restarts.clamp(1, cfg.budget);
    let per_restart = cfg.budget / restarts;
    let n = pattern.n_params();

    let objective = |x: &[f64]| -> f64 {
        let mixer = pattern.mixer_from_params(x);
        // Mixers are unitary by construction; a failure here is a bug.
        -symmetric_probability(bell, gamma, &mixer, cfg.tol).expect("feasible mixer")
    };

    let runs: Vec<(f64, Vec<f64>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, k as u64);
            let x0: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let coarse = per_restart / 2;
            let (x1, _, e1) = nelder_mead(&objective, &x0, 0.5, coarse.max(1));
            let (x2, f2, e2) = nelder_mead(&objective, &x1, 1e-2, (per_restart - coarse).max(1));
            (f2, x2, e1 + e2)
        })
        .collect();

    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best_f, best_x, _) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    Ok(OptimizationResult {
        p_max: -best_f,
        mixer: pattern.mixer_from_params(&best_x),
        evaluations,
    })
}

/// Adaptive Nelder–Mead minimizer. Returns `(x, f(x), evaluations)`.
pub(crate) fn nelder_mead<F>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    while evals.get() < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= 1e-15 && size <= 1e-9 {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf)
            .collect();
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = towards(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = towards(gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = towards(alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = towards(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *fx = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals.get())
}
