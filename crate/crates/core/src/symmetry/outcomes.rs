//! Post-map outcome states for each operator of a Kraus decomposition.

use num_complex::Complex64;

use super::pattern::ConstraintPattern;
use super::states::{classify, BellState, SymmetryClass};
use crate::error::Result;
use crate::kraus::{canonical_kraus, mix_kraus, KrausFactors, KrausSet, UnitaryMixer};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix};

/// Default tolerance on the asymmetry norm when classifying outcomes.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Outcomes less likely than this have no well-defined normalized state.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct OutcomeReport {
    /// 1-based index `μ` of the Kraus operator `E_μ`.
    pub outcome_index: usize,
    pub probability: f64,
    /// `E_μ ρ₀ E_μ† / p_μ`; `None` when the outcome is negligible.
    pub state: Option<DensityMatrix>,
    pub symmetry_class: Option<SymmetryClass>,
    pub asymmetry: Option<f64>,
}

impl OutcomeReport {
    pub fn is_negligible(&self) -> bool {
        self.state.is_none()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_class == Some(SymmetryClass::Symmetric)
    }
}

/// Outcome states of an arbitrary initial state under an arbitrary Kraus set.
pub fn outcomes_for_set(
    rho0: &DensityMatrix,
    set: &KrausSet,
    tol: f64,
) -> Result<Vec<OutcomeReport>> {
    set.operators()
        .iter()
        .enumerate()
        .map(|(mu, e)| {
            let m = e.sandwich(rho0.matrix())?;
            let probability = m.trace().re;
            if probability < NEGLIGIBLE_PROBABILITY {
                return Ok(OutcomeReport {
                    outcome_index: mu + 1,
                    probability,
                    state: None,
                    symmetry_class: None,
                    asymmetry: None,
                });
            }
            let state = DensityMatrix::new(m.scale_real(1.0 / probability).hermitian_part())?;
            let (class, asym) = classify(&state, tol);
            Ok(OutcomeReport {
                outcome_index: mu + 1,
                probability,
                state: Some(state),
                symmetry_class: Some(class),
                asymmetry: Some(asym),
            })
        })
        .collect()
}

/// Outcomes of a Bell state under the canonical set at `gamma` mixed by `mixer`.
pub fn outcome_analysis(
    bell: BellState,
    gamma: f64,
    mixer: &UnitaryMixer,
    tol: f64,
) -> Result<Vec<OutcomeReport>> {
    let set = mix_kraus(&canonical_kraus(gamma)?, mixer)?;
    outcomes_for_set(&bell.density(), &set, tol)
}

/// Total probability of outcomes classified symmetric.
pub fn symmetric_probability(
    bell: BellState,
    gamma: f64,
    mixer: &UnitaryMixer,
    tol: f64,
) -> Result<f64> {
    Ok(outcome_analysis(bell, gamma, mixer, tol)?
        .iter()
        .filter(|o| o.is_symmetric())
        .fold(0.0, |acc, o| acc + o.probability))
}

/// Diagonal of `E_μ = Σ_j u_μj K_j` for the canonical set, written out entrywise.
pub fn mixed_kraus_diagonal(f: &KrausFactors, mixer: &UnitaryMixer, row: usize) -> [Complex64; 4] {
    let u = |j: usize| mixer.entry(row, j);
    let w = f.omega / 2f64.sqrt();
    let (a, b) = (f.alpha / 2.0, f.beta / 2.0);
    [
        -u(0) * w + u(2) * a + u(3) * b,
        -u(1) * w - u(2) * a + u(3) * b,
        u(1) * w - u(2) * a + u(3) * b,
        u(0) * w + u(2) * a + u(3) * b,
    ]
}

/// `(e, f)`: the `|00⟩` and `|11⟩` amplitudes picked up by `B1`/`B2`.
pub fn corner_amplitudes(
    f: &KrausFactors,
    mixer: &UnitaryMixer,
    row: usize,
) -> (Complex64, Complex64) {
    let d = mixed_kraus_diagonal(f, mixer, row);
    (d[0], d[3])
}

/// `(r, s)`: the `|01⟩` and `|10⟩` amplitudes picked up by `B3`.
pub fn central_amplitudes(
    f: &KrausFactors,
    mixer: &UnitaryMixer,
    row: usize,
) -> (Complex64, Complex64) {
    let d = mixed_kraus_diagonal(f, mixer, row);
    (d[1], d[2])
}

/// Closed-form probability and (unnormalized-safe) outcome state for a symmetric Bell input.
///
/// Returns `None` for `B4` and for outcomes of zero weight.
pub fn closed_form_outcome(
    bell: BellState,
    f: &KrausFactors,
    mixer: &UnitaryMixer,
    row: usize,
) -> Option<(f64, ComplexMatrix)> {
    let (x, y, slots, sign) = match bell {
        BellState::B1 => {
            let (e, f) = corner_amplitudes(f, mixer, row);
            (e, f, (0, 3), 1.0)
        }
        BellState::B2 => {
            let (e, f) = corner_amplitudes(f, mixer, row);
            (e, f, (0, 3), -1.0)
        }
        BellState::B3 => {
            let (r, s) = central_amplitudes(f, mixer, row);
            (r, s, (1, 2), 1.0)
        }
        BellState::B4 => return None,
    };
    let norm = x.norm_sqr() + y.norm_sqr();
    if norm == 0.0 {
        return None;
    }
    let mut m = ComplexMatrix::zeros(4).expect("dim 4 supported");
    let (i, j) = slots;
    m[(i, i)] = c64(x.norm_sqr() / norm, 0.0);
    m[(j, j)] = c64(y.norm_sqr() / norm, 0.0);
    m[(i, j)] = x * y.conj() * sign / norm;
    m[(j, i)] = x.conj() * y * sign / norm;
    Some((norm / 2.0, m))
}

/// Long-time symmetric probability of `B3` when exactly the rows in
/// `pattern` have `u_μ2 = 0`: `Σ_μ ¼ |u_μ3 + u_μ4|²`.
pub fn asymptotic_symmetric_probability(mixer: &UnitaryMixer, pattern: &ConstraintPattern) -> f64 {
    pattern.rows().fold(0.0, |acc, mu| {
        acc + 0.25 * (mixer.entry(mu, 2) + mixer.entry(mu, 3)).norm_sqr()
    })
}
