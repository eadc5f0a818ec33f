use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix};

/// The four Bell states in the `|00⟩,|01⟩,|10⟩,|11⟩` basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    /// (|00⟩ + |11⟩)/√2
    B1,
    /// (|00⟩ − |11⟩)/√2
    B2,
    /// (|01⟩ + |10⟩)/√2
    B3,
    /// (|01⟩ − |10⟩)/√2, the only antisymmetric one.
    B4,
}

impl BellState {
    pub const ALL: [BellState; 4] = [Self::B1, Self::B2, Self::B3, Self::B4];
    pub const SYMMETRIC: [BellState; 3] = [Self::B1, Self::B2, Self::B3];

    pub fn vector(self) -> [Complex64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c64(0.0, 0.0);
        let p = c64(s, 0.0);
        let m = c64(-s, 0.0);
        match self {
            Self::B1 => [p, z, z, p],
            Self::B2 => [p, z, z, m],
            Self::B3 => [z, p, p, z],
            Self::B4 => [z, p, m, z],
        }
    }

    /// Projector with entries exactly `0` or `±1/2`.
    pub fn density(self) -> DensityMatrix {
        let signs: [f64; 4] = match self {
            Self::B1 => [1.0, 0.0, 0.0, 1.0],
            Self::B2 => [1.0, 0.0, 0.0, -1.0],
            Self::B3 => [0.0, 1.0, 1.0, 0.0],
            Self::B4 => [0.0, 1.0, -1.0, 0.0],
        };
        let mut m = ComplexMatrix::zeros(4).expect("dim 4 supported");
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = c64(0.5 * signs[i] * signs[j], 0.0);
            }
        }
        DensityMatrix::new(m).expect("Bell projectors are valid states")
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::B1 => "B1",
            Self::B2 => "B2",
            Self::B3 => "B3",
            Self::B4 => "B4",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "B1" => Ok(Self::B1),
            "B2" => Ok(Self::B2),
            "B3" => Ok(Self::B3),
            "B4" => Ok(Self::B4),
            _ => Err(Error::InvalidConfig(format!(
                "unknown Bell state `{s}` (expected B1, B2, B3 or B4)"
            ))),
        }
    }
}

/// Amplitudes of a symmetric pure state `a|00⟩ + c|01⟩ + c|10⟩ + b|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricStateForm {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl SymmetricStateForm {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + 2.0 * c.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::UnnormalizedState(norm));
        }
        Ok(Self { a, b, c })
    }

    pub fn vector(&self) -> [Complex64; 4] {
        [self.a, self.c, self.c, self.b]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.vector()).expect("normalized by construction")
    }
}

/// Permutation exchanging `|01⟩` and `|10⟩`.
pub fn swap_operator() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    .expect("dim 4 supported")
}

/// Frobenius norm of `SρS − ρ`.
pub fn asymmetry(rho: &ComplexMatrix) -> f64 {
    let s = swap_operator();
    (&s.sandwich(rho).expect("dim 4") - rho).frobenius_norm()
}

/// Whether `ρ` has the entry pattern of a symmetric pure state: rows 2 and 3
/// agree, and so do columns 2 and 3.
pub fn matches_symmetric_form(rho: &ComplexMatrix, tol: f64) -> bool {
    (0..4).all(|k| {
        (rho[(1, k)] - rho[(2, k)]).norm() <= tol && (rho[(k, 1)] - rho[(k, 2)]).norm() <= tol
    })
}

/// `⟨ψ|S|ψ⟩`-style expectation `Tr(Sρ)`; equals 1 exactly on the symmetric subspace.
pub fn swap_expectation(rho: &ComplexMatrix) -> f64 {
    (&swap_operator() * rho).trace().re
}

/// Returns `(symmetric, asymmetry)`.
///
/// `asymmetry` is `‖SρS − ρ‖_F`. SWAP-invariance alone also holds for the
/// antisymmetric Bell state, so a state counts as symmetric only when it is
/// SWAP-invariant and also has the symmetric entry pattern.
pub fn is_exchange_symmetric(rho: &DensityMatrix, tol: f64) -> (bool, f64) {
    let m = rho.matrix();
    let asym = asymmetry(m);
    let symmetric = asym <= tol && matches_symmetric_form(m, tol);
    if (rho.purity() - 1.0).abs() < 1e-9 {
        // On pure states the pattern test must agree with Tr(Sρ) = 1.
        debug_assert_eq!(
            symmetric,
            swap_expectation(m) >= 1.0 - tol,
            "symmetry tests disagree on a pure state"
        );
    }
    (symmetric, asym)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    /// Neither symmetric nor supported on the antisymmetric Bell state.
    Mixed,
}

/// Returns the class together with the asymmetry norm.
pub fn classify(rho: &DensityMatrix, tol: f64) -> (SymmetryClass, f64) {
    let (symmetric, asym) = is_exchange_symmetric(rho, tol);
    if symmetric {
        return (SymmetryClass::Symmetric, asym);
    }
    let b4 = BellState::B4.vector();
    let m = rho.matrix();
    let weight: f64 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| b4[i].conj() * m[(i, j)] * b4[j])
        .sum::<Complex64>()
        .re;
    if weight >= 1.0 - tol {
        (SymmetryClass::Antisymmetric, asym)
    } else {
        (SymmetryClass::Mixed, asym)
    }
}
