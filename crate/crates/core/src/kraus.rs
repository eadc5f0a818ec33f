//! Operator-sum representations of the two-qubit dephasing channel.
//!
//! The canonical set has four diagonal operators built from
//! `ω = √(1-γ²)`, `α = γ-1` and `β = γ+1`. Any other set obtained by mixing
//! them with a 4×4 unitary, `E_μ = Σ_j u_μj K_j`, induces the same channel.
//!
//! Choi convention: `C = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, a 16×16 matrix indexed by
//! `(4i + a, 4j + b)`. A Kraus operator `K` corresponds to the vector
//! `v[4i + a] = K[a, i]`, i.e. `v` stacks the columns of `K`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{dephase_matrix, ChannelParams, DephasingFactors};
use crate::error::{check_param, Error, Result};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix};

/// Tolerance on `‖Σ K†K − I‖_max` for a set to count as complete.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Choi eigenvalues below this are treated as zero when extracting operators.
pub const KRAUS_RANK_CUTOFF: f64 = 1e-12;
/// Most negative Choi eigenvalue still accepted as numerical noise.
pub const CP_TOL: f64 = 1e-9;
/// Completeness tolerance for Choi-extracted sets.
pub const EXTRACTED_COMPLETENESS_TOL: f64 = 1e-9;

pub const LABEL_CANONICAL: &str = "canonical";
pub const LABEL_CHOI: &str = "choi-extracted";
pub const LABEL_MIXED: &str = "mixed";

/// Scalar coefficients of the canonical operators at a given `γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausFactors {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl KrausFactors {
    pub fn new(gamma: f64) -> Result<Self> {
        check_param(
            "gamma",
            gamma,
            (0.0..=1.0).contains(&gamma),
            "must lie in [0, 1]",
        )?;
        Ok(Self {
            omega: (1.0 - gamma * gamma).sqrt(),
            alpha: gamma - 1.0,
            beta: gamma + 1.0,
            gamma,
        })
    }
}

/// An ordered list of 4×4 Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl KrausSet {
    /// Checks shape only; completeness is verified by the operations that need it.
    pub fn new(operators: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::KrausCount {
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = operators.iter().find(|k| k.dim() != 4) {
            return Err(Error::DimensionMismatch {
                left: 4,
                right: bad.dim(),
            });
        }
        Ok(Self {
            operators,
            label: label.into(),
        })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `Σ_μ K_μ† K_μ`
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(4).expect("dim 4 supported");
        for k in &self.operators {
            acc = &acc + &(&k.dagger() * k);
        }
        acc
    }

    /// `‖Σ_μ K_μ† K_μ − I‖_max`
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_sum()
            .max_abs_diff(&ComplexMatrix::identity(4).expect("dim 4 supported"))
    }

    pub fn check_complete(&self, tol: f64) -> Result<()> {
        let residual = self.completeness_residual();
        if residual <= tol {
            Ok(())
        } else {
            Err(Error::IncompleteKrausSet { residual })
        }
    }

    /// `Σ_μ K_μ M K_μ†` for an arbitrary 4×4 matrix.
    pub fn apply_to_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(4)?;
        for k in &self.operators {
            acc = &acc + &k.sandwich(m)?;
        }
        Ok(acc)
    }

    /// Choi matrix of the induced map, `Σ_μ vec(K_μ) vec(K_μ)†`.
    pub fn choi(&self) -> ChoiMatrix {
        let mut c = ComplexMatrix::zeros(16).expect("dim 16 supported");
        for k in &self.operators {
            let v = column_stack(k);
            for (r, vr) in v.iter().enumerate() {
                for (s, vs) in v.iter().enumerate() {
                    c[(r, s)] += vr * vs.conj();
                }
            }
        }
        ChoiMatrix { mat: c }
    }
}

fn column_stack(k: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(16);
    for i in 0..4 {
        for a in 0..4 {
            v.push(k[(a, i)]);
        }
    }
    v
}

fn unstack_columns(v: &[Complex64], scale: f64) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(4).expect("dim 4 supported");
    for i in 0..4 {
        for a in 0..4 {
            k[(a, i)] = v[4 * i + a] * scale;
        }
    }
    k
}

/// Unitary coefficients `u_μj` for re-mixing a four-operator Kraus set.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMixer {
    u: ComplexMatrix,
}

impl UnitaryMixer {
    pub const UNITARY_TOL: f64 = 1e-10;

    pub fn new(u: ComplexMatrix) -> Result<Self> {
        if u.dim() != 4 {
            return Err(Error::DimensionMismatch {
                left: 4,
                right: u.dim(),
            });
        }
        let deviation = u.unitarity_deviation();
        if deviation > Self::UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { u })
    }

    pub fn identity() -> Self {
        Self {
            u: ComplexMatrix::identity(4).expect("dim 4 supported"),
        }
    }

    /// Row `μ` selects operator `perm[μ]`.
    pub fn permutation(perm: [usize; 4]) -> Result<Self> {
        let mut u = ComplexMatrix::zeros(4)?;
        for (row, &col) in perm.iter().enumerate() {
            if col >= 4 {
                return Err(Error::InvalidConfig(format!(
                    "permutation index {col} out of range"
                )));
            }
            u[(row, col)] = c64(1.0, 0.0);
        }
        Self::new(u)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `u_{row, col}` with 0-based indices.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.u[(row, col)]
    }
}

/// Choi matrix of a two-qubit map.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 16 {
            return Err(Error::DimensionMismatch {
                left: 16,
                right: mat.dim(),
            });
        }
        Ok(Self { mat })
    }

    /// Choi matrix of a linear map given by its action on matrix units.
    pub fn of_map<F>(map: F) -> Result<Self>
    where
        F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let mut c = ComplexMatrix::zeros(16)?;
        for i in 0..4 {
            for j in 0..4 {
                let mut unit = ComplexMatrix::zeros(4)?;
                unit[(i, j)] = c64(1.0, 0.0);
                let image = map(&unit)?;
                for a in 0..4 {
                    for b in 0..4 {
                        c[(4 * i + a, 4 * j + b)] = image[(a, b)];
                    }
                }
            }
        }
        Ok(Self { mat: c })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.mat.hermitian_eig()?.values)
    }
}

pub fn canonical_kraus(gamma: f64) -> Result<KrausSet> {
    let f = KrausFactors::new(gamma)?;
    let w = f.omega / 2f64.sqrt();
    let a = f.alpha / 2.0;
    let b = f.beta / 2.0;
    let ops = vec![
        ComplexMatrix::from_real_diag(&[-w, 0.0, 0.0, w])?,
        ComplexMatrix::from_real_diag(&[0.0, -w, w, 0.0])?,
        ComplexMatrix::from_real_diag(&[a, -a, -a, a])?,
        ComplexMatrix::from_real_diag(&[b, b, b, b])?,
    ];
    KrausSet::new(ops, LABEL_CANONICAL)
}

/// `Σ_μ K_μ ρ K_μ†`
pub fn apply_kraus(set: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    set.check_complete(COMPLETENESS_TOL)?;
    let out = set.apply_to_matrix(rho.matrix())?;
    DensityMatrix::new(out.hermitian_part())
}

pub fn choi_of_channel(params: &ChannelParams) -> Result<ChoiMatrix> {
    choi_of_factors(params.factors())
}

pub fn choi_of_factors(factors: DephasingFactors) -> Result<ChoiMatrix> {
    ChoiMatrix::of_map(|m| dephase_matrix(m, factors))
}

/// Kraus operators `√λ_i · reshape(v_i)` from the eigendecomposition of `c`.
pub fn kraus_from_choi(c: &ChoiMatrix) -> Result<KrausSet> {
    let eig = c.mat.hermitian_eig()?;
    let min = *eig.values.last().expect("nonempty spectrum");
    if min < -CP_TOL {
        return Err(Error::NotCompletelyPositive { eigenvalue: min });
    }
    let ops: Vec<_> = eig
        .values
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l >= KRAUS_RANK_CUTOFF)
        .map(|(k, &l)| unstack_columns(&eig.vector(k), l.sqrt()))
        .collect();
    let set = KrausSet::new(ops, LABEL_CHOI)?;
    set.check_complete(EXTRACTED_COMPLETENESS_TOL)?;
    Ok(set)
}

/// `E_μ = Σ_j u_μj K_j`
pub fn mix_kraus(set: &KrausSet, mixer: &UnitaryMixer) -> Result<KrausSet> {
    if set.len() != 4 {
        return Err(Error::KrausCount {
            expected: 4,
            found: set.len(),
        });
    }
    let deviation = mixer.u.unitarity_deviation();
    if deviation > UnitaryMixer::UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let ops = (0..4)
        .map(|mu| {
            let mut e = ComplexMatrix::zeros(4)?;
            for (j, k) in set.operators.iter().enumerate() {
                e = &e + &k.scale(mixer.entry(mu, j));
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops, LABEL_MIXED)
}

/// True iff the two sets induce Choi matrices that agree entrywise within `tol`.
pub fn channels_equal(a: &KrausSet, b: &KrausSet, tol: f64) -> bool {
    a.choi().matrix().approx_eq(b.choi().matrix(), tol)
}

/// JSON form: `{"label", "gamma", "operators": [[[re, im]; 16]; n]}` (row-major).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KrausSetDocument {
    pub label: String,
    pub gamma: f64,
    pub operators: Vec<Vec<Complex64>>,
}

impl KrausSetDocument {
    pub fn from_set(set: &KrausSet, gamma: f64) -> Self {
        Self {
            label: set.label.clone(),
            gamma,
            operators: set
                .operators
                .iter()
                .map(|k| k.as_slice().to_vec())
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<KrausSet> {
        let ops = self
            .operators
            .iter()
            .map(|entries| ComplexMatrix::from_row_major(4, entries.clone()))
            .collect::<Result<Vec<_>>>()?;
        KrausSet::new(ops, self.label.clone())
    }
}
