//! Constraint patterns `u_μ2 = 0` on the mixer and the feasible unitaries they allow.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kraus::UnitaryMixer;
use crate::linalg::{c64, ComplexMatrix};
use crate::random::{complete_to_unitary, haar_block, random_unit_vector};

/// Column of the mixer that must vanish on the constrained rows (0-based).
pub(crate) const PINNED_COLUMN: usize = 1;
/// Coordinates acted on by the residual 3×3 freedom once column 2 is fixed.
const BLOCK: [usize; 3] = [0, 2, 3];

/// Rows `μ` (stored 0-based) of the mixer that must satisfy `u_μ2 = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ConstraintPattern {
    zeroed: BTreeSet<usize>,
}

impl ConstraintPattern {
    /// Builds a pattern from 1-based row numbers.
    pub fn from_rows(rows: &[usize]) -> Result<Self> {
        let mut zeroed = BTreeSet::new();
        for &r in rows {
            if !(1..=4).contains(&r) {
                return Err(Error::InvalidPattern(format!("row {r} outside 1..=4")));
            }
            zeroed.insert(r - 1);
        }
        if zeroed.len() > 3 {
            return Err(Error::InvalidPattern(
                "at most three rows can have u_μ2 = 0 since column 2 is a unit vector".into(),
            ));
        }
        Ok(Self { zeroed })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Rows `{1}`, `{1,2}` and `{1,2,3}`.
    pub fn leading(n: usize) -> Result<Self> {
        Self::from_rows(&(1..=n).collect::<Vec<_>>())
    }

    /// 0-based constrained rows, ascending.
    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.zeroed.iter().copied()
    }

    /// 1-based constrained rows, ascending.
    pub fn rows_one_based(&self) -> Vec<usize> {
        self.zeroed.iter().map(|r| r + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.zeroed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeroed.is_empty()
    }

    pub fn free_rows(&self) -> Vec<usize> {
        (0..4).filter(|r| !self.zeroed.contains(r)).collect()
    }

    pub fn is_satisfied_by(&self, mixer: &UnitaryMixer) -> bool {
        self.rows()
            .all(|r| mixer.entry(r, PINNED_COLUMN) == c64(0.0, 0.0))
    }

    /// Number of real parameters of [`Self::mixer_from_params`].
    pub fn n_params(&self) -> usize {
        2 * self.free_rows().len() + 9
    }

    /// Maps unconstrained reals onto a feasible mixer.
    ///
    /// The mixer is `G(c) · exp(iH)`: `c` is the normalized pinned column,
    /// supported on the free rows; `G(c)` is a fixed unitary completion with
    /// that column; `H` is Hermitian on the coordinates other than the pinned
    /// one. Every feasible unitary has this form, and the constrained entries
    /// come out exactly zero.
    pub fn mixer_from_params(&self, params: &[f64]) -> UnitaryMixer {
        assert_eq!(params.len(), self.n_params(), "parameter count");
        let free = self.free_rows();
        let (col_params, gen_params) = params.split_at(2 * free.len());
        let mut c = vec![c64(0.0, 0.0); 4];
        for (k, &row) in free.iter().enumerate() {
            c[row] = c64(col_params[2 * k], col_params[2 * k + 1]);
        }
        let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            c[free[0]] = c64(1.0, 0.0);
        } else {
            c.iter_mut().for_each(|x| *x /= norm);
        }

        let mut h = ComplexMatrix::zeros(4).expect("dim 4 supported");
        for (k, &i) in BLOCK.iter().enumerate() {
            h[(i, i)] = c64(gen_params[k], 0.0);
        }
        let pairs = [(0, 2), (0, 3), (2, 3)];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let z = c64(gen_params[3 + 2 * k], gen_params[4 + 2 * k]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        let block = h.exp_i_hermitian().expect("generator is Hermitian");
        compose(&c, &block)
    }

    /// Random feasible mixer: uniform pinned column, Haar residual block.
    pub fn sample_mixer<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitaryMixer {
        let free = self.free_rows();
        let sub = random_unit_vector(rng, free.len());
        let mut c = vec![c64(0.0, 0.0); 4];
        for (k, &row) in free.iter().enumerate() {
            c[row] = sub[k];
        }
        let block = haar_block(rng, 4, &BLOCK);
        compose(&c, &block)
    }
}

fn compose(column: &[Complex64], block: &ComplexMatrix) -> UnitaryMixer {
    let g = complete_to_unitary(column, PINNED_COLUMN);
    let mut u = &g * block;
    // The block fixes e₂ up to rounding; pin the column exactly.
    for (i, &x) in column.iter().enumerate() {
        u[(i, PINNED_COLUMN)] = x;
    }
    UnitaryMixer::new(u).expect("product of unitaries")
}

impl TryFrom<Vec<usize>> for ConstraintPattern {
    type Error = Error;
    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<ConstraintPattern> for Vec<usize> {
    fn from(p: ConstraintPattern) -> Self {
        p.rows_one_based()
    }
}
