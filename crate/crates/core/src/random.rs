//! Seeded random sampling: Haar unitaries, random states and generators.
//!
//! Every stochastic routine in the crate takes an explicit `(seed, stream)`
//! pair. Work item `i` always draws from stream `i`, so results do not depend
//! on how work is split across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, ComplexMatrix, DensityMatrix};

pub type StreamRng = ChaCha8Rng;

/// Independent generator for work item `stream` under a master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniformly random unit vector in C^n.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<_> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Orthonormalizes the columns of `m` in place (modified Gram–Schmidt).
///
/// Equivalent to taking `Q` of a QR factorization whose `R` has a positive
/// real diagonal, which is what makes `Q` Haar-distributed for Gaussian input.
/// Returns `false` if the columns were numerically dependent.
fn gram_schmidt_columns(m: &mut ComplexMatrix, columns: &[usize]) -> bool {
    let n = m.dim();
    for (idx, &j) in columns.iter().enumerate() {
        for &k in &columns[..idx] {
            let proj: Complex64 = (0..n).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..n {
                let sub = m[(i, k)] * proj;
                m[(i, j)] -= sub;
            }
        }
        let norm = (0..n).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return false;
        }
        for i in 0..n {
            m[(i, j)] /= norm;
        }
    }
    true
}

/// Haar-random unitary of size `dim` (QR of a complex Ginibre matrix).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let all: Vec<usize> = (0..dim).collect();
    haar_block(rng, dim, &all)
}

/// Unitary that is Haar-random on the coordinate subspace spanned by `active`
/// and the identity on the remaining coordinates.
pub fn haar_block<R: Rng + ?Sized>(rng: &mut R, dim: usize, active: &[usize]) -> ComplexMatrix {
    loop {
        let mut m = ComplexMatrix::identity(dim).expect("supported dimension");
        for &j in active {
            for &i in active {
                m[(i, j)] = complex_gaussian(rng);
            }
        }
        if gram_schmidt_columns(&mut m, active) {
            return m;
        }
    }
}

/// Unitary whose column `column` equals the unit vector `c`.
///
/// The other columns are obtained by orthonormalizing the standard basis
/// against `c`, so the construction is deterministic in `c`.
pub fn complete_to_unitary(c: &[Complex64], column: usize) -> ComplexMatrix {
    let n = c.len();
    let mut basis: Vec<Vec<Complex64>> = vec![c.to_vec()];
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| c64(if i == e { 1.0 } else { 0.0 }, 0.0))
            .collect();
        for u in &basis {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(u) {
                *x -= a * proj;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut m = ComplexMatrix::zeros(n).expect("supported dimension");
    let targets = std::iter::once(column).chain((0..n).filter(|&j| j != column));
    for (vec, j) in basis.iter().zip(targets) {
        for (i, &x) in vec.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Random Hermitian matrix `scale · (G + G†)/2` with Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim).expect("supported dimension");
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = complex_gaussian(rng) * scale;
        }
    }
    g.hermitian_part()
}

/// Random full-rank two-qubit state `G G† / Tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(4).expect("dim 4 supported");
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    let w = (&g * &g.dagger()).hermitian_part();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Wishart matrix is a valid state")
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> Vec<Complex64> {
    random_unit_vector(rng, 4)
}
