//! Seeded random generators for property checks: Ginibre matrices, Haar-ish
//! unitaries via QR, random POVMs, and random Kraus stacks with completions.

use rand::Rng;

use crate::error::Result;
use crate::matcore::{ComplexMatrix, ComplexVector, Tolerance, C64};
use crate::povm::Povm;
use crate::ucost::KrausStack;

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn normal_c64(rng: &mut impl Rng) -> C64 {
    C64::new(standard_normal(rng), standard_normal(rng))
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| normal_c64(rng))
}

/// Random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    g.qr().q()
}

/// Random unit vector.
pub fn random_state(rng: &mut impl Rng, n: usize) -> ComplexVector {
    loop {
        let mut v = ComplexVector::from_fn(n, |_, _| normal_c64(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            v.scale_mut(1.0 / norm);
            return v;
        }
    }
}

/// Random Hermitian PSD matrix `A^H A` scaled to unit max eigenvalue-ish size.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_complex(rng, n, n);
    let m = a.adjoint() * &a;
    let scale = crate::matcore::max_abs_entry(&m).max(1.0);
    m.scale(1.0 / scale)
}

/// Random POVM built by conjugating a random diagonal PSD decomposition of the
/// identity: per basis index, a random probability vector over the K outcomes,
/// then all diagonal pieces conjugated by one random unitary.
pub fn random_povm(rng: &mut impl Rng, n: usize, k: usize, tol: &Tolerance) -> Result<Povm> {
    let mut weights = vec![vec![0.0f64; n]; k];
    for col in 0..n {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(1e-3..1.0f64)).collect();
        let total: f64 = raw.iter().sum();
        for (outcome, w) in raw.iter().enumerate() {
            weights[outcome][col] = w / total;
        }
    }
    let w = random_unitary(rng, n);
    let elements: Vec<ComplexMatrix> = weights
        .iter()
        .map(|diag| {
            let d = ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            &w * d * w.adjoint()
        })
        .collect();
    Povm::new(elements, tol)
}

/// Random Kraus stack: the first `n` columns of a random `(k*m) x (k*m)`
/// unitary, chopped into K blocks of `m x n`.
pub fn random_kraus_stack(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    k: usize,
    tol: &Tolerance,
) -> Result<KrausStack> {
    assert!(m >= n && k >= 1);
    let u = random_unitary(rng, k * m);
    let g = u.columns(0, n).into_owned();
    let blocks = (0..k).map(|i| g.rows(i * m, m).into_owned()).collect();
    KrausStack::new(blocks, tol)
}

/// Complete the orthonormal columns of the stacked Kraus matrix to a full
/// unitary by Gram-Schmidt over random vectors.
pub fn complete_stack_randomly(stack: &KrausStack, rng: &mut impl Rng) -> ComplexMatrix {
    let g = stack.stacked();
    let total = g.nrows();
    let n = g.ncols();
    let mut cols: Vec<ComplexVector> = (0..n).map(|j| g.column(j).into_owned()).collect();
    while cols.len() < total {
        let mut v = ComplexVector::from_fn(total, |_, _| normal_c64(rng));
        for c in &cols {
            let overlap = c.dotc(&v);
            v -= c.map(|z| z * overlap);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v.scale_mut(1.0 / norm);
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// Random permutation of `0..n`, Fisher-Yates.
pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Apply a row permutation: row `i` of the result is row `perm[i]` of `m`.
pub fn permute_rows(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    assert_eq!(m.nrows(), perm.len());
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)])
}
