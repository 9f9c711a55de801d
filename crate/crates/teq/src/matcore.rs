//! Dense complex-matrix primitives: eigendecomposition, SVD, pseudoinverse,
//! principal square root, and the Hermitian/PSD/unitarity validators that the
//! cost engine relies on. Backed by `nalgebra` with `Complex<f64>` entries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Result, TeqError};

/// Double-precision complex scalar used everywhere.
pub type C64 = Complex<f64>;
/// Dense complex matrix, the universal numeric carrier.
pub type ComplexMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<C64>;

const MAX_EIG_ITER: usize = 500;

/// Validation and certificate tolerances, threaded through every validator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Slack for structural validation (unitarity, Hermiticity, PSD,
    /// completeness, unit norms) and for pseudoinverse truncation.
    pub validation_eps: f64,
    /// Slack for exactness certificates (sigma_min vs sigma_n matching,
    /// Hermiticity of candidate blocks).
    pub certificate_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            validation_eps: 1e-9,
            certificate_eps: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(validation_eps: f64, certificate_eps: f64) -> Result<Self> {
        if !(validation_eps > 0.0) {
            return Err(TeqError::OutOfRange {
                what: "validation_eps",
                value: validation_eps,
            });
        }
        if !(certificate_eps > 0.0) {
            return Err(TeqError::OutOfRange {
                what: "certificate_eps",
                value: certificate_eps,
            });
        }
        Ok(Tolerance {
            validation_eps,
            certificate_eps,
        })
    }
}

/// Eigenvalues plus eigenvector columns. For normal input the columns are
/// orthonormal within the validation tolerance.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<C64>,
    /// Column `i` is an eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

/// Singular value decomposition `M = U * diag(s) * V^H` with `s` sorted
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Rebuild `U * diag(s) * V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate().take(k) {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.adjoint()
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Largest entry magnitude.
pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise difference |a - b|.
pub fn max_entry_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(TeqError::InvalidInput(
            "matrix contains non-finite entries".into(),
        ))
    }
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(TeqError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// Max-entry deviation of `M^H M` from the identity.
pub fn unitary_deviation(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_entry_diff(&(m.adjoint() * m), &identity(m.ncols()))
}

pub fn is_unitary(m: &ComplexMatrix, tol: &Tolerance) -> bool {
    unitary_deviation(m) <= tol.validation_eps
}

/// Max-entry deviation of `M` from `M^H`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_entry_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &ComplexMatrix, tol: &Tolerance) -> bool {
    hermitian_deviation(m) <= tol.validation_eps
}

/// Hermitian within `validation_eps` and min eigenvalue >= -validation_eps.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    match hermitian_eigenvalues(m) {
        Ok(ev) => ev.iter().cloned().fold(f64::INFINITY, f64::min) >= -tol.validation_eps,
        Err(_) => false,
    }
}

/// Eigenvalues of a general square complex matrix via Schur decomposition.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, MAX_EIG_ITER * n)
        .ok_or(TeqError::NumericFailure {
            dim: n,
            what: "Schur iteration did not converge",
        })?;
    let vals = schur.eigenvalues().ok_or(TeqError::NumericFailure {
        dim: n,
        what: "Schur form not triangular",
    })?;
    Ok(vals.iter().cloned().collect())
}

/// Full eigendecomposition. Eigenvectors are recovered from the Schur form by
/// back substitution; for normal matrices the columns come out orthonormal.
pub fn eig(m: &ComplexMatrix) -> Result<Eigendecomposition> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigendecomposition {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(Eigendecomposition {
            values: vec![m[(0, 0)]],
            vectors: identity(1),
        });
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, MAX_EIG_ITER * n)
        .ok_or(TeqError::NumericFailure {
            dim: n,
            what: "Schur iteration did not converge",
        })?;
    let (q, t) = schur.unpack();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(t[(i, i)]);
    }
    let vectors = triangular_eigenvectors(&q, &t);
    Ok(Eigendecomposition { values, vectors })
}

/// Eigenvectors of `Q T Q^H` with `T` upper triangular: back-substitute on `T`
/// and rotate by `Q`. Near-defective pairs get a perturbed denominator, which
/// keeps the computation finite (the affected vectors are best-effort).
fn triangular_eigenvectors(q: &ComplexMatrix, t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.nrows();
    let scale = max_abs_entry(t).max(1.0);
    let small = f64::EPSILON * scale;
    let mut vectors = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[i] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = C64::new(0.0, 0.0);
            for (k, xk) in x.iter().enumerate().take(i + 1).skip(j + 1) {
                s += t[(j, k)] * xk;
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            x[j] = -s / denom;
        }
        let mut v = q * ComplexVector::from_vec(x);
        let norm = v.norm();
        if norm > 0.0 {
            v.scale_mut(1.0 / norm);
        }
        vectors.set_column(i, &v);
    }
    vectors
}

/// Eigenvalues of a Hermitian matrix (real, unsorted). The input is
/// symmetrized before decomposition; Hermiticity is not checked here.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.0)
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and a unitary
/// eigenvector matrix, both unsorted. Symmetrizes the input first.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::linalg::SymmetricEigen::try_new(h, f64::EPSILON, MAX_EIG_ITER * n).ok_or(
        TeqError::NumericFailure {
            dim: n,
            what: "Hermitian eigensolver did not converge",
        },
    )?;
    Ok((se.eigenvalues.iter().cloned().collect(), se.eigenvectors))
}

/// SVD with singular values sorted nonincreasing.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    check_finite(m)?;
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok(Svd {
            singular_values: Vec::new(),
            u: ComplexMatrix::zeros(r, 0),
            v: ComplexMatrix::zeros(c, 0),
        });
    }
    let f = nalgebra::linalg::SVD::try_new(m.clone(), true, true, f64::EPSILON, MAX_EIG_ITER * k)
        .ok_or(TeqError::NumericFailure {
        dim: r.max(c),
        what: "SVD iteration did not converge",
    })?;
    let u = f.u.expect("u requested");
    let v_t = f.v_t.expect("v_t requested");
    Ok(Svd {
        singular_values: f.singular_values.iter().cloned().collect(),
        u,
        v: v_t.adjoint(),
    })
}

/// Singular values only, sorted nonincreasing.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(Vec::new());
    }
    let f = nalgebra::linalg::SVD::try_new(m.clone(), false, false, f64::EPSILON, MAX_EIG_ITER * k)
        .ok_or(TeqError::NumericFailure {
        dim: m.nrows().max(m.ncols()),
        what: "SVD iteration did not converge",
    })?;
    Ok(f.singular_values.iter().cloned().collect())
}

/// Smallest singular value. For an `r x c` matrix this is the smallest of the
/// `min(r, c)` values.
pub fn sigma_min(m: &ComplexMatrix) -> Result<f64> {
    let sv = singular_values(m)?;
    Ok(sv.last().cloned().unwrap_or(0.0))
}

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// `validation_eps * sigma_max` are treated as zero; the all-zero matrix maps
/// to the zero matrix.
pub fn pinv(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let f = svd(m)?;
    let smax = f.singular_values.first().cloned().unwrap_or(0.0);
    let (r, c) = m.shape();
    if smax <= 0.0 {
        return Ok(ComplexMatrix::zeros(c, r));
    }
    let cut = tol.validation_eps * smax;
    // pinv = V * diag(1/s) * U^H over the retained values
    let mut vs = f.v.clone();
    for (j, s) in f.singular_values.iter().enumerate() {
        let inv = if *s >= cut && *s > 0.0 { 1.0 / s } else { 0.0 };
        vs.column_mut(j).scale_mut(inv);
    }
    Ok(vs * f.u.adjoint())
}

/// Hermitian PSD principal square root. Eigenvalues within `-validation_eps`
/// of zero are clamped to zero; anything more negative is a domain error.
pub fn principal_sqrt(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    check_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > tol.validation_eps {
        return Err(TeqError::NotHermitian {
            deviation: dev,
            eps: tol.validation_eps,
        });
    }
    let (values, q) = hermitian_eig(m)?;
    let min_ev = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_ev < -tol.validation_eps {
        return Err(TeqError::NotPsd {
            min_eigenvalue: min_ev,
            eps: tol.validation_eps,
        });
    }
    let mut qs = q.clone();
    for (j, ev) in values.iter().enumerate() {
        qs.column_mut(j).scale_mut(ev.max(0.0).sqrt());
    }
    Ok(qs * q.adjoint())
}
