//! Cost of unitaries (largest absolute eigenphase) and the partial-U problem:
//! single-vector exact solution, the three spectral lower bounds, conjugation
//! invariance, and constructive completions for diagonal and Hermitian
//! top-left blocks.

use std::f64::consts::PI;

use crate::error::{Result, TeqError};
use crate::matcore::{
    self, eigenvalues, hermitian_deviation, hermitian_eig, identity, max_abs_entry, svd,
    unitary_deviation, ComplexMatrix, ComplexVector, Tolerance, C64,
};

/// An angle in `[0, pi]`, the time-energy cost unit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CostAngle(f64);

impl CostAngle {
    pub const ZERO: CostAngle = CostAngle(0.0);

    ///1e-12 of slack absorbs accumulated rounding at the interval ends.
    pub fn from_radians(radians: f64) -> Result<Self> {
        if !radians.is_finite() || radians < -1e-12 || radians > PI + 1e-12 {
            return Err(TeqError::OutOfRange {
                what: "cost angle (radians)",
                value: radians,
            });
        }
        Ok(CostAngle(radians.clamp(0.0, PI)))
    }

    /// `acos` of a cosine-like quantity, clamped into `[-1, 1]` so float dust
    /// slightly past the ends cannot produce NaN.
    pub fn from_cos(c: f64) -> Self {
        CostAngle(c.clamp(-1.0, 1.0).acos())
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    pub fn max(self, other: CostAngle) -> CostAngle {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

/// Principal argument in `(-pi, pi]` with `arg(-1) = +pi`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    // atan2(-0.0, negative) returns -pi; fold it onto the +pi branch
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Ordered Kraus operators `F_1..F_K`, each `m x n` with `m >= n`, whose
/// stacked columns are orthonormal.
#[derive(Debug, Clone)]
pub struct KrausStack {
    blocks: Vec<ComplexMatrix>,
}

impl KrausStack {
    pub fn new(blocks: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        if blocks.is_empty() {
            return Err(TeqError::InvalidInput("empty Kraus stack".into()));
        }
        let (m, n) = blocks[0].shape();
        if m < n {
            return Err(TeqError::DimensionMismatch {
                expected: "block rows >= block cols".into(),
                found: format!("{m}x{n}"),
            });
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.shape() != (m, n) {
                return Err(TeqError::DimensionMismatch {
                    expected: format!("{m}x{n} block"),
                    found: format!("{}x{} at block {}", b.nrows(), b.ncols(), i),
                });
            }
            if !matcore::all_finite(b) {
                return Err(TeqError::InvalidInput(format!(
                    "non-finite entry in Kraus block {i}"
                )));
            }
        }
        let mut gram = ComplexMatrix::zeros(n, n);
        for b in &blocks {
            gram += b.adjoint() * b;
        }
        let dev = matcore::max_entry_diff(&gram, &identity(n));
        if dev > tol.validation_eps {
            return Err(TeqError::InvalidInput(format!(
                "stacked columns not orthonormal: sum F^H F deviates from identity by {dev:.3e}"
            )));
        }
        Ok(KrausStack { blocks })
    }

    /// Construction without re-validating, for results of operations that
    /// preserve validity exactly (conjugation by a unitary).
    pub(crate) fn from_validated(blocks: Vec<ComplexMatrix>) -> Self {
        KrausStack { blocks }
    }

    pub fn num_operators(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_rows(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].ncols()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// The `K*m x n` stacked matrix.
    pub fn stacked(&self) -> ComplexMatrix {
        let m = self.block_rows();
        let n = self.dim();
        let mut g = ComplexMatrix::zeros(self.num_operators() * m, n);
        for (i, b) in self.blocks.iter().enumerate() {
            g.rows_mut(i * m, m).copy_from(b);
        }
        g
    }
}

/// The three lower bounds on the partial-U cost, plus their max.
#[derive(Debug, Clone, Copy)]
pub struct PartialUBounds {
    /// Diagonal bound, max over the raw and canonical presentations.
    pub diag1: CostAngle,
    /// Eigenvalue (Schur) bound on the top square block, max over both
    /// presentations.
    pub schur: CostAngle,
    /// Singular-value bound `acos(sigma_min(F_1))`.
    pub sv: CostAngle,
    pub best: CostAngle,
}

/// Largest absolute eigenphase of a unitary, phases in `(-pi, pi]`.
pub fn maxnorm_unitary(u: &ComplexMatrix, tol: &Tolerance) -> Result<CostAngle> {
    let dev = unitary_deviation(u);
    if dev > tol.validation_eps {
        return Err(TeqError::NotUnitary {
            deviation: dev,
            eps: tol.validation_eps,
        });
    }
    let mut worst = 0.0f64;
    for ev in eigenvalues(u)? {
        let modulus = ev.norm();
        if (modulus - 1.0).abs() > tol.validation_eps {
            return Err(TeqError::NotUnitary {
                deviation: (modulus - 1.0).abs(),
                eps: tol.validation_eps,
            });
        }
        worst = worst.max(principal_arg(ev).abs());
    }
    CostAngle::from_radians(worst)
}

/// Exact partial-U cost when only one column is fixed: `acos(Re <e|b>)`.
pub fn single_vector_cost(e: &ComplexVector, b: &ComplexVector, tol: &Tolerance) -> Result<CostAngle> {
    if e.len() != b.len() {
        return Err(TeqError::DimensionMismatch {
            expected: format!("{}", e.len()),
            found: format!("{}", b.len()),
        });
    }
    for v in [e, b] {
        let norm = v.norm();
        if (norm - 1.0).abs() > tol.validation_eps {
            return Err(TeqError::NotUnitVector {
                norm,
                eps: tol.validation_eps,
            });
        }
    }
    Ok(CostAngle::from_cos(e.dotc(b).re))
}

/// Diagonal and Schur bounds for one presentation of the first block.
fn diag_schur_of(f1: &ComplexMatrix) -> Result<(CostAngle, CostAngle)> {
    let n = f1.ncols();
    let mut min_diag = f64::INFINITY;
    for i in 0..n {
        min_diag = min_diag.min(f1[(i, i)].re);
    }
    let top = f1.rows(0, n).into_owned();
    let mut min_re_ev = f64::INFINITY;
    for ev in eigenvalues(&top)? {
        min_re_ev = min_re_ev.min(ev.re);
    }
    Ok((CostAngle::from_cos(min_diag), CostAngle::from_cos(min_re_ev)))
}

/// The three lower bounds for a Kraus stack. The diagonal and Schur bounds are
/// evaluated on the stack as given and again after conjugating by the right
/// singular factor of `F_1`; each reported field is the max over the two
/// presentations.
pub fn partial_u_bounds(stack: &KrausStack) -> Result<PartialUBounds> {
    let f1 = &stack.blocks()[0];
    let (diag_raw, schur_raw) = diag_schur_of(f1)?;
    let f = svd(f1)?;
    let sigma_min = f.singular_values.last().cloned().unwrap_or(0.0);
    let sv = CostAngle::from_cos(sigma_min);

    // canonical presentation: F_1 -> Qhat F_1 Q^H with Q = V^H, which turns
    // the first block into (unitary) * (singular values)
    let q = f.v.adjoint();
    let canonical = conjugate_unchecked(stack, &q);
    let (diag_can, schur_can) = diag_schur_of(&canonical.blocks()[0])?;

    let diag1 = diag_raw.max(diag_can);
    let schur = schur_raw.max(schur_can);
    let best = diag1.max(schur).max(sv);
    Ok(PartialUBounds {
        diag1,
        schur,
        sv,
        best,
    })
}

fn conjugate_unchecked(stack: &KrausStack, q: &ComplexMatrix) -> KrausStack {
    let m = stack.block_rows();
    let n = stack.dim();
    let q_adj = q.adjoint();
    let mut blocks: Vec<ComplexMatrix> = Vec::with_capacity(stack.num_operators());
    for (i, b) in stack.blocks().iter().enumerate() {
        let bq = b * &q_adj;
        if i == 0 {
            // Qhat = diag(Q, I_{m-n}) acting on the rows of the first block
            let mut qhat = identity(m);
            qhat.view_mut((0, 0), (n, n)).copy_from(q);
            blocks.push(qhat * bq);
        } else {
            blocks.push(bq);
        }
    }
    KrausStack::from_validated(blocks)
}

/// Conjugate a stack by a unitary `Q`: `(Qhat F_1 Q^H, F_2 Q^H, ..)` with
/// `Qhat = diag(Q, 1)`. Preserves the partial-U cost.
pub fn conjugate_stack(stack: &KrausStack, q: &ComplexMatrix, tol: &Tolerance) -> Result<KrausStack> {
    let n = stack.dim();
    if q.shape() != (n, n) {
        return Err(TeqError::DimensionMismatch {
            expected: format!("{n}x{n} unitary"),
            found: format!("{}x{}", q.nrows(), q.ncols()),
        });
    }
    let dev = unitary_deviation(q);
    if dev > tol.validation_eps {
        return Err(TeqError::NotUnitary {
            deviation: dev,
            eps: tol.validation_eps,
        });
    }
    Ok(conjugate_unchecked(stack, q))
}

/// Constructive exact completion when the top `n x n` block of the stack is
/// real diagonal with entries `d_i` in `[-1, 1]`. The returned unitary has the
/// stacked matrix as its first `n` columns and cost `max_i acos(d_i)`,
/// realized by 2x2 rotation blocks pairing column `i` with the unit direction
/// of its residual support; untouched directions are completed with the
/// identity.
pub fn complete_unitary_diagonal(stack: &KrausStack, tol: &Tolerance) -> Result<ComplexMatrix> {
    let g = stack.stacked();
    let total = g.nrows();
    let n = g.ncols();
    let eps = tol.validation_eps;

    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let z = g[(j, i)];
            if i == j {
                if z.im.abs() > eps {
                    return Err(TeqError::InvalidInput(format!(
                        "top block diagonal entry {i} is not real (im = {:+.3e})",
                        z.im
                    )));
                }
                if z.re.abs() > 1.0 + eps {
                    return Err(TeqError::OutOfRange {
                        what: "diagonal entry of top block",
                        value: z.re,
                    });
                }
                d.push(z.re.clamp(-1.0, 1.0));
            } else if z.norm() > eps {
                return Err(TeqError::InvalidInput(format!(
                    "top block not diagonal: entry ({j},{i}) has magnitude {:.3e}",
                    z.norm()
                )));
            }
        }
    }

    // Orthonormal input basis. The first n vectors are e_0..e_{n-1}; each
    // deficient column contributes the unit direction of its residual support
    // (rows >= n); the rest is a Gram-Schmidt sweep of the remaining
    // standard basis vectors in row order.
    let mut inputs: Vec<ComplexVector> = Vec::with_capacity(total);
    let mut images: Vec<ComplexVector> = Vec::with_capacity(total);
    for i in 0..n {
        inputs.push(ComplexVector::from_fn(total, |r, _| {
            if r == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
        images.push(g.column(i).into_owned());
    }

    let mut residual_dirs: Vec<ComplexVector> = Vec::new();
    for i in 0..n {
        let s = (1.0 - d[i] * d[i]).max(0.0).sqrt();
        if s <= eps {
            continue;
        }
        // residual support lives strictly below the top block
        let mut r = ComplexVector::zeros(total);
        for row in n..total {
            r[row] = g[(row, i)];
        }
        for prev in &residual_dirs {
            let overlap = prev.dotc(&r);
            r -= prev.map(|z| z * overlap);
        }
        let norm = r.norm();
        if norm <= eps {
            return Err(TeqError::InvalidInput(format!(
                "residual column support deficient for column {i}"
            )));
        }
        r.scale_mut(1.0 / norm);
        // rotation partner: maps the residual direction to -s e_i + d u_i
        let mut v = r.map(|z| z * C64::new(d[i], 0.0));
        v[i] = C64::new(-s, 0.0);
        let vnorm = v.norm();
        v.scale_mut(1.0 / vnorm);
        inputs.push(r.clone());
        images.push(v);
        residual_dirs.push(r);
    }

    // identity completion of whatever is left
    let needed = total;
    let mut candidates = n..total;
    while inputs.len() < needed {
        let Some(j) = candidates.next() else {
            return Err(TeqError::InvalidInput(
                "could not complete orthonormal basis for diagonal completion".into(),
            ));
        };
        let mut w = ComplexVector::zeros(total);
        w[j] = C64::new(1.0, 0.0);
        for prev in inputs.iter().skip(n) {
            let overlap = prev.dotc(&w);
            w -= prev.map(|z| z * overlap);
        }
        let norm = w.norm();
        if norm > 0.5 {
            w.scale_mut(1.0 / norm);
            inputs.push(w.clone());
            images.push(w);
        }
    }

    let x = ComplexMatrix::from_columns(&inputs);
    let c = ComplexMatrix::from_columns(&images);
    Ok(c * x.adjoint())
}

/// Exact partial-U cost for a square Hermitian first block:
/// `acos(lambda_min(F_1))`.
pub fn exact_cost_hermitian(stack: &KrausStack, tol: &Tolerance) -> Result<CostAngle> {
    let f1 = &stack.blocks()[0];
    if f1.nrows() != f1.ncols() {
        return Err(TeqError::DimensionMismatch {
            expected: "square F_1 (m = n)".into(),
            found: format!("{}x{}", f1.nrows(), f1.ncols()),
        });
    }
    let dev = hermitian_deviation(f1);
    if dev > tol.validation_eps {
        return Err(TeqError::NotHermitian {
            deviation: dev,
            eps: tol.validation_eps,
        });
    }
    let (values, _) = hermitian_eig(f1)?;
    let min_ev = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CostAngle::from_cos(min_ev))
}

/// Check whether a matrix could be the first block of some valid stack when
/// interpreting its columns as partial isometry columns. Used by tests.
pub fn stacked_norm_defect(stack: &KrausStack) -> f64 {
    let g = stack.stacked();
    let n = g.ncols();
    matcore::max_entry_diff(&(g.adjoint() * &g), &identity(n)).min(max_abs_entry(&g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complete_stack_randomly, random_kraus_stack, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn principal_arg_branch_at_minus_one() {
        assert_eq!(principal_arg(c(-1.0, 0.0)), PI);
        assert_eq!(principal_arg(c(-1.0, -0.0)), PI);
        assert!((principal_arg(c(0.0, 1.0)) - FRAC_PI_2).abs() < 1e-15);
        assert!((principal_arg(c(0.0, -1.0)) + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn maxnorm_identity_is_zero() {
        assert_eq!(maxnorm_unitary(&identity(3), &tol()).unwrap().radians(), 0.0);
    }

    #[test]
    fn maxnorm_5050_beam_splitter() {
        let r = FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(r, 0.0), c(0.0, r), c(0.0, r), c(r, 0.0)],
        );
        let cost = maxnorm_unitary(&u, &tol()).unwrap();
        assert!((cost.radians() - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn maxnorm_diagonal_phases() {
        let u = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(1.0, FRAC_PI_2),
                c(0.0, 0.0),
                c(0.0, 0.0),
                C64::from_polar(1.0, -FRAC_PI_3),
            ],
        );
        let cost = maxnorm_unitary(&u, &tol()).unwrap();
        assert!((cost.radians() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn maxnorm_eigenvalue_minus_one_gives_pi() {
        let u = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        assert!((maxnorm_unitary(&u, &tol()).unwrap().radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn maxnorm_rejects_non_unitary() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        match maxnorm_unitary(&m, &tol()) {
            Err(TeqError::NotUnitary { deviation, .. }) => assert!(deviation > 0.5),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn single_vector_cases() {
        let t = tol();
        let e = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let b = ComplexVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(single_vector_cost(&e, &e, &t).unwrap().radians(), 0.0);
        assert!((single_vector_cost(&e, &b, &t).unwrap().radians() - FRAC_PI_2).abs() < 1e-12);
        // <e|b> purely imaginary also costs pi/2
        let bi = ComplexVector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0)]);
        assert!((single_vector_cost(&e, &bi, &t).unwrap().radians() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn single_vector_rejects_bad_inputs() {
        let t = tol();
        let e = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let short = ComplexVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(matches!(
            single_vector_cost(&e, &short, &t),
            Err(TeqError::DimensionMismatch { .. })
        ));
        let unnormalized = ComplexVector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            single_vector_cost(&e, &unnormalized, &t),
            Err(TeqError::NotUnitVector { .. })
        ));
    }

    /// Stack with a prescribed m x n first block, completed to a valid stack
    /// by appending the orthogonal complement rows as a second operator.
    fn stack_with_first_block(f1: ComplexMatrix) -> KrausStack {
        let (m, n) = f1.shape();
        let total = 2 * m;
        let mut cols: Vec<ComplexVector> = Vec::new();
        for j in 0..n {
            let mut v = ComplexVector::zeros(total);
            for i in 0..m {
                v[i] = f1[(i, j)];
            }
            // orthonormalize the residual against previous columns inside the
            // second block's rows
            for prev in &cols {
                let overlap = prev.dotc(&v);
                v -= prev.map(|z| z * overlap);
            }
            let deficit = (1.0f64 - v.norm_squared()).max(0.0);
            v[m + j] = c(deficit.sqrt(), 0.0);
            let norm = v.norm();
            v.scale_mut(1.0 / norm);
            cols.push(v);
        }
        let g = ComplexMatrix::from_columns(&cols);
        let blocks = vec![g.rows(0, m).into_owned(), g.rows(m, m).into_owned()];
        KrausStack::new(blocks, &tol()).unwrap()
    }

    #[test]
    fn bounds_trivial_identity_stack() {
        let stack = KrausStack::new(vec![identity(3)], &tol()).unwrap();
        let b = partial_u_bounds(&stack).unwrap();
        assert!(b.best.radians() < 1e-9);
        assert!(b.diag1.radians() < 1e-9);
        assert!(b.schur.radians() < 1e-9);
        assert!(b.sv.radians() < 1e-9);
    }

    #[test]
    fn bounds_diagonal_cos_block() {
        let phi = FRAC_PI_6;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(phi.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(phi.cos(), 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let b = partial_u_bounds(&stack).unwrap();
        assert!((b.sv.radians() - phi).abs() < 1e-9, "sv = {}", b.sv.radians());
        assert!((b.diag1.radians() - phi).abs() < 1e-9);
    }

    #[test]
    fn bounds_schur_scaled_pauli_x() {
        // eigenvalues of [[0,1],[1,0]]/sqrt(2) are +-1/sqrt(2) by the
        // characteristic polynomial, so the Schur bound is acos(-1/sqrt(2))
        let s = FRAC_1_SQRT_2;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let b = partial_u_bounds(&stack).unwrap();
        assert!(
            (b.schur.radians() - 3.0 * FRAC_PI_4).abs() < 1e-9,
            "schur = {}",
            b.schur.radians()
        );
    }

    #[test]
    fn conjugate_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let stack = random_kraus_stack(&mut rng, 3, 3, 2, &tol()).unwrap();
        let same = conjugate_stack(&stack, &identity(3), &tol()).unwrap();
        for (a, b) in stack.blocks().iter().zip(same.blocks()) {
            assert!(matcore::max_entry_diff(a, b) < 1e-14);
        }
    }

    #[test]
    fn conjugate_k1_unitary_block() {
        // K = 1, F_1 = Q0, conjugating by Q0 leaves the block equal to Q0
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q0 = random_unitary(&mut rng, 2);
        let stack = KrausStack::new(vec![q0.clone()], &tol()).unwrap();
        let out = conjugate_stack(&stack, &q0, &tol()).unwrap();
        assert!(matcore::max_entry_diff(&out.blocks()[0], &q0) < 1e-12);
    }

    #[test]
    fn conjugation_leaves_sv_bound_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let stack = random_kraus_stack(&mut rng, 3, 4, 2, &tol()).unwrap();
            let q = random_unitary(&mut rng, 3);
            let b0 = partial_u_bounds(&stack).unwrap();
            let b1 = partial_u_bounds(&conjugate_stack(&stack, &q, &tol()).unwrap()).unwrap();
            assert!((b0.sv.radians() - b1.sv.radians()).abs() < 1e-9);
        }
    }

    #[test]
    fn completion_identity_diagonal() {
        let stack = KrausStack::new(vec![identity(2)], &tol()).unwrap();
        let u = complete_unitary_diagonal(&stack, &tol()).unwrap();
        assert!(matcore::max_entry_diff(&u, &identity(2)) < 1e-12);
    }

    #[test]
    fn completion_cos_diagonal_achieves_phi() {
        let phi = FRAC_PI_6;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(phi.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(phi.cos(), 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let u = complete_unitary_diagonal(&stack, &tol()).unwrap();
        assert!(is_unitary(&u, &tol()));
        let cost = maxnorm_unitary(&u, &tol()).unwrap();
        assert!((cost.radians() - phi).abs() < 1e-9);
        // first columns reproduce the stack
        let g = stack.stacked();
        for j in 0..2 {
            for i in 0..g.nrows() {
                assert!((u[(i, j)] - g[(i, j)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn completion_quarter_rotation() {
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let u = complete_unitary_diagonal(&stack, &tol()).unwrap();
        let cost = maxnorm_unitary(&u, &tol()).unwrap();
        assert!((cost.radians() - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn completion_rejects_non_diagonal_block() {
        let s = FRAC_1_SQRT_2;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
        );
        let stack = stack_with_first_block(f1);
        assert!(matches!(
            complete_unitary_diagonal(&stack, &tol()),
            Err(TeqError::InvalidInput(_))
        ));
    }

    #[test]
    fn hermitian_exact_cases() {
        let t = tol();
        let stack = KrausStack::new(vec![identity(2)], &t).unwrap();
        assert!(exact_cost_hermitian(&stack, &t).unwrap().radians() < 1e-12);

        let phi = FRAC_PI_6;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(phi.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(phi.sin(), 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let cost = exact_cost_hermitian(&stack, &t).unwrap();
        // lambda_min = sin(pi/6) = 1/2
        assert!((cost.radians() - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn hermitian_negative_min_eigenvalue() {
        let t = tol();
        let s = FRAC_1_SQRT_2;
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(-s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        );
        let stack = stack_with_first_block(f1);
        let cost = exact_cost_hermitian(&stack, &t).unwrap();
        assert!((cost.radians() - 3.0 * FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let t = tol();
        let f1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.5, 0.2), c(0.5, 0.3), c(0.5, 0.0)],
        );
        let stack = stack_with_first_block(f1);
        assert!(matches!(
            exact_cost_hermitian(&stack, &t),
            Err(TeqError::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_exact_matches_completion_route() {
        // diagonalize F_1, complete the diagonal stack, conjugate back; the
        // costs agree because conjugation preserves the optimum
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let q = random_unitary(&mut rng, 3);
            let evs = [0.9, 0.4, -0.2];
            let d = ComplexMatrix::from_fn(3, 3, |i, j| {
                if i == j {
                    c(evs[i], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            });
            let f1 = &q * &d * q.adjoint();
            let stack = stack_with_first_block(f1);
            let direct = exact_cost_hermitian(&stack, &t).unwrap();

            let diag_stack = conjugate_stack(&stack, &q.adjoint(), &t).unwrap();
            let completion = complete_unitary_diagonal(&diag_stack, &t).unwrap();
            let via_completion = maxnorm_unitary(&completion, &t).unwrap();
            assert!((direct.radians() - via_completion.radians()).abs() < 1e-9);
            assert!((direct.radians() - CostAngle::from_cos(-0.2).radians()).abs() < 1e-9);
        }
    }

    #[test]
    fn random_completions_dominate_bounds() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut trials = 0;
        while trials < 50 {
            let n = rng.gen_range(2..=4usize);
            let m = rng.gen_range(n..=n + 2);
            let k = rng.gen_range(1..=3usize);
            let stack = random_kraus_stack(&mut rng, n, m, k, &t).unwrap();
            let bounds = partial_u_bounds(&stack).unwrap();
            let u = complete_stack_randomly(&stack, &mut rng);
            let cost = maxnorm_unitary(&u, &t).unwrap();
            assert!(
                cost.radians() >= bounds.best.radians() - 1e-9,
                "cost {} < best bound {}",
                cost.radians(),
                bounds.best.radians()
            );
            trials += 1;
        }
    }

    #[test]
    fn sv_bound_below_diag1() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let stack = random_kraus_stack(&mut rng, 3, 3, 2, &t).unwrap();
            let b = partial_u_bounds(&stack).unwrap();
            assert!(b.sv.radians() <= b.diag1.radians() + 1e-12);
        }
    }

    #[test]
    fn maxnorm_invariant_under_similarity() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let u = random_unitary(&mut rng, 4);
            let v = random_unitary(&mut rng, 4);
            let conj = &v * &u * v.adjoint();
            let a = maxnorm_unitary(&u, &t).unwrap();
            let b = maxnorm_unitary(&conj, &t).unwrap();
            assert!((a.radians() - b.radians()).abs() < 1e-9);
        }
    }

    use rand::Rng;
}
