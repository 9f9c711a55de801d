//! Named measurement presets used by the CLI reproduction targets and tests:
//! Bell-state projector POVMs and the two-outcome rank-2 optical POVM.

use crate::error::Result;
use crate::matcore::{identity, ComplexMatrix, ComplexVector, Tolerance, C64};
use crate::povm::Povm;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Singlet Bell state in the product basis {VH, HV, VV, HH}.
pub fn singlet_state() -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector::from_vec(vec![c(s, 0.0), c(-s, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

/// Triplet Bell state (the symmetric one in the same basis).
pub fn psi_plus_state() -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector::from_vec(vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

/// Two-outcome POVM {P_singlet, I - P_singlet}.
pub fn singlet_projector_povm(tol: &Tolerance) -> Result<Povm> {
    let v = singlet_state();
    let p = &v * v.adjoint();
    let rest = identity(4) - &p;
    Povm::new(vec![p, rest], tol)
}

/// Three-outcome POVM {P_singlet, P_triplet, rest}.
pub fn two_bell_povm(tol: &Tolerance) -> Result<Povm> {
    let minus = singlet_state();
    let plus = psi_plus_state();
    let p_minus = &minus * minus.adjoint();
    let p_plus = &plus * plus.adjoint();
    let rest = identity(4) - &p_minus - &p_plus;
    Povm::new(vec![p_minus, p_plus, rest], tol)
}

/// The rank-2 two-outcome POVM diag(cos^2 phi, sin^2 phi), diag(sin^2 phi,
/// cos^2 phi) in its natural basis.
pub fn rank2_povm(phi: f64, tol: &Tolerance) -> Result<Povm> {
    let (s2, c2) = (phi.sin().powi(2), phi.cos().powi(2));
    let m1 = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(c2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s2, 0.0)],
    );
    let m2 = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(s2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(c2, 0.0)],
    );
    Povm::new(vec![m1, m2], tol)
}

/// N-outcome computational-basis projective POVM.
pub fn computational_basis_povm(n: usize, tol: &Tolerance) -> Result<Povm> {
    let elements = (0..n)
        .map(|i| {
            ComplexMatrix::from_fn(n, n, |r, col| {
                if r == i && col == i {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
        })
        .collect();
    Povm::new(elements, tol)
}
