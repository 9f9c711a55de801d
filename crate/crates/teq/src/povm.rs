//! POVM cost engine: validation, Kraus embedding, the element-ordering exact
//! cost, the column (Method 1) and pooled-singular-value (Method 2) lower
//! bounds, and the certificate search that promotes the sigma_n bound to an
//! exact cost when a PSD-Hermitian minimizing block exists.

use crate::error::{Result, TeqError};
use crate::matcore::{
    self, hermitian_eig, hermitian_eigenvalues, identity, max_entry_diff, principal_sqrt,
    ComplexMatrix, ComplexVector, Tolerance, C64,
};
use crate::par;
use crate::ucost::{CostAngle, KrausStack};

/// A validated POVM: `K` positive-semidefinite `n x n` elements summing to
/// the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validate and wrap raw elements, reporting every violated invariant
    /// with its magnitude.
    pub fn new(elements: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        let mut violations = Vec::new();
        if elements.is_empty() {
            return Err(TeqError::InvalidPovm {
                violations: vec!["no elements".into()],
            });
        }
        let n = elements[0].nrows();
        for (i, m) in elements.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                violations.push(format!(
                    "element {i} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                ));
            }
        }
        if !violations.is_empty() {
            return Err(TeqError::InvalidPovm { violations });
        }
        for (i, m) in elements.iter().enumerate() {
            if !matcore::all_finite(m) {
                violations.push(format!("element {i} has non-finite entries"));
                continue;
            }
            let herm_dev = matcore::hermitian_deviation(m);
            if herm_dev > tol.validation_eps {
                violations.push(format!(
                    "element {i} not Hermitian (deviation {herm_dev:.3e})"
                ));
            } else {
                let evs = hermitian_eigenvalues(m)?;
                let min_ev = evs.iter().cloned().fold(f64::INFINITY, f64::min);
                if min_ev < -tol.validation_eps {
                    violations.push(format!(
                        "element {i} not PSD (min eigenvalue {min_ev:.3e})"
                    ));
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(n, n);
        for m in &elements {
            sum += m;
        }
        let comp_dev = max_entry_diff(&sum, &identity(n));
        if comp_dev > tol.validation_eps {
            violations.push(format!(
                "completeness violated: sum deviates from identity by {comp_dev:.3e}"
            ));
        }
        if violations.is_empty() {
            Ok(Povm { n, elements })
        } else {
            Err(TeqError::InvalidPovm { violations })
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Validate a raw element list into a [`Povm`].
pub fn validate_povm(raw: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Povm> {
    Povm::new(raw, tol)
}

/// Embed a POVM into a Kraus stack with `F_i = sqrt(M_order(i))`. No zero
/// padding is materialized (`m = n`); the identity is used for every free
/// rotation.
pub fn embed_kraus(povm: &Povm, order: &[usize], tol: &Tolerance) -> Result<KrausStack> {
    let k = povm.num_elements();
    if order.len() != k {
        return Err(TeqError::InvalidInput(format!(
            "order has {} entries, POVM has {k} elements",
            order.len()
        )));
    }
    let mut seen = vec![false; k];
    for &i in order {
        if i >= k || seen[i] {
            return Err(TeqError::InvalidInput(format!(
                "order is not a permutation of 0..{k}"
            )));
        }
        seen[i] = true;
    }
    let blocks = order
        .iter()
        .map(|&i| principal_sqrt(&povm.elements()[i], tol))
        .collect::<Result<Vec<_>>>()?;
    // allow a little headroom: each sqrt contributes rounding on top of the
    // POVM's own completeness slack
    let stack_tol = Tolerance {
        validation_eps: tol.validation_eps * 4.0 + 1e-12,
        certificate_eps: tol.certificate_eps,
    };
    KrausStack::new(blocks, &stack_tol)
}

/// Exact cost when relabeling whole POVM elements only:
/// `min_k acos(sigma_min(sqrt(M_k))) = acos(max_k sigma_min(sqrt(M_k)))`.
pub fn element_order_cost(povm: &Povm) -> Result<CostAngle> {
    let mut best = f64::NEG_INFINITY;
    for m in povm.elements() {
        let evs = hermitian_eigenvalues(m)?;
        let min_ev = evs.iter().cloned().fold(f64::INFINITY, f64::min);
        best = best.max(min_ev.max(0.0).sqrt());
    }
    Ok(CostAngle::from_cos(best))
}

/// Method-1 lower bound: `acos(min_i max_j ||column i of sqrt(M_j)||)`.
pub fn method1_bound(povm: &Povm, tol: &Tolerance) -> Result<CostAngle> {
    let n = povm.dim();
    let roots = povm
        .elements()
        .iter()
        .map(|m| principal_sqrt(m, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut worst_col = f64::INFINITY;
    for i in 0..n {
        let mut best_norm = 0.0f64;
        for r in &roots {
            best_norm = best_norm.max(r.column(i).norm());
        }
        worst_col = worst_col.min(best_norm);
    }
    Ok(CostAngle::from_cos(worst_col))
}

/// Column corollary: if some `sqrt(M_j)` has a column of norm `c >= 1/sqrt 2`,
/// the cost is at least `acos(c)` (for the largest such `c`). Subsumed by the
/// Method-1 bound; kept as an independent cross-check.
pub fn column_corollary_bound(povm: &Povm, tol: &Tolerance) -> Result<Option<CostAngle>> {
    let mut best: Option<f64> = None;
    for m in povm.elements() {
        let r = principal_sqrt(m, tol)?;
        for i in 0..povm.dim() {
            let norm = r.column(i).norm();
            if norm >= std::f64::consts::FRAC_1_SQRT_2 {
                best = Some(best.map_or(norm, |b: f64| b.max(norm)));
            }
        }
    }
    Ok(best.map(CostAngle::from_cos))
}

/// Pooled singular values of all `sqrt(M_i)`, sorted nonincreasing. These are
/// the square roots of the (clamped) eigenvalues of the elements.
fn pooled_sigmas(povm: &Povm) -> Result<Vec<f64>> {
    let mut pool = Vec::with_capacity(povm.num_elements() * povm.dim());
    for m in povm.elements() {
        for ev in hermitian_eigenvalues(m)? {
            pool.push(ev.max(0.0).sqrt());
        }
    }
    pool.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(pool)
}

/// Method-2 pooled bound: `acos(sigma_n)` with `sigma_n` the nth largest
/// singular value over all `sqrt(M_i)`.
pub fn sigma_n_bound(povm: &Povm) -> Result<CostAngle> {
    let pool = pooled_sigmas(povm)?;
    Ok(CostAngle::from_cos(pool[povm.dim() - 1]))
}

/// One row of the left-canceled canonical form `Lambda_i Q_i^H` of
/// `sqrt(M_i)`, with provenance.
#[derive(Debug, Clone)]
pub struct CanonicalRow {
    pub element: usize,
    /// Index into the element's nonincreasing eigenvalue list.
    pub eig_index: usize,
    /// Singular value of the row; equals its Euclidean norm.
    pub sigma: f64,
    /// The row as a length-n vector of entries.
    pub entries: ComplexVector,
}

/// All `K*n` canonical rows of a POVM, grouped by element, each element's
/// rows sorted by nonincreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct CanonicalRows {
    pub n: usize,
    pub rows: Vec<CanonicalRow>,
}

/// Build the canonical rows: eigendecompose each element `M_i = Q D Q^H`,
/// take `sqrt(M_i) = Q sqrt(D) Q^H` and cancel the left factor, leaving rows
/// `sqrt(D) Q^H` whose norms are the singular values.
pub fn canonical_rows(povm: &Povm) -> Result<CanonicalRows> {
    let n = povm.dim();
    let mut rows = Vec::with_capacity(povm.num_elements() * n);
    for (idx, m) in povm.elements().iter().enumerate() {
        let (values, q) = hermitian_eig(m)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
        for (eig_index, &j) in order.iter().enumerate() {
            let sigma = values[j].max(0.0).sqrt();
            let entries =
                ComplexVector::from_fn(n, |col, _| q[(col, j)].conj() * C64::new(sigma, 0.0));
            rows.push(CanonicalRow {
                element: idx,
                eig_index,
                sigma,
                entries,
            });
        }
    }
    Ok(CanonicalRows { n, rows })
}

/// Budget for the certificate enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationBudget {
    pub max_candidates: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_candidates: 1_000_000,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_candidates: usize) -> Result<Self> {
        if max_candidates == 0 {
            return Err(TeqError::OutOfRange {
                what: "max_candidates",
                value: 0.0,
            });
        }
        Ok(EnumerationBudget { max_candidates })
    }
}

/// A row selection whose block reaches `sigma_n`, certifying that the
/// Method-2 minimization is settled (and, when the block is Hermitian with
/// nonnegative spectrum, that the cost is exactly `acos(sigma_min)`).
#[derive(Debug, Clone)]
pub struct Certificate {
    /// Selected rows as (element, eigenvalue index) pairs, sorted.
    pub rows: Vec<(usize, usize)>,
    /// The selected block, rows arranged as reported.
    pub block: ComplexMatrix,
    pub sigma_min: f64,
    /// Hermitian with nonnegative spectrum (within `certificate_eps`). Only
    /// such blocks admit the exact-cost conclusion; a Hermitian block with a
    /// negative eigenvalue has `acos(lambda_min) != acos(sigma_min)`.
    pub hermitian: bool,
}

/// Outcome of the certificate enumeration.
#[derive(Debug, Clone)]
pub struct CertificateOutcome {
    /// Present when the best selection's `sigma_min` reaches `sigma_n` within
    /// `certificate_eps`. Absence is a valid outcome.
    pub certificate: Option<Certificate>,
    /// True when the candidate set or the enumeration was truncated.
    pub exhausted: bool,
}

struct Candidate {
    sigma_min: f64,
    provenance: Vec<(usize, usize)>,
    selection: Vec<usize>,
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    if a.sigma_min > b.sigma_min {
        a
    } else if b.sigma_min > a.sigma_min {
        b
    } else if a.provenance <= b.provenance {
        a
    } else {
        b
    }
}

/// Pascal triangle with saturating entries, for combination counting and
/// unranking.
struct Binomials {
    table: Vec<Vec<u128>>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let mut table = vec![vec![1u128]];
        for i in 1..=n {
            let prev = &table[i - 1];
            let mut row = vec![1u128; i + 1];
            for j in 1..i {
                row[j] = prev[j - 1].saturating_add(prev[j]);
            }
            table.push(row);
        }
        Binomials { table }
    }

    fn get(&self, n: usize, k: usize) -> u128 {
        if k > n {
            0
        } else {
            self.table[n][k]
        }
    }

    /// Lexicographic unranking of the `rank`-th k-combination of `0..n`.
    fn unrank(&self, mut rank: u128, n: usize, k: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        let mut x = 0usize;
        let mut remaining = k;
        while remaining > 0 {
            let c = self.get(n - 1 - x, remaining - 1);
            if rank < c {
                out.push(x);
                remaining -= 1;
            } else {
                rank -= c;
            }
            x += 1;
        }
        out
    }
}

fn build_block(rows: &CanonicalRows, selection: &[usize], order: &[usize]) -> ComplexMatrix {
    let n = rows.n;
    ComplexMatrix::from_fn(n, n, |r, c| rows.rows[selection[order[r]]].entries[c])
}

/// Hermitian-with-nonnegative-spectrum test under `certificate_eps`.
fn is_certificate_block(block: &ComplexMatrix, tol: &Tolerance) -> bool {
    if matcore::hermitian_deviation(block) > tol.certificate_eps {
        return false;
    }
    match hermitian_eigenvalues(block) {
        Ok(evs) => evs.iter().cloned().fold(f64::INFINITY, f64::min) >= -tol.certificate_eps,
        Err(_) => false,
    }
}

/// Search row arrangements for one that passes the certificate-block test.
/// Rows of a combination are unordered, but Hermiticity depends on where each
/// row is placed, so arrangement matters. Tries the dominant-coordinate
/// placement first, then (for small n) all permutations.
fn find_certificate_arrangement(
    rows: &CanonicalRows,
    selection: &[usize],
    tol: &Tolerance,
) -> (ComplexMatrix, bool) {
    let n = rows.n;
    let ident: Vec<usize> = (0..n).collect();

    // dominant coordinate: place each row at the index of its largest entry
    let mut greedy: Vec<Option<usize>> = vec![None; n];
    let mut feasible = true;
    for (slot, &ri) in selection.iter().enumerate() {
        let row = &rows.rows[ri].entries;
        let mut best = 0usize;
        let mut best_mag = -1.0;
        for c in 0..n {
            let mag = row[c].norm();
            if mag > best_mag + 1e-15 {
                best_mag = mag;
                best = c;
            }
        }
        if greedy[best].is_none() {
            greedy[best] = Some(slot);
        } else {
            feasible = false;
            break;
        }
    }
    if feasible {
        let order: Vec<usize> = greedy.into_iter().map(|s| s.unwrap()).collect();
        let block = build_block(rows, selection, &order);
        if is_certificate_block(&block, tol) {
            return (block, true);
        }
    }

    if n <= 7 {
        let mut order = ident.clone();
        loop {
            let block = build_block(rows, selection, &order);
            if is_certificate_block(&block, tol) {
                return (block, true);
            }
            if !next_permutation(&mut order) {
                break;
            }
        }
    }

    (build_block(rows, selection, &ident), false)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Enumerate unordered n-subsets of the canonical rows, maximizing
/// `sigma_min` of the selected block. When the full combination count exceeds
/// the budget, the row set is restricted to the `n + K` largest pooled
/// singular values; if that still exceeds the budget, only the first
/// `max_candidates` combinations (in lexicographic order over the
/// sigma-sorted restricted rows) are evaluated. Any restriction or truncation
/// sets `exhausted`.
pub fn certificate_search(
    povm: &Povm,
    budget: &EnumerationBudget,
    tol: &Tolerance,
) -> Result<CertificateOutcome> {
    let n = povm.dim();
    let rows = canonical_rows(povm)?;
    let pool = pooled_sigmas(povm)?;
    let sigma_n = pool[n - 1];

    let total_rows = rows.rows.len();
    let binom = Binomials::new(total_rows);
    let budget_u128 = budget.max_candidates as u128;

    let mut candidate_rows: Vec<usize> = (0..total_rows).collect();
    let mut exhausted = false;
    if binom.get(total_rows, n) > budget_u128 {
        // keep the n + K rows with the largest singular values, provenance
        // order breaking ties
        candidate_rows.sort_by(|&a, &b| {
            let (ra, rb) = (&rows.rows[a], &rows.rows[b]);
            rb.sigma
                .partial_cmp(&ra.sigma)
                .unwrap()
                .then_with(|| (ra.element, ra.eig_index).cmp(&(rb.element, rb.eig_index)))
        });
        candidate_rows.truncate(n + povm.num_elements());
        exhausted = true;
    }

    let m = candidate_rows.len();
    let combos = binom.get(m, n);
    let eval_count = combos.min(budget_u128) as usize;
    if combos > budget_u128 {
        exhausted = true;
    }

    let evaluate = |rank: usize| -> Candidate {
        let picks = binom.unrank(rank as u128, m, n);
        let selection: Vec<usize> = picks.iter().map(|&p| candidate_rows[p]).collect();
        let ident: Vec<usize> = (0..n).collect();
        let block = build_block(&rows, &selection, &ident);
        let sigma_min = matcore::sigma_min(&block).unwrap_or(0.0);
        let mut provenance: Vec<(usize, usize)> = selection
            .iter()
            .map(|&ri| (rows.rows[ri].element, rows.rows[ri].eig_index))
            .collect();
        provenance.sort_unstable();
        Candidate {
            sigma_min,
            provenance,
            selection,
        }
    };

    let best = par::map_reduce(eval_count, evaluate, better)
        .expect("at least one candidate is always enumerated");

    let certificate = if (best.sigma_min - sigma_n).abs() <= tol.certificate_eps {
        let (block, hermitian) = find_certificate_arrangement(&rows, &best.selection, tol);
        Some(Certificate {
            rows: best.provenance,
            block,
            sigma_min: best.sigma_min,
            hermitian,
        })
    } else {
        None
    };

    Ok(CertificateOutcome {
        certificate,
        exhausted,
    })
}

/// Full bound report for a POVM.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// `max(method1, sigma_n_bound)`; the engine's sound lower bound.
    pub lower: CostAngle,
    /// Element-ordering exact cost, an upper bound for the general problem.
    pub upper: Option<CostAngle>,
    /// True when `lower` is the exact cost (PSD-Hermitian certificate, or
    /// lower meets upper within `certificate_eps`).
    pub exact: bool,
    pub method1: CostAngle,
    pub sigma_n_bound: CostAngle,
    pub element_order_cost: CostAngle,
    pub certificate: Option<Certificate>,
    pub exhausted: bool,
}

/// Assemble every bound plus the certificate verdict.
pub fn povm_cost(povm: &Povm, budget: &EnumerationBudget, tol: &Tolerance) -> Result<BoundReport> {
    let method1 = method1_bound(povm, tol)?;
    let sn = sigma_n_bound(povm)?;
    let eoc = element_order_cost(povm)?;
    let outcome = certificate_search(povm, budget, tol)?;

    let lower = method1.max(sn);
    let cert_exact = outcome
        .certificate
        .as_ref()
        .map(|c| c.hermitian)
        .unwrap_or(false);
    let gap_exact = (eoc.radians() - lower.radians()).abs() <= tol.certificate_eps;

    Ok(BoundReport {
        lower,
        upper: Some(eoc),
        exact: cert_exact || gap_exact,
        method1,
        sigma_n_bound: sn,
        element_order_cost: eoc,
        certificate: outcome.certificate,
        exhausted: outcome.exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{
        computational_basis_povm, rank2_povm, singlet_projector_povm, two_bell_povm,
    };
    use crate::random::{
        complete_stack_randomly, permute_rows, random_permutation, random_povm, random_unitary,
    };
    use crate::ucost::maxnorm_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_accepts_identity_and_projective() {
        let t = tol();
        let p = Povm::new(vec![identity(2)], &t).unwrap();
        assert_eq!(p.num_elements(), 1);
        assert!(computational_basis_povm(2, &t).is_ok());
    }

    #[test]
    fn validate_rejects_overcomplete() {
        let t = tol();
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)],
        );
        match Povm::new(vec![m.clone(), m], &t) {
            Err(TeqError::InvalidPovm { violations }) => {
                assert!(violations.iter().any(|v| v.contains("completeness")));
                assert!(violations.iter().any(|v| v.contains("2.000e-1")));
            }
            other => panic!("expected InvalidPovm, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_non_psd_element() {
        let t = tol();
        let m1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        );
        let m2 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        );
        match Povm::new(vec![m1, m2], &t) {
            Err(TeqError::InvalidPovm { violations }) => {
                assert!(violations.iter().any(|v| v.contains("not PSD")));
            }
            other => panic!("expected InvalidPovm, got {other:?}"),
        }
    }

    #[test]
    fn embed_identity_povm() {
        let t = tol();
        let p = Povm::new(vec![identity(3)], &t).unwrap();
        let stack = embed_kraus(&p, &[0], &t).unwrap();
        assert_eq!(stack.num_operators(), 1);
        assert!(max_entry_diff(&stack.blocks()[0], &identity(3)) < 1e-12);
    }

    #[test]
    fn embed_projective_blocks() {
        let t = tol();
        let p = computational_basis_povm(2, &t).unwrap();
        let stack = embed_kraus(&p, &[0, 1], &t).unwrap();
        for (i, b) in stack.blocks().iter().enumerate() {
            assert!(max_entry_diff(b, &p.elements()[i]) < 1e-12);
        }
    }

    #[test]
    fn embed_rank2_roots() {
        let t = tol();
        let phi = FRAC_PI_6;
        let p = rank2_povm(phi, &t).unwrap();
        let stack = embed_kraus(&p, &[0, 1], &t).unwrap();
        let b0 = &stack.blocks()[0];
        assert!((b0[(0, 0)].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((b0[(1, 1)].re - 0.5).abs() < 1e-12);
        let b1 = &stack.blocks()[1];
        assert!((b1[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((b1[(1, 1)].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn element_order_cost_cases() {
        let t = tol();
        assert_eq!(
            element_order_cost(&Povm::new(vec![identity(2)], &t).unwrap())
                .unwrap()
                .radians(),
            0.0
        );
        // both elements of the singlet pair have sigma_min(sqrt) = 0
        let singlet = singlet_projector_povm(&t).unwrap();
        assert!(
            (element_order_cost(&singlet).unwrap().radians() - FRAC_PI_2).abs() < 1e-12
        );
        // rank-2 at pi/6: roots diag(sqrt3/2, 1/2) and diag(1/2, sqrt3/2),
        // sigma_min = 1/2 for both, cost acos(1/2) = pi/3
        let rank2 = rank2_povm(FRAC_PI_6, &t).unwrap();
        assert!((element_order_cost(&rank2).unwrap().radians() - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn method1_cases() {
        let t = tol();
        assert_eq!(
            method1_bound(&Povm::new(vec![identity(2)], &t).unwrap(), &t)
                .unwrap()
                .radians(),
            0.0
        );
        let singlet = singlet_projector_povm(&t).unwrap();
        assert!((method1_bound(&singlet, &t).unwrap().radians() - FRAC_PI_4).abs() < 1e-9);
        let basis = computational_basis_povm(3, &t).unwrap();
        assert!(method1_bound(&basis, &t).unwrap().radians() < 1e-9);
    }

    #[test]
    fn corollary_cases() {
        let t = tol();
        let singlet = singlet_projector_povm(&t).unwrap();
        let b = column_corollary_bound(&singlet, &t).unwrap().unwrap();
        // the singlet projector's columns have norm exactly 1/sqrt(2); the
        // complement contributes two full-norm columns, so c = 1 wins
        assert!(b.radians() <= FRAC_PI_4 + 1e-12);
        let ident = Povm::new(vec![identity(2)], &t).unwrap();
        assert_eq!(column_corollary_bound(&ident, &t).unwrap().unwrap().radians(), 0.0);
        // K equal copies of I/3: every column norm is 1/sqrt(3) < 1/sqrt(2)
        let third = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(1.0 / 3.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let flat = Povm::new(vec![third.clone(), third.clone(), third], &t).unwrap();
        assert!(column_corollary_bound(&flat, &t).unwrap().is_none());
    }

    #[test]
    fn sigma_n_cases() {
        let t = tol();
        let basis = computational_basis_povm(2, &t).unwrap();
        assert!(sigma_n_bound(&basis).unwrap().radians() < 1e-9);
        let phi = 0.3;
        let rank2 = rank2_povm(phi, &t).unwrap();
        assert!((sigma_n_bound(&rank2).unwrap().radians() - phi).abs() < 1e-9);
        let ident = Povm::new(vec![identity(4)], &t).unwrap();
        assert!(sigma_n_bound(&ident).unwrap().radians() < 1e-9);
    }

    #[test]
    fn canonical_row_norms_match_eigenvalues() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..10 {
            let p = random_povm(&mut rng, 3, 3, &t).unwrap();
            let rows = canonical_rows(&p).unwrap();
            for row in &rows.rows {
                assert!((row.entries.norm() - row.sigma).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn certificate_rank2_small_angle() {
        let t = tol();
        let phi = FRAC_PI_6;
        let p = rank2_povm(phi, &t).unwrap();
        let out = certificate_search(&p, &budget(), &t).unwrap();
        assert!(!out.exhausted);
        let cert = out.certificate.expect("certificate expected");
        assert!((cert.sigma_min - phi.cos()).abs() < 1e-9);
        assert!(cert.hermitian);
        // first row of sqrt(M_1) and second row of sqrt(M_2): both are the
        // top (eig_index 0) rows of their elements
        assert_eq!(cert.rows, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn certificate_rank2_large_angle() {
        let t = tol();
        let phi = FRAC_PI_3;
        let p = rank2_povm(phi, &t).unwrap();
        let out = certificate_search(&p, &budget(), &t).unwrap();
        let cert = out.certificate.expect("certificate expected");
        assert!((cert.sigma_min - phi.sin()).abs() < 1e-9);
        assert!(cert.hermitian);
        assert!((CostAngle::from_cos(cert.sigma_min).radians() - (FRAC_PI_2 - phi)).abs() < 1e-9);
    }

    #[test]
    fn certificate_computational_basis_matches_brute_force() {
        let t = tol();
        let p = computational_basis_povm(2, &t).unwrap();
        let out = certificate_search(&p, &budget(), &t).unwrap();
        let cert = out.certificate.expect("certificate expected");
        assert!((cert.sigma_min - 1.0).abs() < 1e-9);
        assert!(cert.hermitian);

        // independent brute force over all 6 unordered row pairs
        let rows = canonical_rows(&p).unwrap();
        let mut best = 0.0f64;
        for a in 0..4 {
            for b in (a + 1)..4 {
                let block = ComplexMatrix::from_fn(2, 2, |r, col| {
                    let ri = if r == 0 { a } else { b };
                    rows.rows[ri].entries[col]
                });
                best = best.max(matcore::sigma_min(&block).unwrap());
            }
        }
        assert!((best - cert.sigma_min).abs() < 1e-12);
    }

    #[test]
    fn povm_cost_rank2_sweep_exact_law() {
        let t = tol();
        let b = budget();
        for step in 1..=15 {
            let phi = 0.1 * step as f64;
            let p = rank2_povm(phi, &t).unwrap();
            let report = povm_cost(&p, &b, &t).unwrap();
            let expected = if phi < FRAC_PI_4 { phi } else { FRAC_PI_2 - phi };
            assert!(report.exact, "phi = {phi}");
            assert!(
                (report.lower.radians() - expected).abs() < 1e-9,
                "phi = {phi}: lower = {}, expected {expected}",
                report.lower.radians()
            );
        }
    }

    #[test]
    fn povm_cost_identity_all_zero() {
        let t = tol();
        let p = Povm::new(vec![identity(3)], &t).unwrap();
        let report = povm_cost(&p, &budget(), &t).unwrap();
        assert!(report.exact);
        assert_eq!(report.lower.radians(), 0.0);
        assert_eq!(report.upper.unwrap().radians(), 0.0);
    }

    #[test]
    fn povm_cost_singlet_lower_pi_over_4() {
        let t = tol();
        let p = singlet_projector_povm(&t).unwrap();
        let report = povm_cost(&p, &budget(), &t).unwrap();
        assert!(report.lower.radians() >= FRAC_PI_4 - 1e-9);
        assert!((report.method1.radians() - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn povm_cost_two_bell_lower_pi_over_4() {
        let t = tol();
        let p = two_bell_povm(&t).unwrap();
        let report = povm_cost(&p, &budget(), &t).unwrap();
        assert!((report.lower.radians() - FRAC_PI_4).abs() < 1e-7);
    }

    #[test]
    fn soundness_lower_below_upper() {
        let t = tol();
        let b = budget();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..30 {
            let p = random_povm(&mut rng, 3, 3, &t).unwrap();
            let report = povm_cost(&p, &b, &t).unwrap();
            assert!(report.lower.radians() <= report.upper.unwrap().radians() + 1e-9);
        }
    }

    #[test]
    fn dominance_random_completions() {
        let t = tol();
        let b = budget();
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..25 {
            let n = rng.gen_range(2..=4usize);
            let k = rng.gen_range(1..=4usize);
            let p = random_povm(&mut rng, n, k, &t).unwrap();
            let report = povm_cost(&p, &b, &t).unwrap();
            let order: Vec<usize> = (0..k).collect();
            let stack = embed_kraus(&p, &order, &t).unwrap();
            for _ in 0..4 {
                let u = complete_stack_randomly(&stack, &mut rng);
                let perm = random_permutation(&mut rng, u.nrows());
                let pu = permute_rows(&u, &perm);
                let cost = maxnorm_unitary(&pu, &t).unwrap();
                assert!(
                    cost.radians() >= report.lower.radians() - 1e-9,
                    "maxnorm {} below lower bound {}",
                    cost.radians(),
                    report.lower.radians()
                );
            }
        }
    }

    #[test]
    fn basis_covariance_of_spectral_bounds() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let p = random_povm(&mut rng, 3, 3, &t).unwrap();
            let w = random_unitary(&mut rng, 3);
            let conj: Vec<ComplexMatrix> = p
                .elements()
                .iter()
                .map(|m| &w * m * w.adjoint())
                .collect();
            let pc = Povm::new(conj, &t).unwrap();
            assert!(
                (sigma_n_bound(&p).unwrap().radians() - sigma_n_bound(&pc).unwrap().radians())
                    .abs()
                    < 1e-9
            );
            assert!(
                (element_order_cost(&p).unwrap().radians()
                    - element_order_cost(&pc).unwrap().radians())
                .abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn certificate_value_equals_lower_when_exact() {
        let t = tol();
        let b = budget();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..20 {
            let p = random_povm(&mut rng, 3, 2, &t).unwrap();
            let report = povm_cost(&p, &b, &t).unwrap();
            if let Some(cert) = &report.certificate {
                if cert.hermitian {
                    assert!(report.exact);
                    let value = CostAngle::from_cos(cert.sigma_min);
                    assert!((value.radians() - report.lower.radians()).abs() < t.certificate_eps);
                }
            }
        }
    }

    #[test]
    fn budget_restriction_sets_exhausted() {
        let t = tol();
        let p = computational_basis_povm(3, &t).unwrap();
        // C(9, 3) = 84 > 5, so the row set is restricted and flagged
        let out = certificate_search(&p, &EnumerationBudget::new(5).unwrap(), &t).unwrap();
        assert!(out.exhausted);
        // the lex-first combination over sigma-sorted rows is the top-n rows,
        // which for a projective POVM already certifies sigma_n = 1
        assert!(out.certificate.is_some());
    }

    use rand::Rng;
}
