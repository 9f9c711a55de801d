//! Optimal unambiguous discrimination of geometrically uniform states:
//! family construction, the pseudoinverse POVM synthesis, the cost lower
//! bound, coherent-state families, and the intensity/count sweep.

use std::f64::consts::PI;

use crate::error::{Result, TeqError};
use crate::matcore::{
    self, identity, max_entry_diff, pinv, ComplexMatrix, ComplexVector, Tolerance, C64,
};
use crate::par;
use crate::povm::Povm;
use crate::ucost::CostAngle;

/// Orbit of a seed state under a finite unitary group. For the cyclic case
/// the group elements are the powers of a single generator.
#[derive(Debug, Clone)]
pub struct GUFamily {
    n: usize,
    /// Group elements, `U_0 = I` first. States are `elements[i] * seed`.
    elements: Vec<ComplexMatrix>,
    /// Present for cyclic families.
    generator: Option<ComplexMatrix>,
    seed: ComplexVector,
    states: Vec<ComplexVector>,
}

impl GUFamily {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of states (the paper-style K - 1).
    pub fn k_bar(&self) -> usize {
        self.states.len()
    }

    pub fn seed(&self) -> &ComplexVector {
        &self.seed
    }

    pub fn states(&self) -> &[ComplexVector] {
        &self.states
    }

    pub fn group_elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn generator(&self) -> Option<&ComplexMatrix> {
        self.generator.as_ref()
    }

    /// Matrix whose columns are the states.
    pub fn phi_matrix(&self) -> ComplexMatrix {
        let mut phi = ComplexMatrix::zeros(self.n, self.states.len());
        for (j, s) in self.states.iter().enumerate() {
            phi.set_column(j, s);
        }
        phi
    }

    /// General constructor from an explicit group element list. Validates
    /// closure under products and adjoints within 1e-8 and that the first
    /// element is the identity.
    pub fn from_group(
        elements: Vec<ComplexMatrix>,
        seed: ComplexVector,
        tol: &Tolerance,
    ) -> Result<Self> {
        const GROUP_EPS: f64 = 1e-8;
        if elements.len() < 2 {
            return Err(TeqError::InvalidInput(
                "a GU family needs at least two group elements".into(),
            ));
        }
        let n = seed.len();
        let norm = seed.norm();
        if (norm - 1.0).abs() > tol.validation_eps {
            return Err(TeqError::NotUnitVector {
                norm,
                eps: tol.validation_eps,
            });
        }
        for (i, u) in elements.iter().enumerate() {
            if u.shape() != (n, n) {
                return Err(TeqError::DimensionMismatch {
                    expected: format!("{n}x{n} group element"),
                    found: format!("{}x{} at index {i}", u.nrows(), u.ncols()),
                });
            }
            let dev = matcore::unitary_deviation(u);
            if dev > tol.validation_eps {
                return Err(TeqError::NotUnitary {
                    deviation: dev,
                    eps: tol.validation_eps,
                });
            }
        }
        if max_entry_diff(&elements[0], &identity(n)) > GROUP_EPS {
            return Err(TeqError::InvalidInput(
                "first group element must be the identity".into(),
            ));
        }
        let closest = |m: &ComplexMatrix| -> f64 {
            elements
                .iter()
                .map(|u| max_entry_diff(m, u))
                .fold(f64::INFINITY, f64::min)
        };
        for a in &elements {
            let adj = a.adjoint();
            if closest(&adj) > GROUP_EPS {
                return Err(TeqError::InvalidInput(
                    "group not closed under adjoints".into(),
                ));
            }
            for b in &elements {
                if closest(&(a * b)) > GROUP_EPS {
                    return Err(TeqError::InvalidInput(
                        "group not closed under products".into(),
                    ));
                }
            }
        }
        let states = elements.iter().map(|u| u * &seed).collect();
        Ok(GUFamily {
            n,
            elements,
            generator: None,
            seed,
            states,
        })
    }
}

/// Cyclic GU family: states `U^j |seed>` for `j = 0..k_bar-1`. The generator
/// must have exact order `k_bar` (within 1e-8): `U^k_bar = I` and no smaller
/// power reaches the identity.
pub fn build_gu_family(
    generator: &ComplexMatrix,
    seed: &ComplexVector,
    k_bar: usize,
    tol: &Tolerance,
) -> Result<GUFamily> {
    const ORDER_EPS: f64 = 1e-8;
    if k_bar < 2 {
        return Err(TeqError::InvalidInput("k_bar must be at least 2".into()));
    }
    let n = seed.len();
    if generator.shape() != (n, n) {
        return Err(TeqError::DimensionMismatch {
            expected: format!("{n}x{n} generator"),
            found: format!("{}x{}", generator.nrows(), generator.ncols()),
        });
    }
    let dev = matcore::unitary_deviation(generator);
    if dev > tol.validation_eps {
        return Err(TeqError::NotUnitary {
            deviation: dev,
            eps: tol.validation_eps,
        });
    }
    let norm = seed.norm();
    if (norm - 1.0).abs() > tol.validation_eps {
        return Err(TeqError::NotUnitVector {
            norm,
            eps: tol.validation_eps,
        });
    }
    let mut elements = Vec::with_capacity(k_bar);
    let mut power = identity(n);
    for j in 0..k_bar {
        if j > 0 {
            let id_dev = max_entry_diff(&power, &identity(n));
            if id_dev <= ORDER_EPS {
                return Err(TeqError::GeneratorOrder {
                    expected: k_bar,
                    failed_power: j,
                    deviation: id_dev,
                });
            }
        }
        elements.push(power.clone());
        power = generator * &power;
    }
    let id_dev = max_entry_diff(&power, &identity(n));
    if id_dev > ORDER_EPS {
        return Err(TeqError::GeneratorOrder {
            expected: k_bar,
            failed_power: k_bar,
            deviation: id_dev,
        });
    }
    let states = elements.iter().map(|u| u * seed).collect();
    Ok(GUFamily {
        n,
        elements,
        generator: Some(generator.clone()),
        seed: seed.clone(),
        states,
    })
}

/// Truncated coherent state: amplitudes `alpha^m / sqrt(m!)` for
/// `m < trunc_dim`, renormalized to unit norm.
pub fn coherent_state(alpha: C64, trunc_dim: usize) -> ComplexVector {
    assert!(trunc_dim >= 1, "trunc_dim must be at least 1");
    let mut v = ComplexVector::zeros(trunc_dim);
    let mut amp = C64::new(1.0, 0.0);
    v[0] = amp;
    for m in 1..trunc_dim {
        amp *= alpha / C64::new((m as f64).sqrt(), 0.0);
        v[m] = amp;
    }
    let norm = v.norm();
    v.scale_mut(1.0 / norm);
    v
}

/// Specification of a symmetric coherent-state family: `k_bar` states of
/// equal mean photon number, phases spread uniformly on the circle.
#[derive(Debug, Clone, Copy)]
pub struct CoherentFamilySpec {
    pub alpha: C64,
    pub k_bar: usize,
    pub trunc_dim: usize,
}

impl CoherentFamilySpec {
    pub fn new(alpha: C64, k_bar: usize) -> Self {
        CoherentFamilySpec {
            alpha,
            k_bar,
            trunc_dim: 50,
        }
    }

    /// Photon-number tail mass dropped by the truncation,
    /// `sum_{m >= trunc_dim} e^{-|a|^2} |a|^{2m} / m!`.
    pub fn tail_mass(&self) -> f64 {
        let x = self.alpha.norm_sqr();
        let mut term = (-x).exp();
        let mut kept = 0.0;
        for m in 0..self.trunc_dim {
            kept += term;
            term *= x / (m as f64 + 1.0);
        }
        (1.0 - kept).max(0.0)
    }

    /// Build the cyclic family: generator `diag(e^{i 2 pi m / k_bar})` on the
    /// truncated number basis, seed the coherent state. Returns truncation
    /// warnings when the dropped tail mass exceeds 1e-6.
    pub fn build(&self, tol: &Tolerance) -> Result<(GUFamily, Vec<String>)> {
        if self.trunc_dim < 1 {
            return Err(TeqError::OutOfRange {
                what: "trunc_dim",
                value: self.trunc_dim as f64,
            });
        }
        if self.k_bar < 2 {
            return Err(TeqError::InvalidInput("k_bar must be at least 2".into()));
        }
        let d = self.trunc_dim;
        let generator = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::from_polar(1.0, 2.0 * PI * i as f64 / self.k_bar as f64)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let seed = coherent_state(self.alpha, d);
        let family = build_gu_family(&generator, &seed, self.k_bar, tol)?;
        let mut warnings = Vec::new();
        let tail = self.tail_mass();
        if tail > 1e-6 {
            warnings.push(format!(
                "truncation tail mass {tail:.3e} exceeds 1e-6 at trunc_dim {d}"
            ));
        }
        Ok((family, warnings))
    }
}

/// The synthesized optimal-USD POVM together with its structural data.
#[derive(Debug, Clone)]
pub struct UsdPovm {
    pub povm: Povm,
    /// Conclusive detection probability, `sigma_min(Phi)^2`.
    pub p: f64,
    /// Columns are the family states.
    pub phi_matrix: ComplexMatrix,
    /// Unnormalized reciprocal states `U_i (Phi Phi^H)^+ |seed>`.
    pub tilde_states: Vec<ComplexVector>,
    /// Soft diagnostics (spectral counting, relative degradation).
    pub warnings: Vec<String>,
}

/// Build the minimum-inconclusive USD POVM for a GU family:
/// `M_i = p |phi~_i><phi~_i|` with `phi~ = (Phi Phi^H)^+ |seed>`, closed by
/// `M_K = I - sum M_i`. Requires linearly independent states.
pub fn optimal_usd_povm(family: &GUFamily, tol: &Tolerance) -> Result<UsdPovm> {
    let n = family.dim();
    let k_bar = family.k_bar();
    let phi = family.phi_matrix();
    let sigma_min = matcore::sigma_min(&phi)?;
    if sigma_min <= tol.validation_eps || k_bar > n {
        return Err(TeqError::LinearlyDependentStates {
            sigma_min,
            eps: tol.validation_eps,
        });
    }
    let p = sigma_min * sigma_min;

    let gram_outer = &phi * phi.adjoint();
    let inv = pinv(&gram_outer, tol)?;
    let tilde_seed = &inv * family.seed();
    let tilde_states: Vec<ComplexVector> = family
        .group_elements()
        .iter()
        .map(|u| u * &tilde_seed)
        .collect();

    let mut elements: Vec<ComplexMatrix> = tilde_states
        .iter()
        .map(|t| (t * t.adjoint()).scale(p))
        .collect();
    let mut last = identity(n);
    for m in &elements {
        last -= m;
    }
    elements.push(last);
    let povm = Povm::new(elements, tol)?;

    let mut warnings = Vec::new();

    // equal detection probability and unambiguity, asserted hard
    let mut max_eq = 0.0f64;
    let mut max_cross = 0.0f64;
    for (i, state) in family.states().iter().enumerate() {
        for (j, other) in family.states().iter().enumerate() {
            let amp = other.dotc(&tilde_states[i]);
            let prob = p * amp.norm_sqr();
            if i == j {
                max_eq = max_eq.max((prob - p).abs());
            } else {
                max_cross = max_cross.max(prob);
            }
        }
    }
    if max_eq > 1e-7 {
        return Err(TeqError::UsdInvariant {
            what: "equal detection probability <phi_i|M_i|phi_i> = p",
            magnitude: max_eq,
        });
    }
    if max_cross > 1e-7 {
        return Err(TeqError::UsdInvariant {
            what: "unambiguity <phi_j|M_i|phi_j> = 0",
            magnitude: max_cross,
        });
    }

    // spectral structure of the inconclusive element: at least n - k_bar
    // eigenvalues near one and at least one near zero. Truncation perturbs
    // the counting, so misses are warnings rather than errors.
    let m_last = &povm.elements()[k_bar];
    let evs = matcore::hermitian_eigenvalues(m_last)?;
    let ones = evs.iter().filter(|&&ev| (ev - 1.0).abs() <= 1e-6).count();
    let zeros = evs.iter().filter(|&&ev| ev.abs() <= 1e-6).count();
    if n > k_bar && ones < n - k_bar {
        warnings.push(format!(
            "inconclusive element has {ones} unit eigenvalues, expected at least {}",
            n - k_bar
        ));
    }
    if zeros < 1 {
        warnings.push("inconclusive element has no eigenvalue within 1e-6 of zero".into());
    }
    // relative degradation: tiny p makes the absolute invariants vacuous, so
    // flag when the detection probability is relatively off
    if p > 0.0 && max_eq / p > 1e-4 {
        warnings.push(format!(
            "detection probability relatively degraded: |<phi|M|phi> - p|/p = {:.3e}",
            max_eq / p
        ));
    }

    Ok(UsdPovm {
        povm,
        p,
        phi_matrix: phi,
        tilde_states,
        warnings,
    })
}

/// Cost lower bound for the optimal USD measurement:
/// `acos(sigma_min(Phi) * sqrt(<seed| (Phi Phi^H)^+2 |seed>))`.
///
/// Evaluated through the group-covariance identity
/// `<seed| (Phi Phi^H)^+2 |seed> = (1/k_bar) sum_k sigma_k^-2`, which turns
/// the bound into `sqrt((1/k_bar) sum_k (sigma_min/sigma_k)^2)` - a function
/// of singular-value ratios only, immune to the over/underflow the literal
/// pseudoinverse quadratic form hits once the Gram spectrum spans more than
/// `validation_eps`. The two evaluations agree on well-conditioned input.
pub fn usd_cost_lower_bound(family: &GUFamily, tol: &Tolerance) -> Result<CostAngle> {
    let phi = family.phi_matrix();
    let k_bar = family.k_bar();
    if k_bar > family.dim() {
        return Err(TeqError::LinearlyDependentStates {
            sigma_min: 0.0,
            eps: tol.validation_eps,
        });
    }
    let sv = matcore::singular_values(&phi)?;
    let sigma_min = sv.last().cloned().unwrap_or(0.0);
    if sigma_min <= tol.validation_eps {
        return Err(TeqError::LinearlyDependentStates {
            sigma_min,
            eps: tol.validation_eps,
        });
    }
    let mut sum = 0.0;
    for s in &sv {
        let r = sigma_min / s;
        sum += r * r;
    }
    let value = (sum / k_bar as f64).sqrt();
    Ok(CostAngle::from_cos(value))
}

/// Log-domain Gram spectrum of a symmetric coherent family: returns
/// `ln t_k` for `k = 0..k_bar-1`, where the Gram eigenvalues are
/// `(k_bar / S) t_k` with `t_k = sum_{m = k mod k_bar, m < trunc} x^m / m!`.
pub fn coherent_log_spectrum(alpha_sq: f64, k_bar: usize, trunc_dim: usize) -> Vec<f64> {
    assert!(k_bar >= 1 && trunc_dim >= 1);
    let mut ln_fact = 0.0f64;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); k_bar];
    for m in 0..trunc_dim {
        if m > 0 {
            ln_fact += (m as f64).ln();
        }
        let term = if alpha_sq > 0.0 {
            m as f64 * alpha_sq.ln() - ln_fact
        } else if m == 0 {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        buckets[m % k_bar].push(term);
    }
    buckets.iter().map(|terms| log_sum_exp(terms)).collect()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// USD cost lower bound for a symmetric coherent family, computed from the
/// analytically known circulant Gram spectrum. Exact singular-value ratios in
/// log space keep the sweep valid even where the dense spectrum collapses
/// below double-precision resolution.
pub fn coherent_usd_bound(alpha_sq: f64, k_bar: usize, trunc_dim: usize) -> Result<CostAngle> {
    if alpha_sq < 0.0 {
        return Err(TeqError::OutOfRange {
            what: "mean photon number |alpha|^2",
            value: alpha_sq,
        });
    }
    if k_bar < 2 || k_bar > trunc_dim {
        return Err(TeqError::InvalidInput(format!(
            "k_bar = {k_bar} must lie in [2, trunc_dim = {trunc_dim}]"
        )));
    }
    let log_t = coherent_log_spectrum(alpha_sq, k_bar, trunc_dim);
    let min_log = log_t.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_log == f64::NEG_INFINITY {
        return Err(TeqError::LinearlyDependentStates {
            sigma_min: 0.0,
            eps: 0.0,
        });
    }
    // value^2 = (1/k_bar) sum_k t_min / t_k
    let sum: f64 = log_t.iter().map(|lt| (min_log - lt).exp()).sum();
    let value = (sum / k_bar as f64).sqrt();
    Ok(CostAngle::from_cos(value))
}

/// One grid point of the intensity/count sweep.
#[derive(Debug, Clone)]
pub struct Fig5Row {
    pub intensity: f64,
    pub k_bar: usize,
    /// Absent when the point errored; see `warning`.
    pub bound: Option<CostAngle>,
    pub warning: Option<String>,
}

/// Sweep the USD cost bound over intensities and state counts. Grid order is
/// intensity-major; per-point failures become empty cells with a warning.
pub fn fig5_sweep(
    intensities: &[f64],
    k_bar_range: std::ops::RangeInclusive<usize>,
    trunc_dim: usize,
) -> Vec<Fig5Row> {
    let k_bars: Vec<usize> = k_bar_range.collect();
    let points: Vec<(f64, usize)> = intensities
        .iter()
        .flat_map(|&x| k_bars.iter().map(move |&k| (x, k)))
        .collect();
    par::map_collect(points.len(), |idx| {
        let (intensity, k_bar) = points[idx];
        match coherent_usd_bound(intensity, k_bar, trunc_dim) {
            Ok(bound) => Fig5Row {
                intensity,
                k_bar,
                bound: Some(bound),
                warning: None,
            },
            Err(e) => Fig5Row {
                intensity,
                k_bar,
                bound: None,
                warning: Some(e.to_string()),
            },
        }
    })
}

/// Default sweep grid: intensities {0.1, 0.5, 1, 3}, k_bar 2..=30, trunc 50.
pub fn fig5_defaults() -> (Vec<f64>, std::ops::RangeInclusive<usize>, usize) {
    (vec![0.1, 0.5, 1.0, 3.0], 2..=30, 50)
}
