//! Linear-optics cost models: beam splitter and polarizing beam splitter
//! unitaries with their optimal costs, the two-Bell-state analyzer matrix,
//! optimal time allocation across sequential elements, and the
//! implementation-vs-ideal energy ratio sweep.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Result, TeqError};
use crate::matcore::{ComplexMatrix, Tolerance, C64};
use crate::ucost::CostAngle;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Beam splitter parameters: global phase `chi`, complex reflection and
/// transmission amplitudes with `|r|^2 + |t|^2 = 1`.
#[derive(Debug, Clone, Copy)]
pub struct BeamSplitter {
    pub chi: f64,
    pub r: C64,
    pub t: C64,
}

impl BeamSplitter {
    pub fn new(chi: f64, r: C64, t: C64, tol: &Tolerance) -> Result<Self> {
        let total = r.norm_sqr() + t.norm_sqr();
        if (total - 1.0).abs() > tol.validation_eps {
            return Err(TeqError::OutOfRange {
                what: "|r|^2 + |t|^2",
                value: total,
            });
        }
        Ok(BeamSplitter { chi, r, t })
    }
}

/// `e^{i chi} [[r, i t*], [i t, r*]]`.
pub fn bs_unitary(bs: &BeamSplitter) -> ComplexMatrix {
    let phase = C64::from_polar(1.0, bs.chi);
    let i = c(0.0, 1.0);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            phase * bs.r,
            phase * i * bs.t.conj(),
            phase * i * bs.t,
            phase * bs.r.conj(),
        ],
    )
}

/// Minimal beam-splitter cost at fixed reflectivity: `acos(|r|)`, reached at
/// `chi = 0` with real `r`.
pub fn bs_optimal_cost(r_abs: f64) -> Result<CostAngle> {
    if !(0.0..=1.0).contains(&r_abs) {
        return Err(TeqError::OutOfRange {
            what: "reflectivity |r|",
            value: r_abs,
        });
    }
    Ok(CostAngle::from_cos(r_abs))
}

/// Polarizing beam splitter on two polarization-carrying modes, basis
/// {aV, aH, bV, bH}: verticals pass through, horizontals swap modes, all
/// under a global phase. Eigenvalues are `e^{i chi}` (x3) and `-e^{i chi}`.
pub fn pbs_unitary(chi: f64) -> ComplexMatrix {
    let p = C64::from_polar(1.0, chi);
    let z = c(0.0, 0.0);
    ComplexMatrix::from_row_slice(
        4,
        4,
        &[
            p, z, z, z, //
            z, z, z, p, //
            z, z, p, z, //
            z, p, z, z,
        ],
    )
}

/// Best PBS cost over the free phase: `pi/2`, reached at `chi = pi/2` where
/// the spectrum becomes `{-i, i, i, i}`.
pub fn pbs_optimal_cost() -> CostAngle {
    CostAngle::from_radians(FRAC_PI_2).expect("pi/2 in range")
}

/// The 4x4 analyzer that maps the two antisymmetric/symmetric Bell states to
/// the first two detection events, identity on the rest. Basis
/// {VH, HV, VV, HH}; rows one and two are the singlet and triplet bras.
pub fn bell_two_state_unitary() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    ComplexMatrix::from_row_slice(
        4,
        4,
        &[
            c(s, 0.0),
            c(-s, 0.0),
            z,
            z, //
            c(s, 0.0),
            c(s, 0.0),
            z,
            z, //
            z,
            z,
            o,
            z, //
            z,
            z,
            z,
            o,
        ],
    )
}

/// Labeled per-element costs of a sequential circuit.
#[derive(Debug, Clone)]
pub struct ElementCosts {
    pub items: Vec<(String, CostAngle)>,
}

impl ElementCosts {
    pub fn new(items: Vec<(String, CostAngle)>) -> Self {
        ElementCosts { items }
    }

    pub fn costs(&self) -> Vec<f64> {
        self.items.iter().map(|(_, c)| c.radians()).collect()
    }
}

/// Optimal allocation of a total evolution time across sequential elements.
#[derive(Debug, Clone)]
pub struct EnergySplit {
    pub total_time: f64,
    /// Per-element times, same order as the input costs.
    pub times: Vec<f64>,
    /// `sum_i cost_i / time_i` at the optimum, `(sum_j sqrt(c_j))^2 / T`.
    pub total_energy: f64,
}

/// Minimize `sum c_i / t_i` subject to `sum t_i = T`. The optimum is
/// `t_i = T sqrt(c_i) / sum_j sqrt(c_j)` (Cauchy-Schwarz); zero-cost elements
/// get zero time and contribute nothing.
pub fn optimal_time_split(costs: &ElementCosts, total_time: f64) -> Result<EnergySplit> {
    if !(total_time > 0.0) {
        return Err(TeqError::OutOfRange {
            what: "total_time",
            value: total_time,
        });
    }
    let cs = costs.costs();
    let sqrt_sum: f64 = cs.iter().map(|c| c.sqrt()).sum();
    if sqrt_sum <= 0.0 {
        return Err(TeqError::DegenerateSplit);
    }
    let times: Vec<f64> = cs
        .iter()
        .map(|c| total_time * c.sqrt() / sqrt_sum)
        .collect();
    let total_energy = sqrt_sum * sqrt_sum / total_time;
    Ok(EnergySplit {
        total_time,
        times,
        total_energy,
    })
}

/// Ideal cost of the rank-2 POVM: `phi` below `pi/4`, `pi/2 - phi` above.
pub fn rank2_ideal_cost(phi: f64) -> Result<CostAngle> {
    if !(0.0..FRAC_PI_2).contains(&phi) {
        return Err(TeqError::OutOfRange {
            what: "phi",
            value: phi,
        });
    }
    let m = if phi < FRAC_PI_4 { phi } else { FRAC_PI_2 - phi };
    CostAngle::from_radians(m)
}

/// Energy ratio of the PBS + BS implementation against the ideal measurement,
/// independent of the total time: `(sqrt(pi/2) + sqrt(phi))^2 / m(phi)`.
pub fn implementation_energy_ratio(phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi < FRAC_PI_2) {
        return Err(TeqError::OutOfRange {
            what: "phi",
            value: phi,
        });
    }
    let costs = ElementCosts::new(vec![
        ("pbs".into(), pbs_optimal_cost()),
        ("bs".into(), CostAngle::from_radians(phi)?),
    ]);
    let split = optimal_time_split(&costs, 1.0)?;
    let ideal = rank2_ideal_cost(phi)?.radians();
    Ok(split.total_energy / ideal)
}

/// Ratio sweep rows `(phi, ratio)` over a grid inside `(0, pi/2)`.
pub fn fig4_sweep(phi_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    phi_grid
        .iter()
        .map(|&phi| Ok((phi, implementation_energy_ratio(phi)?)))
        .collect()
}

/// Default grid for the ratio sweep: 100 points spanning
/// `[0.05, pi/2 - 0.05]`.
pub fn fig4_default_grid() -> Vec<f64> {
    let lo = 0.05;
    let hi = FRAC_PI_2 - 0.05;
    let steps = 100usize;
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}
