//! JSON and CSV wire formats. Matrices travel as
//! `{"rows": n, "cols": m, "entries": [[re, im], ...]}` row-major; vectors as
//! bare arrays of `[re, im]` pairs. CSV emitters use 12 significant digits
//! and LF line endings.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TeqError};
use crate::matcore::{ComplexMatrix, ComplexVector, C64};
use crate::povm::{BoundReport, Certificate, Povm};
use crate::matcore::Tolerance;
use crate::ucost::KrausStack;
use crate::usd::{CoherentFamilySpec, Fig5Row, GUFamily, UsdPovm};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(TeqError::InvalidInput(format!(
                "matrix entries length {} does not match {}x{}",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if !e[0].is_finite() || !e[1].is_finite() {
                return Err(TeqError::InvalidInput(format!(
                    "non-finite matrix entry at flat index {i}"
                )));
            }
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let e = self.entries[i * self.cols + j];
            C64::new(e[0], e[1])
        }))
    }
}

pub fn vector_to_json(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(entries: &[[f64; 2]]) -> Result<ComplexVector> {
    for (i, e) in entries.iter().enumerate() {
        if !e[0].is_finite() || !e[1].is_finite() {
            return Err(TeqError::InvalidInput(format!(
                "non-finite vector entry at index {i}"
            )));
        }
    }
    Ok(ComplexVector::from_iterator(
        entries.len(),
        entries.iter().map(|e| C64::new(e[0], e[1])),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausStackJson {
    #[serde(rename = "K")]
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub blocks: Vec<MatrixJson>,
}

impl KrausStackJson {
    pub fn from_stack(stack: &KrausStack) -> Self {
        KrausStackJson {
            k: stack.num_operators(),
            m: stack.block_rows(),
            n: stack.dim(),
            blocks: stack.blocks().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_stack(&self, tol: &Tolerance) -> Result<KrausStack> {
        if self.blocks.len() != self.k {
            return Err(TeqError::InvalidInput(format!(
                "K = {} but {} blocks supplied",
                self.k,
                self.blocks.len()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                if b.rows != self.m || b.cols != self.n {
                    return Err(TeqError::DimensionMismatch {
                        expected: format!("{}x{}", self.m, self.n),
                        found: format!("{}x{}", b.rows, b.cols),
                    });
                }
                b.to_matrix()
            })
            .collect::<Result<Vec<_>>>()?;
        KrausStack::new(blocks, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub n: usize,
    pub elements: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn from_povm(p: &Povm) -> Self {
        PovmJson {
            n: p.dim(),
            elements: p.elements().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_povm(&self, tol: &Tolerance) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        if elements.iter().any(|m| m.nrows() != self.n) {
            return Err(TeqError::DimensionMismatch {
                expected: format!("{0}x{0} elements", self.n),
                found: "mismatched element dimensions".into(),
            });
        }
        Povm::new(elements, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    /// Selected rows as [element, eigenvalue-index] pairs.
    pub rows: Vec<[usize; 2]>,
    pub sigma_min: f64,
    pub hermitian: bool,
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        CertificateJson {
            rows: c.rows.iter().map(|&(e, i)| [e, i]).collect(),
            sigma_min: c.sigma_min,
            hermitian: c.hermitian,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReportJson {
    pub lower_rad: f64,
    pub upper_rad: Option<f64>,
    pub exact: bool,
    pub method1_rad: f64,
    pub sigma_n_rad: f64,
    pub element_order_rad: f64,
    pub certificate: Option<CertificateJson>,
    pub exhausted: bool,
}

impl BoundReportJson {
    pub fn from_report(r: &BoundReport) -> Self {
        BoundReportJson {
            lower_rad: r.lower.radians(),
            upper_rad: r.upper.map(|u| u.radians()),
            exact: r.exact,
            method1_rad: r.method1.radians(),
            sigma_n_rad: r.sigma_n_bound.radians(),
            element_order_rad: r.element_order_cost.radians(),
            certificate: r.certificate.as_ref().map(CertificateJson::from_certificate),
            exhausted: r.exhausted,
        }
    }
}

/// GU family input: either an explicit cyclic generator or a coherent spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyJson {
    Cyclic {
        generator: MatrixJson,
        seed: Vec<[f64; 2]>,
        k_bar: usize,
    },
    Coherent {
        coherent: CoherentJson,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherentJson {
    pub alpha: [f64; 2],
    pub k_bar: usize,
    #[serde(default = "default_trunc")]
    pub trunc_dim: usize,
}

fn default_trunc() -> usize {
    50
}

impl FamilyJson {
    /// Build the family; coherent specs may attach truncation warnings.
    pub fn build(&self, tol: &Tolerance) -> Result<(GUFamily, Vec<String>)> {
        match self {
            FamilyJson::Cyclic {
                generator,
                seed,
                k_bar,
            } => {
                let g = generator.to_matrix()?;
                let s = vector_from_json(seed)?;
                Ok((crate::usd::build_gu_family(&g, &s, *k_bar, tol)?, Vec::new()))
            }
            FamilyJson::Coherent { coherent } => {
                let spec = CoherentFamilySpec {
                    alpha: C64::new(coherent.alpha[0], coherent.alpha[1]),
                    k_bar: coherent.k_bar,
                    trunc_dim: coherent.trunc_dim,
                };
                spec.build(tol)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UsdPovmJson {
    pub n: usize,
    pub k_bar: usize,
    pub p: f64,
    pub povm: PovmJson,
    pub tilde_states: Vec<Vec<[f64; 2]>>,
    pub warnings: Vec<String>,
}

impl UsdPovmJson {
    pub fn from_usd(u: &UsdPovm) -> Self {
        UsdPovmJson {
            n: u.povm.dim(),
            k_bar: u.tilde_states.len(),
            p: u.p,
            povm: PovmJson::from_povm(&u.povm),
            tilde_states: u.tilde_states.iter().map(|t| vector_to_json(t)).collect(),
            warnings: u.warnings.clone(),
        }
    }
}

/// Format with 12 significant digits, scientific notation.
pub fn fmt_sig12(v: f64) -> String {
    format!("{:.11e}", v)
}

pub fn write_fig4_csv<W: std::io::Write>(w: &mut W, rows: &[(f64, f64)]) -> Result<()> {
    write!(w, "phi_rad,ratio\n")?;
    for (phi, ratio) in rows {
        write!(w, "{},{}\n", fmt_sig12(*phi), fmt_sig12(*ratio))?;
    }
    Ok(())
}

pub fn write_fig5_csv<W: std::io::Write>(w: &mut W, rows: &[Fig5Row]) -> Result<()> {
    write!(w, "intensity,k_bar,bound_rad\n")?;
    for r in rows {
        let bound = r
            .bound
            .map(|b| fmt_sig12(b.radians()))
            .unwrap_or_default();
        write!(w, "{},{},{}\n", fmt_sig12(r.intensity), r.k_bar, bound)?;
    }
    Ok(())
}

/// One row of the rank-2 sweep: phi, lower, upper, exact.
pub fn write_rank2_csv<W: std::io::Write>(
    w: &mut W,
    rows: &[(f64, BoundReportJson)],
) -> Result<()> {
    write!(w, "phi_rad,lower_rad,upper_rad,exact\n")?;
    for (phi, r) in rows {
        write!(
            w,
            "{},{},{},{}\n",
            fmt_sig12(*phi),
            fmt_sig12(r.lower_rad),
            r.upper_rad.map(fmt_sig12).unwrap_or_default(),
            r.exact
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::rank2_povm;

    #[test]
    fn matrix_round_trip() {
        let m = ComplexMatrix::from_row_slice(
            2,
            3,
            &[
                C64::new(1.0, 2.0),
                C64::new(0.0, -1.0),
                C64::new(0.5, 0.0),
                C64::new(-1.5, 0.25),
                C64::new(0.0, 0.0),
                C64::new(3.0, -2.0),
            ],
        );
        let j = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert!(crate::matcore::max_entry_diff(&back.to_matrix().unwrap(), &m) < 1e-15);
    }

    #[test]
    fn matrix_rejects_bad_shapes() {
        let j = MatrixJson {
            rows: 2,
            cols: 2,
            entries: vec![[1.0, 0.0]],
        };
        assert!(j.to_matrix().is_err());
        let j = MatrixJson {
            rows: 1,
            cols: 1,
            entries: vec![[f64::NAN, 0.0]],
        };
        assert!(j.to_matrix().is_err());
    }

    #[test]
    fn povm_round_trip() {
        let tol = Tolerance::default();
        let p = rank2_povm(0.4, &tol).unwrap();
        let j = PovmJson::from_povm(&p);
        let text = serde_json::to_string(&j).unwrap();
        let back: PovmJson = serde_json::from_str(&text).unwrap();
        let p2 = back.to_povm(&tol).unwrap();
        for (a, b) in p.elements().iter().zip(p2.elements()) {
            assert!(crate::matcore::max_entry_diff(a, b) < 1e-15);
        }
    }

    #[test]
    fn family_json_variants_parse() {
        let tol = Tolerance::default();
        let coherent: FamilyJson = serde_json::from_str(
            r#"{"coherent": {"alpha": [1.0, 0.0], "k_bar": 3}}"#,
        )
        .unwrap();
        let (fam, _) = coherent.build(&tol).unwrap();
        assert_eq!(fam.k_bar(), 3);
        assert_eq!(fam.dim(), 50);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cyclic: FamilyJson = serde_json::from_str(&format!(
            r#"{{"generator": {{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[-1,0]]}},
                "seed": [[{s},0],[{s},0]], "k_bar": 2}}"#
        ))
        .unwrap();
        let (fam, warnings) = cyclic.build(&tol).unwrap();
        assert_eq!(fam.k_bar(), 2);
        assert!(warnings.is_empty());
    }

    #[test]
    fn csv_formats() {
        let mut buf = Vec::new();
        write_fig4_csv(&mut buf, &[(0.5, 7.25)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "phi_rad,ratio\n5.00000000000e-1,7.25000000000e0\n");
        assert!(!text.contains('\r'));

        let mut buf = Vec::new();
        write_fig5_csv(
            &mut buf,
            &[crate::usd::Fig5Row {
                intensity: 0.1,
                k_bar: 4,
                bound: None,
                warning: Some("x".into()),
            }],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "intensity,k_bar,bound_rad\n1.00000000000e-1,4,\n");
    }
}
