//! Matrix lattices `L = ℤB_1 ⊕ … ⊕ ℤB_k ⊂ M_n(ℂ)`.

use crate::constructions::{CyclicAlgebraSpec, CyclicFieldData};
use crate::error::{Error, Result};
use crate::gaussian::{ExactCoordinate, GaussInt};
use crate::matrix::{real_det, ComplexMatrix};
use crate::poly::{CompiledPoly, Poly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Ring of integers of the center that exact determinants live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Center {
    /// ℤ ⊂ ℚ
    Rational,
    /// ℤ[i] ⊂ ℚ(i)
    Gaussian,
}

/// Exact determinant of `Σ z_j B_j` as a polynomial in the integer coordinates.
#[derive(Clone, Debug)]
pub struct ExactDet {
    symbolic: Poly,
    compiled: CompiledPoly,
    center: Center,
}

impl ExactDet {
    pub fn new(symbolic: Poly, nvars: usize, center: Center) -> Self {
        let compiled = symbolic.compile(nvars);
        ExactDet {
            symbolic,
            compiled,
            center,
        }
    }

    pub fn center(&self) -> Center {
        self.center
    }

    pub fn polynomial(&self) -> &Poly {
        &self.symbolic
    }

    pub fn compiled(&self) -> &CompiledPoly {
        &self.compiled
    }

    pub fn eval(&self, z: &[i64]) -> GaussInt {
        self.compiled.eval(z)
    }
}

/// How a lattice was built; carries the algebraic data later stages need.
#[derive(Clone, Debug)]
pub enum Construction {
    Raw,
    NumberField(Arc<CyclicFieldData>),
    CyclicAlgebra(Arc<CyclicAlgebraSpec>),
}

#[derive(Clone, Debug)]
pub struct MatrixLattice {
    n: usize,
    basis: Vec<ComplexMatrix>,
    gram: Vec<f64>,
    /// `2·gram`, when every entry is an integer.
    gram2: Option<Vec<i64>>,
    covolume: f64,
    exact_det: Option<Arc<ExactDet>>,
    construction: Construction,
    label: String,
}

/// Validates a basis and computes its Gram data.
pub fn build_lattice(basis: Vec<ComplexMatrix>, exact_det: Option<ExactDet>) -> Result<MatrixLattice> {
    let k = basis.len();
    if k == 0 {
        return Err(Error::InvalidBasis("empty basis".into()));
    }
    let n = basis[0].dim();
    if n == 0 || basis.iter().any(|b| b.dim() != n) {
        return Err(Error::InvalidBasis("basis matrices must share one positive dimension".into()));
    }
    if k > 2 * n * n {
        return Err(Error::InvalidBasis(format!("rank {k} exceeds 2n² = {}", 2 * n * n)));
    }
    if let Some(d) = &exact_det {
        if d.compiled.nvars() != k {
            return Err(Error::InvalidBasis("exact evaluator arity does not match rank".into()));
        }
    }
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let g = basis[i].inner(&basis[j]);
            gram[i * k + j] = g;
            gram[j * k + i] = g;
        }
    }
    let det = real_det(&gram, k);
    // Hadamard: det ≤ Π g_ii ≤ (max |g|)^k
    let diag: f64 = (0..k).map(|i| gram[i * k + i]).product();
    if !(det > 1e-10 * diag) {
        return Err(Error::DependentBasis { det });
    }
    let gram2 = integral_double(&gram);
    Ok(MatrixLattice {
        n,
        basis,
        gram,
        gram2,
        covolume: det.sqrt(),
        exact_det: exact_det.map(Arc::new),
        construction: Construction::Raw,
        label: "raw".into(),
    })
}

fn integral_double(gram: &[f64]) -> Option<Vec<i64>> {
    gram.iter()
        .map(|&g| {
            let d = 2.0 * g;
            let r = d.round();
            ((d - r).abs() <= 1e-9 * r.abs().max(1.0) && r.abs() < 1e15).then_some(r as i64)
        })
        .collect()
}

impl MatrixLattice {
    pub fn with_construction(mut self, construction: Construction, label: impl Into<String>) -> Self {
        self.construction = construction;
        self.label = label.into();
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Row-major `k×k` Gram matrix.
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.rank() + j]
    }

    pub fn gram2_integral(&self) -> Option<&[i64]> {
        self.gram2.as_deref()
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn exact_det(&self) -> Option<&ExactDet> {
        self.exact_det.as_deref()
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix_of(&self, z: &[i64]) -> ComplexMatrix {
        assert_eq!(z.len(), self.rank());
        let mut m = ComplexMatrix::zeros(self.n);
        for (b, &zi) in self.basis.iter().zip(z) {
            if zi != 0 {
                m.add_scaled(b, zi as f64);
            }
        }
        m
    }

    /// `zᵀ G z` in double precision.
    pub fn norm_sq(&self, z: &[i64]) -> f64 {
        let k = self.rank();
        let mut acc = 0.0;
        for i in 0..k {
            if z[i] == 0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..k {
                row += self.gram[i * k + j] * z[j] as f64;
            }
            acc += row * z[i] as f64;
        }
        acc
    }

    /// `zᵀ (2G) z` exactly, when the Gram matrix is half-integral.
    pub fn norm_sq_times_two(&self, z: &[i64]) -> Option<i128> {
        let g2 = self.gram2.as_ref()?;
        let k = self.rank();
        let mut acc: i128 = 0;
        for i in 0..k {
            for j in 0..k {
                acc += g2[i * k + j] as i128 * z[i] as i128 * z[j] as i128;
            }
        }
        Some(acc)
    }

    /// Determinant of `Σ z_j B_j` by floating-point LU.
    pub fn float_det(&self, z: &[i64]) -> Complex64 {
        self.matrix_of(z).det()
    }

    /// Exact `|det|²` when an exact evaluator is present.
    pub fn exact_det_norm_sq(&self, z: &[i64]) -> Option<i128> {
        self.exact_det.as_ref().map(|d| d.eval(z).norm_sq())
    }

    pub fn point_from_coeffs(&self, z: &[i64]) -> LatticePoint {
        let matrix = self.matrix_of(z);
        let frobenius = matrix.frobenius();
        let (det_exact, det_abs) = match &self.exact_det {
            Some(d) => {
                let e = ExactCoordinate::from(d.eval(z));
                let a = e.abs();
                (Some(e), a)
            }
            None => (None, matrix.det().norm()),
        };
        LatticePoint {
            coeffs: z.to_vec(),
            matrix,
            frobenius,
            det_exact,
            det_abs,
        }
    }

    pub fn to_descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            n: self.n,
            k: self.rank(),
            basis: self
                .basis
                .iter()
                .map(|b| b.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            construction: (self.label != "raw").then(|| self.label.clone()),
            algebra: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub matrix: ComplexMatrix,
    pub frobenius: f64,
    pub det_exact: Option<ExactCoordinate>,
    pub det_abs: f64,
}

/// JSON form of a lattice: `{"n", "k", "basis": [[[re, im], ...], ...], "construction"?, "algebra"?}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeDescriptor {
    pub n: usize,
    pub k: usize,
    /// One list of `n²` row-major `[re, im]` pairs per basis matrix.
    pub basis: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraBlock>,
}

/// Quaternion-type algebra `(ℚ(√a)/ℚ, σ, γ)` or its extension over ℚ(i).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraBlock {
    pub a: i64,
    pub gamma: i64,
    pub center: String,
}

impl LatticeDescriptor {
    pub fn basis_matrices(&self) -> Result<Vec<ComplexMatrix>> {
        if self.basis.len() != self.k {
            return Err(Error::InvalidBasis(format!(
                "descriptor declares k = {} but lists {} matrices",
                self.k,
                self.basis.len()
            )));
        }
        self.basis
            .iter()
            .map(|m| {
                if m.len() != self.n * self.n {
                    return Err(Error::InvalidBasis(format!(
                        "matrix has {} entries, expected n² = {}",
                        m.len(),
                        self.n * self.n
                    )));
                }
                Ok(ComplexMatrix::from_row_major(
                    m.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                ))
            })
            .collect()
    }
}
