//! Code lattices with exact determinant evaluators: diagonal number-field
//! codes `ψ(O_K)` and natural orders of cyclic division algebras.

mod algebra;
mod builtin;
mod field;

pub use algebra::{infinite_place_ramified, AlgebraElement, CyclicAlgebraSpec};
pub use builtin::{builtin, descriptor_of, lattice_from_descriptor, BuiltinCode};
pub use field::{gaussian_field, qi_over_q, qi_sqrt2, qi_sqrt5, quadratic_extension, CyclicFieldData};

use crate::enumeration::{fold_ball, BallPoint, EnumOptions, PointFold};
use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::lattice::{build_lattice, Center, Construction, ExactDet, MatrixLattice};
use crate::matrix::ComplexMatrix;
use crate::poly::{Poly, Ring};
use serde::Serialize;
use std::sync::Arc;

/// `ψ(x) = diag(σ_1(x), …, σ_n(x))` on `O_K`, rank `2n` over ℤ.
///
/// Coordinates are ordered `(w_0, i·w_0, w_1, i·w_1, …)`.
pub fn diagonal_nf_lattice(field: &CyclicFieldData) -> Result<MatrixLattice> {
    field.validate()?;
    if field.base != Center::Gaussian {
        return Err(Error::InvalidFieldData(format!("{}: base field must be ℚ(i)", field.label)));
    }
    let n = field.degree;
    let mut basis = Vec::with_capacity(2 * n);
    for a in 0..n {
        for unit in [GaussInt::ONE, GaussInt::I] {
            let mut x = vec![GaussInt::ZERO; n];
            x[a] = unit;
            let diag: Vec<_> = (0..n).map(|j| field.embed(&x, j)).collect();
            basis.push(ComplexMatrix::diagonal(&diag));
        }
    }
    let sym: Vec<Poly> = (0..n)
        .map(|a| Poly::var(2 * a).add(&Poly::var(2 * a + 1).mul(&Poly::constant(GaussInt::I))))
        .collect();
    let norm = field.norm(&sym)?;
    let exact = ExactDet::new(norm, 2 * n, Center::Gaussian);
    let label = field.label.clone();
    Ok(build_lattice(basis, Some(exact))?.with_construction(Construction::NumberField(Arc::new(field.clone())), label))
}

/// `ψ(Λ)` for the natural order `Λ = ⊕ u^j O_E`, with the reduced norm as
/// exact determinant.
///
/// Coordinates are ordered by block `u^j`, then integral basis element, then
/// (over ℚ(i)) real and imaginary part: `(1, i, u, ui)` for `E = ℚ(i)` over ℚ.
pub fn cyclic_algebra_lattice(spec: &CyclicAlgebraSpec) -> Result<MatrixLattice> {
    let n = spec.index();
    if let Err(e) = spec.field.validate() {
        return Err(if n > 2 { Error::UnsupportedIndex(n) } else { e });
    }
    let k = spec.rank();
    let br = spec.field.base_rank();
    let mut basis = Vec::with_capacity(k);
    for j in 0..k {
        let mut z = vec![0i64; k];
        z[j] = 1;
        basis.push(spec.psi_matrix(&spec.element_from_coeffs(&z)));
    }
    debug_assert_eq!(basis.len(), n * n * br);
    let nrd = spec.reduced_norm(&spec.symbolic_element())?;
    let exact = ExactDet::new(nrd, k, spec.center);
    let label = format!("({}, σ, {})", spec.field.label, spec.gamma);
    Ok(build_lattice(basis, Some(exact))?.with_construction(Construction::CyclicAlgebra(Arc::new(spec.clone())), label))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NvdReport {
    pub radius: f64,
    pub points: u64,
    /// `min |det|²` over `L(M)`, exact.
    pub min_det_norm_sq: Option<i128>,
    pub min_det_abs: Option<f64>,
    pub argmin: Option<Vec<i64>>,
}

struct NvdFold<'a> {
    det: &'a ExactDet,
    points: u64,
    min: Option<(i128, Vec<i64>)>,
    zero: Option<Vec<i64>>,
}

impl PointFold for NvdFold<'_> {
    fn visit(&mut self, p: &BallPoint<'_>) {
        self.points += 1;
        if self.zero.is_some() {
            return;
        }
        let d = self.det.eval(p.coeffs).norm_sq();
        if d == 0 {
            self.zero = Some(p.coeffs.to_vec());
        } else if self.min.as_ref().is_none_or(|(m, _)| d < *m) {
            self.min = Some((d, p.coeffs.to_vec()));
        }
    }
    fn merge(&mut self, later: Self) {
        self.points += later.points;
        if self.zero.is_none() {
            self.zero = later.zero;
        }
        if let Some((d, z)) = later.min {
            if self.min.as_ref().is_none_or(|(m, _)| d < *m) {
                self.min = Some((d, z));
            }
        }
    }
}

/// Scans `L(M)` for a vanishing exact determinant; reports `min |det|`.
pub fn nvd_check(lattice: &MatrixLattice, radius: f64) -> Result<NvdReport> {
    nvd_check_with(lattice, radius, &EnumOptions::default())
}

pub fn nvd_check_with(lattice: &MatrixLattice, radius: f64, opts: &EnumOptions) -> Result<NvdReport> {
    let det = lattice.exact_det().ok_or(Error::NoExactDeterminant)?;
    let f = fold_ball(lattice, radius, opts, || NvdFold {
        det,
        points: 0,
        min: None,
        zero: None,
    })?;
    if let Some(coeffs) = f.zero {
        return Err(Error::NvdViolation { coeffs });
    }
    let (min_det_norm_sq, argmin) = match f.min {
        Some((d, z)) => (Some(d), Some(z)),
        None => (None, None),
    };
    Ok(NvdReport {
        radius,
        points: f.points,
        min_det_norm_sq,
        min_det_abs: min_det_norm_sq.map(|d| (d as f64).sqrt()),
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_field_is_gaussian_integers() {
        let l = diagonal_nf_lattice(&gaussian_field()).unwrap();
        assert_eq!((l.n(), l.rank()), (1, 2));
        assert!((l.covolume() - 1.0).abs() < 1e-12);
        let p = l.point_from_coeffs(&[3, -2]);
        assert_eq!(p.det_exact.unwrap().to_string(), "3-2i");
    }

    #[test]
    fn golden_norms() {
        let l = diagonal_nf_lattice(&qi_sqrt5()).unwrap();
        // √5 = −1 + 2φ
        assert_eq!(l.exact_det().unwrap().eval(&[-1, 0, 2, 0]), GaussInt::int(-5));
        assert_eq!(l.point_from_coeffs(&[-1, 0, 2, 0]).det_abs, 5.0);
        assert_eq!(l.exact_det().unwrap().eval(&[0, 0, 1, 0]), GaussInt::int(-1));
    }

    #[test]
    fn split_algebra_violates_nvd() {
        let spec = CyclicAlgebraSpec::new(qi_over_q(), GaussInt::ONE).unwrap();
        let l = cyclic_algebra_lattice(&spec).unwrap();
        assert_eq!(l.exact_det().unwrap().eval(&[1, 0, 1, 0]), GaussInt::ZERO);
        assert!(matches!(nvd_check(&l, 3.0), Err(Error::NvdViolation { .. })));
    }

    #[test]
    fn nvd_without_evaluator() {
        let l = build_lattice(vec![ComplexMatrix::identity(1)], None).unwrap();
        assert!(matches!(nvd_check(&l, 2.0), Err(Error::NoExactDeterminant)));
    }

    #[test]
    fn cubic_cyclic_algebra() {
        // ℚ(i, 2cos(2π/9))/ℚ(i): θ³ = 3θ − 1, σ(θ) = θ² − 2
        use num_complex::Complex64;
        let g = |x: i128| GaussInt::int(x);
        let z = GaussInt::ZERO;
        let th: Vec<f64> = (0..3)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * (1 << j) as f64 / 9.0).cos())
            .collect();
        let field = CyclicFieldData {
            degree: 3,
            base: Center::Gaussian,
            mult: vec![
                vec![vec![g(1), z, z], vec![z, g(1), z], vec![z, z, g(1)]],
                vec![vec![z, g(1), z], vec![z, z, g(1)], vec![g(-1), g(3), z]],
                vec![vec![z, z, g(1)], vec![g(-1), g(3), z], vec![z, g(-1), g(3)]],
            ],
            galois: vec![vec![g(1), z, z], vec![g(-2), z, g(1)], vec![g(4), g(-1), g(-1)]],
            embeddings: th
                .iter()
                .map(|&t| vec![Complex64::new(1.0, 0.0), Complex64::new(t, 0.0), Complex64::new(t * t, 0.0)])
                .collect(),
            radicand: None,
            label: "Q(i,cos(2pi/9))/Q(i)".into(),
        };
        field.validate().unwrap();
        let spec = CyclicAlgebraSpec::new(field, GaussInt::new(2, 1)).unwrap();
        let l = cyclic_algebra_lattice(&spec).unwrap();
        assert_eq!((l.n(), l.rank()), (3, 18));
        let zc: Vec<i64> = (0..18).map(|j| (j * 7 % 5) - 2).collect();
        let exact = l.exact_det().unwrap().eval(&zc).to_complex();
        let float = l.float_det(&zc);
        assert!((exact - float).norm() < 1e-6 * exact.norm().max(1.0));
    }
}
