use super::algebra::CyclicAlgebraSpec;
use super::field::{gaussian_field, qi_over_q, qi_sqrt2, qi_sqrt5, quadratic_extension};
use super::{cyclic_algebra_lattice, diagonal_nf_lattice};
use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::lattice::{build_lattice, AlgebraBlock, Center, Construction, LatticeDescriptor, MatrixLattice};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinCode {
    Gaussian,
    NfSqrt5,
    NfSqrt2,
    Alamouti,
    L1,
    L2,
    GoldenOrder,
}

impl BuiltinCode {
    pub const ALL: [BuiltinCode; 7] = [
        BuiltinCode::Gaussian,
        BuiltinCode::NfSqrt5,
        BuiltinCode::NfSqrt2,
        BuiltinCode::Alamouti,
        BuiltinCode::L1,
        BuiltinCode::L2,
        BuiltinCode::GoldenOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinCode::Gaussian => "gaussian",
            BuiltinCode::NfSqrt5 => "nf-sqrt5",
            BuiltinCode::NfSqrt2 => "nf-sqrt2",
            BuiltinCode::Alamouti => "alamouti",
            BuiltinCode::L1 => "l1",
            BuiltinCode::L2 => "l2",
            BuiltinCode::GoldenOrder => "golden-order",
        }
    }

    pub fn is_division_algebra(self) -> bool {
        matches!(
            self,
            BuiltinCode::Alamouti | BuiltinCode::L1 | BuiltinCode::L2 | BuiltinCode::GoldenOrder
        )
    }

    /// The algebra behind a division-algebra code.
    pub fn algebra(self) -> Option<CyclicAlgebraSpec> {
        let spec = match self {
            BuiltinCode::Alamouti => CyclicAlgebraSpec::new(qi_over_q(), GaussInt::int(-1)),
            BuiltinCode::L1 => CyclicAlgebraSpec::new(qi_over_q(), GaussInt::int(3)),
            BuiltinCode::L2 => CyclicAlgebraSpec::new(qi_over_q(), GaussInt::int(-3)),
            BuiltinCode::GoldenOrder => CyclicAlgebraSpec::new(qi_sqrt5(), GaussInt::I),
            _ => return None,
        };
        Some(spec.expect("built-in algebra data is valid"))
    }
}

impl fmt::Display for BuiltinCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BuiltinCode::ALL
            .into_iter()
            .find(|c| c.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownCode(s.to_string()))
    }
}

pub fn builtin(code: BuiltinCode) -> Result<MatrixLattice> {
    let lattice = match code {
        BuiltinCode::Gaussian => diagonal_nf_lattice(&gaussian_field())?,
        BuiltinCode::NfSqrt5 => diagonal_nf_lattice(&qi_sqrt5())?,
        BuiltinCode::NfSqrt2 => diagonal_nf_lattice(&qi_sqrt2())?,
        _ => cyclic_algebra_lattice(&code.algebra().unwrap())?,
    };
    Ok(lattice.with_label(code.name()))
}

/// Descriptor with the `algebra` block filled in for quadratic algebras
/// with a rational `γ`.
pub fn descriptor_of(lattice: &MatrixLattice) -> LatticeDescriptor {
    let mut d = lattice.to_descriptor();
    if let Construction::CyclicAlgebra(spec) = lattice.construction() {
        if let (Some(a), 0) = (spec.field.radicand, spec.gamma.im) {
            if spec.index() == 2 {
                d.algebra = Some(AlgebraBlock {
                    a,
                    gamma: spec.gamma.re as i64,
                    center: match spec.center {
                        Center::Rational => "Q".into(),
                        Center::Gaussian => "Qi".into(),
                    },
                });
            }
        }
    }
    d
}

/// Resolves a descriptor: a built-in tag wins, then an `algebra` block (whose
/// lattice must match any listed basis), then the raw basis.
pub fn lattice_from_descriptor(d: &LatticeDescriptor) -> Result<MatrixLattice> {
    if let Some(code) = d.construction.as_deref().and_then(|t| t.parse::<BuiltinCode>().ok()) {
        return builtin(code);
    }
    if let Some(block) = &d.algebra {
        let center = match block.center.as_str() {
            "Q" => Center::Rational,
            "Qi" => Center::Gaussian,
            other => return Err(Error::InvalidFieldData(format!("unknown center {other:?}, expected \"Q\" or \"Qi\""))),
        };
        let field = quadratic_extension(center, block.a)?;
        let spec = CyclicAlgebraSpec::new(field, GaussInt::int(block.gamma as i128))?;
        let lattice = cyclic_algebra_lattice(&spec)?;
        if !d.basis.is_empty() {
            let listed = build_lattice(d.basis_matrices()?, None)?;
            let same = listed.n() == lattice.n()
                && listed.rank() == lattice.rank()
                && listed
                    .basis()
                    .iter()
                    .zip(lattice.basis())
                    .all(|(a, b)| a.entries().iter().zip(b.entries()).all(|(x, y)| (x - y).norm() < 1e-9));
            if !same {
                return Err(Error::InvalidBasis("listed basis does not match the algebra block".into()));
            }
        }
        return Ok(match &d.construction {
            Some(tag) => lattice.with_label(tag.clone()),
            None => lattice,
        });
    }
    let lattice = build_lattice(d.basis_matrices()?, None)?;
    Ok(match &d.construction {
        Some(tag) => lattice.with_label(tag.clone()),
        None => lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for c in BuiltinCode::ALL {
            assert_eq!(c.name().parse::<BuiltinCode>().unwrap(), c);
        }
        assert!(matches!("l3".parse::<BuiltinCode>(), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn shapes() {
        let shape = |c| {
            let l = builtin(c).unwrap();
            (l.n(), l.rank())
        };
        assert_eq!(shape(BuiltinCode::Gaussian), (1, 2));
        assert_eq!(shape(BuiltinCode::NfSqrt5), (2, 4));
        assert_eq!(shape(BuiltinCode::L1), (2, 4));
        assert_eq!(shape(BuiltinCode::L2), (2, 4));
        assert_eq!(shape(BuiltinCode::GoldenOrder), (2, 8));
    }

    #[test]
    fn alamouti_gram() {
        let l = builtin(BuiltinCode::Alamouti).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l.gram_entry(i, j), if i == j { 2.0 } else { 0.0 });
            }
        }
        assert!((l.covolume() - 4.0).abs() < 1e-12);
        let p = l.point_from_coeffs(&[1, 0, 0, 0]);
        assert_eq!(p.det_abs, 1.0);
        assert!((p.frobenius - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn l1_unit() {
        let l = builtin(BuiltinCode::L1).unwrap();
        assert_eq!(l.exact_det().unwrap().eval(&[2, 0, 1, 0]), GaussInt::int(1));
    }

    #[test]
    fn golden_gram_and_covolume() {
        let l = builtin(BuiltinCode::GoldenOrder).unwrap();
        assert!((l.covolume() - 25.0).abs() < 1e-9);
        assert_eq!(l.gram2_integral().unwrap().len(), 64);
    }

    #[test]
    fn descriptor_with_algebra_block() {
        let l = builtin(BuiltinCode::L2).unwrap();
        let mut d = descriptor_of(&l);
        assert_eq!(
            d.algebra,
            Some(AlgebraBlock {
                a: -1,
                gamma: -3,
                center: "Q".into()
            })
        );
        d.construction = None;
        let back = lattice_from_descriptor(&d).unwrap();
        assert_eq!(back.gram(), l.gram());
        assert_eq!(back.exact_det().unwrap().eval(&[1, 1, 1, 1]), GaussInt::int(2 + 6));
        d.basis[0][0] = [5.0, 0.0];
        assert!(lattice_from_descriptor(&d).is_err());
    }

    #[test]
    fn descriptor_builtin_tag() {
        let d = LatticeDescriptor {
            n: 0,
            k: 0,
            basis: vec![],
            construction: Some("golden-order".into()),
            algebra: None,
        };
        assert_eq!(lattice_from_descriptor(&d).unwrap().rank(), 8);
    }
}
