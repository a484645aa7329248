//! Ball-volume growth exponents `Vol(B(M)) ∼ M^T` for `SL_n(ℂ)`, `SL_n(ℝ)`
//! and `SL_m(ℍ)`, computed from restricted root data in exact arithmetic.
//!
//! Pipeline: `ψ = ½ Σ m_γ γ` over positive roots; for a dual basis `β̃_j` of
//! the simple roots put `β_j = β̃_j / (2ψ(β̃_j))`; then `T = 1 / min_j λ_1(β_j)`
//! with `λ_1` the highest weight of the standard representation.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Linear functional `Σ c_i e_i` on trace-zero diagonal matrices, stored with
/// the last coefficient normalized to 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<BigRational>,
}

impl LinearForm {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        if let Some(last) = coeffs.last().cloned() {
            for c in coeffs.iter_mut() {
                *c -= &last;
            }
        }
        LinearForm { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        LinearForm::new(vec![BigRational::zero(); dim])
    }

    /// `e_i`, zero-based.
    pub fn e(dim: usize, i: usize) -> Self {
        let mut c = vec![BigRational::zero(); dim];
        c[i] = BigRational::one();
        LinearForm::new(c)
    }

    /// `e_i − e_j`.
    pub fn root(dim: usize, i: usize, j: usize) -> Self {
        let mut c = vec![BigRational::zero(); dim];
        c[i] = BigRational::one();
        c[j] = -BigRational::one();
        LinearForm::new(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, o: &LinearForm) -> LinearForm {
        LinearForm::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &BigRational) -> LinearForm {
        LinearForm::new(self.coeffs.iter().map(|a| a * s).collect())
    }

    /// Value on `diag(d)`; `d` must have trace zero.
    pub fn eval(&self, diag: &[BigRational]) -> BigRational {
        debug_assert!(diag.iter().fold(BigRational::zero(), |s, x| s + x).is_zero());
        self.coeffs.iter().zip(diag).map(|(c, d)| c * d).sum()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            if a.is_one() {
                write!(f, "{sign}e{}", i + 1)?;
            } else {
                write!(f, "{sign}{a}e{}", i + 1)?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `SL_n(ℂ)` as a real group.
    Complex,
    /// `SL_n(ℝ)`.
    Real,
    /// `SL_m(ℍ)` inside `SL_{2m}(ℂ)`.
    Quaternion,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "complex" => Ok(Family::Complex),
            "real" => Ok(Family::Real),
            "quaternion" => Ok(Family::Quaternion),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestrictedRootData {
    pub family: Family,
    pub rank: usize,
    /// Ambient diagonal size `N`.
    pub ambient: usize,
    pub positive_roots: Vec<(LinearForm, u32)>,
    pub simple_roots: Vec<LinearForm>,
    pub highest_weight: LinearForm,
    /// Fundamental coweights: `γ_i(β̃_j) = δ_ij`.
    pub dual_basis_raw: Vec<Vec<BigRational>>,
    /// Integral vectors `E_1 + … + E_j − j E_last` (doubled along the
    /// quaternionic blocks); proportional to the coweights only at `j = r`.
    pub printed_dual_basis: Vec<Vec<BigRational>>,
}

/// Embeds restricted coordinates `a_1..a_m` into the ambient diagonal.
fn lift(family: Family, a: Vec<BigRational>) -> Vec<BigRational> {
    match family {
        Family::Quaternion => a.iter().chain(a.iter()).cloned().collect(),
        _ => a,
    }
}

pub fn build_root_data(family: Family, n: usize) -> Result<RestrictedRootData> {
    if n < 2 {
        let what = if family == Family::Quaternion { "m" } else { "n" };
        return Err(Error::RankTooSmall(format!("{what} = {n}, need at least 2")));
    }
    // restricted coordinates: a_1..a_n, ambient diagonal of size N
    let (ambient, mult) = match family {
        Family::Complex => (n, 2),
        Family::Real => (n, 1),
        Family::Quaternion => (2 * n, 4),
    };
    let rank = n - 1;
    let mut positive_roots = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            positive_roots.push((LinearForm::root(ambient, i, j), mult));
        }
    }
    let simple_roots = (0..rank).map(|i| LinearForm::root(ambient, i, i + 1)).collect();
    let nq = q(n as i64);
    let dual_basis_raw = (1..=rank)
        .map(|j| {
            let a = (0..n)
                .map(|i| {
                    let base = if i < j { BigRational::one() } else { BigRational::zero() };
                    base - q(j as i64) / &nq
                })
                .collect();
            lift(family, a)
        })
        .collect();
    let printed_dual_basis = (1..=rank)
        .map(|j| {
            let mut a = vec![BigRational::zero(); n];
            for x in a.iter_mut().take(j) {
                *x = BigRational::one();
            }
            a[n - 1] = q(-(j as i64));
            lift(family, a)
        })
        .collect();
    Ok(RestrictedRootData {
        family,
        rank,
        ambient,
        positive_roots,
        simple_roots,
        highest_weight: LinearForm::e(ambient, 0),
        dual_basis_raw,
        printed_dual_basis,
    })
}

impl RestrictedRootData {
    /// `ψ = ½ Σ m_γ γ`.
    pub fn half_sum(&self) -> LinearForm {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.positive_roots
            .iter()
            .fold(LinearForm::zero(self.ambient), |acc, (g, m)| acc.add(&g.scale(&q(*m as i64))))
            .scale(&half)
    }

    /// Coefficients of a positive root on the simple roots, if it is a
    /// nonnegative integer combination of them.
    pub fn simple_coefficients(&self, root: &LinearForm) -> Option<Vec<BigInt>> {
        let coeffs: Vec<BigRational> = self.dual_basis_raw.iter().map(|b| root.eval(b)).collect();
        let recombined = self
            .simple_roots
            .iter()
            .zip(&coeffs)
            .fold(LinearForm::zero(self.ambient), |acc, (s, c)| acc.add(&s.scale(c)));
        if &recombined != root {
            return None;
        }
        coeffs
            .into_iter()
            .map(|c| (c.is_integer() && !c.is_negative()).then(|| c.to_integer()))
            .collect()
    }
}

/// One row of the exponent computation for the dual vector `β̃_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRow {
    pub j: usize,
    pub psi: BigRational,
    pub lambda_raw: BigRational,
    /// `λ_1(β_j) = λ_1(β̃_j) / (2ψ(β̃_j))`.
    pub lambda_normalized: BigRational,
}

pub fn exponent_table(data: &RestrictedRootData, basis: &[Vec<BigRational>]) -> Vec<DualRow> {
    let psi = data.half_sum();
    basis
        .iter()
        .enumerate()
        .map(|(idx, b)| {
            let p = psi.eval(b);
            let l = data.highest_weight.eval(b);
            DualRow {
                j: idx + 1,
                lambda_normalized: &l / (q(2) * &p),
                psi: p,
                lambda_raw: l,
            }
        })
        .collect()
}

/// `T = 1 / min_j λ_1(β_j)`; the minimum must be attained once.
pub fn volume_exponent(data: &RestrictedRootData) -> Result<BigRational> {
    volume_exponent_from(data, &data.dual_basis_raw)
}

pub fn volume_exponent_from(data: &RestrictedRootData, basis: &[Vec<BigRational>]) -> Result<BigRational> {
    let rows = exponent_table(data, basis);
    let min = rows
        .iter()
        .map(|r| r.lambda_normalized.clone())
        .min()
        .ok_or_else(|| Error::RankTooSmall("empty dual basis".into()))?;
    let at: Vec<usize> = rows.iter().filter(|r| r.lambda_normalized == min).map(|r| r.j).collect();
    if at.len() > 1 {
        return Err(Error::NonUniqueMinimum(at));
    }
    Ok(min.recip())
}

/// Index of the dual vector attaining the minimum.
pub fn minimizing_index(data: &RestrictedRootData) -> Option<usize> {
    let rows = exponent_table(data, &data.dual_basis_raw);
    rows.iter().min_by(|a, b| a.lambda_normalized.cmp(&b.lambda_normalized)).map(|r| r.j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRegime {
    ComplexCenter,
    Unramified,
    Ramified,
}

/// Growth exponent of `|ψ(Λ*) ∩ B(M)|` for an index-`n` order.
pub fn unit_growth_prediction(regime: UnitRegime, n: usize) -> Result<BigRational> {
    match regime {
        UnitRegime::ComplexCenter => volume_exponent(&build_root_data(Family::Complex, n)?),
        UnitRegime::Unramified => volume_exponent(&build_root_data(Family::Real, n)?),
        UnitRegime::Ramified => {
            if !n.is_multiple_of(2) {
                return Err(Error::OddIndexRamified(n));
            }
            // SL_1(ℍ) is compact: bounded unit count
            if n == 2 {
                return Ok(BigRational::zero());
            }
            volume_exponent(&build_root_data(Family::Quaternion, n / 2)?)
        }
    }
}
