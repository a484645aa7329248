//! Cyclic algebras `D = (E/F, σ, γ) = E ⊕ uE ⊕ … ⊕ u^{n-1}E` with
//! `xu = uσ(x)` and `u^n = γ`, and the natural order `Λ = ⊕ u^j O_E`.
//!
//! Elements are stored as `n` blocks of `O_F` coordinates on the integral
//! basis of `O_E`: `x = Σ_j u^j x_j`, block `j` holding `x_j`.

use super::field::CyclicFieldData;
use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::lattice::Center;
use crate::matrix::ComplexMatrix;
use crate::poly::{Poly, Ring};
use std::sync::Arc;

pub type AlgebraElement<R> = Vec<Vec<R>>;

#[derive(Clone, Debug)]
pub struct CyclicAlgebraSpec {
    pub field: Arc<CyclicFieldData>,
    pub gamma: GaussInt,
    pub center: Center,
}

impl CyclicAlgebraSpec {
    pub fn new(field: CyclicFieldData, gamma: GaussInt) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::InvalidFieldData("γ must be nonzero".into()));
        }
        if field.base == Center::Rational && gamma.im != 0 {
            return Err(Error::InvalidFieldData("γ must be a rational integer over ℚ".into()));
        }
        Ok(CyclicAlgebraSpec {
            center: field.base,
            field: Arc::new(field),
            gamma,
        })
    }

    pub fn index(&self) -> usize {
        self.field.degree
    }

    /// Number of integer coordinates: `n²` over ℚ, `2n²` over ℚ(i).
    pub fn rank(&self) -> usize {
        let n = self.index();
        n * n * self.field.base_rank()
    }

    pub fn one<R: Ring>(&self) -> AlgebraElement<R> {
        let n = self.index();
        let mut x = vec![vec![R::zero(); n]; n];
        x[0][0] = R::one();
        x
    }

    /// `(u^a x)(u^b y) = u^{a+b} σ^b(x) y`, reducing `u^n = γ`.
    pub fn mul<R: Ring>(&self, x: &AlgebraElement<R>, y: &AlgebraElement<R>) -> AlgebraElement<R> {
        let n = self.index();
        let f = &self.field;
        let gamma = R::from_gauss(self.gamma);
        let mut out = vec![vec![R::zero(); n]; n];
        for a in 0..n {
            if x[a].iter().all(|c| c.is_zero()) {
                continue;
            }
            for b in 0..n {
                if y[b].iter().all(|c| c.is_zero()) {
                    continue;
                }
                let mut t = f.mul(&f.sigma_pow(&x[a], b), &y[b]);
                if a + b >= n {
                    t = f.scale(&t, &gamma);
                }
                let slot = (a + b) % n;
                out[slot] = f.add(&out[slot], &t);
            }
        }
        out
    }

    /// Left regular representation over `E`: entry `(r, c)` is
    /// `σ^c(x_{r−c})` for `r ≥ c` and `γσ^c(x_{n+r−c})` otherwise.
    pub fn psi_entries<R: Ring>(&self, x: &AlgebraElement<R>) -> Vec<Vec<Vec<R>>> {
        let n = self.index();
        let f = &self.field;
        let gamma = R::from_gauss(self.gamma);
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if r >= c {
                            f.sigma_pow(&x[r - c], c)
                        } else {
                            f.scale(&f.sigma_pow(&x[n + r - c], c), &gamma)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `ψ(x)` as a complex matrix under the fixed embedding of `E`.
    pub fn psi_matrix(&self, x: &AlgebraElement<GaussInt>) -> ComplexMatrix {
        let n = self.index();
        let f = &self.field;
        let gamma = self.gamma.to_complex();
        let mut m = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = if r >= c {
                    f.embed(&x[r - c], c)
                } else {
                    gamma * f.embed(&x[n + r - c], c)
                };
            }
        }
        m
    }

    /// Reduced norm `det ψ(x) ∈ O_F`, by the Leibniz expansion over `E`.
    pub fn reduced_norm<R: Ring>(&self, x: &AlgebraElement<R>) -> Result<R> {
        let entries = self.psi_entries(x);
        let det = leibniz(&self.field, &entries);
        self.field.base_part(det)
    }

    pub fn element_from_coeffs(&self, z: &[i64]) -> AlgebraElement<GaussInt> {
        let n = self.index();
        let br = self.field.base_rank();
        assert_eq!(z.len(), self.rank());
        (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let o = (b * n + a) * br;
                        if br == 2 {
                            GaussInt::new(z[o] as i128, z[o + 1] as i128)
                        } else {
                            GaussInt::int(z[o] as i128)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`Self::element_from_coeffs`]; `None` on overflow or when a
    /// coordinate leaves the base ring.
    pub fn coeffs_from_element(&self, x: &AlgebraElement<GaussInt>) -> Option<Vec<i64>> {
        let br = self.field.base_rank();
        let mut z = Vec::with_capacity(self.rank());
        for block in x {
            for c in block {
                z.push(i64::try_from(c.re).ok()?);
                if br == 2 {
                    z.push(i64::try_from(c.im).ok()?);
                } else if c.im != 0 {
                    return None;
                }
            }
        }
        Some(z)
    }

    /// The generic element with one polynomial variable per integer coordinate.
    pub fn symbolic_element(&self) -> AlgebraElement<Poly> {
        let n = self.index();
        let br = self.field.base_rank();
        (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let o = (b * n + a) * br;
                        if br == 2 {
                            Poly::var(o).add(&Poly::var(o + 1).mul(&Poly::constant(GaussInt::I)))
                        } else {
                            Poly::var(o)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Determinant of a square matrix with entries in a commutative field table.
pub(crate) fn leibniz<R: Ring>(f: &CyclicFieldData, m: &[Vec<Vec<R>>]) -> Vec<R> {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = vec![R::zero(); f.degree];
    permutations(&mut perm, 0, &mut |p, odd| {
        let mut t = f.one::<R>();
        for (r, &c) in p.iter().enumerate() {
            t = f.mul(&t, &m[r][c]);
            if t.iter().all(|x| x.is_zero()) {
                return;
            }
        }
        for (a, b) in acc.iter_mut().zip(t) {
            *a = if odd { a.sub(&b) } else { a.add(&b) };
        }
    });
    acc
}

/// Heap-free recursive enumeration with parity tracking.
fn permutations(p: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize], bool)) {
    fn rec(p: &mut [usize], start: usize, odd: bool, visit: &mut impl FnMut(&[usize], bool)) {
        if start == p.len() {
            visit(p, odd);
            return;
        }
        for i in start..p.len() {
            p.swap(start, i);
            rec(p, start + 1, odd ^ (i != start), visit);
            p.swap(start, i);
        }
    }
    rec(p, start, false, visit)
}

/// Whether `(a, γ)_ℚ ⊗ ℝ` is the Hamilton quaternions.
pub fn infinite_place_ramified(spec: &CyclicAlgebraSpec) -> Result<bool> {
    if spec.center != Center::Rational || spec.index() != 2 {
        return Err(Error::UnsupportedIndex(spec.index()));
    }
    let a = spec.field.radicand.ok_or(Error::UnsupportedIndex(spec.index()))?;
    Ok(a < 0 && spec.gamma.re < 0)
}
