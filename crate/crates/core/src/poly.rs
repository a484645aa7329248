//! Sparse multivariate polynomials over ℤ[i].
//!
//! Reduced norms of the built-in orders are homogeneous polynomials in the
//! integer lattice coordinates. They are derived once, symbolically, by
//! running the ordinary exact algebra arithmetic over [`Poly`] coefficients,
//! then compiled into a [`CompiledPoly`] for fast evaluation inside the
//! enumeration loops.

use crate::gaussian::GaussInt;
use std::collections::BTreeMap;
use std::fmt::Debug;

/// Minimal commutative ring interface shared by [`GaussInt`] and [`Poly`].
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_gauss(g: GaussInt) -> Self;
}

impl Ring for GaussInt {
    fn zero() -> Self {
        GaussInt::ZERO
    }
    fn one() -> Self {
        GaussInt::ONE
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn is_zero(&self) -> bool {
        GaussInt::is_zero(*self)
    }
    fn from_gauss(g: GaussInt) -> Self {
        g
    }
}

/// Monomial as sorted `(variable, exponent)` pairs; the empty monomial is 1.
type Monomial = Vec<(u16, u8)>;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussInt>,
}

impl Poly {
    pub fn var(v: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(v as u16, 1)], GaussInt::ONE);
        Poly { terms }
    }

    pub fn constant(c: GaussInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[i64]) -> GaussInt {
        let mut acc = GaussInt::ZERO;
        for (mono, c) in &self.terms {
            let mut t = *c;
            for &(v, e) in mono {
                t = t.scale((z[v as usize] as i128).pow(e as u32));
            }
            acc += t;
        }
        acc
    }

    pub fn compile(&self, nvars: usize) -> CompiledPoly {
        let terms = self
            .terms
            .iter()
            .map(|(mono, &coeff)| {
                let mut inner_pow = 0u8;
                let mut others = Vec::new();
                for &(v, e) in mono {
                    if v == 0 {
                        inner_pow = e;
                    } else {
                        others.push((v as usize, e));
                    }
                }
                CompiledTerm {
                    coeff,
                    inner_pow,
                    others,
                }
            })
            .collect();
        CompiledPoly {
            nvars,
            degree: self.degree(),
            terms,
        }
    }

    fn insert(terms: &mut BTreeMap<Monomial, GaussInt>, mono: Monomial, c: GaussInt) {
        match terms.get_mut(&mono) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    terms.remove(&mono);
                }
            }
            None if !c.is_zero() => {
                terms.insert(mono, c);
            }
            None => {}
        }
    }
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(GaussInt::ONE)
    }
    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, &c) in &o.terms {
            Poly::insert(&mut terms, m.clone(), c);
        }
        Poly { terms }
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &o.terms {
                Poly::insert(&mut terms, mono_mul(ma, mb), ca * cb);
            }
        }
        Poly { terms }
    }
    fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_gauss(g: GaussInt) -> Self {
        Poly::constant(g)
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    coeff: GaussInt,
    inner_pow: u8,
    others: Vec<(usize, u8)>,
}

/// Flattened polynomial with a distinguished inner variable (index 0), so
/// that a whole row of the enumeration can be evaluated from one univariate
/// restriction.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    degree: u32,
    terms: Vec<CompiledTerm>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, z: &[i64]) -> GaussInt {
        let mut acc = GaussInt::ZERO;
        for t in &self.terms {
            let mut c = t.coeff.scale((z[0] as i128).pow(t.inner_pow as u32));
            for &(v, e) in &t.others {
                c = c.scale((z[v] as i128).pow(e as u32));
            }
            acc += c;
        }
        acc
    }

    /// Coefficients `c_0..c_d` with `P(z_0, z_1..) = Σ c_j z_0^j` for the
    /// given values of `z_1..` (`z[0]` is ignored).
    pub fn restrict_inner(&self, z: &[i64], out: &mut Vec<GaussInt>) {
        out.clear();
        out.resize(self.degree as usize + 1, GaussInt::ZERO);
        for t in &self.terms {
            let mut c = t.coeff;
            for &(v, e) in &t.others {
                c = c.scale((z[v] as i128).pow(e as u32));
            }
            out[t.inner_pow as usize] += c;
        }
    }
}

/// Horner evaluation of a univariate restriction.
#[inline]
pub fn horner(coeffs: &[GaussInt], x: i64) -> GaussInt {
    let x = x as i128;
    let mut acc = GaussInt::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc.scale(x) + *c;
    }
    acc
}
