//! Cyclic extensions `K/F` with `F ∈ {ℚ, ℚ(i)}`, described by exact tables
//! on an integral basis `w_0 = 1, w_1, …, w_{n-1}` of `O_K` over `O_F`.

use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::lattice::Center;
use crate::poly::Ring;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct CyclicFieldData {
    pub degree: usize,
    pub base: Center,
    /// `w_a · w_b = Σ_c mult[a][b][c] w_c`.
    pub mult: Vec<Vec<Vec<GaussInt>>>,
    /// `σ(w_a) = Σ_c galois[a][c] w_c`.
    pub galois: Vec<Vec<GaussInt>>,
    /// `embeddings[j][a]` is the complex value of `σ^j(w_a)`.
    pub embeddings: Vec<Vec<Complex64>>,
    /// `a` when `K = F(√a)`; used for the ramification test.
    pub radicand: Option<i64>,
    pub label: String,
}

impl CyclicFieldData {
    pub fn one<R: Ring>(&self) -> Vec<R> {
        let mut v = vec![R::zero(); self.degree];
        v[0] = R::one();
        v
    }

    pub fn mul<R: Ring>(&self, x: &[R], y: &[R]) -> Vec<R> {
        let n = self.degree;
        let mut out = vec![R::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if y[b].is_zero() {
                    continue;
                }
                let xy = x[a].mul(&y[b]);
                for c in 0..n {
                    let t = self.mult[a][b][c];
                    if !t.is_zero() {
                        out[c] = out[c].add(&xy.mul(&R::from_gauss(t)));
                    }
                }
            }
        }
        out
    }

    pub fn add<R: Ring>(&self, x: &[R], y: &[R]) -> Vec<R> {
        x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
    }

    pub fn scale<R: Ring>(&self, x: &[R], s: &R) -> Vec<R> {
        x.iter().map(|a| a.mul(s)).collect()
    }

    pub fn sigma<R: Ring>(&self, x: &[R]) -> Vec<R> {
        let n = self.degree;
        let mut out = vec![R::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for c in 0..n {
                let g = self.galois[a][c];
                if !g.is_zero() {
                    out[c] = out[c].add(&x[a].mul(&R::from_gauss(g)));
                }
            }
        }
        out
    }

    pub fn sigma_pow<R: Ring>(&self, x: &[R], j: usize) -> Vec<R> {
        let mut y = x.to_vec();
        for _ in 0..j % self.degree {
            y = self.sigma(&y);
        }
        y
    }

    /// `N_{K/F}(x) = Π_j σ^j(x)`, returned as its `w_0` coordinate.
    pub fn norm<R: Ring>(&self, x: &[R]) -> Result<R> {
        let mut acc = x.to_vec();
        for j in 1..self.degree {
            acc = self.mul(&acc, &self.sigma_pow(x, j));
        }
        self.base_part(acc)
    }

    /// Extracts the `O_F` value of an element that must lie in `F`.
    pub fn base_part<R: Ring>(&self, x: Vec<R>) -> Result<R> {
        if x[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidFieldData(format!(
                "{}: expected an element of the base field",
                self.label
            )));
        }
        Ok(x.into_iter().next().unwrap())
    }

    /// Complex value of `σ^j(x)` for `x` with `O_F` coordinates.
    pub fn embed(&self, x: &[GaussInt], j: usize) -> Complex64 {
        x.iter()
            .zip(&self.embeddings[j % self.degree])
            .map(|(c, e)| c.to_complex() * e)
            .sum()
    }

    pub fn embed_f64(&self, x: &[Complex64], j: usize) -> Complex64 {
        x.iter().zip(&self.embeddings[j % self.degree]).map(|(c, e)| c * e).sum()
    }

    /// Integer coordinates per `O_F` coefficient.
    pub fn base_rank(&self) -> usize {
        match self.base {
            Center::Rational => 1,
            Center::Gaussian => 2,
        }
    }

    /// Checks the tables: unit element, commutativity, associativity,
    /// `σ` a ring automorphism of order `n`, and embeddings compatible with
    /// both multiplication and `σ`.
    pub fn validate(&self) -> Result<()> {
        let n = self.degree;
        let bad = |msg: String| Err(Error::InvalidFieldData(format!("{}: {msg}", self.label)));
        if n == 0 {
            return bad("degree must be positive".into());
        }
        if self.mult.len() != n
            || self.mult.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n))
            || self.galois.len() != n
            || self.galois.iter().any(|r| r.len() != n)
            || self.embeddings.len() != n
            || self.embeddings.iter().any(|r| r.len() != n)
        {
            return bad("table shapes do not match the degree".into());
        }
        if self.base == Center::Rational {
            let all = self.mult.iter().flatten().flatten().chain(self.galois.iter().flatten());
            if all.into_iter().any(|g| g.im != 0) {
                return bad("rational base field with non-real table entries".into());
            }
        }
        for b in 0..n {
            let e: Vec<GaussInt> = (0..n).map(|c| GaussInt::int((b == c) as i128)).collect();
            if self.mult[0][b] != e {
                return bad("w_0 is not the unit element".into());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut random = || -> Vec<GaussInt> {
            (0..n)
                .map(|_| {
                    let im = if self.base == Center::Gaussian { rng.gen_range(-4..=4) } else { 0 };
                    GaussInt::new(rng.gen_range(-4..=4), im)
                })
                .collect()
        };
        for _ in 0..100 {
            let (x, y, z) = (random(), random(), random());
            if self.mul(&x, &y) != self.mul(&y, &x) {
                return bad("multiplication is not commutative".into());
            }
            if self.mul(&self.mul(&x, &y), &z) != self.mul(&x, &self.mul(&y, &z)) {
                return bad("multiplication is not associative".into());
            }
            if self.sigma(&self.mul(&x, &y)) != self.mul(&self.sigma(&x), &self.sigma(&y)) {
                return bad("σ is not multiplicative".into());
            }
            let xy = self.mul(&x, &y);
            for j in 0..n {
                let lhs = self.embed(&xy, j);
                let rhs = self.embed(&x, j) * self.embed(&y, j);
                if (lhs - rhs).norm() > 1e-10 * (1.0 + rhs.norm()) {
                    return bad(format!("embedding {j} is not multiplicative"));
                }
                let lhs = self.embed(&self.sigma(&x), j);
                let rhs = self.embed(&x, j + 1);
                if (lhs - rhs).norm() > 1e-10 * (1.0 + rhs.norm()) {
                    return bad(format!("embedding {j} is not compatible with σ"));
                }
            }
        }
        let basis: Vec<Vec<GaussInt>> = (0..n)
            .map(|a| (0..n).map(|c| GaussInt::int((a == c) as i128)).collect())
            .collect();
        for w in &basis {
            let mut y = w.clone();
            for _ in 0..n {
                y = self.sigma(&y);
            }
            if &y != w {
                return bad("σ^n is not the identity".into());
            }
        }
        for j in 1..n {
            if basis.iter().all(|w| &self.sigma_pow(w, j) == w) {
                return bad(format!("σ has order dividing {j}, not {n}"));
            }
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn g(re: i128) -> GaussInt {
    GaussInt::int(re)
}

/// Quadratic table for basis `{1, ω}` with `ω² = p + qω` and `σ(ω) = s + tω`.
fn quadratic(
    base: Center,
    p: i128,
    q: i128,
    s: i128,
    t: i128,
    omega: [Complex64; 2],
    radicand: i64,
    label: &str,
) -> CyclicFieldData {
    let z = GaussInt::ZERO;
    CyclicFieldData {
        degree: 2,
        base,
        mult: vec![vec![vec![g(1), z], vec![z, g(1)]], vec![vec![z, g(1)], vec![g(p), g(q)]]],
        galois: vec![vec![g(1), z], vec![g(s), g(t)]],
        embeddings: vec![vec![c(1.0, 0.0), omega[0]], vec![c(1.0, 0.0), omega[1]]],
        radicand: Some(radicand),
        label: label.into(),
    }
}

/// The trivial extension `ℚ(i)/ℚ(i)`.
pub fn gaussian_field() -> CyclicFieldData {
    CyclicFieldData {
        degree: 1,
        base: Center::Gaussian,
        mult: vec![vec![vec![g(1)]]],
        galois: vec![vec![g(1)]],
        embeddings: vec![vec![c(1.0, 0.0)]],
        radicand: None,
        label: "Q(i)/Q(i)".into(),
    }
}

/// `ℚ(i)/ℚ` with basis `{1, i}` and complex conjugation.
pub fn qi_over_q() -> CyclicFieldData {
    quadratic(Center::Rational, -1, 0, 0, -1, [c(0.0, 1.0), c(0.0, -1.0)], -1, "Q(i)/Q")
}

/// `ℚ(i,√5)/ℚ(i)` with basis `{1, φ}`, `φ² = φ + 1`, `σ(φ) = 1 − φ`.
pub fn qi_sqrt5() -> CyclicFieldData {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    quadratic(Center::Gaussian, 1, 1, 1, -1, [c(phi, 0.0), c(1.0 - phi, 0.0)], 5, "Q(i,sqrt5)/Q(i)")
}

/// `ℚ(i,√2)/ℚ(i)` with basis `{1, √2}`, `σ(√2) = −√2`.
pub fn qi_sqrt2() -> CyclicFieldData {
    let r = 2f64.sqrt();
    quadratic(Center::Gaussian, 2, 0, 0, -1, [c(r, 0.0), c(-r, 0.0)], 2, "Q(i,sqrt2)/Q(i)")
}

fn sqrt_c(a: i64) -> Complex64 {
    if a >= 0 {
        c((a as f64).sqrt(), 0.0)
    } else {
        c(0.0, (-a as f64).sqrt())
    }
}

fn is_squarefree(a: i64) -> bool {
    let a = a.unsigned_abs();
    let mut p = 2u64;
    while p * p <= a {
        if a.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// `F(√a)/F` for squarefree `a`, with the basis `{1, (1+√a)/2}` when
/// `a ≡ 1 (mod 4)` and `{1, √a}` otherwise.
pub fn quadratic_extension(base: Center, a: i64) -> Result<CyclicFieldData> {
    if a == 0 || a == 1 || !is_squarefree(a) {
        return Err(Error::InvalidFieldData(format!("radicand {a} is not a squarefree integer ≠ 0, 1")));
    }
    if base == Center::Gaussian && (a == -1) {
        return Err(Error::InvalidFieldData("√−1 already lies in ℚ(i)".into()));
    }
    let r = sqrt_c(a);
    let tag = match base {
        Center::Rational => format!("Q(sqrt({a}))/Q"),
        Center::Gaussian => format!("Q(i,sqrt({a}))/Q(i)"),
    };
    let a = a as i128;
    let field = if a.rem_euclid(4) == 1 {
        // ω = (1+√a)/2: ω² = ω + (a−1)/4, σ(ω) = 1 − ω
        let w0 = (c(1.0, 0.0) + r) / 2.0;
        let w1 = (c(1.0, 0.0) - r) / 2.0;
        quadratic(base, (a - 1) / 4, 1, 1, -1, [w0, w1], a as i64, &tag)
    } else {
        quadratic(base, a, 0, 0, -1, [r, -r], a as i64, &tag)
    };
    field.validate()?;
    Ok(field)
}
