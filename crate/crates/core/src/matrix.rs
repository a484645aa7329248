//! Square complex matrices and the flattening isometry `M_n(ℂ) → ℝ^{2n²}`.

use num_complex::Complex64;
use std::ops::{Add, Mul};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    /// Row-major entries.
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from `n²` row-major entries. Panics if the length is not a square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Self {
        let n = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(n * n, entries.len(), "entry count {} is not a square", entries.len());
        ComplexMatrix { n, entries }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            entries.extend_from_slice(r);
        }
        ComplexMatrix { n, entries }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            n: self.n,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + c·other`, accumulating in place.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, c: f64) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * c;
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// `⟨A, B⟩ = Re tr(A B†)`.
    pub fn inner(&self, other: &ComplexMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Row-by-row real/imaginary interleaving: `[Re x11, Im x11, Re x12, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        match n {
            0 => return Complex64::new(1.0, 0.0),
            1 => return self.entries[0],
            2 => return self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2],
            _ => {}
        }
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
            }
        }
        det
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, o: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(o, 1.0);
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, o: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(o)
    }
}

/// Shorthand used by the constructions and tests.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Determinant of a dense real `k×k` matrix (row-major) by partial pivoting.
pub fn real_det(a: &[f64], k: usize) -> f64 {
    let mut a = a.to_vec();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs()))
            .unwrap();
        if a[pivot * k + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
            }
            det = -det;
        }
        let p = a[col * k + col];
        det *= p;
        for row in col + 1..k {
            let f = a[row * k + col] / p;
            for j in col..k {
                a[row * k + j] -= f * a[col * k + j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_scalar() {
        let m = ComplexMatrix::from_row_major(vec![c(2.0, 3.0)]);
        assert_eq!(m.flatten(), vec![2.0, 3.0]);
    }

    #[test]
    fn flatten_zero_and_identity() {
        assert!(ComplexMatrix::zeros(3).flatten().iter().all(|&x| x == 0.0));
        let v = ComplexMatrix::identity(2).flatten();
        assert_eq!(v.len(), 8);
        assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 2);
        assert_eq!(v.iter().filter(|&&x| x == 0.0).count(), 6);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lu_matches_cofactor_expansion() {
        let m = ComplexMatrix::from_rows(&[
            &[c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0)],
            &[c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0)],
            &[c(0.5, 0.0), c(4.0, 0.0), c(1.0, 1.0)],
        ]);
        let e = |i, j| m[(i, j)];
        let cof = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        assert!((m.det() - cof).norm() < 1e-12);
    }

    #[test]
    fn inner_product_is_re_trace() {
        let a = ComplexMatrix::from_rows(&[&[c(1.0, 1.0), c(0.0, 2.0)], &[c(3.0, 0.0), c(1.0, -1.0)]]);
        let b = ComplexMatrix::from_rows(&[&[c(2.0, 0.0), c(1.0, 1.0)], &[c(0.0, 1.0), c(1.0, 0.0)]]);
        let prod = a.matmul(&b.conj_transpose());
        let tr = prod[(0, 0)] + prod[(1, 1)];
        assert!((a.inner(&b) - tr.re).abs() < 1e-12);
    }
}
