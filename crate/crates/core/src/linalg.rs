//! Small dense linear algebra shared by the exact and numeric layers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring operations needed by [`det`].
///
/// Even-degree differential forms commute, so [`crate::formlab::ExtForm`]
/// implements this for the wedge product as well.
pub trait CommRing: Clone {
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn ring_is_zero(&self) -> bool;
}

/// Determinant by Laplace expansion over column subsets.
///
/// `O(2^n n)` ring multiplications and no division, so it works over any
/// commutative ring. `one` is used for the empty matrix.
pub fn det<T: CommRing>(m: &[Vec<T>], one: &T) -> T {
    let n = m.len();
    if n == 0 {
        return one.clone();
    }
    assert!(n <= 20, "determinant of size {n} is too large for subset expansion");
    let mut layer: Vec<(usize, T)> = vec![(0, one.clone())];
    for row in m.iter() {
        assert_eq!(row.len(), n, "determinant of a non-square matrix");
        let mut next: alloc::collections::BTreeMap<usize, T> = alloc::collections::BTreeMap::new();
        for (mask, acc) in &layer {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.ring_is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut term = acc.ring_mul(entry);
                if above % 2 == 1 {
                    term = term.ring_neg();
                }
                let key = mask | (1 << c);
                match next.get_mut(&key) {
                    Some(slot) => *slot = slot.ring_add(&term),
                    None => {
                        next.insert(key, term);
                    }
                }
            }
        }
        layer = next.into_iter().filter(|(_, v)| !v.ring_is_zero()).collect();
        if layer.is_empty() {
            break;
        }
    }
    match layer.into_iter().next() {
        Some((_, v)) => v,
        None => one.ring_add(&one.ring_neg()),
    }
}

impl CommRing for BigRational {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl CommRing for Complex64 {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Solve `a x = b` exactly. Returns `None` when `a` is singular.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = BigRational::one() / &m[col][col];
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let d = &m[col][c] * &f;
                    m[r][c] = &m[r][c] - d;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Dense complex matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap();
            if a[(pivot, col)].norm() <= 1e-14 * scale {
                return None;
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = Complex64::one() / a[(col, col)];
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Cholesky factor `L` with `self = L L^H`, for Hermitian positive definite input.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Distance from unitarity, `max |V^H V - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().matmul(self).sub(&Self::identity(self.cols)).max_abs()
    }

    /// Distance from Hermitian symmetry, `max |A - A^H|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = vec![
            vec![q(2), q(-1), q(0)],
            vec![q(1), q(3), q(4)],
            vec![q(0), q(5), q(-2)],
        ];
        // 2(3*-2 - 4*5) - (-1)(1*-2 - 0) + 0 = -52 - 2
        assert_eq!(det(&m, &q(1)), q(-54));
        assert_eq!(det::<BigRational>(&[], &q(1)), q(1));
        let singular = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(det(&singular, &q(1)), q(0));
    }

    #[test]
    fn rational_solve_roundtrip() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_rational(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![BigRational::new(4.into(), 5.into()), BigRational::new(7.into(), 5.into())]);
        assert!(solve_rational(&[vec![q(1), q(1)], vec![q(1), q(1)]], &[q(0), q(0)]).is_none());
    }

    #[test]
    fn complex_inverse_and_cholesky() {
        let a = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(3.0 + i as f64, 0.0)
            } else if i < j {
                Complex64::new(0.5, 0.25 * (i + j) as f64)
            } else {
                Complex64::new(0.5, -0.25 * (i + j) as f64)
            }
        });
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).sub(&CMat::identity(3)).max_abs() < 1e-14);
        let l = a.cholesky().unwrap();
        assert!(l.matmul(&l.adjoint()).sub(&a).max_abs() < 1e-14);
    }
}
