//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! [`Poly`] is the shared kernel behind [`crate::charpoly::ChernPoly`]
//! (variables `c_1..c_r`, weighted degree) and [`crate::rootcalc::RootPoly`]
//! (variables `ξ_1..ξ_r`, plain degree).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::CommRing;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

/// Rational number from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable with 0-based index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exponents, coeff: BigRational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, coeff);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Add `coeff * x^exps`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exps: Exponents, coeff: BigRational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, coeff);
            }
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Degree of a monomial under the given variable weights.
    pub fn weighted_degree_of(exps: &[u32], weights: &[u32]) -> u32 {
        exps.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    /// `Some(d)` when every term has weighted degree `d` (the zero polynomial
    /// reports `None`; use [`Poly::is_homogeneous_of`] to test a given degree).
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| Self::weighted_degree_of(e, weights));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// True when every term has weighted degree `d` (vacuously for zero).
    pub fn is_homogeneous_of(&self, weights: &[u32], d: u32) -> bool {
        self.terms.keys().all(|e| Self::weighted_degree_of(e, weights) == d)
    }

    /// Keep only the terms of weighted degree `d`.
    pub fn graded_part(&self, weights: &[u32], d: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Self::weighted_degree_of(e, weights) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rename variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Exact quotient by `x_i - x_j`, or `None` when it does not divide.
    pub fn div_by_difference(&self, i: usize, j: usize) -> Option<Self> {
        assert!(i != j && i < self.nvars && j < self.nvars);
        // Group by the power of x_i and run synthetic division in x_i
        // with coefficients in the remaining variables.
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest[i];
            rest[i] = 0;
            by_power
                .entry(k)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(rest, c.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&t) => t,
            None => return Some(Self::zero(self.nvars)),
        };
        let xj = Self::var(self.nvars, j);
        let mut quotient = Self::zero(self.nvars);
        let mut carry = Self::zero(self.nvars);
        for k in (0..=top).rev() {
            let a_k = by_power.remove(&k).unwrap_or_else(|| Self::zero(self.nvars));
            // q_{k-1} = a_k + x_j q_k
            let q = a_k.add(&xj.mul(&carry));
            if k == 0 {
                return q.is_zero().then_some(quotient);
            }
            for (e, c) in &q.terms {
                let mut ne = e.clone();
                ne[i] += k - 1;
                quotient.add_term(ne, c.clone());
            }
            carry = q;
        }
        unreachable!()
    }

    /// Ring homomorphism determined by the images of the variables.
    pub fn substitute<T: CommRing>(&self, images: &[T], one: &T, embed: impl Fn(&BigRational) -> T) -> T {
        assert_eq!(images.len(), self.nvars);
        let zero = one.ring_add(&one.ring_neg());
        let mut powers: Vec<Vec<T>> = images.iter().map(|x| vec![one.clone(), x.clone()]).collect();
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut term = embed(c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k as usize {
                    let next = powers[v].last().unwrap().ring_mul(&images[v]);
                    powers[v].push(next);
                }
                term = term.ring_mul(&powers[v][k as usize]);
            }
            acc = acc.ring_add(&term);
        }
        acc
    }

    /// Terms sorted by descending weighted degree, then descending
    /// lexicographic exponent order (graded lex, leading term first).
    pub fn graded_lex_terms(&self, weights: &[u32]) -> Vec<(&Exponents, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| graded_lex_desc(a, b, weights));
        v
    }

    /// Maximum absolute coefficient (zero for the zero polynomial).
    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

fn graded_lex_desc(a: &[u32], b: &[u32], weights: &[u32]) -> Ordering {
    let da = Poly::weighted_degree_of(a, weights);
    let db = Poly::weighted_degree_of(b, weights);
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl CommRing for Poly {
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let p = x(0).add(&x(1)).pow(2);
        let q = x(0).pow(2).add(&x(0).mul(&x(1)).scale(&rat(2))).add(&x(1).pow(2));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn exact_division_by_root_difference() {
        let p = x(0).pow(3).sub(&x(1).pow(3));
        let quot = p.div_by_difference(0, 1).unwrap();
        let expect = x(0).pow(2).add(&x(0).mul(&x(1))).add(&x(1).pow(2));
        assert_eq!(quot, expect);
        assert!(x(0).add(&x(2)).div_by_difference(0, 1).is_none());
    }

    #[test]
    fn homogeneity_uses_weights() {
        let w = [1, 2, 3];
        let p = x(0).pow(3).add(&x(0).mul(&x(1))).add(&x(2));
        assert_eq!(p.homogeneous_degree(&w), Some(3));
        assert_eq!(p.homogeneous_degree(&[1, 1, 1]), None);
        assert_eq!(p.graded_part(&[1, 1, 1], 1), x(2));
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let p = x(0).mul(&x(1)).add(&Poly::constant(3, rat(5)));
        let images = [rat(2), rat(3), rat(7)];
        let v = p.substitute(&images, &rat(1), |c| c.clone());
        assert_eq!(v, rat(11));
    }
}
