//! Polynomials in the Chern variables `c_1..c_r`.
//!
//! `c_j` has weight `j`. Segre polynomials follow `s(t) = c(t)^{-1}`, so
//! `s_1 = -c_1` and `s_2 = c_1^2 - c_2`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinat::{IntSequence, Partition};
use crate::error::{Error, Result};
use crate::linalg::{det, solve_rational, CommRing};
use crate::poly::{rat, Exponents, Poly};

fn chern_weights(r: usize) -> Vec<u32> {
    (1..=r as u32).collect()
}

/// A polynomial in `c_1..c_r` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernPoly {
    rank: usize,
    poly: Poly,
}

impl ChernPoly {
    pub fn from_poly(rank: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), rank, "Chern polynomial needs one variable per Chern class");
        Self { rank, poly }
    }

    pub fn zero(rank: usize) -> Self {
        Self::from_poly(rank, Poly::zero(rank))
    }

    pub fn one(rank: usize) -> Self {
        Self::from_poly(rank, Poly::one(rank))
    }

    pub fn constant(rank: usize, c: BigRational) -> Self {
        Self::from_poly(rank, Poly::constant(rank, c))
    }

    /// `c_j`, with `c_0 = 1` and `c_j = 0` for `j > r`.
    pub fn c(rank: usize, j: usize) -> Self {
        match j {
            0 => Self::one(rank),
            j if j > rank => Self::zero(rank),
            j => Self::from_poly(rank, Poly::var(rank, j - 1)),
        }
    }

    /// Build from `(exponents, coefficient)` pairs; `exps[i]` is the power of `c_{i+1}`.
    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Exponents, BigRational)>) -> Self {
        let mut p = Poly::zero(rank);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        Self::from_poly(rank, p)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Weighted degree when homogeneous; `None` for zero or mixed degree.
    pub fn weighted_degree(&self) -> Option<usize> {
        self.poly.homogeneous_degree(&chern_weights(self.rank)).map(|d| d as usize)
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.weighted_degree().is_some()
    }

    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.poly.is_homogeneous_of(&chern_weights(self.rank), k as u32)
    }

    pub fn graded_part(&self, k: usize) -> Self {
        Self::from_poly(self.rank, self.poly.graded_part(&chern_weights(self.rank), k as u32))
    }

    /// Terms in display order: descending weighted degree, then descending lex.
    pub fn ordered_terms(&self) -> Vec<(&Exponents, &BigRational)> {
        self.poly.graded_lex_terms(&chern_weights(self.rank))
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.poly.coeff(exps)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_poly(self.rank, self.poly.add(&other.poly))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_poly(self.rank, self.poly.sub(&other.poly))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_poly(self.rank, self.poly.mul(&other.poly))
    }

    pub fn neg(&self) -> Self {
        Self::from_poly(self.rank, self.poly.neg())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_poly(self.rank, self.poly.scale(s))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::from_poly(self.rank, self.poly.pow(k))
    }

    /// Evaluate with `c_j ↦ chern[j-1]` in any commutative ring.
    pub fn evaluate<T: CommRing>(&self, chern: &[T], one: &T, embed: impl Fn(&BigRational) -> T) -> T {
        self.poly.substitute(chern, one, embed)
    }

    /// Rewrite in Segre variables `s_1..s_N`, `N = max(r, top degree)`.
    pub fn to_segre(&self) -> SegrePoly {
        let top = self
            .poly
            .terms()
            .map(|(e, _)| Poly::weighted_degree_of(e, &chern_weights(self.rank)) as usize)
            .max()
            .unwrap_or(0);
        let nvars = top.max(self.rank);
        // c(t) = s(t)^{-1}: c_k = -Σ_{j=1}^{k} s_j c_{k-j}.
        let mut c: Vec<Poly> = vec![Poly::one(nvars)];
        for k in 1..=self.rank {
            let mut acc = Poly::zero(nvars);
            for j in 1..=k {
                acc = acc.sub(&Poly::var(nvars, j - 1).mul(&c[k - j]));
            }
            c.push(acc);
        }
        let poly = self.poly.substitute(&c[1..], &Poly::one(nvars), |q| Poly::constant(nvars, q.clone()));
        SegrePoly { poly }
    }
}

impl fmt::Display for ChernPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.ordered_terms(), "c")
    }
}

impl CommRing for ChernPoly {
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

/// A polynomial in Segre variables `s_1..s_N`, `s_j` of weight `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegrePoly {
    poly: Poly,
}

impl SegrePoly {
    pub fn from_poly(poly: Poly) -> Self {
        Self { poly }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Back to Chern variables of rank `r`.
    pub fn to_chern(&self, r: usize) -> ChernPoly {
        let s = segre_polys(r, self.poly.nvars());
        self.poly
            .substitute(&s[1..], &ChernPoly::one(r), |q| ChernPoly::constant(r, q.clone()))
    }
}

impl fmt::Display for SegrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<u32> = (1..=self.poly.nvars() as u32).collect();
        write_poly(f, &self.poly.graded_lex_terms(&w), "s")
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, terms: &[(&Exponents, &BigRational)], var: &str) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (idx, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        match (idx, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => factors.push(alloc::format!("{var}{}", i + 1)),
                k => factors.push(alloc::format!("{var}{}^{k}", i + 1)),
            }
        }
        if factors.is_empty() {
            write!(f, "{abs}")?;
        } else {
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
    }
    Ok(())
}

/// Segre polynomials `s_0..s_max_deg` in rank `r`.
pub fn segre_polys(r: usize, max_deg: usize) -> Vec<ChernPoly> {
    let mut s = vec![ChernPoly::one(r)];
    for k in 1..=max_deg {
        let mut acc = ChernPoly::zero(r);
        for j in 1..=k.min(r) {
            acc = acc.sub(&ChernPoly::c(r, j).mul(&s[k - j]));
        }
        s.push(acc);
    }
    s
}

/// Jacobi–Trudi determinant `det(c_{σ_i + j - i})`.
pub fn schur(sigma: &Partition, r: usize) -> ChernPoly {
    let parts = sigma.parts();
    let k = parts.len();
    let m: Vec<Vec<ChernPoly>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let idx = parts[i] as i64 + j as i64 - i as i64;
                    if idx < 0 {
                        ChernPoly::zero(r)
                    } else {
                        ChernPoly::c(r, idx as usize)
                    }
                })
                .collect()
        })
        .collect();
    det(&m, &ChernPoly::one(r))
}

/// Generalized Schur polynomial `det(s_{σ_i + j - i})`.
pub fn gen_schur(sigma: &IntSequence, r: usize) -> ChernPoly {
    if sigma.sum() < 0 {
        return ChernPoly::zero(r);
    }
    let k = sigma.len();
    let max = sigma.entries().iter().map(|&x| x + k as i64).max().unwrap_or(0).max(0) as usize;
    let s = segre_polys(r, max);
    gen_schur_with(sigma, r, &s)
}

/// [`gen_schur`] with precomputed Segre polynomials (long enough for every entry).
pub fn gen_schur_with(sigma: &IntSequence, r: usize, segre: &[ChernPoly]) -> ChernPoly {
    if sigma.sum() < 0 {
        return ChernPoly::zero(r);
    }
    let e = sigma.entries();
    let k = e.len();
    let m: Vec<Vec<ChernPoly>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let idx = e[i] + j as i64 - i as i64;
                    if idx < 0 {
                        ChernPoly::zero(r)
                    } else {
                        segre[idx as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    det(&m, &ChernPoly::one(r))
}

/// Coordinates in the Schur basis `{S_σ : |σ| = k, σ_1 ≤ r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurVector {
    degree: usize,
    rank: usize,
    coords: Vec<(Partition, BigRational)>,
}

impl SchurVector {
    /// Zero vector on the full index set.
    pub fn zero(degree: usize, rank: usize) -> Self {
        Self {
            degree,
            rank,
            coords: Partition::all_with_max_part(degree, rank)
                .into_iter()
                .map(|p| (p, BigRational::zero()))
                .collect(),
        }
    }

    /// Build from sparse coordinates; unknown partitions are rejected.
    pub fn from_coords(degree: usize, rank: usize, coords: &[(Partition, BigRational)]) -> Result<Self> {
        let mut v = Self::zero(degree, rank);
        for (p, c) in coords {
            let slot = v
                .coords
                .iter_mut()
                .find(|(q, _)| q == p)
                .ok_or_else(|| Error::InvalidPartition(alloc::format!("{p} is not in the basis for k={degree}, r={rank}")))?;
            slot.1 = c.clone();
        }
        Ok(v)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All coordinates, partitions in descending lexicographic order.
    pub fn coords(&self) -> &[(Partition, BigRational)] {
        &self.coords
    }

    pub fn get(&self, p: &Partition) -> BigRational {
        self.coords
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Non-zero coordinates only.
    pub fn support(&self) -> impl Iterator<Item = &(Partition, BigRational)> {
        self.coords.iter().filter(|(_, c)| !c.is_zero())
    }

    /// `Σ x_σ S_σ`.
    pub fn reconstruct(&self) -> ChernPoly {
        self.coords
            .iter()
            .fold(ChernPoly::zero(self.rank), |acc, (p, c)| acc.add(&schur(p, self.rank).scale(c)))
    }
}

impl fmt::Display for SchurVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.support() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write!(f, "S{p}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exponent vector of the monomial `Π c_{μ_i}` for a partition `μ` with parts `≤ r`.
fn monomial_of(mu: &Partition, r: usize) -> Exponents {
    let mut e = vec![0u32; r];
    for &p in mu.parts() {
        e[p - 1] += 1;
    }
    e
}

/// Coordinates of a weighted-homogeneous degree-`k` polynomial in the Schur basis.
pub fn schur_decompose(p: &ChernPoly, k: usize) -> Result<SchurVector> {
    if !p.is_homogeneous_of(k) {
        return Err(match p.weighted_degree() {
            Some(found) => Error::DegreeMismatch { expected: k, found },
            None => Error::NotHomogeneous,
        });
    }
    let r = p.rank();
    let basis = Partition::all_with_max_part(k, r);
    let monomials: Vec<Exponents> = basis.iter().map(|mu| monomial_of(mu, r)).collect();
    let index: BTreeMap<&Exponents, usize> = monomials.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let n = basis.len();
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (col, sigma) in basis.iter().enumerate() {
        for (e, c) in schur(sigma, r).poly().terms() {
            a[index[e]][col] = c.clone();
        }
    }
    let b: Vec<BigRational> = monomials.iter().map(|e| p.coeff(e)).collect();
    let x = solve_rational(&a, &b).expect("Schur polynomials form a basis");
    Ok(SchurVector {
        degree: k,
        rank: r,
        coords: basis.into_iter().zip(x).collect(),
    })
}

/// `true` when every Schur coordinate is non-negative; the witness lists the negative ones.
pub fn nonnegative_coords(v: &SchurVector) -> (bool, Vec<Partition>) {
    let neg: Vec<Partition> = v
        .coords()
        .iter()
        .filter(|(_, c)| c.is_negative())
        .map(|(p, _)| p.clone())
        .collect();
    (neg.is_empty(), neg)
}

/// Integer coefficient helper for tests and tables.
pub fn chern_from_ints(rank: usize, terms: &[(&[u32], i64)]) -> ChernPoly {
    ChernPoly::from_terms(rank, terms.iter().map(|(e, c)| (e.to_vec(), rat(*c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{conjugate, sigma_tilde};
    use alloc::string::ToString;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn cp(rank: usize, terms: &[(&[u32], i64)]) -> ChernPoly {
        chern_from_ints(rank, terms)
    }

    /// Series inversion by undetermined coefficients, independent of `segre_polys`.
    fn inverse_series_oracle(r: usize, n: usize) -> Vec<ChernPoly> {
        // Solve (Σ s_i t^i)(Σ c_j t^j) = 1 one coefficient at a time, using the
        // explicit expansion of the product rather than the recursion.
        let mut s: Vec<ChernPoly> = Vec::new();
        for k in 0..=n {
            if k == 0 {
                s.push(ChernPoly::one(r));
                continue;
            }
            let mut known = ChernPoly::zero(r);
            for i in 0..k {
                known = known.add(&s[i].mul(&ChernPoly::c(r, k - i)));
            }
            s.push(known.neg());
        }
        s
    }

    #[test]
    fn segre_low_degrees() {
        let s = segre_polys(4, 3);
        assert_eq!(s[0], ChernPoly::one(4));
        assert_eq!(s[1], cp(4, &[(&[1, 0, 0, 0], -1)]));
        assert_eq!(s[2], cp(4, &[(&[2, 0, 0, 0], 1), (&[0, 1, 0, 0], -1)]));
        assert_eq!(
            s[3],
            cp(4, &[(&[3, 0, 0, 0], -1), (&[1, 1, 0, 0], 2), (&[0, 0, 1, 0], -1)])
        );
        let lhs = s[1].pow(3).scale(&rat(-2)).add(&s[3]);
        assert_eq!(lhs.to_string(), "c1^3 + 2*c1*c2 - c3");
    }

    #[test]
    fn segre_matches_inverse_series() {
        for r in 1..=4 {
            assert_eq!(segre_polys(r, 7), inverse_series_oracle(r, 7));
        }
    }

    #[test]
    fn segre_chern_product_is_one() {
        for r in 1..=5 {
            let n = 8;
            let s = segre_polys(r, n);
            for k in 1..=n {
                let mut acc = ChernPoly::zero(r);
                for i in 0..=k {
                    acc = acc.add(&s[i].mul(&ChernPoly::c(r, k - i)));
                }
                assert!(acc.is_zero(), "r={r} k={k}");
            }
        }
    }

    #[test]
    fn schur_examples() {
        assert_eq!(schur(&p(&[2]), 3), ChernPoly::c(3, 2));
        assert_eq!(schur(&p(&[1, 1]), 3), cp(3, &[(&[2, 0, 0], 1), (&[0, 1, 0], -1)]));
        assert_eq!(schur(&p(&[1]), 5), ChernPoly::c(5, 1));
        assert_eq!(schur(&Partition::empty(), 2), ChernPoly::one(2));
        assert!(schur(&p(&[3]), 2).is_zero());
    }

    #[test]
    fn gen_schur_examples() {
        let r = 3;
        let s = segre_polys(r, 4);
        assert_eq!(gen_schur(&IntSequence::new(vec![0, 0]), r), ChernPoly::one(r));
        assert_eq!(gen_schur(&IntSequence::new(vec![-1, 2]), r), s[1].neg());
        assert!(gen_schur(&IntSequence::new(vec![-2, 1]), r).is_zero());
    }

    #[test]
    fn gen_schur_is_homogeneous() {
        let r = 3;
        for a in -3i64..=4 {
            for b in -3i64..=4 {
                for c in -3i64..=4 {
                    let seq = IntSequence::new(vec![a, b, c]);
                    let g = gen_schur(&seq, r);
                    if a + b + c < 0 {
                        assert!(g.is_zero());
                    } else {
                        assert!(g.is_homogeneous_of((a + b + c) as usize), "{seq:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_trudi_relation_with_sigma_tilde() {
        for r in 1..=4 {
            for k in 0..=6 {
                for sigma in Partition::all_with_max_part(k, r) {
                    let lhs = schur(&sigma, r);
                    let st = sigma_tilde(&sigma, r).unwrap();
                    let conj = IntSequence::from(&conjugate(&sigma));
                    let g = gen_schur(&st, r);
                    assert_eq!(g, gen_schur(&conj, r), "σ̃ vs σ′ for {sigma}, r={r}");
                    let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
                    assert_eq!(lhs, g.scale(&sign), "{sigma}, r={r}");
                }
            }
        }
    }

    #[test]
    fn decompose_paper_examples() {
        let p1 = cp(4, &[(&[3, 0, 0, 0], 1), (&[1, 1, 0, 0], 2), (&[0, 0, 1, 0], -1)]);
        let v = schur_decompose(&p1, 3).unwrap();
        assert_eq!(v.get(&p(&[3])), rat(2));
        assert_eq!(v.get(&p(&[2, 1])), rat(4));
        assert_eq!(v.get(&p(&[1, 1, 1])), rat(1));
        assert_eq!(v.to_string(), "2*S(3) + 4*S(2,1) + S(1,1,1)");

        let p2 = cp(
            4,
            &[(&[4, 0, 0, 0], 1), (&[2, 1, 0, 0], 3), (&[1, 0, 1, 0], -3), (&[0, 0, 0, 1], -1)],
        );
        let v = schur_decompose(&p2, 4).unwrap();
        let want = [(&[3, 1][..], 6), (&[2, 2][..], 5), (&[2, 1, 1][..], 6), (&[1, 1, 1, 1][..], 1)];
        assert_eq!(v.support().count(), 4);
        for (part, c) in want {
            assert_eq!(v.get(&p(part)), rat(c));
        }
    }

    #[test]
    fn decompose_basis_element_and_reconstruct() {
        let s21 = schur(&p(&[2, 1]), 3);
        let v = schur_decompose(&s21, 3).unwrap();
        assert_eq!(v.support().count(), 1);
        assert_eq!(v.get(&p(&[2, 1])), rat(1));
        for r in 1..=4 {
            for k in 0..=6 {
                for sigma in Partition::all_with_max_part(k, r) {
                    let poly = schur(&sigma, r).add(&ChernPoly::c(r, 1).pow(k as u32));
                    let v = schur_decompose(&poly, k).unwrap();
                    assert_eq!(v.reconstruct(), poly);
                }
            }
        }
    }

    #[test]
    fn decompose_rejects_mixed_degree() {
        let poly = ChernPoly::c(3, 1).add(&ChernPoly::c(3, 2));
        assert_eq!(schur_decompose(&poly, 1), Err(Error::NotHomogeneous));
        assert_eq!(
            schur_decompose(&ChernPoly::c(3, 2), 1),
            Err(Error::DegreeMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn basis_dimension_matches_monomial_count() {
        for r in 1..=5 {
            for k in 0..=8 {
                let monomials = count_monomials(r, k);
                assert_eq!(Partition::all_with_max_part(k, r).len(), monomials, "r={r} k={k}");
            }
        }
    }

    fn count_monomials(r: usize, k: usize) -> usize {
        // Exponent vectors (a_1..a_r) with Σ i a_i = k, by direct recursion.
        fn go(i: usize, r: usize, rest: usize) -> usize {
            if i > r {
                return usize::from(rest == 0);
            }
            (0..=rest / i).map(|a| go(i + 1, r, rest - a * i)).sum()
        }
        go(1, r, k)
    }

    #[test]
    fn segre_rewrite_of_paper_identities() {
        let cases: [(&[(&[u32], i64)], &str); 4] = [
            (&[(&[3, 0, 0, 0], 1), (&[1, 1, 0, 0], 2), (&[0, 0, 1, 0], -1)], "-2*s1^3 + s3"),
            (
                &[(&[4, 0, 0, 0], 1), (&[2, 1, 0, 0], 3), (&[1, 0, 1, 0], -3), (&[0, 0, 0, 1], -1)],
                "6*s1^2*s2 - 5*s1*s3 - s2^2 + s4",
            ),
            (&[(&[3, 0, 0, 0], 1), (&[0, 0, 1, 0], -1)], "-2*s1*s2 + s3"),
            (&[(&[4, 0, 0, 0], 1), (&[1, 0, 1, 0], -3), (&[0, 0, 0, 1], 2)], "s1*s3 + 2*s2^2 - 2*s4"),
        ];
        for (terms, want) in cases {
            let c = cp(4, terms);
            let s = c.to_segre();
            assert_eq!(s.to_string(), want);
            assert_eq!(s.to_chern(4), c);
        }
    }

    #[test]
    fn display_formats() {
        assert_eq!(ChernPoly::zero(2).to_string(), "0");
        assert_eq!(ChernPoly::one(2).to_string(), "1");
        let half = ChernPoly::c(2, 1).scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(half.neg().to_string(), "-1/2*c1");
    }
}
