//! Chern-root polynomials, universal bundles and expression expansion.
//!
//! `ξ_1..ξ_r` are the Chern roots of the pulled-back dual bundle, so
//! `c_j(E) = e_j(-ξ)`. The bundle `U_l/U_ℓ` owns the roots `ξ_i` with
//! `r - ρ_l < i ≤ r - ρ_ℓ`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::charpoly::ChernPoly;
use crate::combinat::DimensionSequence;
use crate::error::{Error, Result};
use crate::linalg::CommRing;
use crate::poly::{rat, Exponents, Poly};

/// A polynomial in `ξ_1..ξ_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootPoly {
    rank: usize,
    poly: Poly,
}

impl RootPoly {
    pub fn from_poly(rank: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), rank);
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

    /// `ξ_i`, 1-based.
    pub fn xi(rank: usize, i: usize) -> Self {
        Self::from_poly(rank, Poly::var(rank, i - 1))
    }

    /// `ξ^λ`.
    pub fn monomial(lambda: &[u32]) -> Self {
        Self::from_poly(lambda.len(), Poly::monomial(lambda.to_vec(), BigRational::one()))
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

    /// Pairs `(λ, b_λ)` in ascending lexicographic order of `λ`.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.poly.terms()
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.homogeneous_degree(&vec![1; self.rank]).map(|d| d as usize)
    }

    pub fn graded_part(&self, d: usize) -> Self {
        Self::from_poly(self.rank, self.poly.graded_part(&vec![1; self.rank], d as u32))
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

    /// Rename roots: `ξ_{i+1}` becomes `ξ_{perm[i]+1}`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        Self::from_poly(self.rank, self.poly.permute_vars(perm))
    }

    /// Invariance under permutations of the roots inside every `ρ`-block.
    pub fn is_block_symmetric(&self, rho: &DimensionSequence) -> bool {
        assert_eq!(rho.rank(), self.rank);
        rho.root_blocks().into_iter().all(|b| {
            (*b.start()..*b.end()).all(|i| {
                let mut perm: Vec<usize> = (0..self.rank).collect();
                perm.swap(i - 1, i);
                self.permute(&perm) == *self
            })
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.rank.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.rank).collect();
            perm.swap(i, i + 1);
            self.permute(&perm) == *self
        })
    }

    /// Rewrite a fully symmetric root polynomial in `c_1..c_r` using
    /// `e_j(ξ) = (-1)^j c_j`.
    pub fn symmetric_to_chern(&self) -> Result<ChernPoly> {
        let r = self.rank;
        let elem: Vec<Poly> = (0..=r).map(|j| elementary(r, j, &(1..=r).collect::<Vec<_>>())).collect();
        let mut rest = self.poly.clone();
        let mut out = ChernPoly::zero(r);
        loop {
            let Some((lead, c)) = rest.terms().next_back().map(|(e, c)| (e.clone(), c.clone())) else {
                break;
            };
            if lead.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::NotSymmetric);
            }
            // ξ^a with a decreasing is the leading term of Π e_j^{a_j - a_{j+1}}.
            let mut cexp = vec![0u32; r];
            let mut sub = Poly::constant(r, c.clone());
            let mut sign = 0u32;
            for j in 1..=r {
                let next = if j < r { lead[j] } else { 0 };
                let k = lead[j - 1] - next;
                cexp[j - 1] = k;
                sign += j as u32 * k;
                if k > 0 {
                    sub = sub.mul(&elem[j].pow(k));
                }
            }
            rest = rest.sub(&sub);
            let coeff = if sign.is_multiple_of(2) { c } else { -c };
            out = out.add(&ChernPoly::from_terms(r, [(cexp, coeff)]));
        }
        Ok(out)
    }

    pub fn max_degree(&self) -> usize {
        self.poly.terms().map(|(e, _)| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }
}

impl fmt::Display for RootPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.graded_lex_terms(&vec![1; self.rank]);
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in terms.iter().enumerate() {
            let abs = c.abs();
            match (idx, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                .collect();
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
}

impl CommRing for RootPoly {
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

/// `e_j` of the listed 1-based variables, as a polynomial in `r` variables.
fn elementary(r: usize, j: usize, vars: &[usize]) -> Poly {
    // Coefficients of Π (1 + x_i t).
    let mut e = vec![Poly::one(r)];
    for &v in vars {
        let x = Poly::var(r, v - 1);
        let mut next = e.clone();
        next.push(Poly::zero(r));
        for k in 1..next.len() {
            next[k] = next[k].add(&e[k - 1].mul(&x));
        }
        e = next;
    }
    e.get(j).cloned().unwrap_or_else(|| Poly::zero(r))
}

/// The quotient `U_l/U_ℓ` of the tautological filtration over `F_ρ(E)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UniversalBundleSpec {
    rho: DimensionSequence,
    ell: usize,
    l: usize,
}

impl UniversalBundleSpec {
    pub fn new(rho: DimensionSequence, ell: usize, l: usize) -> Result<Self> {
        if ell >= l || l > rho.steps() {
            return Err(Error::InvalidBundle(format!(
                "need 0 ≤ ℓ < l ≤ {}, got ℓ={ell}, l={l}",
                rho.steps()
            )));
        }
        Ok(Self { rho, ell, l })
    }

    pub fn rho(&self) -> &DimensionSequence {
        &self.rho
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn rank(&self) -> usize {
        self.rho.rho(self.l) - self.rho.rho(self.ell)
    }

    /// 1-based root indices owned by the bundle.
    pub fn block(&self) -> core::ops::RangeInclusive<usize> {
        self.rho.block_between(self.ell, self.l)
    }

    /// 1-based indices `r - ρ_ℓ < α ≤ r` spanning `U_ℓ` in the chart frame.
    pub fn sub_block(&self) -> core::ops::RangeInclusive<usize> {
        let r = self.rho.rank();
        (r - self.rho.rho(self.ell) + 1)..=r
    }

    /// `c_j` of the bundle as a root polynomial (`j ≤ rank`).
    pub fn chern_class(&self, j: usize) -> Result<RootPoly> {
        if j > self.rank() {
            return Err(Error::ChernIndexOutOfRange {
                index: j,
                rank: self.rank(),
                bundle: self.to_string_name(),
            });
        }
        let r = self.rho.rank();
        let vars: Vec<usize> = self.block().collect();
        let e = elementary(r, j, &vars);
        let e = if j % 2 == 1 { e.neg() } else { e };
        Ok(RootPoly::from_poly(r, e))
    }

    fn to_string_name(&self) -> String {
        match self.ell {
            0 => format!("U{}", self.l),
            ell => format!("U{}/U{}", self.l, ell),
        }
    }
}

impl fmt::Display for UniversalBundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over ρ={}", self.to_string_name(), self.rho)
    }
}

/// `Π_{i in block} (1 - ξ_i)`.
pub fn universal_total_chern(spec: &UniversalBundleSpec) -> RootPoly {
    let r = spec.rho().rank();
    spec.block()
        .fold(RootPoly::one(r), |acc, i| acc.mul(&RootPoly::one(r).sub(&RootPoly::xi(r, i))))
}

/// Bundle symbol as written in an expression, before resolution against `ρ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BundleSymbol {
    /// The pulled-back bundle `E = U_m`.
    E,
    /// `U_l`.
    Sub(usize),
    /// `U_l / U_ℓ`.
    Quotient { l: usize, ell: usize },
    /// `Q_s = U_2/U_1` over `ρ = (0, s, r)`.
    Q(usize),
}

impl BundleSymbol {
    pub fn resolve(&self, rho: &DimensionSequence) -> Result<UniversalBundleSpec> {
        let m = rho.steps();
        match *self {
            BundleSymbol::E => UniversalBundleSpec::new(rho.clone(), 0, m),
            BundleSymbol::Sub(l) => UniversalBundleSpec::new(rho.clone(), 0, l),
            BundleSymbol::Quotient { l, ell } => UniversalBundleSpec::new(rho.clone(), ell, l),
            BundleSymbol::Q(s) => {
                if m == 2 && rho.rho(1) == s {
                    UniversalBundleSpec::new(rho.clone(), 1, 2)
                } else {
                    Err(Error::InvalidBundle(format!(
                        "Q{s} needs ρ = (0,{s},r), got {rho}"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for BundleSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleSymbol::E => write!(f, "E"),
            BundleSymbol::Sub(l) => write!(f, "U{l}"),
            BundleSymbol::Quotient { l, ell } => write!(f, "U{l}/U{ell}"),
            BundleSymbol::Q(s) => write!(f, "Q{s}"),
        }
    }
}

/// Polynomial expression in Chern classes of universal bundles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChernExpr {
    Num(BigRational),
    Chern(usize, BundleSymbol),
    Add(Box<ChernExpr>, Box<ChernExpr>),
    Sub(Box<ChernExpr>, Box<ChernExpr>),
    Mul(Box<ChernExpr>, Box<ChernExpr>),
    Neg(Box<ChernExpr>),
    Pow(Box<ChernExpr>, u32),
}

impl ChernExpr {
    pub fn chern(j: usize, b: BundleSymbol) -> Self {
        ChernExpr::Chern(j, b)
    }

    pub fn num(n: i64) -> Self {
        ChernExpr::Num(rat(n))
    }

    pub fn add(self, other: Self) -> Self {
        ChernExpr::Add(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: Self) -> Self {
        ChernExpr::Sub(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: Self) -> Self {
        ChernExpr::Mul(Box::new(self), Box::new(other))
    }

    pub fn neg(self) -> Self {
        ChernExpr::Neg(Box::new(self))
    }

    pub fn pow(self, k: u32) -> Self {
        ChernExpr::Pow(Box::new(self), k)
    }

    /// Check every symbol against `ρ` and the Chern-index ranges.
    pub fn validate(&self, rho: &DimensionSequence) -> Result<()> {
        self.visit_symbols(&mut |j, b| {
            let spec = b.resolve(rho)?;
            if j > spec.rank() {
                return Err(Error::ChernIndexOutOfRange {
                    index: j,
                    rank: spec.rank(),
                    bundle: format!("{b}"),
                });
            }
            Ok(())
        })
    }

    fn visit_symbols(&self, f: &mut impl FnMut(usize, &BundleSymbol) -> Result<()>) -> Result<()> {
        match self {
            ChernExpr::Num(_) => Ok(()),
            ChernExpr::Chern(j, b) => f(*j, b),
            ChernExpr::Add(a, b) | ChernExpr::Sub(a, b) | ChernExpr::Mul(a, b) => {
                a.visit_symbols(f)?;
                b.visit_symbols(f)
            }
            ChernExpr::Neg(a) | ChernExpr::Pow(a, _) => a.visit_symbols(f),
        }
    }

    /// Evaluate in any commutative ring, given the value of each symbol.
    pub fn eval<T: CommRing>(
        &self,
        one: &T,
        embed: &impl Fn(&BigRational) -> T,
        symbol: &mut impl FnMut(usize, &BundleSymbol) -> Result<T>,
    ) -> Result<T> {
        Ok(match self {
            ChernExpr::Num(q) => embed(q),
            ChernExpr::Chern(j, b) => symbol(*j, b)?,
            ChernExpr::Add(a, b) => a.eval(one, embed, symbol)?.ring_add(&b.eval(one, embed, symbol)?),
            ChernExpr::Sub(a, b) => a
                .eval(one, embed, symbol)?
                .ring_add(&b.eval(one, embed, symbol)?.ring_neg()),
            ChernExpr::Mul(a, b) => a.eval(one, embed, symbol)?.ring_mul(&b.eval(one, embed, symbol)?),
            ChernExpr::Neg(a) => a.eval(one, embed, symbol)?.ring_neg(),
            ChernExpr::Pow(a, k) => {
                let base = a.eval(one, embed, symbol)?;
                let mut acc = one.clone();
                for _ in 0..*k {
                    acc = acc.ring_mul(&base);
                }
                acc
            }
        })
    }

    /// Rewrite as a polynomial in the distinct symbols `c_j(B)`, `j ≥ 1`.
    ///
    /// Returns the resolved symbol list and a polynomial with one variable per symbol.
    pub fn to_symbol_poly(&self, rho: &DimensionSequence) -> Result<(Vec<(usize, UniversalBundleSpec)>, Poly)> {
        self.validate(rho)?;
        let mut symbols: Vec<(usize, UniversalBundleSpec)> = Vec::new();
        self.visit_symbols(&mut |j, b| {
            let spec = b.resolve(rho)?;
            if j > 0 && !symbols.contains(&(j, spec.clone())) {
                symbols.push((j, spec));
            }
            Ok(())
        })?;
        symbols.sort();
        let n = symbols.len();
        let poly = self.eval(
            &Poly::one(n),
            &|q: &BigRational| Poly::constant(n, q.clone()),
            &mut |j, b| {
                if j == 0 {
                    return Ok(Poly::one(n));
                }
                let spec = b.resolve(rho)?;
                let idx = symbols.iter().position(|s| *s == (j, spec.clone())).unwrap();
                Ok(Poly::var(n, idx))
            },
        )?;
        Ok((symbols, poly))
    }

    /// Weighted degree (`c_j` has weight `j`) when homogeneous.
    pub fn weighted_degree(&self, rho: &DimensionSequence) -> Result<Option<usize>> {
        let (symbols, poly) = self.to_symbol_poly(rho)?;
        let w: Vec<u32> = symbols.iter().map(|(j, _)| *j as u32).collect();
        Ok(if poly.is_zero() {
            None
        } else {
            poly.homogeneous_degree(&w).map(|d| d as usize)
        })
    }
}

fn precedence(e: &ChernExpr) -> u8 {
    match e {
        ChernExpr::Add(..) | ChernExpr::Sub(..) => 1,
        ChernExpr::Neg(..) => 1,
        ChernExpr::Mul(..) => 2,
        ChernExpr::Pow(..) => 3,
        ChernExpr::Num(q) if q.is_negative() || !q.is_integer() => 1,
        ChernExpr::Num(_) | ChernExpr::Chern(..) => 4,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &ChernExpr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write!(f, "{e}")?;
        write!(f, ")")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ChernExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChernExpr::Num(q) => write!(f, "{q}"),
            ChernExpr::Chern(j, b) => write!(f, "c{j}({b})"),
            ChernExpr::Add(a, b) => {
                write_at(f, a, 1)?;
                write!(f, " + ")?;
                write_at(f, b, 2)
            }
            ChernExpr::Sub(a, b) => {
                write_at(f, a, 1)?;
                write!(f, " - ")?;
                write_at(f, b, 2)
            }
            ChernExpr::Mul(a, b) => {
                write_at(f, a, 2)?;
                write!(f, "*")?;
                write_at(f, b, 3)
            }
            ChernExpr::Neg(a) => {
                write!(f, "-")?;
                write_at(f, a, 2)
            }
            ChernExpr::Pow(a, k) => {
                write_at(f, a, 4)?;
                write!(f, "^{k}")
            }
        }
    }
}

/// Substitute `c_j(B) = e_j(-ξ_block)` and expand.
pub fn expand_expression(expr: &ChernExpr, rho: &DimensionSequence) -> Result<RootPoly> {
    expr.validate(rho)?;
    let r = rho.rank();
    let mut cache: BTreeMap<(usize, UniversalBundleSpec), RootPoly> = BTreeMap::new();
    expr.eval(
        &RootPoly::one(r),
        &|q: &BigRational| RootPoly::constant(r, q.clone()),
        &mut |j, b| {
            let spec = b.resolve(rho)?;
            if let Some(p) = cache.get(&(j, spec.clone())) {
                return Ok(p.clone());
            }
            let p = spec.chern_class(j)?;
            cache.insert((j, spec), p.clone());
            Ok(p)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn rho(v: &[usize]) -> DimensionSequence {
        DimensionSequence::new(v.to_vec()).unwrap()
    }

    fn c(j: usize, b: BundleSymbol) -> ChernExpr {
        ChernExpr::chern(j, b)
    }

    #[test]
    fn complete_flag_line_quotients() {
        let r = 4;
        let full = DimensionSequence::complete(r);
        for j in 1..=r {
            let spec = UniversalBundleSpec::new(full.clone(), j - 1, j).unwrap();
            let want = RootPoly::one(r).sub(&RootPoly::xi(r, r - j + 1));
            assert_eq!(universal_total_chern(&spec), want);
        }
    }

    #[test]
    fn quotient_and_full_bundle() {
        let g = rho(&[0, 2, 5]);
        let q = UniversalBundleSpec::new(g.clone(), 1, 2).unwrap();
        let want = (1..=3).fold(RootPoly::one(5), |acc, i| acc.mul(&RootPoly::one(5).sub(&RootPoly::xi(5, i))));
        assert_eq!(universal_total_chern(&q), want);
        let e = UniversalBundleSpec::new(g, 0, 2).unwrap();
        let want = (1..=5).fold(RootPoly::one(5), |acc, i| acc.mul(&RootPoly::one(5).sub(&RootPoly::xi(5, i))));
        assert_eq!(universal_total_chern(&e), want);
    }

    #[test]
    fn whitney_for_nested_triples() {
        for r in 1..=5 {
            for rho in DimensionSequence::all_for_rank(r) {
                let m = rho.steps();
                for a in 0..m {
                    for b in a + 1..m {
                        for c2 in b + 1..=m {
                            let x = universal_total_chern(&UniversalBundleSpec::new(rho.clone(), a, b).unwrap());
                            let y = universal_total_chern(&UniversalBundleSpec::new(rho.clone(), b, c2).unwrap());
                            let z = universal_total_chern(&UniversalBundleSpec::new(rho.clone(), a, c2).unwrap());
                            assert_eq!(x.mul(&y), z);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let full2 = DimensionSequence::complete(2);
        let got = expand_expression(&c(1, BundleSymbol::Sub(1)), &full2).unwrap();
        assert_eq!(got, RootPoly::xi(2, 2).neg());

        let p = rho(&[0, 1, 4]);
        let got = expand_expression(&c(2, BundleSymbol::Q(1)), &p).unwrap();
        let x = |i| RootPoly::xi(4, i);
        let want = x(1).mul(&x(2)).add(&x(1).mul(&x(3))).add(&x(2).mul(&x(3)));
        assert_eq!(got, want);

        let got = expand_expression(&c(1, BundleSymbol::E), &p).unwrap();
        assert_eq!(got, x(1).add(&x(2)).add(&x(3)).add(&x(4)).neg());
    }

    #[test]
    fn expansion_rejects_bad_symbols() {
        let p = rho(&[0, 2, 4]);
        assert!(matches!(
            expand_expression(&c(3, BundleSymbol::Q(2)), &p),
            Err(Error::ChernIndexOutOfRange { index: 3, rank: 2, .. })
        ));
        assert!(matches!(
            expand_expression(&c(1, BundleSymbol::Q(1)), &p),
            Err(Error::InvalidBundle(_))
        ));
        assert!(expand_expression(&c(1, BundleSymbol::Sub(3)), &p).is_err());
    }

    #[test]
    fn expansion_is_block_symmetric() {
        let p = rho(&[0, 1, 3, 4]);
        let e = c(1, BundleSymbol::Quotient { l: 2, ell: 1 })
            .pow(2)
            .mul(c(1, BundleSymbol::Sub(1)))
            .add(c(2, BundleSymbol::E));
        let f = expand_expression(&e, &p).unwrap();
        assert!(f.is_block_symmetric(&p));
        assert!(!RootPoly::xi(4, 2).is_block_symmetric(&p));
    }

    #[test]
    fn symmetric_to_chern_inverts_expansion() {
        let r = 4;
        let full = rho(&[0, 4]);
        let e = c(1, BundleSymbol::E).pow(3).add(c(1, BundleSymbol::E).mul(c(2, BundleSymbol::E)).mul(ChernExpr::num(2)))
            .sub(c(3, BundleSymbol::E));
        let f = expand_expression(&e, &full).unwrap();
        let chern = f.symmetric_to_chern().unwrap();
        assert_eq!(chern.to_string(), "c1^3 + 2*c1*c2 - c3");
        assert_eq!(RootPoly::xi(r, 1).symmetric_to_chern(), Err(Error::NotSymmetric));
    }

    #[test]
    fn printing_respects_precedence() {
        let e = c(1, BundleSymbol::Q(1))
            .add(ChernExpr::num(1))
            .pow(2)
            .mul(c(2, BundleSymbol::Quotient { l: 2, ell: 1 }).neg());
        assert_eq!(e.to_string(), "(c1(Q1) + 1)^2*(-c2(U2/U1))");
        let half = ChernExpr::Num(BigRational::new(1.into(), 2.into())).mul(c(1, BundleSymbol::E));
        assert_eq!(half.to_string(), "(1/2)*c1(E)");
    }

    #[test]
    fn symbol_poly_collects_distinct_symbols() {
        let p = rho(&[0, 1, 3]);
        let e = c(1, BundleSymbol::Q(1)).pow(2).mul(c(2, BundleSymbol::Q(1))).add(c(0, BundleSymbol::E));
        let (syms, poly) = e.to_symbol_poly(&p).unwrap();
        assert_eq!(syms.len(), 2);
        assert_eq!(poly.len(), 2);
        assert_eq!(e.weighted_degree(&p).unwrap(), None);
        let e2 = c(1, BundleSymbol::Q(1)).pow(2).mul(c(2, BundleSymbol::Q(1)));
        assert_eq!(e2.weighted_degree(&p).unwrap(), Some(4));
    }
}
