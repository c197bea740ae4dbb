//! Partitions, integer sequences, dimension sequences and index recipes.
//!
//! Indices in the public API follow the 1-based conventions of the formulas
//! (`ξ_1..ξ_r`, chart pairs `(λ, μ)` with `1 ≤ λ < μ ≤ r`); storage is 0-based.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A weakly decreasing sequence of non-negative integers. Trailing zeros are
/// dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Non-zero parts, largest first.
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of non-zero parts.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn largest_part(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// Transpose of the Young diagram.
    pub fn conjugate(&self) -> Self {
        let cols = self.largest_part();
        Self((1..=cols).map(|c| self.0.iter().filter(|&&p| p >= c).count()).collect())
    }

    /// Parts padded with zeros to length `len` (never truncates).
    pub fn padded(&self, len: usize) -> Vec<usize> {
        let mut v = self.0.clone();
        if v.len() < len {
            v.resize(len, 0);
        }
        v
    }

    /// All partitions of `k` with every part `≤ max_part`, in descending
    /// lexicographic order (`(3) > (2,1) > (1,1,1)`).
    pub fn all_with_max_part(k: usize, max_part: usize) -> Vec<Partition> {
        fn rec(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=cap.min(rest)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, max_part, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A fixed-length sequence of integers, possibly negative and non-monotone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IntSequence(Vec<i64>);

impl IntSequence {
    pub fn new(entries: Vec<i64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `(σ_1,…,σ_r) ↦ (σ_r,…,σ_1)`.
    pub fn reverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Componentwise difference. Panics on length mismatch.
    pub fn minus(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "sequence length mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl From<&Partition> for IntSequence {
    fn from(p: &Partition) -> Self {
        Self(p.parts().iter().map(|&x| x as i64).collect())
    }
}

/// `0 = ρ_0 < ρ_1 < … < ρ_m = r`, the flag type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DimensionSequence(Vec<usize>);

impl DimensionSequence {
    pub fn new(rho: Vec<usize>) -> Result<Self> {
        if rho.len() < 2 {
            return Err(Error::InvalidDimensionSequence(format!("{rho:?} needs at least two entries")));
        }
        if rho[0] != 0 {
            return Err(Error::InvalidDimensionSequence(format!("{rho:?} must start at 0")));
        }
        if rho.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDimensionSequence(format!("{rho:?} is not strictly increasing")));
        }
        Ok(Self(rho))
    }

    /// `(0,1,…,r)`.
    pub fn complete(r: usize) -> Self {
        Self((0..=r).collect())
    }

    /// `(0,s,r)`, the Grassmann bundle of `s`-planes.
    pub fn grassmannian(s: usize, r: usize) -> Result<Self> {
        Self::new(vec![0, s, r])
    }

    /// Every dimension sequence ending at `r`.
    pub fn all_for_rank(r: usize) -> Vec<Self> {
        assert!(r >= 1);
        (0u32..(1 << (r - 1)))
            .map(|mask| {
                let mut v = vec![0];
                v.extend((1..r).filter(|i| mask & (1 << (i - 1)) != 0));
                v.push(r);
                Self(v)
            })
            .collect()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn rho(&self, l: usize) -> usize {
        self.0[l]
    }

    pub fn rank(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// Number of steps `m`.
    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.steps() == self.rank()
    }

    /// 1-based root indices `r-ρ_l < i ≤ r-ρ_ℓ` attached to `U_l/U_ℓ`.
    pub fn block_between(&self, ell: usize, l: usize) -> core::ops::RangeInclusive<usize> {
        let r = self.rank();
        (r - self.0[l] + 1)..=(r - self.0[ell])
    }

    /// The `m` root blocks, in increasing index order.
    ///
    /// Block `j` (0-based) is the index range of `U_{m-j}/U_{m-j-1}`.
    pub fn root_blocks(&self) -> Vec<core::ops::RangeInclusive<usize>> {
        let m = self.steps();
        (0..m).map(|j| self.block_between(m - j - 1, m - j)).collect()
    }

    /// 0-based block number of the 1-based root index `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.root_blocks()
            .iter()
            .position(|b| b.contains(&i))
            .expect("root index out of range")
    }

    /// `ρ ≥ τ`: every entry of `τ` occurs in `ρ`.
    pub fn refines(&self, tau: &DimensionSequence) -> bool {
        self.rank() == tau.rank() && tau.0.iter().all(|t| self.0.contains(t))
    }
}

impl fmt::Display for DimensionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Transpose of the Young diagram.
pub fn conjugate(sigma: &Partition) -> Partition {
    sigma.conjugate()
}

/// `σ̃`: the conjugate of `σ` brought to length `r`.
///
/// Padding with zeros when `|σ| < r`, truncation when `|σ| > r` (the dropped
/// entries are zero because every part of `σ` is at most `r`).
pub fn sigma_tilde(sigma: &Partition, r: usize) -> Result<IntSequence> {
    if sigma.largest_part() > r {
        return Err(Error::PartExceedsRank {
            part: sigma.largest_part(),
            rank: r,
        });
    }
    let conj = sigma.conjugate();
    let k = sigma.weight();
    let mut full = conj.padded(k);
    debug_assert!(full.iter().skip(r).all(|&x| x == 0));
    full.resize(r, 0);
    Ok(IntSequence::new(full.into_iter().map(|x| x as i64).collect()))
}

/// `λ_j = σ̃_{r-j+1} + j - 1`.
pub fn lambda_from_sigma_tilde(sigma_tilde: &IntSequence) -> IntSequence {
    let s = sigma_tilde.entries();
    let r = s.len();
    IntSequence::new((1..=r).map(|j| s[r - j] + j as i64 - 1).collect())
}

/// `ν_i = r - ρ_ℓ` for `r - ρ_ℓ < i ≤ r - ρ_{ℓ-1}`.
pub fn nu_from_rho(rho: &DimensionSequence) -> IntSequence {
    let r = rho.rank();
    let mut nu = vec![0i64; r];
    for ell in 1..=rho.steps() {
        for i in rho.block_between(ell - 1, ell) {
            nu[i - 1] = (r - rho.rho(ell)) as i64;
        }
    }
    IntSequence::new(nu)
}

/// Chart coordinate pairs `(λ, μ)`, 1-based, in lexicographic order:
/// `1 ≤ λ ≤ r - ρ_{m-ℓ} < μ ≤ r` for some `ℓ = 1..m-1`.
pub fn admissible_pairs(rho: &DimensionSequence) -> Vec<(usize, usize)> {
    let r = rho.rank();
    let m = rho.steps();
    let cuts: Vec<usize> = (1..m).map(|ell| r - rho.rho(m - ell)).collect();
    let mut out = Vec::new();
    for lambda in 1..=r {
        for mu in lambda + 1..=r {
            if cuts.iter().any(|&c| lambda <= c && c < mu) {
                out.push((lambda, mu));
            }
        }
    }
    out
}

/// Complex dimension of the fiber, counted as chart coordinates.
pub fn relative_dimension(rho: &DimensionSequence) -> usize {
    admissible_pairs(rho).len()
}

/// Entry-wise reversal.
pub fn reverse(seq: &IntSequence) -> IntSequence {
    seq.reverse()
}
