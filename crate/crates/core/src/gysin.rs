//! Push-forward along flag bundles.
//!
//! [`pushforward_dp`] is the closed formula
//! `π_* ξ^λ = s_{(λ-ν)^←}(E)`. [`pushforward_oracle`] recomputes the same
//! push-forward by Weyl symmetrization and exact division by Vandermonde
//! factors, independently of Segre and Schur polynomials.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charpoly::{gen_schur_with, schur, schur_decompose, segre_polys, ChernPoly, SchurVector};
use crate::combinat::{
    lambda_from_sigma_tilde, nu_from_rho, relative_dimension, sigma_tilde, DimensionSequence, IntSequence, Partition,
};
use crate::error::{Error, Result};
use crate::poly::{rat, Poly};
use crate::rootcalc::{expand_expression, BundleSymbol, ChernExpr, RootPoly};

/// Largest rank accepted by the symmetrizing oracle.
pub const ORACLE_MAX_RANK: usize = 6;

/// `Σ_λ b_λ s_{(λ-ν)^←}(E)`, applied monomial by monomial.
pub fn pushforward_dp(f: &RootPoly, rho: &DimensionSequence) -> ChernPoly {
    let r = rho.rank();
    assert_eq!(f.rank(), r, "root polynomial rank differs from ρ");
    let nu = nu_from_rho(rho);
    let max_entry = f
        .terms()
        .flat_map(|(e, _)| e.iter().map(|&x| x as usize))
        .max()
        .unwrap_or(0);
    let segre = segre_polys(r, max_entry + r);
    let mut cache: BTreeMap<IntSequence, ChernPoly> = BTreeMap::new();
    let mut out = ChernPoly::zero(r);
    for (lambda, b) in f.terms() {
        let shifted = IntSequence::new(lambda.iter().map(|&x| x as i64).collect()).minus(&nu);
        let seq = shifted.reverse();
        let g = cache
            .entry(seq.clone())
            .or_insert_with(|| gen_schur_with(&seq, r, &segre));
        out = out.add(&g.scale(b));
    }
    out
}

/// `Π_{i<j} (ξ_i - ξ_j)` for the listed 1-based indices.
fn vandermonde(r: usize, idx: &[usize]) -> Poly {
    let mut v = Poly::one(r);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            v = v.mul(&Poly::var(r, i - 1).sub(&Poly::var(r, j - 1)));
        }
    }
    v
}

/// Divide by the full Vandermonde, one factor at a time.
fn divide_by_vandermonde(p: &Poly, r: usize) -> Result<Poly> {
    let mut q = p.clone();
    for i in 0..r {
        for j in i + 1..r {
            q = q.div_by_difference(i, j).ok_or(Error::NonPolynomialSymmetrization)?;
        }
    }
    Ok(q)
}

/// All permutations of `0..r` with their signs, in lexicographic order.
fn permutations(r: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        let r = used.len();
        if prefix.len() == r {
            let mut inv = 0;
            for a in 0..r {
                for b in a + 1..r {
                    if prefix[a] > prefix[b] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..r {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; r], &mut out);
    out
}

/// Minimal-length representatives of `S_r / (S_{n_1} × … × S_{n_m})`:
/// permutations increasing on every block.
fn min_coset_reps(rho: &DimensionSequence) -> Vec<(Vec<usize>, i32)> {
    let blocks = rho.root_blocks();
    permutations(rho.rank())
        .into_iter()
        .filter(|(w, _)| {
            blocks
                .iter()
                .all(|b| (*b.start()..*b.end()).all(|i| w[i - 1] < w[i]))
        })
        .collect()
}

/// Within-block staircase `ξ^{ν_complete - ν_ρ}`.
fn block_staircase(rho: &DimensionSequence) -> Vec<u32> {
    let r = rho.rank();
    let nu = nu_from_rho(rho);
    (0..r).map(|i| (i as i64 - nu.entries()[i]) as u32).collect()
}

/// Antisymmetrizer `Σ_w sgn(w) w(ξ^μ)` divided by the Vandermonde, memoized on
/// the sorted exponent vector (`a_{μ∘w} = sgn(w) a_μ`).
struct Alternant {
    r: usize,
    perms: Vec<(Vec<usize>, i32)>,
    cache: BTreeMap<Vec<u32>, Poly>,
}

impl Alternant {
    fn new(r: usize) -> Self {
        Self {
            r,
            perms: permutations(r),
            cache: BTreeMap::new(),
        }
    }

    fn quotient(&mut self, mu: &[u32]) -> Result<Poly> {
        let r = self.r;
        let mut idx: Vec<usize> = (0..r).collect();
        idx.sort_by(|&a, &b| mu[b].cmp(&mu[a]));
        let sorted: Vec<u32> = idx.iter().map(|&i| mu[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(Poly::zero(r));
        }
        let mut inv = 0;
        for a in 0..r {
            for b in a + 1..r {
                if idx[a] > idx[b] {
                    inv += 1;
                }
            }
        }
        if !self.cache.contains_key(&sorted) {
            let mut num = Poly::zero(r);
            for (w, sgn) in &self.perms {
                let mut e = vec![0u32; r];
                for i in 0..r {
                    e[w[i]] = sorted[i];
                }
                num.add_term(e, rat(*sgn as i64));
            }
            let q = divide_by_vandermonde(&num, r)?;
            self.cache.insert(sorted.clone(), q);
        }
        let q = &self.cache[&sorted];
        Ok(if inv % 2 == 0 { q.clone() } else { q.neg() })
    }
}

/// Uncalibrated complete-flag symmetrization of `F̃ · ξ^δ`.
fn lift_route(f: &RootPoly, rho: &DimensionSequence, alt: &mut Alternant) -> Result<Poly> {
    let r = rho.rank();
    let delta = block_staircase(rho);
    let mut acc = Poly::zero(r);
    for (lambda, b) in f.terms() {
        let mu: Vec<u32> = lambda.iter().zip(&delta).map(|(a, d)| a + d).collect();
        acc = acc.add(&alt.quotient(&mu)?.scale(b));
    }
    Ok(acc)
}

/// Uncalibrated coset symmetrization `Σ_{w ∈ W/W_ρ} w(F̃ / Π_cross (ξ_i - ξ_j))`,
/// computed as `Σ sgn(w) w(F̃ Π_B V_B) / V`.
fn coset_route(f: &RootPoly, rho: &DimensionSequence) -> Result<Poly> {
    let r = rho.rank();
    let mut block_v = Poly::one(r);
    for b in rho.root_blocks() {
        let idx: Vec<usize> = b.collect();
        block_v = block_v.mul(&vandermonde(r, &idx));
    }
    let g = f.poly().mul(&block_v);
    let mut num = Poly::zero(r);
    for (w, sgn) in min_coset_reps(rho) {
        let term = g.permute_vars(&w);
        num = if sgn > 0 { num.add(&term) } else { num.sub(&term) };
    }
    divide_by_vandermonde(&num, r)
}

/// Which symmetrization the oracle used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleRoute {
    /// Sum over minimal coset representatives (block-symmetric input).
    Coset,
    /// Lift to the complete flag with the block staircase, full `S_r` sum.
    Lift,
}

/// Oracle result with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: ChernPoly,
    pub route: OracleRoute,
    /// Calibration sign applied to the raw symmetrization.
    pub sign: i32,
}

fn calibration_sign(raw_reference: &Poly) -> i32 {
    // The reference monomial ξ^ν pushes forward to 1.
    let r = raw_reference.nvars();
    let c = raw_reference.coeff(&vec![0; r]);
    assert!(
        raw_reference.len() == 1 && (c == BigRational::one() || c == -BigRational::one()),
        "reference push-forward must be ±1"
    );
    if c.is_one() {
        1
    } else {
        -1
    }
}

/// Calibration sign of `route` for `ρ`: raw symmetrization of `ξ^ν` is `sign · 1`.
pub fn oracle_calibration(rho: &DimensionSequence, route: OracleRoute) -> Result<i32> {
    let r = rho.rank();
    let nu: Vec<u32> = nu_from_rho(rho).entries().iter().map(|&x| x as u32).collect();
    let reference = RootPoly::monomial(&nu);
    let raw = match route {
        OracleRoute::Lift => lift_route(&reference, rho, &mut Alternant::new(r))?,
        OracleRoute::Coset => {
            // ξ^ν is constant on blocks, hence block-symmetric.
            coset_route(&reference, rho)?
        }
    };
    Ok(calibration_sign(&raw))
}

/// Reusable oracle for one `ρ`, holding calibration signs and alternant cache.
pub struct Oracle {
    rho: DimensionSequence,
    alt: Alternant,
    lift_sign: i32,
    coset_sign: i32,
}

impl Oracle {
    pub fn new(rho: &DimensionSequence) -> Result<Self> {
        let r = rho.rank();
        if r > ORACLE_MAX_RANK {
            return Err(Error::RankTooLarge {
                rank: r,
                max: ORACLE_MAX_RANK,
            });
        }
        Ok(Self {
            rho: rho.clone(),
            alt: Alternant::new(r),
            lift_sign: oracle_calibration(rho, OracleRoute::Lift)?,
            coset_sign: oracle_calibration(rho, OracleRoute::Coset)?,
        })
    }

    pub fn lift_sign(&self) -> i32 {
        self.lift_sign
    }

    pub fn coset_sign(&self) -> i32 {
        self.coset_sign
    }

    pub fn push(&mut self, f: &RootPoly) -> Result<OracleResult> {
        let (raw, route, sign) = if f.is_block_symmetric(&self.rho) {
            (coset_route(f, &self.rho)?, OracleRoute::Coset, self.coset_sign)
        } else {
            (lift_route(f, &self.rho, &mut self.alt)?, OracleRoute::Lift, self.lift_sign)
        };
        let sym = RootPoly::from_poly(self.rho.rank(), raw);
        let value = sym.symmetric_to_chern().map_err(|_| Error::NonPolynomialSymmetrization)?;
        let value = if sign < 0 { value.neg() } else { value };
        Ok(OracleResult { value, route, sign })
    }

    /// Force the coset route (fails unless the result is an exact polynomial).
    pub fn push_coset(&self, f: &RootPoly) -> Result<ChernPoly> {
        let raw = coset_route(f, &self.rho)?;
        let v = RootPoly::from_poly(self.rho.rank(), raw)
            .symmetric_to_chern()
            .map_err(|_| Error::NonPolynomialSymmetrization)?;
        Ok(if self.coset_sign < 0 { v.neg() } else { v })
    }
}

/// Independent symmetrizer push-forward.
pub fn pushforward_oracle(f: &RootPoly, rho: &DimensionSequence) -> Result<OracleResult> {
    Oracle::new(rho)?.push(f)
}

/// Every monomial `ξ^λ` in `r` variables of total degree `deg`.
pub fn monomials_of_degree(r: usize, deg: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, r: usize, rest: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == r {
            cur.push(rest as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=rest).rev() {
            cur.push(a as u32);
            rec(i + 1, r, rest - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, r, deg, &mut Vec::new(), &mut out);
    out
}

/// `ε(r) = (-1)^{r(r-1)/2}`, the sign of the longest permutation.
pub fn expected_epsilon(r: usize) -> i32 {
    if (r * r.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Push-forward of the signed `Ξ`-monomial attached to `σ` over the complete flag.
///
/// Returns the push-forward and the sign `ε` with `result = ε · S_σ`.
pub fn schur_via_flag(sigma: &Partition, r: usize) -> Result<(ChernPoly, i32)> {
    let st = sigma_tilde(sigma, r)?;
    let lambda = lambda_from_sigma_tilde(&st);
    // Ξ_j = -ξ_{r-j+1}; (-1)^{|λ|+|σ|} Π Ξ_j^{λ_j} = (-1)^{|σ|} Π ξ_{r-j+1}^{λ_j}.
    let mut e = vec![0u32; r];
    for j in 1..=r {
        e[r - j] = lambda.entries()[j - 1] as u32;
    }
    let sign = if sigma.weight().is_multiple_of(2) { rat(1) } else { rat(-1) };
    let mono = RootPoly::monomial(&e).scale(&sign);
    let pushed = pushforward_dp(&mono, &DimensionSequence::complete(r));
    let target = schur(sigma, r);
    let eps = if pushed == target {
        1
    } else if pushed == target.neg() {
        -1
    } else {
        return Err(Error::Constraint(format!(
            "push-forward for {sigma} is not ±S_σ"
        )));
    };
    Ok((pushed, eps))
}

/// `p_*[c_1(Q_s)^α c_2(Q_s)^β]` over `G_s(E)`, `ρ = (0, s, r)`, and its Schur coordinates.
pub fn grassmann_c1c2_pushforward(
    r: usize,
    n: usize,
    s: usize,
    alpha: usize,
    beta: usize,
) -> Result<(ChernPoly, SchurVector)> {
    if s == 0 || s >= r {
        return Err(Error::Constraint(format!("need 0 < s < r, got s={s}, r={r}")));
    }
    if beta > 2 {
        return Err(Error::Constraint(format!("need β ≤ 2, got {beta}")));
    }
    let d = s * (r - s);
    let total = alpha + 2 * beta;
    if total < d || total > n + d {
        return Err(Error::Constraint(format!(
            "need {d} ≤ α+2β ≤ {}, got {total}",
            n + d
        )));
    }
    let k = total - d;
    let rho = DimensionSequence::grassmannian(s, r)?;
    let q = BundleSymbol::Q(s);
    let chern = if beta > 0 && r - s < 2 {
        // c_2 of a line bundle vanishes.
        ChernPoly::zero(r)
    } else {
        let mut expr = ChernExpr::num(1);
        if alpha > 0 {
            expr = expr.mul(ChernExpr::chern(1, q.clone()).pow(alpha as u32));
        }
        if beta > 0 {
            expr = expr.mul(ChernExpr::chern(2, q).pow(beta as u32));
        }
        pushforward_dp(&expand_expression(&expr, &rho)?, &rho)
    };
    let v = schur_decompose(&chern, k)?;
    if v.coords().iter().any(|(_, c)| *c < BigRational::zero()) {
        return Err(Error::Constraint(format!("negative Schur coordinate in {v}")));
    }
    Ok((chern, v))
}

/// Every `(s, α, β)` satisfying the constraints for given `r`, `n`.
pub fn admissible_c1c2_exponents(r: usize, n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for s in 1..r {
        let d = s * (r - s);
        for beta in 0..=2 {
            for alpha in 0..=(n + d) {
                let t = alpha + 2 * beta;
                if t >= d && t <= n + d {
                    out.push((s, alpha, beta));
                }
            }
        }
    }
    out
}

/// `d_ρ`, re-exported for callers that only need the degree shift.
pub fn degree_shift(rho: &DimensionSequence) -> usize {
    relative_dimension(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::chern_from_ints;
    use alloc::string::ToString;

    fn rho(v: &[usize]) -> DimensionSequence {
        DimensionSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dp_complete_flag_rank_two() {
        let full = DimensionSequence::complete(2);
        let s = segre_polys(2, 3);
        assert_eq!(pushforward_dp(&RootPoly::monomial(&[0, 2]), &full), s[1]);
        assert_eq!(s[1].to_string(), "-c1");
        assert!(pushforward_dp(&RootPoly::monomial(&[1, 1]), &full).is_zero());
        assert_eq!(pushforward_dp(&RootPoly::monomial(&[0, 1]), &full), ChernPoly::one(2));
        assert_eq!(pushforward_dp(&RootPoly::monomial(&[0, 3]), &full), s[2]);
    }

    #[test]
    fn oracle_complete_flag_rank_two() {
        let full = DimensionSequence::complete(2);
        let mut o = Oracle::new(&full).unwrap();
        assert_eq!(o.push(&RootPoly::monomial(&[0, 1])).unwrap().value, ChernPoly::one(2));
        let s2 = chern_from_ints(2, &[(&[2, 0], 1), (&[0, 1], -1)]);
        assert_eq!(o.push(&RootPoly::monomial(&[0, 3])).unwrap().value, s2);
        assert!(o.push(&RootPoly::monomial(&[1, 1])).unwrap().value.is_zero());
        assert!(o.push(&RootPoly::monomial(&[0, 0])).unwrap().value.is_zero());
    }

    #[test]
    fn paper_identity_projective_bundle() {
        let p = rho(&[0, 1, 4]);
        let q = BundleSymbol::Q(1);
        let e = ChernExpr::chern(1, q.clone()).pow(2).mul(ChernExpr::chern(2, q).pow(2));
        let f = expand_expression(&e, &p).unwrap();
        let got = pushforward_dp(&f, &p);
        assert_eq!(got.to_string(), "c1^3 + 2*c1*c2 - c3");
        let o = pushforward_oracle(&f, &p).unwrap();
        assert_eq!(o.route, OracleRoute::Coset);
        assert_eq!(o.value, got);
    }

    #[test]
    fn oracle_matches_dp_small_ranks() {
        for r in 1..=3 {
            for p in DimensionSequence::all_for_rank(r) {
                let d = relative_dimension(&p);
                let mut o = Oracle::new(&p).unwrap();
                for deg in 0..=d + 2 {
                    for lam in monomials_of_degree(r, deg) {
                        let f = RootPoly::monomial(&lam);
                        assert_eq!(o.push(&f).unwrap().value, pushforward_dp(&f, &p), "ρ={p} λ={lam:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn coset_route_on_non_block_symmetric_input() {
        // For a monomial that is not block-symmetric the coset sum depends on
        // the representatives and need not agree with the formula.
        let p = rho(&[0, 2]);
        let o = Oracle::new(&p).unwrap();
        let f = RootPoly::monomial(&[2, 0]);
        let dp = pushforward_dp(&f, &p);
        match o.push_coset(&f) {
            Ok(v) => assert_ne!(v, dp),
            Err(e) => assert_eq!(e, Error::NonPolynomialSymmetrization),
        }
        // The oracle itself switches to the lift route and agrees.
        let mut o = Oracle::new(&p).unwrap();
        let res = o.push(&f).unwrap();
        assert_eq!(res.route, OracleRoute::Lift);
        assert_eq!(res.value, dp);
    }

    #[test]
    fn routes_agree_on_block_symmetric_inputs() {
        let p = rho(&[0, 1, 3]);
        let mut o = Oracle::new(&p).unwrap();
        let q = BundleSymbol::Q(1);
        for (a, b) in [(2, 0), (1, 1), (3, 1), (0, 2), (2, 1)] {
            let e = ChernExpr::chern(1, q.clone()).pow(a).mul(ChernExpr::chern(2, q.clone()).pow(b));
            let f = expand_expression(&e, &p).unwrap();
            let coset = o.push_coset(&f).unwrap();
            let lift = {
                let raw = lift_route(&f, &p, &mut o.alt).unwrap();
                let v = RootPoly::from_poly(3, raw).symmetric_to_chern().unwrap();
                if o.lift_sign < 0 { v.neg() } else { v }
            };
            assert_eq!(coset, lift);
            assert_eq!(coset, pushforward_dp(&f, &p));
        }
    }

    #[test]
    fn low_degree_pushes_to_zero() {
        for r in 1..=4 {
            for p in DimensionSequence::all_for_rank(r) {
                let d = relative_dimension(&p);
                for deg in 0..d {
                    for lam in monomials_of_degree(r, deg) {
                        assert!(pushforward_dp(&RootPoly::monomial(&lam), &p).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn schur_via_flag_sign_is_constant() {
        for r in 1..=4 {
            for k in 0..=4 {
                for sigma in Partition::all_with_max_part(k, r) {
                    let (_, eps) = schur_via_flag(&sigma, r).unwrap();
                    assert_eq!(eps, expected_epsilon(r), "σ={sigma}, r={r}");
                }
            }
        }
        assert_eq!(expected_epsilon(2), -1);
        assert!(schur_via_flag(&Partition::new(vec![3]).unwrap(), 2).is_err());
    }

    #[test]
    fn grassmann_paper_examples() {
        let (c, v) = grassmann_c1c2_pushforward(4, 4, 2, 3, 2).unwrap();
        assert_eq!(c.to_string(), "c1^3 - c3");
        assert_eq!(v.to_string(), "2*S(2,1) + S(1,1,1)");
        let (c, v) = grassmann_c1c2_pushforward(4, 4, 2, 4, 2).unwrap();
        assert_eq!(c.to_string(), "c1^4 - 3*c1*c3 + 2*c4");
        assert_eq!(v.to_string(), "2*S(2,2) + 3*S(2,1,1) + S(1,1,1,1)");
        let (c, _) = grassmann_c1c2_pushforward(4, 4, 1, 2, 2).unwrap();
        assert_eq!(c.to_string(), "c1^3 + 2*c1*c2 - c3");
        let (c, v) = grassmann_c1c2_pushforward(4, 4, 1, 3, 2).unwrap();
        assert_eq!(c.to_string(), "c1^4 + 3*c1^2*c2 - 3*c1*c3 - c4");
        assert_eq!(v.to_string(), "6*S(3,1) + 5*S(2,2) + 6*S(2,1,1) + S(1,1,1,1)");
    }

    #[test]
    fn grassmann_constraints() {
        assert!(grassmann_c1c2_pushforward(4, 4, 2, 0, 3).is_err());
        assert!(grassmann_c1c2_pushforward(4, 4, 2, 1, 0).is_err());
        assert!(grassmann_c1c2_pushforward(4, 4, 2, 9, 0).is_err());
        assert!(grassmann_c1c2_pushforward(4, 4, 0, 3, 0).is_err());
        let (c, _) = grassmann_c1c2_pushforward(4, 4, 3, 3, 1).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn segre_reproduction_over_projective_bundles() {
        // Push of c_1(O(1))^{r-1+k} over P(E) of lines is s_k under s(t) = c(t)^{-1}.
        for r in 2..=4 {
            let p = rho(&[0, 1, r]);
            let s = segre_polys(r, 4);
            let mut o = Oracle::new(&p).unwrap();
            for k in 0..=4 {
                let e = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg().pow((r - 1 + k) as u32);
                let f = expand_expression(&e, &p).unwrap();
                let got = pushforward_dp(&f, &p);
                assert_eq!(got, o.push(&f).unwrap().value);
                assert_eq!(got, s[k], "r={r} k={k}");
            }
        }
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(4, 0), vec![vec![0, 0, 0, 0]]);
    }
}
