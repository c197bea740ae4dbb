//! Pointwise exterior algebra and Chern–Weil forms.
//!
//! An [`ExtForm`] lives on `N` holomorphic generators `dy_1..dy_N` and their
//! conjugates. Terms are stored as `dy_S ∧ dȳ_T` with `S`, `T` ascending
//! bitsets, holomorphic block first.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{det, CMat, CommRing};
use crate::rng;

/// Tolerance for Hermitian symmetry of input tensors.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Entries with modulus below this are dropped after products.
const DROP: f64 = 0.0;

#[inline]
fn key(s: u32, t: u32) -> u64 {
    ((s as u64) << 32) | t as u64
}

#[inline]
fn unkey(k: u64) -> (u32, u32) {
    ((k >> 32) as u32, k as u32)
}

/// Sign of concatenating two disjoint ascending index sets `a`, `b` into
/// ascending order: `(-1)^{#{(i, j) : i ∈ a, j ∈ b, i > j}}`.
#[inline]
fn merge_sign(a: u32, b: u32) -> bool {
    let mut odd = false;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        bb &= bb - 1;
        let above = a >> (j + 1);
        odd ^= above.count_ones() & 1 == 1;
    }
    odd
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtForm {
    ngens: usize,
    terms: Vec<(u64, Complex64)>,
}

impl ExtForm {
    pub fn zero(ngens: usize) -> Self {
        assert!(ngens <= 32, "at most 32 generators");
        Self {
            ngens,
            terms: Vec::new(),
        }
    }

    pub fn one(ngens: usize) -> Self {
        Self::scalar(ngens, Complex64::one())
    }

    pub fn scalar(ngens: usize, c: Complex64) -> Self {
        let mut f = Self::zero(ngens);
        if c != Complex64::zero() {
            f.terms.push((0, c));
        }
        f
    }

    /// `c · dy_S ∧ dȳ_T` for ascending index lists (0-based).
    pub fn term(ngens: usize, s: &[usize], t: &[usize], c: Complex64) -> Self {
        let mut acc = Self::scalar(ngens, c);
        for &i in s {
            acc = acc.wedge_unchecked(&Self::dz(ngens, i));
        }
        for &i in t {
            acc = acc.wedge_unchecked(&Self::dzbar(ngens, i));
        }
        acc
    }

    pub fn dz(ngens: usize, i: usize) -> Self {
        assert!(i < ngens);
        Self {
            ngens,
            terms: vec![(key(1 << i, 0), Complex64::one())],
        }
    }

    pub fn dzbar(ngens: usize, i: usize) -> Self {
        assert!(i < ngens);
        Self {
            ngens,
            terms: vec![(key(0, 1 << i), Complex64::one())],
        }
    }

    /// `dy_i ∧ dȳ_j`.
    pub fn dz_dzbar(ngens: usize, i: usize, j: usize, c: Complex64) -> Self {
        Self {
            ngens,
            terms: vec![(key(1 << i, 1 << j), c)],
        }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
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

    /// `(S, T, coefficient)` triples in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|&(k, c)| {
            let (s, t) = unkey(k);
            (s, t, c)
        })
    }

    /// Coefficient of `dy_S ∧ dȳ_T` (bitsets).
    pub fn coeff(&self, s: u32, t: u32) -> Complex64 {
        let k = key(s, t);
        match self.terms.binary_search_by_key(&k, |&(kk, _)| kk) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex64::zero(),
        }
    }

    fn from_unsorted(ngens: usize, mut raw: Vec<(u64, Complex64)>) -> Self {
        raw.sort_unstable_by_key(|&(k, _)| k);
        let mut terms: Vec<(u64, Complex64)> = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            match terms.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => terms.push((k, c)),
            }
        }
        terms.retain(|(_, c)| c.norm() > DROP);
        Self { ngens, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ngens, other.ngens, "generator spaces differ");
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&other.terms);
        Self::from_unsorted(self.ngens, raw)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-Complex64::one())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s == Complex64::zero() {
            return Self::zero(self.ngens);
        }
        Self {
            ngens: self.ngens,
            terms: self.terms.iter().map(|&(k, c)| (k, c * s)).collect(),
        }
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.ngens != other.ngens {
            return Err(Error::GeneratorMismatch(self.ngens, other.ngens));
        }
        Ok(self.wedge_unchecked(other))
    }

    fn wedge_unchecked(&self, other: &Self) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(k1, c1) in &self.terms {
            let (s1, t1) = unkey(k1);
            for &(k2, c2) in &other.terms {
                let (s2, t2) = unkey(k2);
                if s1 & s2 != 0 || t1 & t2 != 0 {
                    continue;
                }
                // dz_S1 dz̄_T1 dz_S2 dz̄_T2 → dz_S1 dz_S2 dz̄_T1 dz̄_T2
                let mut odd = (t1.count_ones() * s2.count_ones()) & 1 == 1;
                odd ^= merge_sign(s1, s2);
                odd ^= merge_sign(t1, t2);
                let c = c1 * c2;
                raw.push((key(s1 | s2, t1 | t2), if odd { -c } else { c }));
            }
        }
        Self::from_unsorted(self.ngens, raw)
    }

    /// Complex conjugate form.
    pub fn conj(&self) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|&(k, c)| {
                let (s, t) = unkey(k);
                // conj(c dz_S dz̄_T) = c̄ dz̄_S dz_T = c̄ (-1)^{|S||T|} dz_T dz̄_S
                let odd = (s.count_ones() * t.count_ones()) & 1 == 1;
                (key(t, s), if odd { -c.conj() } else { c.conj() })
            })
            .collect();
        Self::from_unsorted(self.ngens, raw)
    }

    /// Keep only the terms of bidegree `(p, q)`.
    pub fn bidegree_part(&self, p: u32, q: u32) -> Self {
        Self {
            ngens: self.ngens,
            terms: self
                .terms
                .iter()
                .filter(|&&(k, _)| {
                    let (s, t) = unkey(k);
                    s.count_ones() == p && t.count_ones() == q
                })
                .cloned()
                .collect(),
        }
    }

    /// Bidegree `(p, q)` if every term shares it.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.iter().map(|&(k, _)| {
            let (s, t) = unkey(k);
            (s.count_ones(), t.count_ones())
        });
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |coefficient|` of `self - conj(self)`.
    pub fn reality_defect(&self) -> f64 {
        self.sub(&self.conj()).max_abs()
    }

    /// Embed into a larger generator space (generators keep their indices).
    pub fn extend(&self, ngens: usize) -> Self {
        assert!(ngens >= self.ngens && ngens <= 32);
        Self {
            ngens,
            terms: self.terms.clone(),
        }
    }
}

impl CommRing for ExtForm {
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    /// Only valid on even forms, which commute.
    fn ring_mul(&self, other: &Self) -> Self {
        self.wedge_unchecked(other)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Curvature coefficients `c_{jkαβ}` at a point, `Θ_{βα} = Σ c_{jkαβ} dz_j ∧ dz̄_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    r: usize,
    c: Vec<Complex64>,
}

impl CurvatureTensor {
    fn idx(&self, j: usize, k: usize, a: usize, b: usize) -> usize {
        ((j * self.n + k) * self.r + a) * self.r + b
    }

    pub fn zero(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            c: vec![Complex64::zero(); n * n * r * r],
        }
    }

    /// Build from a coefficient function (0-based indices), checking
    /// `conj(c_{jkαβ}) = c_{kjβα}`.
    pub fn from_fn(n: usize, r: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Result<Self> {
        let mut t = Self::zero(n, r);
        for j in 0..n {
            for k in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let i = t.idx(j, k, a, b);
                        t.c[i] = f(j, k, a, b);
                    }
                }
            }
        }
        let d = t.hermitian_defect();
        let scale = t.max_abs().max(1.0);
        if d > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(d));
        }
        Ok(t)
    }

    /// Build from sparse entries, filling in Hermitian partners.
    pub fn from_entries(n: usize, r: usize, entries: &[(usize, usize, usize, usize, Complex64)]) -> Result<Self> {
        let mut t = Self::zero(n, r);
        let mut set = vec![false; n * n * r * r];
        for &(j, k, a, b, v) in entries {
            if j >= n || k >= n || a >= r || b >= r {
                return Err(Error::Constraint(alloc::format!(
                    "entry ({j},{k},{a},{b}) out of range for n={n}, r={r}"
                )));
            }
            let i = t.idx(j, k, a, b);
            t.c[i] = v;
            set[i] = true;
        }
        for j in 0..n {
            for k in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let i = t.idx(j, k, a, b);
                        let p = t.idx(k, j, b, a);
                        if set[i] && !set[p] {
                            t.c[p] = t.c[i].conj();
                            set[p] = true;
                        }
                    }
                }
            }
        }
        let d = t.hermitian_defect();
        if d > HERMITIAN_TOL * t.max_abs().max(1.0) {
            return Err(Error::NotHermitian(d));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `c_{jkαβ}`, 0-based.
    pub fn get(&self, j: usize, k: usize, a: usize, b: usize) -> Complex64 {
        self.c[self.idx(j, k, a, b)]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for j in 0..self.n {
            for k in 0..self.n {
                for a in 0..self.r {
                    for b in 0..self.r {
                        d = d.max((self.get(j, k, a, b).conj() - self.get(k, j, b, a)).norm());
                    }
                }
            }
        }
        d
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            r: self.r,
            c: self.c.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.r), (other.n, other.r));
        Self {
            n: self.n,
            r: self.r,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
        }
    }

    /// `n × n` matrix `C_{jk}` with `[δ][γ] = c_{jkγδ}`, i.e. the coefficient
    /// matrix of `dz_j ∧ dz̄_k` in `Θ`.
    pub fn coefficient_matrix(&self, j: usize, k: usize) -> CMat {
        CMat::from_fn(self.r, self.r, |b, a| self.get(j, k, a, b))
    }

    /// Curvature matrix `M[β][α] = Θ_{βα}` on `ngens ≥ n` generators (base first).
    pub fn form_matrix(&self, ngens: usize) -> FormMatrix {
        assert!(ngens >= self.n);
        let entries = (0..self.r)
            .map(|b| {
                (0..self.r)
                    .map(|a| {
                        let mut raw = Vec::new();
                        for j in 0..self.n {
                            for k in 0..self.n {
                                let v = self.get(j, k, a, b);
                                if v != Complex64::zero() {
                                    raw.push((key(1 << j, 1 << k), v));
                                }
                            }
                        }
                        ExtForm::from_unsorted(ngens, raw)
                    })
                    .collect()
            })
            .collect();
        FormMatrix { entries }
    }

    /// Griffiths quadratic form `Σ c_{jkαβ} τ_j τ̄_k v_α v̄_β`.
    pub fn griffiths_value(&self, tau: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for j in 0..self.n {
            for k in 0..self.n {
                let tt = tau[j] * tau[k].conj();
                for a in 0..self.r {
                    for b in 0..self.r {
                        acc += self.get(j, k, a, b) * tt * v[a] * v[b].conj();
                    }
                }
            }
        }
        acc
    }
}

/// Square matrix of `(1,1)`-forms, `entries[β][α]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    pub entries: Vec<Vec<ExtForm>>,
}

impl FormMatrix {
    pub fn new(entries: Vec<Vec<ExtForm>>) -> Self {
        let n = entries.len();
        assert!(entries.iter().all(|row| row.len() == n), "form matrix must be square");
        Self { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn ngens(&self) -> usize {
        self.entries.first().and_then(|r| r.first()).map(|f| f.ngens()).unwrap_or(0)
    }

    pub fn get(&self, row: usize, col: usize) -> &ExtForm {
        &self.entries[row][col]
    }

    /// `max |conj(M_{βα}) + M_{αβ}|`; zero for a curvature matrix in a unitary frame.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.size();
        let mut d: f64 = 0.0;
        for b in 0..n {
            for a in 0..n {
                d = d.max(self.entries[b][a].conj().add(&self.entries[a][b]).max_abs());
            }
        }
        d
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a.sub(b)).collect())
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|f| f.max_abs()).fold(0.0, f64::max)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n1, n2) = (self.size(), other.size());
        let g = self.ngens().max(other.ngens());
        let mut entries = vec![vec![ExtForm::zero(g); n1 + n2]; n1 + n2];
        for i in 0..n1 {
            for j in 0..n1 {
                entries[i][j] = self.entries[i][j].extend(g);
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                entries[n1 + i][n1 + j] = other.entries[i][j].extend(g);
            }
        }
        Self::new(entries)
    }

    /// `left · M · right` with scalar matrices.
    pub fn sandwich(&self, left: &CMat, right: &CMat) -> Self {
        let g = self.ngens();
        let (rows, cols) = (left.rows(), right.cols());
        assert_eq!(left.cols(), self.size());
        assert_eq!(right.rows(), self.size());
        let mut entries = vec![vec![ExtForm::zero(g); cols]; rows];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let mut raw = Vec::new();
                for p in 0..self.size() {
                    for q in 0..self.size() {
                        let w = left[(i, p)] * right[(q, j)];
                        if w == Complex64::zero() {
                            continue;
                        }
                        raw.extend(self.entries[p][q].terms.iter().map(|&(k, c)| (k, c * w)));
                    }
                }
                *e = ExtForm::from_unsorted(g, raw);
            }
        }
        Self { entries }
    }

    /// Same entries over a larger generator space.
    pub fn extend(&self, ngens: usize) -> Self {
        Self::new(self.entries.iter().map(|row| row.iter().map(|f| f.extend(ngens)).collect()).collect())
    }

    pub fn trace(&self) -> ExtForm {
        (0..self.size()).fold(ExtForm::zero(self.ngens()), |acc, i| acc.add(&self.entries[i][i]))
    }
}

/// `c_s = [det(I + (i/2π) M)]_{(s,s)}` for `s = 0..rank`.
pub fn chern_forms(m: &FormMatrix) -> Vec<ExtForm> {
    let n = m.size();
    let g = m.ngens();
    let factor = Complex64::new(0.0, 1.0 / (2.0 * core::f64::consts::PI));
    let a: Vec<Vec<ExtForm>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = m.entries[i][j].scale(factor);
                    if i == j {
                        e.add(&ExtForm::one(g))
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let total = det(&a, &ExtForm::one(g));
    (0..=n as u32).map(|s| total.bidegree_part(s, s)).collect()
}

/// `c = Σ_q u^q_j ū^q_k w^q_α w̄^q_β` with Gaussian `u^q ∈ C^n`, `w^q ∈ C^r`.
pub fn griffiths_sample(n: usize, r: usize, terms: usize, seed: u64) -> CurvatureTensor {
    let mut rng = rng::stream(seed, 0);
    let mut t = CurvatureTensor::zero(n, r);
    for _ in 0..terms {
        let u: Vec<Complex64> = (0..n).map(|_| rng::complex_normal(&mut rng)).collect();
        let w: Vec<Complex64> = (0..r).map(|_| rng::complex_normal(&mut rng)).collect();
        for j in 0..n {
            for k in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let i = t.idx(j, k, a, b);
                        t.c[i] += u[j] * u[k].conj() * w[a] * w[b].conj();
                    }
                }
            }
        }
    }
    t
}

fn random_unit(rng: &mut impl RngCore, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| rng::complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Minimum of the Griffiths form over `samples` random unit pairs `(τ, v)`.
pub fn griffiths_check(c: &CurvatureTensor, samples: usize, seed: u64) -> f64 {
    let mut min = f64::INFINITY;
    for s in 0..samples {
        let mut rng = rng::stream(seed, s as u64);
        let tau = random_unit(&mut rng, c.n());
        let v = random_unit(&mut rng, c.r());
        min = min.min(c.griffiths_value(&tau, &v).re);
    }
    if samples == 0 {
        0.0
    } else {
        min
    }
}

/// `γ(v_1, …, v_k, v̄_1, …, v̄_k) = Σ γ_{JK} det(V_J) conj(det(V_K))` on an `n × k` frame.
fn evaluate_on_frame(gamma: &ExtForm, frame: &CMat) -> Complex64 {
    let k = frame.cols();
    let mut minors: BTreeMap<u32, Complex64> = BTreeMap::new();
    let mut minor = |mask: u32| -> Complex64 {
        *minors.entry(mask).or_insert_with(|| {
            let rows: Vec<usize> = (0..32).filter(|i| mask & (1 << i) != 0).collect();
            let m: Vec<Vec<Complex64>> = rows.iter().map(|&i| (0..k).map(|j| frame[(i, j)]).collect()).collect();
            det(&m, &Complex64::one())
        })
    };
    let mut acc = Complex64::zero();
    for (s, t, c) in gamma.terms() {
        acc += c * minor(s) * minor(t).conj();
    }
    acc
}

/// `κ_k` making `(Σ_j i dz_j ∧ dz̄_j)^k` evaluate positively.
pub fn positivity_constant(k: usize) -> Complex64 {
    let n = k.max(1);
    let omega = (0..n).fold(ExtForm::zero(n), |acc, j| {
        acc.add(&ExtForm::dz_dzbar(n, j, j, Complex64::new(0.0, 1.0)))
    });
    let mut g = ExtForm::one(n);
    for _ in 0..k {
        g = g.wedge_unchecked(&omega);
    }
    let v = evaluate_on_frame(&g, &CMat::identity(n).select(&(0..n).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>()));
    let z = v.conj() / v.norm();
    Complex64::new(z.re.round(), z.im.round())
}

/// Result of [`positivity_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub min: f64,
    pub max: f64,
    /// Largest imaginary part seen after applying `κ_k`.
    pub imag_defect: f64,
    pub kappa: Complex64,
}

/// Sampled positivity of a `(k,k)`-form on `n` horizontal generators.
pub fn positivity_check(gamma: &ExtForm, n: usize, samples: usize, seed: u64) -> Result<PositivityReport> {
    let (p, q) = match gamma.bidegree() {
        Some(b) => b,
        None if gamma.is_zero() => {
            return Ok(PositivityReport {
                min: 0.0,
                max: 0.0,
                imag_defect: 0.0,
                kappa: Complex64::one(),
            })
        }
        None => return Err(Error::WrongBidegree { expected: 0 }),
    };
    if p != q {
        return Err(Error::WrongBidegree { expected: p as usize });
    }
    let k = p as usize;
    if gamma.terms().any(|(s, t, _)| (s | t) >> n != 0) {
        return Err(Error::Constraint("form has non-horizontal generators".into()));
    }
    let kappa = positivity_constant(k);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut imag: f64 = 0.0;
    for sidx in 0..samples {
        let mut rng = rng::stream(seed, sidx as u64);
        let frame = orthonormal_frame(&mut rng, n, k);
        let v = kappa * evaluate_on_frame(gamma, &frame);
        min = min.min(v.re);
        max = max.max(v.re);
        imag = imag.max(v.im.abs());
    }
    Ok(PositivityReport {
        min,
        max,
        imag_defect: imag,
        kappa,
    })
}

/// Random `n × k` matrix with orthonormal columns (Gram–Schmidt on Gaussians).
pub fn orthonormal_frame(rng: &mut impl RngCore, n: usize, k: usize) -> CMat {
    let mut m = CMat::from_fn(n, k, |_, _| rng::complex_normal(rng));
    for j in 0..k {
        for i in 0..j {
            let mut d = Complex64::zero();
            for row in 0..n {
                d += m[(row, i)].conj() * m[(row, j)];
            }
            for row in 0..n {
                let v = m[(row, i)];
                m[(row, j)] -= d * v;
            }
        }
        let norm = (0..n).map(|row| m[(row, j)].norm_sqr()).sum::<f64>().sqrt();
        for row in 0..n {
            m[(row, j)] /= norm;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn wedge_basics() {
        let n = 3;
        let dz1 = ExtForm::dz(n, 0);
        let dzb1 = ExtForm::dzbar(n, 0);
        assert!(dz1.wedge(&dz1).unwrap().is_zero());
        assert_eq!(dz1.wedge(&dzb1).unwrap(), dzb1.wedge(&dz1).unwrap().neg());
        let a = ExtForm::dz_dzbar(n, 0, 0, Complex64::one());
        let b = ExtForm::dz_dzbar(n, 1, 1, Complex64::one());
        assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        assert_eq!(
            a.wedge(&ExtForm::zero(2)),
            Err(Error::GeneratorMismatch(3, 2))
        );
    }

    #[test]
    fn wedge_sign_against_permutation_parity() {
        // dz2 ∧ dz̄1 ∧ dz1 = dz1 ∧ dz2 ∧ dz̄1 (two transpositions).
        let n = 2;
        let f = ExtForm::dz(n, 1).wedge(&ExtForm::dzbar(n, 0)).unwrap().wedge(&ExtForm::dz(n, 0)).unwrap();
        assert_eq!(f.coeff(0b11, 0b01), Complex64::one());
        // dz̄2 ∧ dz1 ∧ dz̄1 ∧ dz2 : move to dz1 dz2 dz̄1 dz̄2.
        let g = ExtForm::dzbar(n, 1)
            .wedge(&ExtForm::dz(n, 0))
            .unwrap()
            .wedge(&ExtForm::dzbar(n, 0))
            .unwrap()
            .wedge(&ExtForm::dz(n, 1))
            .unwrap();
        // sequence (b2, a1, b1, a2) → (a1, a2, b1, b2): inversions = 4.
        assert_eq!(g.coeff(0b11, 0b11), Complex64::one());
    }

    #[test]
    fn graded_commutativity() {
        let n = 4;
        let a = ExtForm::dz(n, 0).add(&ExtForm::dzbar(n, 2).scale(cx(0.0, 2.0)));
        let b = ExtForm::dz(n, 1).wedge(&ExtForm::dzbar(n, 3)).unwrap().add(&ExtForm::dz(n, 3));
        // deg a = 1, b mixes degrees 2 and 1.
        let b2 = b.bidegree_part(1, 1);
        let b1 = b.bidegree_part(1, 0);
        assert_eq!(a.wedge(&b2).unwrap(), b2.wedge(&a).unwrap());
        assert_eq!(a.wedge(&b1).unwrap(), b1.wedge(&a).unwrap().neg());
    }

    #[test]
    fn conjugation_is_an_involution_and_real_forms_are_fixed() {
        let n = 3;
        let f = ExtForm::dz_dzbar(n, 0, 1, cx(1.0, 2.0)).wedge(&ExtForm::dz(n, 2)).unwrap();
        assert_eq!(f.conj().conj(), f);
        let w = ExtForm::dz_dzbar(n, 1, 1, cx(0.0, 1.0));
        assert!(w.reality_defect() < 1e-15);
    }

    fn random_tensor(n: usize, r: usize, seed: u64) -> CurvatureTensor {
        let a = griffiths_sample(n, r, 2, seed);
        let b = griffiths_sample(n, r, 1, seed + 100).scale(-0.7);
        a.add(&b)
    }

    #[test]
    fn chern_forms_are_real_and_of_right_bidegree() {
        let t = random_tensor(3, 3, 5);
        let cs = chern_forms(&t.form_matrix(3));
        assert_eq!(cs[0], ExtForm::one(3));
        for (s, c) in cs.iter().enumerate() {
            assert!(c.reality_defect() < 1e-14, "c_{s}");
            if !c.is_zero() {
                assert_eq!(c.bidegree(), Some((s as u32, s as u32)));
            }
        }
        let tr = t.form_matrix(3).trace().scale(Complex64::new(0.0, 0.5 / core::f64::consts::PI));
        assert!(cs[1].sub(&tr).max_abs() < 1e-15);
    }

    #[test]
    fn rank_one_and_splitting() {
        let n = 3;
        let theta = ExtForm::dz_dzbar(n, 0, 1, cx(0.3, -0.2)).add(&ExtForm::dz_dzbar(n, 2, 2, cx(1.0, 0.0)));
        let cs = chern_forms(&FormMatrix::new(vec![vec![theta.clone()]]));
        let want = theta.scale(Complex64::new(0.0, 0.5 / core::f64::consts::PI));
        assert!(cs[1].sub(&want).max_abs() < 1e-16);

        let xs: Vec<ExtForm> = (0..3).map(|j| ExtForm::dz_dzbar(n, j, j, cx(0.0, -2.0 * core::f64::consts::PI * (j as f64 + 1.0)))).collect();
        let mut m = vec![vec![ExtForm::zero(n); 3]; 3];
        for j in 0..3 {
            m[j][j] = xs[j].clone();
        }
        let cs = chern_forms(&FormMatrix::new(m));
        // (i/2π) x_j = (j+1) dz_j dz̄_j; c_2 = e_2 of those.
        let y: Vec<ExtForm> = (0..3).map(|j| ExtForm::dz_dzbar(n, j, j, cx(j as f64 + 1.0, 0.0))).collect();
        let e2 = y[0].wedge(&y[1]).unwrap().add(&y[0].wedge(&y[2]).unwrap()).add(&y[1].wedge(&y[2]).unwrap());
        assert!(cs[2].sub(&e2).max_abs() < 1e-12);
    }

    #[test]
    fn whitney_for_direct_sums() {
        let a = random_tensor(3, 2, 9).form_matrix(3);
        let b = random_tensor(3, 1, 10).form_matrix(3);
        let total = |cs: &[ExtForm]| cs.iter().fold(ExtForm::zero(3), |acc, c| acc.add(c));
        let lhs = total(&chern_forms(&a.direct_sum(&b)));
        let rhs = total(&chern_forms(&a)).wedge(&total(&chern_forms(&b))).unwrap();
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }

    #[test]
    fn curvature_matrix_is_hermitian() {
        let t = random_tensor(2, 3, 4);
        assert!(t.form_matrix(2).hermitian_defect() < 1e-15);
        let bad = CurvatureTensor::from_fn(1, 2, |_, _, a, b| if a < b { Complex64::one() } else { Complex64::zero() });
        assert!(matches!(bad, Err(Error::NotHermitian(_))));
        let ok = CurvatureTensor::from_entries(2, 2, &[(0, 1, 0, 1, cx(1.0, 2.0))]).unwrap();
        assert_eq!(ok.get(1, 0, 1, 0), cx(1.0, -2.0));
    }

    #[test]
    fn griffiths_samples_are_semipositive() {
        for seed in 0..5 {
            let t = griffiths_sample(3, 2, 1, seed);
            assert!(griffiths_check(&t, 500, seed) >= -1e-12);
            assert!(griffiths_check(&t.scale(-1.0), 500, seed) < 0.0);
            let two = t.add(&griffiths_sample(3, 2, 2, seed + 50));
            assert!(griffiths_check(&two, 500, seed) >= -1e-12);
        }
        assert_eq!(griffiths_check(&CurvatureTensor::zero(2, 2), 10, 0), 0.0);
    }

    #[test]
    fn positivity_constant_values() {
        for k in 1..=4 {
            // conj(i^k (-1)^{k(k-1)/2})
            let ik = [cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0), cx(0.0, -1.0)][k % 4];
            let sign = if (k * (k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(positivity_constant(k), (ik * sign).conj());
        }
    }

    #[test]
    fn positivity_examples() {
        let n = 2;
        let omega = ExtForm::dz_dzbar(n, 0, 0, cx(0.0, 1.0)).add(&ExtForm::dz_dzbar(n, 1, 1, cx(0.0, 1.0)));
        let g = omega.wedge(&omega).unwrap();
        assert!(positivity_check(&g, n, 100, 1).unwrap().min > 0.0);
        let neg = ExtForm::dz_dzbar(n, 0, 0, cx(0.0, -1.0));
        assert!(positivity_check(&neg, n, 100, 1).unwrap().min < 0.0);
        let t = griffiths_sample(3, 2, 2, 8);
        let c1 = chern_forms(&t.form_matrix(3))[1].clone();
        let rep = positivity_check(&c1, 3, 1000, 2).unwrap();
        assert!(rep.min >= -1e-12, "{rep:?}");
        assert!(rep.imag_defect < 1e-12);
        assert!(matches!(
            positivity_check(&ExtForm::dz(2, 0), 2, 10, 0),
            Err(Error::WrongBidegree { .. })
        ));
    }

    #[test]
    fn products_of_positive_forms_stay_positive() {
        let n = 3;
        let a = chern_forms(&griffiths_sample(n, 2, 1, 21).form_matrix(n))[1].clone();
        let b = chern_forms(&griffiths_sample(n, 3, 2, 22).form_matrix(n))[1].clone();
        let rep = positivity_check(&a.wedge(&b).unwrap(), n, 2000, 3).unwrap();
        assert!(rep.min >= -1e-10 * rep.max.abs().max(1.0), "{rep:?}");
    }
}
