//! Flag-bundle charts, induced metrics and numerical fiber integration.
//!
//! Everything is pointwise over a base point `x_0` with normal coordinates
//! `z`. The metric of `E` in the normal frame is the synthetic model
//! `H(z) = I - Σ C_{jk} z_j z̄_k`, exactly quadratic in `z`.
//!
//! Generators of the chart are `dz_1..dz_n` followed by one `dζ_p` per
//! admissible pair `p`, in the order of [`admissible_pairs`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::RngCore;

use crate::charpoly::ChernPoly;
use crate::combinat::{admissible_pairs, DimensionSequence};
use crate::error::{Error, Result};
use crate::formlab::{chern_forms, CurvatureTensor, ExtForm, FormMatrix};
use crate::gysin::pushforward_dp;
use crate::linalg::CMat;
use crate::rng;
use crate::rootcalc::{expand_expression, ChernExpr, UniversalBundleSpec};

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-3;

/// Relative Hermiticity defect above which a finite-difference curvature is rejected.
pub const FD_HERMITIAN_TOL: f64 = 1e-6;

/// Unitarity tolerance for frames passed to [`theta_intrinsic`].
pub const UNITARY_TOL: f64 = 1e-10;

/// Redraws allowed for a non-finite Monte Carlo sample.
const MAX_REDRAWS: usize = 16;

/// Affine chart of `F_ρ(E_{x_0})` next to the base coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagChart {
    rho: DimensionSequence,
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl FlagChart {
    pub fn new(rho: DimensionSequence, n: usize) -> Result<Self> {
        let pairs = admissible_pairs(&rho);
        if n + pairs.len() > 32 {
            return Err(Error::Constraint(alloc::format!(
                "n + d = {} exceeds 32 generators",
                n + pairs.len()
            )));
        }
        Ok(Self { rho, n, pairs })
    }

    pub fn rho(&self) -> &DimensionSequence {
        &self.rho
    }

    pub fn rank(&self) -> usize {
        self.rho.rank()
    }

    /// Base dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fiber dimension `d_ρ`.
    pub fn d(&self) -> usize {
        self.pairs.len()
    }

    /// `n + d_ρ`.
    pub fn ngens(&self) -> usize {
        self.n + self.pairs.len()
    }

    /// Chart pairs `(λ, μ)`, 1-based.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Position of `ζ_{λμ}` among the pairs.
    pub fn pair_index(&self, lambda: usize, mu: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (lambda, mu))
    }

    /// Generator index of `dζ_{λμ}`.
    pub fn zeta_gen(&self, lambda: usize, mu: usize) -> Option<usize> {
        self.pair_index(lambda, mu).map(|p| self.n + p)
    }

    /// Bitset of all fiber generators.
    pub fn vertical_mask(&self) -> u32 {
        ((1u64 << self.ngens()) - (1u64 << self.n)) as u32
    }

    /// Projective-space fibers, `ρ = (0,1,r)` or `(0,r-1,r)`.
    pub fn is_projective(&self) -> bool {
        let r = self.rank();
        self.rho.steps() == 2 && (self.rho.rho(1) == 1 || self.rho.rho(1) + 1 == r)
    }
}

/// Point of the center fiber, `z = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    zeta: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(chart: &FlagChart, zeta: Vec<Complex64>) -> Result<Self> {
        if zeta.len() != chart.d() {
            return Err(Error::DegreeMismatch {
                expected: chart.d(),
                found: zeta.len(),
            });
        }
        if zeta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Constraint("non-finite chart coordinate".into()));
        }
        Ok(Self { zeta })
    }

    pub fn center(chart: &FlagChart) -> Self {
        Self {
            zeta: vec![Complex64::zero(); chart.d()],
        }
    }

    /// Entries drawn as `scale · (complex Gaussian)`.
    pub fn random(chart: &FlagChart, rng: &mut impl RngCore, scale: f64) -> Self {
        Self {
            zeta: (0..chart.d()).map(|_| rng::complex_normal(rng) * scale).collect(),
        }
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }
}

fn frames_from(chart: &FlagChart, zeta: &[Complex64]) -> CMat {
    let r = chart.rank();
    let mut f = CMat::identity(r);
    for (&(lambda, mu), &z) in chart.pairs.iter().zip(zeta) {
        f[(lambda - 1, mu - 1)] = z;
    }
    f
}

/// Column `α` holds the coefficients of `ε_α = e_α + Σ ζ_{λα} e_λ`.
pub fn frames_eps(chart: &FlagChart, p: &ChartPoint) -> CMat {
    frames_from(chart, &p.zeta)
}

/// `G[β][α] = ⟨ε_α, ε_β⟩` with the flat metric at the center.
pub fn gram(chart: &FlagChart, p: &ChartPoint) -> CMat {
    let f = frames_eps(chart, p);
    f.adjoint().matmul(&f)
}

/// `H(z)[δ][γ] = δ_{γδ} - Σ c_{jkγδ} z_j z̄_k`.
pub fn synthetic_metric(c: &CurvatureTensor, z: &[Complex64]) -> CMat {
    let r = c.r();
    let mut h = CMat::identity(r);
    for j in 0..c.n() {
        for k in 0..c.n() {
            let w = z[j] * z[k].conj();
            if w == Complex64::zero() {
                continue;
            }
            for a in 0..r {
                for b in 0..r {
                    h[(b, a)] -= c.get(j, k, a, b) * w;
                }
            }
        }
    }
    h
}

/// 0-based indices `A` (the bundle's block) and `B` (the block of `U_ℓ`).
fn blocks(spec: &UniversalBundleSpec) -> (Vec<usize>, Vec<usize>) {
    let a = spec.block().map(|i| i - 1).collect();
    let b = spec.sub_block().map(|i| i - 1).collect();
    (a, b)
}

fn check_spec(chart: &FlagChart, spec: &UniversalBundleSpec, c: &CurvatureTensor) -> Result<()> {
    if spec.rho() != chart.rho() {
        return Err(Error::InvalidBundle("bundle and chart use different ρ".into()));
    }
    if c.r() != chart.rank() {
        return Err(Error::RankMismatch {
            expected: chart.rank(),
            found: c.r(),
        });
    }
    if c.n() != chart.n() {
        return Err(Error::DegreeMismatch {
            expected: chart.n(),
            found: c.n(),
        });
    }
    Ok(())
}

fn full_gram(chart: &FlagChart, c: &CurvatureTensor, z: &[Complex64], zeta: &[Complex64]) -> Result<CMat> {
    let h = synthetic_metric(c, z);
    if h.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let f = frames_from(chart, zeta);
    Ok(f.adjoint().matmul(&h).matmul(&f))
}

fn schur_complement(g: &CMat, a: &[usize], b: &[usize]) -> Result<CMat> {
    let gaa = g.select(a, a);
    if b.is_empty() {
        return Ok(gaa);
    }
    let gbb_inv = g.select(b, b).inverse().ok_or(Error::NotPositiveDefinite)?;
    Ok(gaa.sub(&g.select(a, b).matmul(&gbb_inv).matmul(&g.select(b, a))))
}

/// Induced metric of `U_l/U_ℓ` in the frame `ε̃_α`, `α ∈ (r-ρ_l, r-ρ_ℓ]`.
///
/// Sub-bundles get Gram sub-blocks, quotients the Schur complement of the
/// `U_ℓ` block.
pub fn metric_universal(
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
    z: &[Complex64],
    p: &ChartPoint,
) -> Result<CMat> {
    let chart = FlagChart::new(spec.rho().clone(), c.n())?;
    check_spec(&chart, spec, c)?;
    let g = full_gram(&chart, c, z, &p.zeta)?;
    let (a, b) = blocks(spec);
    schur_complement(&g, &a, &b)
}

/// `u[μ][α]` with `p⋆ε̃_α = ε_α + Σ_μ u_{αμ} ε_μ`, i.e. `u = -G_BB^{-1} G_BA`.
pub fn splitting_coefficients(
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
    z: &[Complex64],
    p: &ChartPoint,
) -> Result<CMat> {
    let chart = FlagChart::new(spec.rho().clone(), c.n())?;
    check_spec(&chart, spec, c)?;
    let g = full_gram(&chart, c, z, &p.zeta)?;
    let (a, b) = blocks(spec);
    if b.is_empty() {
        return Ok(CMat::zeros(0, a.len()));
    }
    let gbb_inv = g.select(&b, &b).inverse().ok_or(Error::NotPositiveDefinite)?;
    Ok(gbb_inv.matmul(&g.select(&b, &a)).scale(-Complex64::one()))
}

/// Curvature as coefficient matrices: `K_{ab}` multiplies `dy_a ∧ dȳ_b`,
/// and `K_{ab}[β][α]` is the `(β,α)` entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureCoeffs {
    dim: usize,
    rank: usize,
    k: Vec<CMat>,
}

impl CurvatureCoeffs {
    pub fn zero(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            k: vec![CMat::zeros(rank, rank); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, a: usize, b: usize) -> &CMat {
        &self.k[a * self.dim + b]
    }

    pub fn get_mut(&mut self, a: usize, b: usize) -> &mut CMat {
        &mut self.k[a * self.dim + b]
    }

    pub fn to_form_matrix(&self) -> FormMatrix {
        let entries = (0..self.rank)
            .map(|row| {
                (0..self.rank)
                    .map(|col| {
                        let mut f = ExtForm::zero(self.dim);
                        for a in 0..self.dim {
                            for b in 0..self.dim {
                                let v = self.get(a, b)[(row, col)];
                                if v != Complex64::zero() {
                                    f = f.add(&ExtForm::dz_dzbar(self.dim, a, b, v));
                                }
                            }
                        }
                        f
                    })
                    .collect()
            })
            .collect();
        FormMatrix::new(entries)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        Self {
            dim: self.dim,
            rank: self.rank,
            k: self.k.iter().zip(&other.k).map(|(x, y)| x.sub(y)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.k.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient over the generator pairs `(a, b)` accepted by `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(usize, usize) -> bool) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                if keep(a, b) {
                    m = m.max(self.get(a, b).max_abs());
                }
            }
        }
        m
    }

    /// Restriction to the first `n` generators.
    pub fn horizontal(&self, n: usize) -> Self {
        let mut out = Self::zero(n, self.rank);
        for a in 0..n {
            for b in 0..n {
                *out.get_mut(a, b) = self.get(a, b).clone();
            }
        }
        out
    }

    /// `left · K_{ab} · right` for every `(a, b)`.
    pub fn sandwich(&self, left: &CMat, right: &CMat) -> Self {
        Self {
            dim: self.dim,
            rank: left.rows(),
            k: self.k.iter().map(|m| left.matmul(m).matmul(right)).collect(),
        }
    }

    /// `max_{ab} |S K_{ab} - (S K_{ba})^H|`; zero for the Chern curvature of `S`.
    pub fn metric_hermitian_defect(&self, s: &CMat) -> f64 {
        let mut d: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let x = s.matmul(self.get(a, b));
                let y = s.matmul(self.get(b, a)).adjoint();
                d = d.max(x.sub(&y).max_abs());
            }
        }
        d
    }

    fn symmetrize(&mut self, s: &CMat, s_inv: &CMat) {
        let dim = self.dim;
        let mut out = self.k.clone();
        for a in 0..dim {
            for b in 0..dim {
                let x = s.matmul(self.get(a, b));
                let y = s.matmul(self.get(b, a)).adjoint();
                out[a * dim + b] = s_inv.matmul(&x.add(&y).scale(Complex64::new(0.5, 0.0)));
            }
        }
        self.k = out;
    }
}

/// Curvature of `U_l/U_ℓ` at the chart center from the closed formula:
/// `Θ_{βα} - Σ_{λ ≤ r-ρ_l} dζ_{λα}∧dζ̄_{λβ} + Σ_{μ > r-ρ_ℓ} dζ_{βμ}∧dζ̄_{αμ}`.
pub fn curvature_center_coeffs(
    chart: &FlagChart,
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
) -> Result<CurvatureCoeffs> {
    check_spec(chart, spec, c)?;
    let r = chart.rank();
    let rho_l = spec.rho().rho(spec.l());
    let rho_ell = spec.rho().rho(spec.ell());
    let block: Vec<usize> = spec.block().collect();
    let mut k = CurvatureCoeffs::zero(chart.ngens(), block.len());
    for (ib, &beta) in block.iter().enumerate() {
        for (ia, &alpha) in block.iter().enumerate() {
            for j in 0..chart.n() {
                for kk in 0..chart.n() {
                    k.get_mut(j, kk)[(ib, ia)] += c.get(j, kk, alpha - 1, beta - 1);
                }
            }
            for lambda in 1..=(r - rho_l) {
                if let (Some(x), Some(y)) = (chart.zeta_gen(lambda, alpha), chart.zeta_gen(lambda, beta)) {
                    k.get_mut(x, y)[(ib, ia)] -= Complex64::one();
                }
            }
            for mu in (r - rho_ell + 1)..=r {
                if let (Some(x), Some(y)) = (chart.zeta_gen(beta, mu), chart.zeta_gen(alpha, mu)) {
                    k.get_mut(x, y)[(ib, ia)] += Complex64::one();
                }
            }
        }
    }
    Ok(k)
}

/// [`curvature_center_coeffs`] as a matrix of forms.
pub fn curvature_center(chart: &FlagChart, spec: &UniversalBundleSpec, c: &CurvatureTensor) -> Result<FormMatrix> {
    Ok(curvature_center_coeffs(chart, spec, c)?.to_form_matrix())
}

/// Horizontal curvature of `U_l/U_ℓ` at the flag spanned by the columns of `V`:
/// `θ[μ][λ] = ⟨Θ v_λ, v_μ⟩` for `λ, μ` in the bundle's block.
pub fn theta_intrinsic(spec: &UniversalBundleSpec, v: &CMat, c: &CurvatureTensor) -> Result<FormMatrix> {
    let va = theta_frame(spec, v, c)?;
    Ok(c.form_matrix(c.n()).sandwich(&va.adjoint(), &va))
}

/// The same endomorphism written on `E`: `V_A θ V_A^H`, which only depends on the flag.
pub fn theta_ambient(spec: &UniversalBundleSpec, v: &CMat, c: &CurvatureTensor) -> Result<FormMatrix> {
    let va = theta_frame(spec, v, c)?;
    let proj = va.matmul(&va.adjoint());
    Ok(c.form_matrix(c.n()).sandwich(&proj, &proj))
}

fn theta_frame(spec: &UniversalBundleSpec, v: &CMat, c: &CurvatureTensor) -> Result<CMat> {
    let r = c.r();
    if v.rows() != r || v.cols() != r || spec.rho().rank() != r {
        return Err(Error::RankMismatch {
            expected: r,
            found: v.cols(),
        });
    }
    let defect = v.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let (a, _) = blocks(spec);
    Ok(v.select(&(0..r).collect::<Vec<_>>(), &a))
}

/// Unitary frame adapted to the flag at `p`: Gram–Schmidt on `ε_r, ε_{r-1}, …, ε_1`.
pub fn orthonormal_flag_frame(chart: &FlagChart, p: &ChartPoint) -> CMat {
    let f = frames_eps(chart, p);
    let r = chart.rank();
    let mut v = f.clone();
    for j in (0..r).rev() {
        for i in (j + 1)..r {
            let mut d = Complex64::zero();
            for row in 0..r {
                d += v[(row, i)].conj() * v[(row, j)];
            }
            for row in 0..r {
                let x = v[(row, i)];
                v[(row, j)] -= d * x;
            }
        }
        let norm = (0..r).map(|row| v[(row, j)].norm_sqr()).sum::<f64>().sqrt();
        for row in 0..r {
            v[(row, j)] /= norm;
        }
    }
    v
}

/// Orthogonal lift `W = Φ_A + Φ_B u` of the quotient frame (columns in `E`).
pub fn quotient_lift(chart: &FlagChart, spec: &UniversalBundleSpec, p: &ChartPoint) -> Result<CMat> {
    let r = chart.rank();
    let f = frames_eps(chart, p);
    let g = f.adjoint().matmul(&f);
    let (a, b) = blocks(spec);
    let rows: Vec<usize> = (0..r).collect();
    let fa = f.select(&rows, &a);
    if b.is_empty() {
        return Ok(fa);
    }
    let gbb_inv = g.select(&b, &b).inverse().ok_or(Error::NotPositiveDefinite)?;
    let u = gbb_inv.matmul(&g.select(&b, &a)).scale(-Complex64::one());
    Ok(fa.add(&f.select(&rows, &b).matmul(&u)))
}

/// Finite-difference curvature with its quality metric.
#[derive(Clone, Debug, PartialEq)]
pub struct FdCurvature {
    pub coeffs: CurvatureCoeffs,
    /// Induced metric at the point.
    pub metric: CMat,
    /// Relative Hermiticity defect before symmetrization.
    pub hermitian_defect: f64,
}

impl FdCurvature {
    pub fn form_matrix(&self) -> FormMatrix {
        self.coeffs.to_form_matrix()
    }
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Curvature of `U_l/U_ℓ` at `(x_0, p)` by fourth-order central differences of
/// [`metric_universal`] in every real direction of `(z, ζ)`.
pub fn curvature_at(
    chart: &FlagChart,
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<FdCurvature> {
    check_spec(chart, spec, c)?;
    let (n, dim) = (chart.n(), chart.ngens());
    let (a_idx, b_idx) = blocks(spec);
    let eval = |shifts: &[(usize, f64)]| -> Result<CMat> {
        let mut z = vec![Complex64::zero(); n];
        let mut zeta = p.zeta.clone();
        for &(u, t) in shifts {
            let (coord, imag) = (u / 2, u % 2 == 1);
            let dz = if imag { Complex64::new(0.0, t) } else { Complex64::new(t, 0.0) };
            if coord < n {
                z[coord] += dz;
            } else {
                zeta[coord - n] += dz;
            }
        }
        let g = full_gram(chart, c, &z, &zeta)?;
        schur_complement(&g, &a_idx, &b_idx)
    };
    let h = fd_step;
    let real = 2 * dim;
    let s0 = eval(&[])?;
    let rk = s0.rows();
    let mut grad = Vec::with_capacity(real);
    for u in 0..real {
        let mut acc = CMat::zeros(rk, rk);
        for &(o, w) in &D1 {
            acc = acc.add(&eval(&[(u, o * h)])?.scale(Complex64::new(w / (12.0 * h), 0.0)));
        }
        grad.push(acc);
    }
    let mut hess = vec![CMat::zeros(rk, rk); real * real];
    for u in 0..real {
        let mut acc = s0.scale(Complex64::new(-30.0, 0.0));
        for &(o, w) in &[(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            acc = acc.add(&eval(&[(u, o * h)])?.scale(Complex64::new(w, 0.0)));
        }
        hess[u * real + u] = acc.scale(Complex64::new(1.0 / (12.0 * h * h), 0.0));
        for v in (u + 1)..real {
            let mut acc = CMat::zeros(rk, rk);
            for &(o1, w1) in &D1 {
                for &(o2, w2) in &D1 {
                    acc = acc.add(&eval(&[(u, o1 * h), (v, o2 * h)])?.scale(Complex64::new(w1 * w2, 0.0)));
                }
            }
            let m = acc.scale(Complex64::new(1.0 / (144.0 * h * h), 0.0));
            hess[u * real + v] = m.clone();
            hess[v * real + u] = m;
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let quarter = Complex64::new(0.25, 0.0);
    let d_hol: Vec<CMat> = (0..dim)
        .map(|a| grad[2 * a].sub(&grad[2 * a + 1].scale(i)).scale(half))
        .collect();
    let d_anti: Vec<CMat> = (0..dim)
        .map(|a| grad[2 * a].add(&grad[2 * a + 1].scale(i)).scale(half))
        .collect();
    let hs = |u: usize, v: usize| &hess[u * real + v];
    let s_inv = s0.inverse().ok_or(Error::NotPositiveDefinite)?;
    let mut k = CurvatureCoeffs::zero(dim, rk);
    for a in 0..dim {
        for b in 0..dim {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            let re = hs(xa, xb).add(hs(ya, yb));
            let im = hs(xa, yb).sub(hs(ya, xb));
            let dd = re.add(&im.scale(i)).scale(quarter);
            let first = s_inv.matmul(&d_anti[b]).matmul(&s_inv).matmul(&d_hol[a]);
            *k.get_mut(a, b) = first.sub(&s_inv.matmul(&dd));
        }
    }
    let scale = k.max_abs().max(1.0);
    let defect = k.metric_hermitian_defect(&s0) / scale;
    if defect > FD_HERMITIAN_TOL {
        return Err(Error::StepTooLarge(defect));
    }
    k.symmetrize(&s0, &s_inv);
    Ok(FdCurvature {
        coeffs: k,
        metric: s0,
        hermitian_defect: defect,
    })
}

/// Value, holomorphic and antiholomorphic first derivatives and mixed second
/// derivatives `∂_a ∂_b̄` of a matrix function.
#[derive(Clone, Debug)]
struct Jet {
    dim: usize,
    v: CMat,
    d: Vec<CMat>,
    db: Vec<CMat>,
    dd: Vec<CMat>,
}

impl Jet {
    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self {
            dim: self.dim,
            v: self.v.select(rows, cols),
            d: self.d.iter().map(|m| m.select(rows, cols)).collect(),
            db: self.db.iter().map(|m| m.select(rows, cols)).collect(),
            dd: self.dd.iter().map(|m| m.select(rows, cols)).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let dim = self.dim;
        let mut dd = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let m = self.dd[a * dim + b]
                    .matmul(&o.v)
                    .add(&self.d[a].matmul(&o.db[b]))
                    .add(&self.db[b].matmul(&o.d[a]))
                    .add(&self.v.matmul(&o.dd[a * dim + b]));
                dd.push(m);
            }
        }
        Self {
            dim,
            v: self.v.matmul(&o.v),
            d: (0..dim).map(|a| self.d[a].matmul(&o.v).add(&self.v.matmul(&o.d[a]))).collect(),
            db: (0..dim).map(|b| self.db[b].matmul(&o.v).add(&self.v.matmul(&o.db[b]))).collect(),
            dd,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            dim: self.dim,
            v: self.v.sub(&o.v),
            d: self.d.iter().zip(&o.d).map(|(x, y)| x.sub(y)).collect(),
            db: self.db.iter().zip(&o.db).map(|(x, y)| x.sub(y)).collect(),
            dd: self.dd.iter().zip(&o.dd).map(|(x, y)| x.sub(y)).collect(),
        }
    }

    fn inverse(&self) -> Option<Self> {
        let dim = self.dim;
        let y = self.v.inverse()?;
        let neg = -Complex64::one();
        let ya: Vec<CMat> = self.d.iter().map(|m| y.matmul(m).matmul(&y)).collect();
        let yb: Vec<CMat> = self.db.iter().map(|m| y.matmul(m).matmul(&y)).collect();
        let mut dd = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let m = yb[b]
                    .matmul(&self.d[a])
                    .matmul(&y)
                    .add(&ya[a].matmul(&self.db[b]).matmul(&y))
                    .sub(&y.matmul(&self.dd[a * dim + b]).matmul(&y));
                dd.push(m);
            }
        }
        Some(Self {
            dim,
            v: y,
            d: ya.into_iter().map(|m| m.scale(neg)).collect(),
            db: yb.into_iter().map(|m| m.scale(neg)).collect(),
            dd,
        })
    }
}

/// Jet of `G = Φ^H H Φ` at `z = 0`. `Φ` is affine in `ζ` and `H` has no
/// first derivatives at `z = 0`, so every term is exact.
fn gram_jet(chart: &FlagChart, c: &CurvatureTensor, zeta: &[Complex64]) -> Jet {
    let (n, dim, r) = (chart.n(), chart.ngens(), chart.rank());
    let f = frames_from(chart, zeta);
    let fh = f.adjoint();
    let dphi: Vec<Option<(usize, usize)>> = (0..dim)
        .map(|a| if a < n { None } else { Some(chart.pairs[a - n]) })
        .collect();
    // Φ^H ∂_aΦ: only column μ-1 is nonzero and equals column λ-1 of Φ^H.
    let d: Vec<CMat> = dphi
        .iter()
        .map(|e| match e {
            None => CMat::zeros(r, r),
            Some((lambda, mu)) => CMat::from_fn(r, r, |i, j| if j == mu - 1 { fh[(i, lambda - 1)] } else { Complex64::zero() }),
        })
        .collect();
    let db: Vec<CMat> = d.iter().map(|m| m.adjoint()).collect();
    let mut dd = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let m = match (dphi[a], dphi[b]) {
                (Some((la, ma)), Some((lb, mb))) => CMat::from_fn(r, r, |i, j| {
                    if la == lb && i == mb - 1 && j == ma - 1 {
                        Complex64::one()
                    } else {
                        Complex64::zero()
                    }
                }),
                (None, None) => fh.matmul(&c.coefficient_matrix(a, b)).matmul(&f).scale(-Complex64::one()),
                _ => CMat::zeros(r, r),
            };
            dd.push(m);
        }
    }
    Jet {
        dim,
        v: fh.matmul(&f),
        d,
        db,
        dd,
    }
}

/// Curvature of `U_l/U_ℓ` at `(x_0, p)` by exact differentiation of the induced metric.
pub fn curvature_analytic(
    chart: &FlagChart,
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
    p: &ChartPoint,
) -> Result<CurvatureCoeffs> {
    check_spec(chart, spec, c)?;
    curvature_jet(chart, spec, c, &p.zeta)
}

fn curvature_jet(
    chart: &FlagChart,
    spec: &UniversalBundleSpec,
    c: &CurvatureTensor,
    zeta: &[Complex64],
) -> Result<CurvatureCoeffs> {
    let g = gram_jet(chart, c, zeta);
    let (a, b) = blocks(spec);
    let s = if b.is_empty() {
        g.select(&a, &a)
    } else {
        let inv = g.select(&b, &b).inverse().ok_or(Error::NotPositiveDefinite)?;
        g.select(&a, &a).sub(&g.select(&a, &b).mul(&inv).mul(&g.select(&b, &a)))
    };
    let s_inv = s.v.inverse().ok_or(Error::NotPositiveDefinite)?;
    let dim = g.dim;
    let mut k = CurvatureCoeffs::zero(dim, a.len());
    let left: Vec<CMat> = s.db.iter().map(|m| s_inv.matmul(m).matmul(&s_inv)).collect();
    for x in 0..dim {
        for y in 0..dim {
            *k.get_mut(x, y) = left[y].matmul(&s.d[x]).sub(&s_inv.matmul(&s.dd[x * dim + y]));
        }
    }
    Ok(k)
}

/// Sampling density over the chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposal {
    /// Independent coordinates with density `1/(π(1+|w|²)²)` each.
    ProductFs,
    /// `ζ = g/g_0` for Gaussian `g`, density `d!/π^d (1+|ζ|²)^{-(d+1)}`.
    ProjectiveFs,
    /// Independent coordinates with the heavier tail `1/(2π) (1+|w|²)^{-3/2}`.
    HeavyTail,
}

impl Proposal {
    /// Projective proposal when the fiber is a projective space.
    pub fn for_chart(chart: &FlagChart) -> Self {
        if chart.is_projective() {
            Proposal::ProjectiveFs
        } else {
            Proposal::ProductFs
        }
    }

    /// Draw `ζ` and return it with its density.
    pub fn draw(&self, rng: &mut impl RngCore, d: usize) -> (Vec<Complex64>, f64) {
        let pi = core::f64::consts::PI;
        match self {
            Proposal::ProductFs => {
                let mut dens = 1.0;
                let zeta = (0..d)
                    .map(|_| {
                        let num = rng::complex_normal(rng);
                        let den = rng::complex_normal(rng);
                        let w = num / den;
                        dens *= 1.0 / (pi * (1.0 + w.norm_sqr()).powi(2));
                        w
                    })
                    .collect();
                (zeta, dens)
            }
            Proposal::ProjectiveFs => {
                let g0 = rng::complex_normal(rng);
                let zeta: Vec<Complex64> = (0..d).map(|_| rng::complex_normal(rng) / g0).collect();
                let norm: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
                let fact: f64 = (1..=d).map(|i| i as f64).product();
                let dens = fact / pi.powi(d as i32) * (1.0 + norm).powi(-(d as i32 + 1));
                (zeta, dens)
            }
            Proposal::HeavyTail => {
                let mut dens = 1.0;
                let zeta = (0..d)
                    .map(|_| {
                        // P(|w|² ≤ s) = 1 - (1+s)^{-1/2}
                        let u = rng::unit_open0(rng);
                        let s = 1.0 / (u * u) - 1.0;
                        let w = rng::phase(rng) * s.sqrt();
                        dens *= 1.0 / (2.0 * pi * (1.0 + s) * (1.0 + s).sqrt());
                        w
                    })
                    .collect();
                (zeta, dens)
            }
        }
    }
}

/// Monte Carlo settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub num_samples: u64,
    pub seed: u64,
    /// Samples per reduction block; fixes the summation order.
    pub block_size: u64,
}

impl SamplerConfig {
    pub fn new(num_samples: u64, seed: u64) -> Self {
        Self {
            num_samples,
            seed,
            block_size: 4096,
        }
    }

    pub fn num_blocks(&self) -> u64 {
        self.num_samples.div_ceil(self.block_size.max(1))
    }
}

/// Running sums for one block of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSums {
    pub count: u64,
    pub sum: Vec<Complex64>,
    pub sum_sq: Vec<f64>,
    /// Non-finite draws that were redrawn.
    pub redrawn: u64,
    /// Samples dropped after exhausting redraws.
    pub dropped: u64,
}

impl BlockSums {
    pub fn new(len: usize) -> Self {
        Self {
            count: 0,
            sum: vec![Complex64::zero(); len],
            sum_sq: vec![0.0; len],
            redrawn: 0,
            dropped: 0,
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.redrawn += other.redrawn;
        self.dropped += other.dropped;
    }
}

/// Fiber integrand of `F(c_•(U))` written against `vol_V ∧ dz_J ∧ dz̄_K`.
#[derive(Clone, Debug)]
pub struct FiberIntegrand {
    chart: FlagChart,
    expr: ChernExpr,
    tensor: CurvatureTensor,
    proposal: Proposal,
    /// Base degree `k` of the result, `None` when the push-forward vanishes for degree reasons.
    k: Option<usize>,
    /// `(J, K, key S, key T, basis coefficient)`.
    slots: Vec<(u32, u32, u32, u32, Complex64)>,
}

fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

impl FiberIntegrand {
    pub fn new(chart: &FlagChart, expr: &ChernExpr, c: &CurvatureTensor) -> Result<Self> {
        expr.validate(chart.rho())?;
        if c.r() != chart.rank() {
            return Err(Error::RankMismatch {
                expected: chart.rank(),
                found: c.r(),
            });
        }
        if c.n() != chart.n() {
            return Err(Error::DegreeMismatch {
                expected: chart.n(),
                found: c.n(),
            });
        }
        let (_, poly) = expr.to_symbol_poly(chart.rho())?;
        let degree = if poly.is_zero() {
            None
        } else {
            Some(expr.weighted_degree(chart.rho())?.ok_or(Error::NotHomogeneous)?)
        };
        let (n, d) = (chart.n(), chart.d());
        let k = match degree {
            Some(deg) if deg >= d && deg - d <= n => Some(deg - d),
            _ => None,
        };
        let mut slots = Vec::new();
        if let Some(k) = k {
            let g = chart.ngens();
            let half_i = Complex64::new(0.0, 0.5);
            let mut vol = ExtForm::one(g);
            for p in 0..d {
                vol = vol.wedge(&ExtForm::dz_dzbar(g, n + p, n + p, half_i))?;
            }
            let vmask = chart.vertical_mask();
            for &jm in &subsets(n, k) {
                for &km in &subsets(n, k) {
                    let j: Vec<usize> = (0..n).filter(|i| jm & (1 << i) != 0).collect();
                    let kk: Vec<usize> = (0..n).filter(|i| km & (1 << i) != 0).collect();
                    let basis = vol.wedge(&ExtForm::term(g, &j, &kk, Complex64::one()))?;
                    let (s, t) = (jm | vmask, km | vmask);
                    slots.push((jm, km, s, t, basis.coeff(s, t)));
                }
            }
        }
        Ok(Self {
            chart: chart.clone(),
            expr: expr.clone(),
            tensor: c.clone(),
            proposal: Proposal::for_chart(chart),
            k,
            slots,
        })
    }

    pub fn with_proposal(mut self, proposal: Proposal) -> Self {
        self.proposal = proposal;
        self
    }

    pub fn proposal(&self) -> Proposal {
        self.proposal
    }

    pub fn chart(&self) -> &FlagChart {
        &self.chart
    }

    /// Base degree of the push-forward, if it can be nonzero.
    pub fn base_degree(&self) -> Option<usize> {
        self.k
    }

    /// Coefficient slots `(J, K)` as bitsets of base generators.
    pub fn slots(&self) -> Vec<(u32, u32)> {
        self.slots.iter().map(|s| (s.0, s.1)).collect()
    }

    /// The top-degree form `F(c_•(U))` at `ζ`.
    pub fn form_at(&self, zeta: &[Complex64]) -> Result<ExtForm> {
        let g = self.chart.ngens();
        let mut cache: BTreeMap<UniversalBundleSpec, Vec<ExtForm>> = BTreeMap::new();
        let rho = self.chart.rho().clone();
        let one = ExtForm::one(g);
        self.expr.eval(
            &one,
            &|q| ExtForm::scalar(g, Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)),
            &mut |j, b| {
                if j == 0 {
                    return Ok(ExtForm::one(g));
                }
                let spec = b.resolve(&rho)?;
                if !cache.contains_key(&spec) {
                    let k = curvature_jet(&self.chart, &spec, &self.tensor, zeta)?;
                    cache.insert(spec.clone(), chern_forms(&k.to_form_matrix()));
                }
                Ok(cache[&spec][j].clone())
            },
        )
    }

    /// Coefficients `γ_{JK}(ζ)` in slot order.
    pub fn coefficients_at(&self, zeta: &[Complex64]) -> Result<Vec<Complex64>> {
        let f = self.form_at(zeta)?;
        Ok(self.slots.iter().map(|&(_, _, s, t, b)| f.coeff(s, t) / b).collect())
    }

    /// Importance-weighted sample number `index`.
    pub fn sample(&self, seed: u64, index: u64) -> (Option<Vec<Complex64>>, u64) {
        let mut rng = rng::stream(seed, index);
        let mut redrawn = 0;
        for _ in 0..MAX_REDRAWS {
            let (zeta, dens) = self.proposal.draw(&mut rng, self.chart.d());
            let ok = dens > 0.0 && dens.is_finite() && zeta.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if ok {
                if let Ok(vals) = self.coefficients_at(&zeta) {
                    let w: Vec<Complex64> = vals.into_iter().map(|v| v / dens).collect();
                    if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                        return (Some(w), redrawn);
                    }
                }
            }
            redrawn += 1;
        }
        (None, redrawn)
    }

    /// Sums over block `b` of the sampler.
    pub fn block(&self, cfg: &SamplerConfig, b: u64) -> BlockSums {
        let mut acc = BlockSums::new(self.slots.len());
        if self.k.is_none() {
            return acc;
        }
        let start = b * cfg.block_size;
        let end = (start + cfg.block_size).min(cfg.num_samples);
        for i in start..end {
            let (w, redrawn) = self.sample(cfg.seed, i);
            acc.redrawn += redrawn;
            acc.count += 1;
            match w {
                Some(w) => {
                    for (slot, v) in w.iter().enumerate() {
                        acc.sum[slot] += v;
                        acc.sum_sq[slot] += v.norm_sqr();
                    }
                }
                None => acc.dropped += 1,
            }
        }
        acc
    }

    /// Turn merged sums into an estimate.
    pub fn finish(&self, sums: &BlockSums) -> NumericPushforward {
        let n = self.chart.n();
        let count = sums.count.max(1) as f64;
        let mut coeffs = Vec::new();
        let mut form = ExtForm::zero(n);
        for (slot, &(jm, km, _, _, _)) in self.slots.iter().enumerate() {
            let mean = sums.sum[slot] / count;
            let var = (sums.sum_sq[slot] / count - mean.norm_sqr()).max(0.0);
            let se = if sums.count > 1 { (var / (count - 1.0)).sqrt() } else { f64::INFINITY };
            coeffs.push(CoefficientEstimate {
                j: jm,
                k: km,
                estimate: mean,
                std_error: se,
            });
            if mean != Complex64::zero() {
                form = form.add(&ExtForm::term(n, &bits(jm), &bits(km), mean));
            }
        }
        NumericPushforward {
            form,
            coeffs,
            samples: sums.count,
            redrawn: sums.redrawn,
            dropped: sums.dropped,
        }
    }
}

fn bits(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m & (1 << i) != 0).collect()
}

/// One coefficient of `dz_J ∧ dz̄_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientEstimate {
    pub j: u32,
    pub k: u32,
    pub estimate: Complex64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericPushforward {
    pub form: ExtForm,
    pub coeffs: Vec<CoefficientEstimate>,
    pub samples: u64,
    pub redrawn: u64,
    pub dropped: u64,
}

/// Monte Carlo fiber integral of `F_expr`, blocks reduced in order.
pub fn pushforward_numeric(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
    cfg: &SamplerConfig,
) -> Result<NumericPushforward> {
    let integrand = FiberIntegrand::new(chart, expr, c)?;
    let mut sums = BlockSums::new(integrand.slots.len());
    for b in 0..cfg.num_blocks() {
        sums.merge(&integrand.block(cfg, b));
    }
    Ok(integrand.finish(&sums))
}

/// Symbolic side `Φ(c(E,h))` of the main identity, as a form on the base.
pub fn symbolic_pushforward_form(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
) -> Result<(ChernPoly, ExtForm)> {
    let phi = pushforward_dp(&expand_expression(expr, chart.rho())?, chart.rho());
    let n = c.n();
    let cs = chern_forms(&c.form_matrix(n));
    let value = phi.evaluate(&cs[1..], &ExtForm::one(n), |q| {
        ExtForm::scalar(n, Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0))
    });
    Ok((phi, value))
}

/// Per-coefficient comparison row.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRow {
    pub j: u32,
    pub k: u32,
    pub estimate: Complex64,
    pub truth: Complex64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub phi: ChernPoly,
    pub rows: Vec<ResidualRow>,
    /// `‖estimate - truth‖ / ‖truth‖` (absolute when the truth vanishes).
    pub relative_residual: f64,
    /// Combined standard error on the same scale.
    pub relative_std_error: f64,
    pub samples: u64,
    pub dropped: u64,
}

impl ResidualReport {
    /// Residual within `tol` and within `sigmas` standard errors.
    pub fn passes(&self, tol: f64, sigmas: f64) -> bool {
        self.relative_residual <= tol && self.relative_residual <= sigmas * self.relative_std_error.max(1e-15)
    }
}

/// Compare the Monte Carlo fiber integral with `Φ` from the push-forward formula.
pub fn verify_main_theorem(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    let numeric = pushforward_numeric(chart, expr, c, cfg)?;
    residual_report(chart, expr, c, &numeric)
}

/// Residual report for an already computed numeric push-forward.
pub fn residual_report(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
    numeric: &NumericPushforward,
) -> Result<ResidualReport> {
    let (phi, truth) = symbolic_pushforward_form(chart, expr, c)?;
    let mut rows: Vec<ResidualRow> = numeric
        .coeffs
        .iter()
        .map(|e| ResidualRow {
            j: e.j,
            k: e.k,
            estimate: e.estimate,
            truth: truth.coeff(e.j, e.k),
            std_error: e.std_error,
        })
        .collect();
    // Terms of the symbolic side that the numeric side has no slot for.
    for (s, t, v) in truth.terms() {
        if !rows.iter().any(|r| r.j == s && r.k == t) {
            rows.push(ResidualRow {
                j: s,
                k: t,
                estimate: Complex64::zero(),
                truth: v,
                std_error: 0.0,
            });
        }
    }
    let diff: f64 = rows.iter().map(|r| (r.estimate - r.truth).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = rows.iter().map(|r| r.truth.norm_sqr()).sum::<f64>().sqrt();
    let se: f64 = rows.iter().map(|r| r.std_error * r.std_error).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    Ok(ResidualReport {
        phi,
        rows,
        relative_residual: diff / scale,
        relative_std_error: se / scale,
        samples: numeric.samples,
        dropped: numeric.dropped,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Random Hermitian tensor: a Griffiths sample minus a smaller one.
pub fn random_tensor(n: usize, r: usize, seed: u64) -> CurvatureTensor {
    let a = crate::formlab::griffiths_sample(n, r, 2, seed);
    let b = crate::formlab::griffiths_sample(n, r, 1, seed ^ 0x9e37_79b9).scale(-0.5);
    a.add(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::DimensionSequence;
    use crate::formlab::griffiths_sample;
    use crate::rootcalc::BundleSymbol;

    fn rho(v: &[usize]) -> DimensionSequence {
        DimensionSequence::new(v.to_vec()).unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(r: &DimensionSequence, ell: usize, l: usize) -> UniversalBundleSpec {
        UniversalBundleSpec::new(r.clone(), ell, l).unwrap()
    }

    fn all_specs(r: &DimensionSequence) -> Vec<UniversalBundleSpec> {
        let m = r.steps();
        let mut out = Vec::new();
        for l in 1..=m {
            for ell in 0..l {
                out.push(spec(r, ell, l));
            }
        }
        out
    }

    #[test]
    fn frames_and_gram() {
        let ch = FlagChart::new(rho(&[0, 1, 2]), 1).unwrap();
        assert_eq!(frames_eps(&ch, &ChartPoint::center(&ch)), CMat::identity(2));
        let c = cx(0.3, -0.4);
        let p = ChartPoint::new(&ch, vec![c]).unwrap();
        let f = frames_eps(&ch, &p);
        assert_eq!((f[(0, 1)], f[(1, 1)], f[(0, 0)], f[(1, 0)]), (c, Complex64::one(), Complex64::one(), Complex64::zero()));
        let g = gram(&ch, &p);
        // G[1][0] = ⟨ε_1, ε_2⟩ = ζ̄_{12}
        assert_eq!(g[(1, 0)], c.conj());
        assert!((g[(1, 1)] - (1.0 + c.norm_sqr())).norm() < 1e-15);

        let ch3 = FlagChart::new(DimensionSequence::complete(3), 0).unwrap();
        assert_eq!(ch3.pairs(), &[(1, 2), (1, 3), (2, 3)]);
        let p3 = ChartPoint::new(&ch3, vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)]).unwrap();
        let f3 = frames_eps(&ch3, &p3);
        assert_eq!(f3[(0, 2)], cx(2.0, 0.0));
        assert_eq!(f3[(1, 2)], cx(3.0, 0.0));
        assert_eq!(f3[(0, 1)], cx(1.0, 0.0));
    }

    #[test]
    fn tautological_block_gram() {
        // ρ = (0,2,4): block α ∈ {3,4}, G_{αβ} = δ + Σ_λ ζ_{λα} ζ̄_{λβ}.
        let r = rho(&[0, 2, 4]);
        let ch = FlagChart::new(r.clone(), 1).unwrap();
        let mut g = rng::stream(3, 0);
        let p = ChartPoint::random(&ch, &mut g, 0.7);
        let gm = gram(&ch, &p);
        for a in 3..=4 {
            for b in 3..=4 {
                let mut want = if a == b { Complex64::one() } else { Complex64::zero() };
                for lambda in 1..=2 {
                    let za = p.zeta()[ch.pair_index(lambda, a).unwrap()];
                    let zb = p.zeta()[ch.pair_index(lambda, b).unwrap()];
                    want += za * zb.conj();
                }
                // entry (α, β) = ⟨ε_α, ε_β⟩ = G[β][α]
                assert!((gm[(b - 1, a - 1)] - want).norm() < 1e-14);
            }
        }
        let c = random_tensor(1, 4, 2);
        let m = metric_universal(&spec(&r, 0, 1), &c, &[Complex64::zero()], &p).unwrap();
        assert!(m.sub(&gm.select(&[2, 3], &[2, 3])).max_abs() < 1e-15);
        let full = metric_universal(&spec(&r, 0, 2), &c, &[Complex64::zero()], &p).unwrap();
        assert!(full.sub(&gm).max_abs() < 1e-15);
        let big = c.scale(1e6);
        assert_eq!(
            metric_universal(&spec(&r, 0, 1), &big, &[cx(1.0, 0.0)], &p),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn splitting_is_minus_conjugate_zeta_to_first_order() {
        let r = DimensionSequence::complete(3);
        let ch = FlagChart::new(r.clone(), 2).unwrap();
        let c = random_tensor(2, 3, 5);
        let sp = spec(&r, 1, 2);
        let mut g = rng::stream(1, 0);
        let dir = ChartPoint::random(&ch, &mut g, 1.0);
        let scales = [1e-1, 1e-2, 1e-3];
        let mut res = Vec::new();
        for &t in &scales {
            let p = ChartPoint::new(&ch, dir.zeta().iter().map(|z| z * t).collect()).unwrap();
            let u = splitting_coefficients(&sp, &c, &[Complex64::zero(); 2], &p).unwrap();
            // block A = {2}, B = {3}: u_{23} = -ζ̄_{23}
            let want = -p.zeta()[ch.pair_index(2, 3).unwrap()].conj();
            res.push((u[(0, 0)] - want).norm());
        }
        assert!(loglog_slope(&scales, &res) >= 1.9);
    }

    #[test]
    fn center_formula_examples() {
        let r = rho(&[0, 1, 2]);
        let ch = FlagChart::new(r.clone(), 1).unwrap();
        let zero = CurvatureTensor::zero(1, 2);
        let k = curvature_center(&ch, &spec(&r, 0, 1), &zero).unwrap();
        assert_eq!(k.entries[0][0], ExtForm::dz_dzbar(2, 1, 1, -Complex64::one()));
        let q = curvature_center(&ch, &spec(&r, 1, 2), &zero).unwrap();
        assert_eq!(q.entries[0][0], ExtForm::dz_dzbar(2, 1, 1, Complex64::one()));
    }

    #[test]
    fn center_formula_is_hermitian_and_telescopes() {
        for (i, v) in [vec![0, 1, 3], vec![0, 1, 2, 3], vec![0, 2, 4], vec![0, 1, 3, 4]].iter().enumerate() {
            let r = rho(v);
            let ch = FlagChart::new(r.clone(), 2).unwrap();
            let c = random_tensor(2, r.rank(), i as u64);
            let mut total = ExtForm::zero(ch.ngens());
            for l in 1..=r.steps() {
                let m = curvature_center(&ch, &spec(&r, l - 1, l), &c).unwrap();
                assert!(m.hermitian_defect() < 1e-14);
                total = total.add(&m.trace());
            }
            let base = c.form_matrix(2).trace().extend(ch.ngens());
            assert!(total.sub(&base).max_abs() < 1e-14, "{v:?}");
            for s in all_specs(&r) {
                assert!(curvature_center(&ch, &s, &c).unwrap().hermitian_defect() < 1e-14);
            }
        }
    }

    #[test]
    fn fd_matches_center_formula() {
        let cases = [(vec![0, 1, 2], 1usize, 0usize, 1usize), (vec![0, 1, 3], 2, 1, 2), (vec![0, 1, 2, 3], 2, 0, 2), (vec![0, 2, 4], 1, 0, 2)];
        for (i, (v, n, ell, l)) in cases.iter().enumerate() {
            let r = rho(v);
            let ch = FlagChart::new(r.clone(), *n).unwrap();
            let c = random_tensor(*n, r.rank(), 10 + i as u64);
            let sp = spec(&r, *ell, *l);
            let fd = curvature_at(&ch, &sp, &c, &ChartPoint::center(&ch), FD_STEP).unwrap();
            let exact = curvature_center_coeffs(&ch, &sp, &c).unwrap();
            let err = fd.coeffs.sub(&exact).max_abs() / exact.max_abs();
            assert!(err < 1e-5, "{v:?}: {err}");
        }
    }

    #[test]
    fn analytic_matches_fd_off_center() {
        let r = rho(&[0, 1, 3, 4]);
        let ch = FlagChart::new(r.clone(), 2).unwrap();
        let c = random_tensor(2, 4, 4);
        let mut g = rng::stream(8, 0);
        let p = ChartPoint::random(&ch, &mut g, 0.6);
        for sp in all_specs(&r) {
            let fd = curvature_at(&ch, &sp, &c, &p, FD_STEP).unwrap();
            let an = curvature_analytic(&ch, &sp, &c, &p).unwrap();
            let err = fd.coeffs.sub(&an).max_abs() / an.max_abs();
            assert!(err < 1e-6, "{sp}: {err}");
            let center = curvature_analytic(&ch, &sp, &c, &ChartPoint::center(&ch)).unwrap();
            assert!(center.sub(&curvature_center_coeffs(&ch, &sp, &c).unwrap()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_blocks_vanish() {
        let r = DimensionSequence::complete(3);
        let ch = FlagChart::new(r.clone(), 2).unwrap();
        let c = random_tensor(2, 3, 6);
        let n = ch.n();
        for s in 0..3 {
            let mut g = rng::stream(40, s);
            let p = ChartPoint::random(&ch, &mut g, 0.8);
            for sp in all_specs(&r) {
                let fd = curvature_at(&ch, &sp, &c, &p, FD_STEP).unwrap();
                let mixed = fd.coeffs.max_abs_where(|a, b| (a < n) != (b < n));
                assert!(mixed <= 1e-6 * fd.coeffs.max_abs(), "{sp}: {mixed}");
            }
        }
    }

    #[test]
    fn horizontal_block_is_intrinsic() {
        let r = rho(&[0, 1, 3, 4]);
        let ch = FlagChart::new(r.clone(), 2).unwrap();
        let c = random_tensor(2, 4, 12);
        let mut g = rng::stream(2, 0);
        let p = ChartPoint::random(&ch, &mut g, 0.9);
        let v = orthonormal_flag_frame(&ch, &p);
        assert!(v.unitarity_defect() < 1e-12);
        for sp in all_specs(&r) {
            let k = curvature_analytic(&ch, &sp, &c, &p).unwrap();
            let s = metric_universal(&sp, &c, &[Complex64::zero(); 2], &p).unwrap();
            let w = quotient_lift(&ch, &sp, &p).unwrap();
            let amb = k.horizontal(2).sandwich(&w, &s.inverse().unwrap().matmul(&w.adjoint()));
            let theta = theta_ambient(&sp, &v, &c).unwrap();
            let diff = amb.to_form_matrix().sub(&theta).max_abs();
            assert!(diff < 1e-12, "{sp}: {diff}");
        }
    }

    #[test]
    fn theta_invariance_and_decomposition() {
        let r = rho(&[0, 1, 3]);
        let ch = FlagChart::new(r.clone(), 2).unwrap();
        let c = random_tensor(2, 3, 13);
        let id = CMat::identity(3);
        for sp in all_specs(&r) {
            let center = curvature_center(&ch, &sp, &c).unwrap();
            let th = theta_intrinsic(&sp, &id, &c).unwrap().extend(ch.ngens());
            let vert = center.sub(&th);
            let hmask = (1u32 << 2) - 1;
            for row in &vert.entries {
                for f in row {
                    assert!(f.terms().all(|(s, t, _)| (s | t) & hmask == 0));
                }
            }
        }
        // block-diagonal unitary re-framing
        let mut g = rng::stream(9, 0);
        let blk = crate::formlab::orthonormal_frame(&mut g, 2, 2);
        let ph = rng::phase(&mut g);
        let mut u = CMat::zeros(3, 3);
        u[(0, 0)] = blk[(0, 0)];
        u[(0, 1)] = blk[(0, 1)];
        u[(1, 0)] = blk[(1, 0)];
        u[(1, 1)] = blk[(1, 1)];
        u[(2, 2)] = ph;
        let sp = spec(&r, 1, 2);
        let a = theta_ambient(&sp, &id, &c).unwrap();
        let b = theta_ambient(&sp, &u, &c).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-12);
        assert!(matches!(theta_intrinsic(&sp, &id.scale(cx(2.0, 0.0)), &c), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn fs_calibration_is_exact_for_projective_proposal() {
        let r = rho(&[0, 1, 2]);
        let ch = FlagChart::new(r, 0).unwrap();
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg();
        let out = pushforward_numeric(&ch, &f, &CurvatureTensor::zero(0, 2), &SamplerConfig::new(2000, 1)).unwrap();
        assert_eq!(out.coeffs.len(), 1);
        assert!((out.coeffs[0].estimate - Complex64::one()).norm() < 1e-12);
    }

    #[test]
    fn fs_calibration_product_proposal_converges() {
        let r = rho(&[0, 1, 3]);
        let ch = FlagChart::new(r, 0).unwrap();
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg().pow(2);
        let it = FiberIntegrand::new(&ch, &f, &CurvatureTensor::zero(0, 3)).unwrap();
        assert_eq!(it.proposal(), Proposal::ProjectiveFs);
        let out = pushforward_numeric(&ch, &f, &CurvatureTensor::zero(0, 3), &SamplerConfig::new(500, 2)).unwrap();
        assert!((out.coeffs[0].estimate - Complex64::one()).norm() < 1e-12);
        // Grassmannian G(2,4): product proposal, top power of -c1(U1) has degree 8 = 2·4 → 2.
        let g = rho(&[0, 2, 4]);
        let ch = FlagChart::new(g, 0).unwrap();
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg().pow(4);
        let out = pushforward_numeric(&ch, &f, &CurvatureTensor::zero(0, 4), &SamplerConfig::new(40_000, 3)).unwrap();
        let e = &out.coeffs[0];
        assert!((e.estimate.re - 2.0).abs() < 4.0 * e.std_error + 1e-3, "{e:?}");
    }

    #[test]
    fn heavy_tail_proposal_is_unbiased() {
        let ch = FlagChart::new(rho(&[0, 1, 2]), 0).unwrap();
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg();
        let it = FiberIntegrand::new(&ch, &f, &CurvatureTensor::zero(0, 2)).unwrap().with_proposal(Proposal::HeavyTail);
        let cfg = SamplerConfig::new(50_000, 9);
        let mut sums = BlockSums::new(1);
        for b in 0..cfg.num_blocks() {
            sums.merge(&it.block(&cfg, b));
        }
        let e = &it.finish(&sums).coeffs[0];
        // Var = 4/3 - 1.
        assert!((e.std_error - (1.0f64 / 3.0 / 50_000.0).sqrt()).abs() < 0.2 * e.std_error);
        assert!((e.estimate.re - 1.0).abs() < 4.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn degree_too_low_gives_zero() {
        let r = rho(&[0, 1, 3]);
        let ch = FlagChart::new(r, 2).unwrap();
        let f = ChernExpr::chern(1, BundleSymbol::Q(1));
        let c = random_tensor(2, 3, 1);
        let out = pushforward_numeric(&ch, &f, &c, &SamplerConfig::new(100, 1)).unwrap();
        assert!(out.form.is_zero());
        assert!(out.coeffs.is_empty());
    }

    #[test]
    fn top_fiber_class_pushes_to_one() {
        let r = rho(&[0, 1, 3]);
        let ch = FlagChart::new(r, 2).unwrap();
        let c = griffiths_sample(2, 3, 2, 4);
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg().pow(2);
        let out = pushforward_numeric(&ch, &f, &c, &SamplerConfig::new(3000, 5)).unwrap();
        assert_eq!(out.coeffs.len(), 1);
        assert!((out.coeffs[0].estimate - Complex64::one()).norm() < 1e-10);
    }

    #[test]
    fn main_theorem_small_run() {
        let r = rho(&[0, 1, 2]);
        let ch = FlagChart::new(r, 2).unwrap();
        let c = griffiths_sample(2, 2, 2, 7);
        let f = ChernExpr::chern(1, BundleSymbol::Quotient { l: 2, ell: 1 }).pow(3);
        let rep = verify_main_theorem(&ch, &f, &c, &SamplerConfig::new(20_000, 11)).unwrap();
        assert!(rep.relative_residual < 0.05, "{rep:?}");
        assert!(rep.relative_residual <= 4.0 * rep.relative_std_error + 1e-9, "{rep:?}");
        let zero = verify_main_theorem(&ch, &f, &CurvatureTensor::zero(2, 2), &SamplerConfig::new(200, 1)).unwrap();
        assert!(zero.rows.iter().all(|r| r.truth.norm() < 1e-15 && r.estimate.norm() < 1e-12));
    }

    #[test]
    fn block_reduction_is_split_independent() {
        let r = rho(&[0, 1, 2]);
        let ch = FlagChart::new(r, 2).unwrap();
        let c = griffiths_sample(2, 2, 1, 3);
        let f = ChernExpr::chern(1, BundleSymbol::Quotient { l: 2, ell: 1 }).pow(3);
        let it = FiberIntegrand::new(&ch, &f, &c).unwrap();
        let cfg = SamplerConfig { num_samples: 1000, seed: 4, block_size: 100 };
        let mut a = BlockSums::new(it.slots().len());
        for b in 0..cfg.num_blocks() {
            a.merge(&it.block(&cfg, b));
        }
        let mut b = BlockSums::new(it.slots().len());
        for blk in (0..cfg.num_blocks()).rev() {
            b.merge(&it.block(&cfg, blk));
        }
        let (ea, eb) = (it.finish(&a), it.finish(&b));
        for (x, y) in ea.coeffs.iter().zip(&eb.coeffs) {
            assert!((x.estimate - y.estimate).norm() < 1e-12);
        }
    }
}
