//! Verification suites. Each acceptance criterion is one [`Check`].

use std::time::Instant;

use flagforms_core::charpoly::{gen_schur, schur, schur_decompose};
use flagforms_core::combinat::{conjugate, relative_dimension, DimensionSequence, IntSequence, Partition};
use flagforms_core::conegeom::{builtin_family, cone_membership_2d, describe, off_axis_rays, ray, ray_hull_2d};
use flagforms_core::flagnum::{
    curvature_at, curvature_center_coeffs, loglog_slope, random_tensor, splitting_coefficients, theta_ambient,
    theta_intrinsic, ChartPoint, FiberIntegrand, FlagChart, Proposal, SamplerConfig, FD_STEP,
};
use flagforms_core::formlab::{chern_forms, griffiths_check, griffiths_sample, orthonormal_frame, positivity_check, CurvatureTensor, ExtForm};
use flagforms_core::gysin::{
    admissible_c1c2_exponents, expected_epsilon, grassmann_c1c2_pushforward, monomials_of_degree, pushforward_dp,
    schur_via_flag, Oracle, OracleRoute,
};
use flagforms_core::linalg::CMat;
use flagforms_core::rng;
use flagforms_core::rootcalc::{BundleSymbol, ChernExpr, RootPoly, UniversalBundleSpec};
use flagforms_core::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::RngCore;
use serde::Serialize;

use crate::{mc, paper};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Wall-clock time; kept out of JSON so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
    #[serde(skip)]
    pub time_limit: Option<f64>,
}

impl Check {
    pub fn line(&self) -> String {
        let limit = match self.time_limit {
            Some(l) => format!(" (limit {l:.0} s)"),
            None => String::new(),
        };
        format!(
            "{} [{:>2}] {}: {} [{:.2} s{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds,
            limit
        )
    }
}

fn timed(id: u32, name: &str, limit: Option<f64>, f: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let in_time = limit.is_none_or(|l| seconds <= l);
    Check {
        id,
        name: name.into(),
        pass: pass && in_time,
        detail: if in_time { detail } else { format!("{detail}; over time limit") },
        seconds,
        time_limit: limit,
    }
}

/// Options shared by the stochastic checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Options {
    pub seed: u64,
    pub samples: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            samples: 1_000_000,
        }
    }
}

pub const SUITES: [&str; 5] = ["identities", "oracle", "curvature", "gysin-numeric", "positivity"];

pub fn run_suite(suite: &str, opts: &Options) -> Option<Vec<Check>> {
    Some(match suite {
        "identities" => vec![paper_identities(), jacobi_trudi()],
        "oracle" => vec![oracle_equivalence(), schur_as_pushforward()],
        "curvature" => vec![
            curvature_theorem(opts.seed),
            lemma_invariance(opts.seed),
            mixed_block_vanishing(opts.seed),
            quotient_splitting(opts.seed),
        ],
        "gysin-numeric" => vec![fs_calibration(opts), main_theorem_numeric(opts)],
        "positivity" => vec![cone_theorem(opts.seed), cone_comparisons()],
        _ => return None,
    })
}

fn rho(v: &[usize]) -> DimensionSequence {
    DimensionSequence::new(v.to_vec()).expect("valid dimension sequence")
}

/// Every `U_l/U_ℓ` of a flag type.
pub fn all_specs(rho: &DimensionSequence) -> Vec<UniversalBundleSpec> {
    let m = rho.steps();
    let mut out = Vec::new();
    for l in 1..=m {
        for ell in 0..l {
            out.push(UniversalBundleSpec::new(rho.clone(), ell, l).expect("ℓ < l"));
        }
    }
    out
}

fn pick<T: Clone>(g: &mut impl RngCore, v: &[T]) -> T {
    v[(g.next_u64() % v.len() as u64) as usize].clone()
}

// ---------------------------------------------------------------- identities

pub fn paper_identities() -> Check {
    timed(1, "paper identities (r=n=4)", Some(5.0), || {
        let mut parts = Vec::new();
        let mut all = true;
        for id in &paper::IDENTITIES {
            let out = paper::run_identity(id)?;
            all &= out.pass();
            parts.push(format!("{} -> {} | {} | {}", id.expr, out.chern, out.segre, out.schur));
        }
        Ok((all, parts.join("; ")))
    })
}

pub fn jacobi_trudi() -> Check {
    timed(2, "Jacobi-Trudi S_σ = (-1)^|σ| s_σ'", Some(10.0), || {
        let mut count = 0;
        for r in 1..=4 {
            for k in 0..=6 {
                for sigma in Partition::all_with_max_part(k, k) {
                    let conj = conjugate(&sigma);
                    let mut g = gen_schur(&IntSequence::from(&conj), r);
                    if k % 2 == 1 {
                        g = g.neg();
                    }
                    if schur(&sigma, r) != g {
                        return Ok((false, format!("mismatch at σ={sigma}, r={r}")));
                    }
                    count += 1;
                }
            }
        }
        Ok((true, format!("{count} cases, |σ| ≤ 6, r ≤ 4")))
    })
}

// ---------------------------------------------------------------- oracle

pub fn oracle_equivalence() -> Check {
    timed(3, "push-forward formula vs symmetrizer oracle", Some(60.0), || {
        let (mut total, mut coset, mut lift) = (0usize, 0usize, 0usize);
        let mut signs = Vec::new();
        for r in 1..=4 {
            for rho in DimensionSequence::all_for_rank(r) {
                let mut oracle = Oracle::new(&rho).map_err(|e| e.to_string())?;
                signs.push(format!("{rho}:{:+}/{:+}", oracle.lift_sign(), oracle.coset_sign()));
                let d = relative_dimension(&rho);
                for deg in 0..=d + 3 {
                    for lambda in monomials_of_degree(r, deg) {
                        let f = RootPoly::monomial(&lambda);
                        let dp = pushforward_dp(&f, &rho);
                        let o = oracle.push(&f).map_err(|e| e.to_string())?;
                        if dp != o.value {
                            return Ok((false, format!("ρ={rho}, ξ^{lambda:?}: {dp} vs {}", o.value)));
                        }
                        match o.route {
                            OracleRoute::Coset => coset += 1,
                            OracleRoute::Lift => lift += 1,
                        }
                        total += 1;
                    }
                }
            }
        }
        Ok((
            true,
            format!("{total} monomials ({coset} coset, {lift} lift); signs lift/coset {}", signs.join(" ")),
        ))
    })
}

pub fn schur_as_pushforward() -> Check {
    timed(4, "S_σ as a complete-flag push-forward", Some(30.0), || {
        let mut eps_seen = Vec::new();
        let mut count = 0;
        for r in 1..=4 {
            let mut eps_r: Option<i32> = None;
            for k in 0..=4 {
                for sigma in Partition::all_with_max_part(k, r) {
                    let (_, eps) = schur_via_flag(&sigma, r).map_err(|e| e.to_string())?;
                    match eps_r {
                        None => eps_r = Some(eps),
                        Some(e) if e != eps => {
                            return Ok((false, format!("r={r}: ε flips at σ={sigma}")));
                        }
                        _ => {}
                    }
                    count += 1;
                }
            }
            let e = eps_r.unwrap_or(1);
            if e != expected_epsilon(r) {
                return Ok((false, format!("r={r}: ε={e}, expected (-1)^(r(r-1)/2)")));
            }
            eps_seen.push(format!("ε({r})={e:+}"));
        }
        Ok((true, format!("{count} partitions; {}", eps_seen.join(" "))))
    })
}

// ---------------------------------------------------------------- curvature

struct Config {
    chart: FlagChart,
    spec: UniversalBundleSpec,
    c: CurvatureTensor,
}

fn random_config(seed: u64, i: u64, min_rank: usize) -> Config {
    let mut g = rng::stream(seed, 1000 + i);
    let r = min_rank + (g.next_u64() % (5 - min_rank as u64)) as usize;
    let n = 1 + (g.next_u64() % 4) as usize;
    let rh = pick(&mut g, &DimensionSequence::all_for_rank(r));
    let spec = pick(&mut g, &all_specs(&rh));
    let c = random_tensor(n, r, g.next_u64());
    Config {
        chart: FlagChart::new(rh, n).expect("chart"),
        spec,
        c,
    }
}

pub fn curvature_theorem(seed: u64) -> Check {
    timed(5, "curvature formula vs finite differences", Some(60.0), || {
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let cfg = random_config(seed, i, 1);
            let exact = curvature_center_coeffs(&cfg.chart, &cfg.spec, &cfg.c).map_err(|e| e.to_string())?;
            let p = ChartPoint::center(&cfg.chart);
            let fd = curvature_at(&cfg.chart, &cfg.spec, &cfg.c, &p, FD_STEP).map_err(|e| e.to_string())?;
            let err = fd.coeffs.sub(&exact).max_abs() / exact.max_abs().max(f64::MIN_POSITIVE);
            worst = worst.max(err);
        }
        Ok((worst <= 1e-5, format!("20 configurations, max relative error {worst:.2e}")))
    })
}

fn block_unitary(g: &mut impl RngCore, rho: &DimensionSequence) -> CMat {
    let r = rho.rank();
    let mut u = CMat::zeros(r, r);
    for blk in rho.root_blocks() {
        let idx: Vec<usize> = blk.map(|i| i - 1).collect();
        let q = orthonormal_frame(g, idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                u[(i, j)] = q[(a, b)];
            }
        }
    }
    u
}

pub fn lemma_invariance(seed: u64) -> Check {
    timed(6, "θ invariance under block-unitary re-framing", None, || {
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let cfg = random_config(seed, 100 + i, 2);
            let mut g = rng::stream(seed, 2000 + i);
            let r = cfg.chart.rank();
            let v = orthonormal_frame(&mut g, r, r);
            let u = block_unitary(&mut g, cfg.chart.rho());
            let vu = v.matmul(&u);
            let a = theta_ambient(&cfg.spec, &v, &cfg.c).map_err(|e| e.to_string())?;
            let b = theta_ambient(&cfg.spec, &vu, &cfg.c).map_err(|e| e.to_string())?;
            // Undo the frame change on the intrinsic matrix.
            let idx: Vec<usize> = cfg.spec.block().map(|i| i - 1).collect();
            let ua = u.select(&idx, &idx);
            let ti = theta_intrinsic(&cfg.spec, &v, &cfg.c).map_err(|e| e.to_string())?;
            let tu = theta_intrinsic(&cfg.spec, &vu, &cfg.c).map_err(|e| e.to_string())?;
            let back = tu.sandwich(&ua, &ua.adjoint());
            let scale = cfg.c.max_abs().max(1.0);
            worst = worst.max(a.sub(&b).max_abs() / scale).max(ti.sub(&back).max_abs() / scale);
        }
        Ok((worst <= 1e-12, format!("50 re-framings, max change {worst:.2e}")))
    })
}

/// Configurations with a non-trivial fiber: every flag type with `r ≤ 4` and every bundle.
fn fiber_configs(seed: u64) -> Vec<Config> {
    let mut out = Vec::new();
    for r in 2..=4 {
        for rh in DimensionSequence::all_for_rank(r) {
            if relative_dimension(&rh) == 0 {
                continue;
            }
            let c = random_tensor(2, r, seed ^ (r as u64 * 31 + rh.steps() as u64));
            for spec in all_specs(&rh) {
                out.push(Config {
                    chart: FlagChart::new(rh.clone(), 2).expect("chart"),
                    spec,
                    c: c.clone(),
                });
            }
        }
    }
    out
}

pub fn mixed_block_vanishing(seed: u64) -> Check {
    timed(7, "mixed dz/dζ̄ curvature blocks vanish over the center fiber", None, || {
        let configs = fiber_configs(seed);
        let mut worst: f64 = 0.0;
        for (ci, cfg) in configs.iter().enumerate() {
            let n = cfg.chart.n();
            for s in 0..10 {
                let mut g = rng::stream(seed, 3000 + 16 * ci as u64 + s);
                let p = ChartPoint::random(&cfg.chart, &mut g, 0.8);
                let fd = curvature_at(&cfg.chart, &cfg.spec, &cfg.c, &p, FD_STEP).map_err(|e| e.to_string())?;
                let mixed = fd.coeffs.max_abs_where(|a, b| (a < n) != (b < n));
                worst = worst.max(mixed / fd.coeffs.max_abs());
            }
        }
        Ok((
            worst <= 1e-6,
            format!("{} configurations × 10 points, max mixed/‖Θ‖ {worst:.2e}", configs.len()),
        ))
    })
}

pub fn quotient_splitting(seed: u64) -> Check {
    timed(8, "quotient splitting u = -ζ̄ + O(|ζ|²)", None, || {
        let scales = [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3];
        let mut min_slope = f64::INFINITY;
        let mut worst_lin: f64 = 0.0;
        let mut count = 0;
        for (ci, cfg) in fiber_configs(seed).iter().enumerate() {
            if cfg.spec.ell() == 0 {
                continue;
            }
            let n = cfg.chart.n();
            let mut g = rng::stream(seed, 4000 + ci as u64);
            // Unit directions, so the scale is |ζ|; the residual is the worst direction.
            let dirs: Vec<Vec<Complex64>> = (0..8)
                .map(|_| {
                    let raw = ChartPoint::random(&cfg.chart, &mut g, 1.0);
                    let norm = raw.zeta().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    raw.zeta().iter().map(|z| z / norm).collect()
                })
                .collect();
            let a: Vec<usize> = cfg.spec.block().collect();
            let b: Vec<usize> = cfg.spec.sub_block().collect();
            let mut res = Vec::new();
            for &t in &scales {
                let mut worst: f64 = 0.0;
                for dir in &dirs {
                    let zeta: Vec<Complex64> = dir.iter().map(|z| z * t).collect();
                    let p = ChartPoint::new(&cfg.chart, zeta).map_err(|e| e.to_string())?;
                    let u = splitting_coefficients(&cfg.spec, &cfg.c, &vec![Complex64::zero(); n], &p)
                        .map_err(|e| e.to_string())?;
                    for (ai, &alpha) in a.iter().enumerate() {
                        for (bi, &mu) in b.iter().enumerate() {
                            let z = cfg.chart.pair_index(alpha, mu).map(|i| p.zeta()[i]).unwrap_or_default();
                            worst = worst.max((u[(bi, ai)] + z.conj()).norm());
                        }
                    }
                }
                res.push(worst);
            }
            // Error of the fitted linear coefficient at the smallest scale.
            worst_lin = worst_lin.max(res[res.len() - 1] / scales[scales.len() - 1]);
            count += 1;
            if res.iter().all(|&x| x < 1e-300) {
                continue;
            }
            min_slope = min_slope.min(loglog_slope(&scales, &res));
        }
        Ok((
            min_slope >= 1.9,
            format!(
                "{count} quotient bundles, min log-log slope {min_slope:.3}, first-order coefficient error {worst_lin:.1e} at |ζ|~1e-3"
            ),
        ))
    })
}

// ---------------------------------------------------------------- gysin-numeric

pub fn fs_calibration(opts: &Options) -> Check {
    timed(9, "Fubini-Study calibration on P^1", None, || {
        let chart = FlagChart::new(rho(&[0, 1, 2]), 0).map_err(|e| e.to_string())?;
        let f = ChernExpr::chern(1, BundleSymbol::Sub(1)).neg();
        let c = CurvatureTensor::zero(0, 2);
        let cfg = SamplerConfig::new(opts.samples, opts.seed);
        let mut parts = Vec::new();
        let mut pass = true;
        for prop in [Proposal::ProductFs, Proposal::HeavyTail] {
            let it = FiberIntegrand::new(&chart, &f, &c).map_err(|e| e.to_string())?.with_proposal(prop);
            let est = mc::integrate(&it, &cfg);
            let e = est.coeffs.first().ok_or("no coefficient")?;
            let dev = (e.estimate - Complex64::one()).norm();
            let ok = dev <= 5e-3 && dev <= 3.0 * e.std_error + 1e-8;
            // Heavy-tail weights have variance exactly 1/3.
            let se_ok = match prop {
                Proposal::HeavyTail => {
                    let want = (1.0 / 3.0 / est.samples as f64).sqrt();
                    (e.std_error / want - 1.0).abs() <= 0.1
                }
                _ => e.std_error <= 1e-8,
            };
            pass &= ok && se_ok;
            parts.push(format!("{prop:?}: {:.6} ± {:.1e}", e.estimate.re, e.std_error));
        }
        Ok((pass, format!("{} samples; {}", opts.samples, parts.join(", "))))
    })
}

pub struct MainCase {
    pub rho: &'static [usize],
    pub n: usize,
    pub expr: &'static str,
    pub tol: f64,
}

pub const MAIN_CASES: [MainCase; 2] = [
    MainCase {
        rho: &[0, 1, 2],
        n: 2,
        expr: "c1(U2/U1)^3",
        tol: 0.02,
    },
    MainCase {
        rho: &[0, 1, 3],
        n: 2,
        expr: "c1(Q1)^2*c2(Q1)",
        tol: 0.03,
    },
];

pub fn main_theorem_case(case: &MainCase, opts: &Options) -> Result<flagforms_core::flagnum::ResidualReport, String> {
    let rh = rho(case.rho);
    let chart = FlagChart::new(rh.clone(), case.n).map_err(|e| e.to_string())?;
    let expr = crate::parse::parse_checked(case.expr, &rh)?;
    let c = griffiths_sample(case.n, rh.rank(), 2, opts.seed);
    let cfg = SamplerConfig::new(opts.samples, opts.seed);
    mc::verify_main_theorem(&chart, &expr, &c, &cfg).map_err(|e| e.to_string())
}

pub fn main_theorem_numeric(opts: &Options) -> Check {
    timed(10, "main theorem, Monte Carlo fiber integral", None, || {
        let mut pass = true;
        let mut parts = Vec::new();
        for case in &MAIN_CASES {
            let start = Instant::now();
            let rep = main_theorem_case(case, opts)?;
            let secs = start.elapsed().as_secs_f64();
            let in_time = secs <= 600.0;
            pass &= rep.passes(case.tol, 3.0) && in_time;
            parts.push(format!(
                "ρ={:?} {}: Φ = {}, residual {:.3}% (SE {:.3}%, tol {:.0}%){}",
                case.rho,
                case.expr,
                rep.phi,
                100.0 * rep.relative_residual,
                100.0 * rep.relative_std_error,
                100.0 * case.tol,
                if in_time { "" } else { ", over 10 min" }
            ));
        }
        Ok((pass, format!("{} samples; {}", opts.samples, parts.join("; "))))
    })
}

// ---------------------------------------------------------------- positivity

fn evaluate_on(poly: &flagforms_core::charpoly::ChernPoly, forms: &[ExtForm], n: usize) -> ExtForm {
    poly.evaluate(&forms[1..], &ExtForm::one(n), |q| {
        ExtForm::scalar(n, Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0))
    })
}

pub fn cone_theorem(seed: u64) -> Check {
    timed(11, "c1/c2 Grassmann push-forwards are Schur-positive", None, || {
        const R: usize = 4;
        const N: usize = 4;
        // Enough rank-one terms that degree-4 forms do not vanish identically.
        let tensors: Vec<CurvatureTensor> = (0..5).map(|t| griffiths_sample(N, R, 8, seed + t)).collect();
        for (t, c) in tensors.iter().enumerate() {
            if griffiths_check(c, 1000, seed + t as u64) < -1e-12 {
                return Ok((false, format!("tensor {t} is not Griffiths-positive")));
            }
        }
        let forms: Vec<Vec<ExtForm>> = tensors.iter().map(|c| chern_forms(&c.form_matrix(N))).collect();
        let mut worst = f64::INFINITY;
        let triples = admissible_c1c2_exponents(R, N);
        for &(s, alpha, beta) in &triples {
            let (chern, coords) = match grassmann_c1c2_pushforward(R, N, s, alpha, beta) {
                Ok(v) => v,
                Err(e) => return Ok((false, format!("(s,α,β)=({s},{alpha},{beta}): {e}"))),
            };
            debug_assert_eq!(coords.reconstruct(), chern);
            for (t, cs) in forms.iter().enumerate() {
                let gamma = evaluate_on(&chern, cs, N);
                let rep = positivity_check(&gamma, N, 10_000, seed + 17 * t as u64).map_err(|e| e.to_string())?;
                let scale = rep.max.abs().max(rep.min.abs()).max(gamma.max_abs()).max(f64::MIN_POSITIVE);
                let rel = rep.min / scale;
                if rep.min < -1e-9 * scale {
                    return Ok((false, format!("(s,α,β)=({s},{alpha},{beta}), tensor {t}: min {:.3e}", rep.min)));
                }
                if !gamma.is_zero() {
                    worst = worst.min(rel);
                }
            }
        }
        Ok((
            true,
            format!(
                "{} triples, all Schur coordinates ≥ 0; 5 tensors × 10^4 frames, min value/scale {worst:.3e}",
                triples.len()
            ),
        ))
    })
}

pub fn cone_comparisons() -> Check {
    timed(12, "sampled cone comparisons", None, || {
        let fams: Vec<_> = ["fcone-r3-proj", "fcone-r3-hyper", "fcone-r3-complete"]
            .iter()
            .map(|n| builtin_family(n).ok_or_else(|| format!("unknown family {n}")))
            .collect::<Result<_, _>>()?;
        let hull = ray_hull_2d(&fams, 64).map_err(|e| e.to_string())?;
        let m = cone_membership_2d(&ray(1, 0), &hull).map_err(|e| e.to_string())?;
        let r2 = builtin_family("fcone-r2").ok_or("unknown family fcone-r2")?;
        let off = off_axis_rays(&r2, 64);
        let all = r2.sample(64);
        let with_b: Vec<_> = all.iter().filter(|(p, _)| p[1] > 0).collect();
        let off_ok = !with_b.is_empty() && with_b.iter().all(|(p, _)| off.iter().any(|(q, _)| q == p));
        Ok((
            !m.inside && m.margin > 0.0 && off_ok,
            format!(
                "hull of (i)-(iii): {}; target (1,0) {} with margin {:.4}; rank-2 family: {}/{} rays off the S(1,1) axis",
                describe(&hull),
                if m.inside { "inside" } else { "outside" },
                m.margin,
                off.len(),
                all.len()
            ),
        ))
    })
}

/// Schur coordinates of a push-forward, reported by `pushforward`.
pub fn schur_coordinates(
    p: &flagforms_core::charpoly::ChernPoly,
) -> Option<flagforms_core::charpoly::SchurVector> {
    let k = p.weighted_degree()?;
    schur_decompose(p, k).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for c in [paper_identities(), jacobi_trudi(), schur_as_pushforward(), cone_comparisons()] {
            assert!(c.pass, "{}", c.line());
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &Options::default()).is_none());
    }
}
