//! Parallel block reduction for the fiber-integral sampler.
//!
//! Blocks have a fixed size and per-sample random streams, and they are merged
//! in index order, so results do not depend on the worker count.

use flagforms_core::combinat::DimensionSequence;
use flagforms_core::flagnum::{
    residual_report, BlockSums, FiberIntegrand, FlagChart, NumericPushforward, Proposal, ResidualReport,
    SamplerConfig,
};
use flagforms_core::formlab::CurvatureTensor;
use flagforms_core::rootcalc::ChernExpr;
use flagforms_core::Result;
use rayon::prelude::*;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "FLAGFORMS_THREADS";

/// Size the global pool. `None` falls back to [`THREADS_ENV`], then to rayon's default.
///
/// Only the first call has an effect.
pub fn configure_threads(threads: Option<usize>) -> std::result::Result<(), String> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| format!("{THREADS_ENV}: not a number: '{v}'"))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        // A second initialization is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Run every block of `cfg` and reduce in order.
pub fn integrate(integrand: &FiberIntegrand, cfg: &SamplerConfig) -> NumericPushforward {
    let blocks: Vec<BlockSums> = (0..cfg.num_blocks())
        .into_par_iter()
        .map(|b| integrand.block(cfg, b))
        .collect();
    let mut sums = BlockSums::new(integrand.slots().len());
    for b in &blocks {
        sums.merge(b);
    }
    integrand.finish(&sums)
}

/// Parallel counterpart of `flagnum::pushforward_numeric`.
pub fn pushforward_numeric(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
    cfg: &SamplerConfig,
    proposal: Option<Proposal>,
) -> Result<NumericPushforward> {
    let mut it = FiberIntegrand::new(chart, expr, c)?;
    if let Some(p) = proposal {
        it = it.with_proposal(p);
    }
    Ok(integrate(&it, cfg))
}

/// Parallel counterpart of `flagnum::verify_main_theorem`.
pub fn verify_main_theorem(
    chart: &FlagChart,
    expr: &ChernExpr,
    c: &CurvatureTensor,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    let numeric = pushforward_numeric(chart, expr, c, cfg, None)?;
    residual_report(chart, expr, c, &numeric)
}

/// Chart over the `n`-dimensional model base.
pub fn chart(rho: &DimensionSequence, n: usize) -> Result<FlagChart> {
    FlagChart::new(rho.clone(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flagforms_core::flagnum;
    use flagforms_core::rootcalc::BundleSymbol;

    #[test]
    fn matches_sequential_reduction() {
        let rho = DimensionSequence::new(vec![0, 1, 2]).unwrap();
        let ch = chart(&rho, 1).unwrap();
        let c = flagnum::random_tensor(1, 2, 3);
        let f = ChernExpr::chern(1, BundleSymbol::Quotient { l: 2, ell: 1 }).pow(2);
        let mut cfg = SamplerConfig::new(3000, 5);
        cfg.block_size = 512;
        let seq = flagnum::pushforward_numeric(&ch, &f, &c, &cfg).unwrap();
        let par = pushforward_numeric(&ch, &f, &c, &cfg, None).unwrap();
        assert_eq!(seq, par);
    }
}
