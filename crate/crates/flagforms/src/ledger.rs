//! Sign and normalization conventions, embedded in every report.

use flagforms_core::combinat::DimensionSequence;
use flagforms_core::formlab::positivity_constant;
use flagforms_core::gysin::{expected_epsilon, Oracle};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonEntry {
    pub r: usize,
    pub epsilon: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSignEntry {
    pub rho: Vec<usize>,
    pub lift: i32,
    pub coset: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaEntry {
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConventionLedger {
    pub segre: String,
    pub chern_roots: String,
    pub epsilon: Vec<EpsilonEntry>,
    pub oracle_signs: Vec<OracleSignEntry>,
    pub curvature: String,
    pub chern_forms: String,
    pub fiber_volume: String,
    pub positivity_kappa: Vec<KappaEntry>,
}

/// Ledger covering ranks `1..=max_rank`.
pub fn ledger(max_rank: usize) -> ConventionLedger {
    let mut oracle_signs = Vec::new();
    for r in 1..=max_rank {
        for rho in DimensionSequence::all_for_rank(r) {
            if let Ok(o) = Oracle::new(&rho) {
                oracle_signs.push(OracleSignEntry {
                    rho: rho.values().to_vec(),
                    lift: o.lift_sign(),
                    coset: o.coset_sign(),
                });
            }
        }
    }
    ConventionLedger {
        segre: "s(E) = c(E)^-1, so s1 = -c1 and s2 = c1^2 - c2".into(),
        chern_roots: "xi_i are the Chern roots of the dual pull-back; c(U_l) = prod_{i > r - rho_l} (1 - xi_i)".into(),
        epsilon: (1..=max_rank)
            .map(|r| EpsilonEntry {
                r,
                epsilon: expected_epsilon(r),
            })
            .collect(),
        oracle_signs,
        curvature: "K_ab = S^-1 dS/dybar_b S^-1 dS/dy_a - S^-1 d2S/dy_a dybar_b multiplies dy_a ^ dybar_b; \
                    Theta[beta][alpha] holds the coefficient c_{jk alpha beta}"
            .into(),
        chern_forms: "det(I + (i/2pi) Theta) = sum_k c_k".into(),
        fiber_volume: "prod_p (i/2) dzeta_p ^ dzetabar_p; the Fubini-Study line integrates to 1".into(),
        positivity_kappa: (0..=max_rank)
            .map(|k| {
                let z = positivity_constant(k);
                KappaEntry { k, re: z.re, im: z.im }
            })
            .collect(),
    }
}

impl ConventionLedger {
    pub fn epsilon(&self, r: usize) -> Option<i32> {
        self.epsilon.iter().find(|e| e.r == r).map(|e| e.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_pattern() {
        let l = ledger(4);
        let eps: Vec<i32> = (1..=4).map(|r| l.epsilon(r).unwrap()).collect();
        assert_eq!(eps, vec![1, -1, -1, 1]);
        assert_eq!(l.oracle_signs.len(), 1 + 2 + 4 + 8);
    }
}
