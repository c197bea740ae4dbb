//! The four `r = n = 4` Grassmann-bundle identities with their published
//! Chern, Segre and Schur forms.

use flagforms_core::charpoly::{chern_from_ints, schur_decompose, ChernPoly, SchurVector};
use flagforms_core::combinat::{DimensionSequence, Partition};
use flagforms_core::gysin::{degree_shift, pushforward_dp};
use flagforms_core::rootcalc::expand_expression;
use flagforms_core::BigRational;

use crate::parse;

pub struct PaperIdentity {
    pub s: usize,
    pub expr: &'static str,
    pub chern: &'static [(&'static [u32], i64)],
    pub segre: &'static str,
    pub schur: &'static [(&'static [usize], i64)],
}

pub const RANK: usize = 4;

pub const IDENTITIES: [PaperIdentity; 4] = [
    PaperIdentity {
        s: 1,
        expr: "c1(Q1)^2*c2(Q1)^2",
        chern: &[(&[3, 0, 0, 0], 1), (&[1, 1, 0, 0], 2), (&[0, 0, 1, 0], -1)],
        segre: "-2*s1^3 + s3",
        schur: &[(&[3], 2), (&[2, 1], 4), (&[1, 1, 1], 1)],
    },
    PaperIdentity {
        s: 1,
        expr: "c1(Q1)^3*c2(Q1)^2",
        chern: &[(&[4, 0, 0, 0], 1), (&[2, 1, 0, 0], 3), (&[1, 0, 1, 0], -3), (&[0, 0, 0, 1], -1)],
        segre: "6*s1^2*s2 - 5*s1*s3 - s2^2 + s4",
        schur: &[(&[3, 1], 6), (&[2, 2], 5), (&[2, 1, 1], 6), (&[1, 1, 1, 1], 1)],
    },
    PaperIdentity {
        s: 2,
        expr: "c1(Q2)^3*c2(Q2)^2",
        chern: &[(&[3, 0, 0, 0], 1), (&[0, 0, 1, 0], -1)],
        segre: "-2*s1*s2 + s3",
        schur: &[(&[2, 1], 2), (&[1, 1, 1], 1)],
    },
    PaperIdentity {
        s: 2,
        expr: "c1(Q2)^4*c2(Q2)^2",
        chern: &[(&[4, 0, 0, 0], 1), (&[1, 0, 1, 0], -3), (&[0, 0, 0, 1], 2)],
        segre: "s1*s3 + 2*s2^2 - 2*s4",
        schur: &[(&[2, 2], 2), (&[2, 1, 1], 3), (&[1, 1, 1, 1], 1)],
    },
];

impl PaperIdentity {
    pub fn rho(&self) -> DimensionSequence {
        DimensionSequence::grassmannian(self.s, RANK).expect("0 < s < 4")
    }

    pub fn expected_chern(&self) -> ChernPoly {
        chern_from_ints(RANK, self.chern)
    }

    pub fn expected_schur(&self) -> SchurVector {
        let k = self.expected_chern().weighted_degree().unwrap_or(0);
        let coords: Vec<(Partition, BigRational)> = self
            .schur
            .iter()
            .map(|(p, c)| (Partition::new(p.to_vec()).expect("partition"), BigRational::from_integer((*c).into())))
            .collect();
        SchurVector::from_coords(k, RANK, &coords).expect("valid coordinates")
    }
}

/// What the engine produced for one identity.
pub struct IdentityOutcome {
    pub chern: ChernPoly,
    pub segre: String,
    pub schur: SchurVector,
    pub chern_ok: bool,
    pub segre_ok: bool,
    pub schur_ok: bool,
}

impl IdentityOutcome {
    pub fn pass(&self) -> bool {
        self.chern_ok && self.segre_ok && self.schur_ok
    }
}

pub fn run_identity(id: &PaperIdentity) -> Result<IdentityOutcome, String> {
    let rho = id.rho();
    let expr = parse::parse_checked(id.expr, &rho)?;
    let roots = expand_expression(&expr, &rho).map_err(|e| e.to_string())?;
    let chern = pushforward_dp(&roots, &rho);
    let k = roots.degree().unwrap_or(0).saturating_sub(degree_shift(&rho));
    let schur = schur_decompose(&chern, k).map_err(|e| e.to_string())?;
    let segre = chern.to_segre().to_string();
    Ok(IdentityOutcome {
        chern_ok: chern == id.expected_chern(),
        segre_ok: segre == id.segre && chern.to_segre().to_chern(RANK) == chern,
        schur_ok: schur == id.expected_schur(),
        chern,
        segre,
        schur,
    })
}
