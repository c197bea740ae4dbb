//! JSON schemas for polynomials, tensors and reports.

use flagforms_core::charpoly::{ChernPoly, SchurVector, SegrePoly};
use flagforms_core::flagnum::{NumericPushforward, ResidualReport};
use flagforms_core::formlab::{CurvatureTensor, ExtForm};
use flagforms_core::rootcalc::RootPoly;
use flagforms_core::{BigRational, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    /// Exact coefficient as `p` or `p/q`.
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernPolyJson {
    pub rank: usize,
    pub display: String,
    pub terms: Vec<TermJson>,
}

impl From<&ChernPoly> for ChernPolyJson {
    fn from(p: &ChernPoly) -> Self {
        Self {
            rank: p.rank(),
            display: p.to_string(),
            terms: p
                .ordered_terms()
                .into_iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

impl ChernPolyJson {
    pub fn to_poly(&self) -> Result<ChernPoly, String> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.exps.len() != self.rank {
                return Err(format!("term {:?} does not have {} exponents", t.exps, self.rank));
            }
            let c: BigRational = t.coeff.parse().map_err(|_| format!("bad coefficient '{}'", t.coeff))?;
            terms.push((t.exps.clone(), c));
        }
        Ok(ChernPoly::from_terms(self.rank, terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegrePolyJson {
    pub display: String,
    pub terms: Vec<TermJson>,
}

impl From<&SegrePoly> for SegrePolyJson {
    fn from(p: &SegrePoly) -> Self {
        let w: Vec<u32> = (1..=p.poly().nvars() as u32).collect();
        Self {
            display: p.to_string(),
            terms: p
                .poly()
                .graded_lex_terms(&w)
                .into_iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurCoordJson {
    pub partition: Vec<usize>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurVectorJson {
    pub degree: usize,
    pub rank: usize,
    pub display: String,
    pub coords: Vec<SchurCoordJson>,
}

impl From<&SchurVector> for SchurVectorJson {
    fn from(v: &SchurVector) -> Self {
        Self {
            degree: v.degree(),
            rank: v.rank(),
            display: v.to_string(),
            coords: v
                .coords()
                .iter()
                .map(|(p, c)| SchurCoordJson {
                    partition: p.parts().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootTermJson {
    pub xi_exps: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootPolyJson {
    pub rank: usize,
    pub terms: Vec<RootTermJson>,
}

impl From<&RootPoly> for RootPolyJson {
    fn from(p: &RootPoly) -> Self {
        Self {
            rank: p.rank(),
            terms: p
                .terms()
                .map(|(e, c)| RootTermJson {
                    xi_exps: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

/// One curvature coefficient, indices 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntryJson {
    pub j: usize,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// `{"n":…, "r":…, "entries":[{"j","k","alpha","beta","re","im"}]}`.
///
/// Missing Hermitian partners are filled in on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTensorJson {
    pub n: usize,
    pub r: usize,
    pub entries: Vec<TensorEntryJson>,
}

impl CurvatureTensorJson {
    pub fn to_tensor(&self) -> Result<CurvatureTensor, String> {
        let mut raw = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.j == 0 || e.k == 0 || e.alpha == 0 || e.beta == 0 {
                return Err(format!("indices are 1-based: {e:?}"));
            }
            raw.push((e.j - 1, e.k - 1, e.alpha - 1, e.beta - 1, Complex64::new(e.re, e.im)));
        }
        CurvatureTensor::from_entries(self.n, self.r, &raw).map_err(|e| e.to_string())
    }
}

impl From<&CurvatureTensor> for CurvatureTensorJson {
    fn from(t: &CurvatureTensor) -> Self {
        let mut entries = Vec::new();
        for j in 0..t.n() {
            for k in 0..t.n() {
                for a in 0..t.r() {
                    for b in 0..t.r() {
                        let v = t.get(j, k, a, b);
                        if v != Complex64::new(0.0, 0.0) {
                            entries.push(TensorEntryJson {
                                j: j + 1,
                                k: k + 1,
                                alpha: a + 1,
                                beta: b + 1,
                                re: v.re,
                                im: v.im,
                            });
                        }
                    }
                }
            }
        }
        Self {
            n: t.n(),
            r: t.r(),
            entries,
        }
    }
}

/// Bitset to 1-based index list.
pub fn index_list(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormTermJson {
    /// 1-based holomorphic generators.
    pub dz: Vec<usize>,
    /// 1-based antiholomorphic generators.
    pub dzbar: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtFormJson {
    pub generators: usize,
    pub terms: Vec<FormTermJson>,
}

impl From<&ExtForm> for ExtFormJson {
    fn from(f: &ExtForm) -> Self {
        Self {
            generators: f.ngens(),
            terms: f
                .terms()
                .map(|(s, t, c)| FormTermJson {
                    dz: index_list(s),
                    dzbar: index_list(t),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRowJson {
    pub dz: Vec<usize>,
    pub dzbar: Vec<usize>,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub truth_re: f64,
    pub truth_im: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReportJson {
    pub phi: ChernPolyJson,
    pub rows: Vec<ResidualRowJson>,
    pub relative_residual: f64,
    pub relative_std_error: f64,
    pub samples: u64,
    pub dropped: u64,
}

impl From<&ResidualReport> for ResidualReportJson {
    fn from(r: &ResidualReport) -> Self {
        Self {
            phi: (&r.phi).into(),
            rows: r
                .rows
                .iter()
                .map(|row| ResidualRowJson {
                    dz: index_list(row.j),
                    dzbar: index_list(row.k),
                    estimate_re: row.estimate.re,
                    estimate_im: row.estimate.im,
                    truth_re: row.truth.re,
                    truth_im: row.truth.im,
                    std_error: row.std_error,
                })
                .collect(),
            relative_residual: r.relative_residual,
            relative_std_error: r.relative_std_error,
            samples: r.samples,
            dropped: r.dropped,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub dz: Vec<usize>,
    pub dzbar: Vec<usize>,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericPushforwardJson {
    pub coeffs: Vec<EstimateJson>,
    pub samples: u64,
    pub redrawn: u64,
    pub dropped: u64,
}

impl From<&NumericPushforward> for NumericPushforwardJson {
    fn from(p: &NumericPushforward) -> Self {
        Self {
            coeffs: p
                .coeffs
                .iter()
                .map(|c| EstimateJson {
                    dz: index_list(c.j),
                    dzbar: index_list(c.k),
                    estimate_re: c.estimate.re,
                    estimate_im: c.estimate.im,
                    std_error: c.std_error,
                })
                .collect(),
            samples: p.samples,
            redrawn: p.redrawn,
            dropped: p.dropped,
        }
    }
}
