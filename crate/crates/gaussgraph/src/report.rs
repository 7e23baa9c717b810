//! Machine-readable reports. Exit codes are computed from report content only.

use gaussgraph_core::prelude::*;
use serde::Serialize;

use crate::io::{row_major, ParamsRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_SYMPLECTIC: i32 = 3;
pub const EXIT_IMPURE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;
pub const EXIT_IRREDUCIBLE: i32 = 10;
pub const EXIT_FAILED: i32 = 11;
pub const EXIT_VERIFY: i32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct GraphRecord {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

impl From<&ComplexGraph> for GraphRecord {
    fn from(g: &ComplexGraph) -> Self {
        GraphRecord {
            v: row_major(&g.v),
            u: row_major(&g.u),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphErrorRecord {
    pub trace_u: f64,
    pub off_diagonal_norm_u: f64,
}

/// A positive block determinant, with 1-based modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub j: usize,
    pub k: usize,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRecord {
    pub flagged: bool,
    pub threshold: f64,
    pub witnesses: Vec<WitnessRecord>,
}

impl From<&CriterionVerdict> for CriterionRecord {
    fn from(v: &CriterionVerdict) -> Self {
        CriterionRecord {
            flagged: v.flagged,
            threshold: v.threshold,
            witnesses: v
                .witnesses
                .iter()
                .map(|w| WitnessRecord {
                    j: w.j + 1,
                    k: w.k + 1,
                    det: w.det,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptRecord {
    /// 1-based modes of the first party.
    pub party: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetadataRecord {
    pub route: String,
    pub components: Vec<Vec<usize>>,
    pub clusters: usize,
    pub free_clusters: usize,
    pub closing_pairs: Vec<(usize, usize)>,
    pub fallback: bool,
}

impl From<&ReductionMetadata> for MetadataRecord {
    fn from(m: &ReductionMetadata) -> Self {
        let one = |v: &Vec<usize>| v.iter().map(|x| x + 1).collect();
        MetadataRecord {
            route: format!("{:?}", m.route).to_lowercase(),
            components: m.components.iter().map(one).collect(),
            clusters: m.clusters,
            free_clusters: m.free_clusters,
            closing_pairs: m
                .closing_pairs
                .iter()
                .map(|(a, b)| (a + 1, b + 1))
                .collect(),
            fallback: m.fallback,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Irreducible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionRecord {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<ParamsRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches_tried: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataRecord>,
    /// Files written for a successful reduction.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

impl From<&ReductionResult> for ReductionRecord {
    fn from(r: &ReductionResult) -> Self {
        let empty = ReductionRecord {
            outcome: Outcome::Failed,
            params: None,
            graph: None,
            residual: None,
            branches_tried: None,
            best_residual: None,
            witnesses: None,
            metadata: None,
            outputs: Vec::new(),
        };
        match r {
            ReductionResult::Success(s) => ReductionRecord {
                outcome: Outcome::Success,
                params: Some(s.params.iter().copied().map(ParamsRecord::from).collect()),
                graph: Some(GraphRecord::from(&s.graph)),
                residual: Some(s.residual),
                branches_tried: Some(s.branches_tried),
                metadata: Some(MetadataRecord::from(&s.metadata)),
                ..empty
            },
            ReductionResult::Irreducible(v) => ReductionRecord {
                outcome: Outcome::Irreducible,
                witnesses: Some(CriterionRecord::from(v).witnesses),
                ..empty
            },
            ReductionResult::Failed {
                branches_tried,
                best_residual,
            } => ReductionRecord {
                branches_tried: Some(*branches_tried),
                best_residual: Some(*best_residual),
                ..empty
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub input: String,
    /// SHA-256 of the input file bytes.
    pub digest: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_error: Option<GraphErrorRecord>,
    /// Set when the graph could not be extracted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_failure: Option<String>,
    /// Row-major `Det[σ_jk]`.
    pub det_matrix: Vec<f64>,
    pub criterion: CriterionRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt: Option<Vec<PptRecord>>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.reduction.as_ref().map(|r| r.outcome) {
            Some(Outcome::Irreducible) => EXIT_IRREDUCIBLE,
            Some(Outcome::Failed) => EXIT_FAILED,
            _ => EXIT_OK,
        }
    }
}

/// Result of an independent check of a GLU set against a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// Name of the first violated invariant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    pub max_symplectic_deviation: f64,
    pub off_diagonal_u: Option<f64>,
    pub max_det_change: Option<f64>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            EXIT_OK
        } else {
            EXIT_VERIFY
        }
    }
}
