//! Serializable report pieces. Exact quantities carry both the rational and
//! a 12-significant-digit decimal.

use lipeq::algebra::{to_decimal, Rational};
use lipeq::gds::{
    EquationMismatch, GraphDirectedSystem, MismatchSide, PieceSpec, SeparationReport,
    SeparationStatus, VerificationReport,
};
use lipeq::ifs::{gamma_signature, ClassCertificate, ClassViolation, Condition};
use lipeq::{ExactBox, HomogeneousIfs};
use serde::Serialize;

pub const DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Exact {
    pub exact: String,
    pub decimal: String,
}

impl From<&Rational> for Exact {
    fn from(q: &Rational) -> Self {
        Exact {
            exact: q.to_string(),
            decimal: to_decimal(q, DIGITS),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxReport {
    pub lower: Vec<Exact>,
    pub upper: Vec<Exact>,
}

impl From<&ExactBox> for BoxReport {
    fn from(b: &ExactBox) -> Self {
        BoxReport {
            lower: b.lower.iter().map(Exact::from).collect(),
            upper: b.upper.iter().map(Exact::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IfsSummary {
    pub dim: usize,
    pub lambda: Exact,
    pub map_count: usize,
    pub translations: Vec<Vec<String>>,
}

impl From<&HomogeneousIfs> for IfsSummary {
    fn from(ifs: &HomogeneousIfs) -> Self {
        IfsSummary {
            dim: ifs.dim(),
            lambda: ifs.lambda().into(),
            map_count: ifs.map_count(),
            translations: ifs
                .translations()
                .iter()
                .map(|t| t.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OverlapReport {
    pub index: usize,
    pub exponent: u32,
    pub length: Exact,
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub k_vector: Vec<u32>,
    pub overlaps: Vec<OverlapReport>,
    pub gamma: Vec<Vec<usize>>,
    pub gamma_counts: Vec<usize>,
    pub free_indices: Vec<usize>,
    pub free_side: String,
}

impl CertificateReport {
    pub fn new(cert: &ClassCertificate, lambda: &Rational) -> Self {
        CertificateReport {
            k_vector: cert.k_vector.clone(),
            overlaps: cert
                .overlaps
                .iter()
                .map(|o| OverlapReport {
                    index: o.index,
                    exponent: o.exponent,
                    length: (&lambda.pow(o.exponent as i32)).into(),
                })
                .collect(),
            gamma: cert.gamma.clone(),
            gamma_counts: gamma_signature(cert),
            free_indices: cert.gamma_rest.clone(),
            free_side: cert.side.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationReport {
    pub condition: &'static str,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BoxReport>,
}

impl From<&ClassViolation> for ViolationReport {
    fn from(v: &ClassViolation) -> Self {
        use ClassViolation::*;
        let (kind, witness) = match v {
            TooFewMaps(_) => ("too-few-maps", None),
            NotOneDimensional(_) => ("not-one-dimensional", None),
            FirstNotZero(_) => ("first-not-zero", None),
            LastNotEnd { .. } => ("last-not-end", None),
            NotIncreasing { .. } => ("not-increasing", None),
            TripleIntersection { witness, .. } => ("triple-intersection", Some(witness.into())),
            NonAdjacentOverlap { witness, .. } => ("non-adjacent-overlap", Some(witness.into())),
            OverlapNotPower { .. } => ("overlap-not-power", None),
            ExponentBeyondBound { .. } => ("exponent-beyond-bound", None),
            OverlapIdentityFails { .. } => ("overlap-identity-fails", None),
            BothSidesOverlap { .. } => ("both-sides-overlap", None),
        };
        let condition = match v.condition() {
            Condition::MapCount => "map-count",
            Condition::Dimension => "dimension",
            Condition::I => "I",
            Condition::II => "II",
            Condition::III => "III",
        };
        ViolationReport {
            condition,
            kind,
            message: v.to_string(),
            witness,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PieceReport {
    pub vertex: usize,
    pub base: Vec<usize>,
    pub minus: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct EdgeReport {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub word: Vec<usize>,
    pub ratio: Exact,
    pub translation: Vec<Exact>,
}

#[derive(Debug, Serialize)]
pub struct GraphReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub out_degrees: Vec<usize>,
    pub count_matrix: Vec<Vec<u32>>,
    pub pieces: Vec<PieceReport>,
    pub edges: Vec<EdgeReport>,
}

impl GraphReport {
    pub fn new(gds: &GraphDirectedSystem, pieces: &[PieceSpec]) -> Self {
        let ratio = Exact::from(gds.lambda());
        GraphReport {
            vertex_count: gds.vertex_count(),
            edge_count: gds.edges().len(),
            out_degrees: gds.out_degrees(),
            count_matrix: gds.count_matrix(),
            pieces: pieces
                .iter()
                .enumerate()
                .map(|(i, p)| PieceReport {
                    vertex: i + 1,
                    base: p.base.clone(),
                    minus: p.minus.clone(),
                })
                .collect(),
            edges: gds
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeReport {
                    id,
                    from: e.from,
                    to: e.to,
                    word: e.provenance(),
                    ratio: ratio.clone(),
                    translation: e.translation.iter().map(Exact::from).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MismatchReport {
    pub vertex: usize,
    pub side: &'static str,
    pub witness: BoxReport,
}

impl From<&EquationMismatch> for MismatchReport {
    fn from(m: &EquationMismatch) -> Self {
        MismatchReport {
            vertex: m.vertex,
            side: match m.side {
                MismatchSide::LeftOnly => "left-only",
                MismatchSide::RightOnly => "right-only",
            },
            witness: (&m.witness).into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SeparationSummary {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_gap_sq: Option<Exact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closest: Option<ClosestPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[BoxReport; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ClosestPair {
    pub vertex: usize,
    pub edges: [usize; 2],
}

impl From<&SeparationReport> for SeparationSummary {
    fn from(s: &SeparationReport) -> Self {
        SeparationSummary {
            status: match s.status {
                SeparationStatus::Certified => "certified",
                SeparationStatus::UnknownAtDepth => "unknown-at-depth",
            },
            min_gap_sq: s.min_gap_sq.as_ref().map(Exact::from),
            closest: s.closest.map(|(vertex, e1, e2)| ClosestPair { vertex, edges: [e1, e2] }),
            witness: s.witness.as_ref().map(|(a, b)| [a.into(), b.into()]),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerificationSummary {
    pub depth: usize,
    pub level: usize,
    pub equations_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<MismatchReport>,
    pub separation: SeparationSummary,
    pub partition_disjoint: bool,
    pub partition_covers_attractor: bool,
    pub hull: BoxReport,
}

impl From<&VerificationReport> for VerificationSummary {
    fn from(r: &VerificationReport) -> Self {
        VerificationSummary {
            depth: r.depth,
            level: r.level,
            equations_hold: r.equations_hold(),
            mismatch: r.mismatch.as_ref().map(MismatchReport::from),
            separation: (&r.separation).into(),
            partition_disjoint: r.partition.disjoint,
            partition_covers_attractor: r.partition.covers_attractor,
            hull: (&r.hull).into(),
        }
    }
}
