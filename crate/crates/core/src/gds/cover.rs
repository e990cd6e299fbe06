//! Exact cylinder covers of partition pieces, equation checks, and
//! sibling-gap separation.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::{GdsError, GraphDirectedSystem, PieceSpec};
use crate::algebra::{Affine, Rational};
use crate::ifs::{ExactBox, HomogeneousIfs};

/// Deduplicated, ordered set of equal-sized cylinder boxes.
pub type Cover = BTreeSet<ExactBox>;

/// Which side of an attractor equation holds the witness box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MismatchSide {
    LeftOnly,
    RightOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationMismatch {
    /// 1-based vertex label.
    pub vertex: usize,
    pub depth: usize,
    pub level: usize,
    pub side: MismatchSide,
    pub witness: ExactBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationStatus {
    Certified,
    UnknownAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub status: SeparationStatus,
    pub depth: usize,
    pub level: usize,
    /// Two sibling boxes that touch or overlap, when not certified.
    pub witness: Option<(ExactBox, ExactBox)>,
    /// Smallest squared distance between sibling images over all vertices.
    /// `None` when no vertex has two outgoing edges.
    pub min_gap_sq: Option<Rational>,
    /// Vertex (1-based) and edge ids realising `min_gap_sq` or the witness.
    pub closest: Option<(usize, usize, usize)>,
}

impl SeparationReport {
    pub fn is_certified(&self) -> bool {
        self.status == SeparationStatus::Certified
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCheck {
    /// No cover box is shared by two pieces.
    pub disjoint: bool,
    /// The union of piece covers is the full cylinder cover of the attractor.
    pub covers_attractor: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub depth: usize,
    /// Absolute cylinder level of the left-hand covers.
    pub level: usize,
    pub mismatch: Option<EquationMismatch>,
    pub separation: SeparationReport,
    pub partition: PartitionCheck,
    /// Hull of all piece covers at `level`.
    pub hull: ExactBox,
}

impl VerificationReport {
    pub fn equations_hold(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn is_certified(&self) -> bool {
        self.equations_hold() && self.separation.is_certified()
    }
}

/// Cover level used by [`verify_equations`] at `depth`: `depth` levels below
/// the longest word in any piece definition.
pub fn cover_level(pieces: &[PieceSpec], depth: usize) -> usize {
    let longest = pieces
        .iter()
        .flat_map(|p| std::iter::once(&p.base).chain(&p.minus))
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    depth + longest.max(1)
}

/// Level-`level` cylinders under `piece.base` that are not contained in a
/// subtracted cylinder.
pub fn piece_cover(
    ifs: &HomogeneousIfs,
    piece: &PieceSpec,
    level: usize,
) -> Result<Cover, GdsError> {
    if level < piece.base.len() {
        return Err(GdsError::LevelTooShallow {
            level,
            word_len: piece.base.len(),
        });
    }
    let levels = attractor_levels(ifs, level - piece.base.len());
    piece_cover_from(ifs, piece, &levels[level - piece.base.len()])
}

/// `f_base` applied to the attractor cover `below`, minus subtracted cylinders.
fn piece_cover_from(
    ifs: &HomogeneousIfs,
    piece: &PieceSpec,
    below: &Cover,
) -> Result<Cover, GdsError> {
    let excluded: Vec<ExactBox> = piece
        .minus
        .iter()
        .map(|w| ifs.cylinder(w))
        .collect::<Result<_, _>>()?;
    let start = ifs.word_map(&piece.base)?;
    Ok(map_cover(&start, below)
        .into_iter()
        .filter(|b| !excluded.iter().any(|e| e.contains(b)))
        .collect())
}

/// All level-`level` cylinders of the attractor.
pub fn attractor_cover(ifs: &HomogeneousIfs, level: usize) -> Cover {
    attractor_levels(ifs, level).pop().expect("level 0 is always present")
}

/// Attractor covers for levels `0..=top`. Level `k` is the union of the
/// first-level images of level `k-1`, so each level is built from the
/// deduplicated previous one rather than from all `m^k` words.
fn attractor_levels(ifs: &HomogeneousIfs, top: usize) -> Vec<Cover> {
    let mut levels = Vec::with_capacity(top + 1);
    levels.push(Cover::from([ExactBox::unit(ifs.dim())]));
    for k in 1..=top {
        let prev: &Cover = &levels[k - 1];
        let next: Cover = ifs.maps().iter().flat_map(|f| map_cover(f, prev)).collect();
        levels.push(next);
    }
    levels
}

fn map_cover(map: &Affine, cover: &Cover) -> Vec<ExactBox> {
    cover
        .iter()
        .map(|b| ExactBox {
            lower: map.apply(&b.lower),
            upper: map.apply(&b.upper),
        })
        .collect()
}

/// Checks every attractor equation `F_u = ⋃ f_e(F_{e⁺})` at cover
/// resolution, the sibling separation, and the partition property.
pub fn verify_equations(
    gds: &GraphDirectedSystem,
    pieces: &[PieceSpec],
    depth: usize,
) -> Result<VerificationReport, GdsError> {
    if depth == 0 {
        return Err(GdsError::DepthZero);
    }
    if pieces.len() != gds.vertex_count() {
        return Err(GdsError::PieceCountMismatch {
            pieces: pieces.len(),
            vertices: gds.vertex_count(),
        });
    }
    let ifs = gds.source();
    let level = cover_level(pieces, depth);
    let levels = attractor_levels(ifs, level);
    let covers_at = |l: usize| -> Result<Vec<Cover>, GdsError> {
        pieces
            .iter()
            .map(|p| match l.checked_sub(p.base.len()) {
                Some(r) => piece_cover_from(ifs, p, &levels[r]),
                None => Err(GdsError::LevelTooShallow { level: l, word_len: p.base.len() }),
            })
            .collect()
    };
    let fine = covers_at(level)?;
    let coarse = covers_at(level - 1)?;

    let mut mismatch = None;
    let mut min_gap: Option<(Rational, (usize, usize, usize))> = None;
    let mut witness = None;

    for u in 1..=gds.vertex_count() {
        let images: Vec<(usize, Vec<ExactBox>)> = gds
            .out_edges(u)
            .map(|(id, e)| (id, map_cover(&gds.edge_map(e), &coarse[e.to - 1])))
            .collect();

        if mismatch.is_none() {
            let rhs: Cover = images.iter().flat_map(|(_, im)| im.iter().cloned()).collect();
            let lhs = &fine[u - 1];
            let found = lhs
                .difference(&rhs)
                .next()
                .map(|b| (MismatchSide::LeftOnly, b.clone()))
                .or_else(|| {
                    rhs.difference(lhs)
                        .next()
                        .map(|b| (MismatchSide::RightOnly, b.clone()))
                });
            if let Some((side, b)) = found {
                mismatch = Some(EquationMismatch {
                    vertex: u,
                    depth,
                    level,
                    side,
                    witness: b,
                });
            }
        }

        for i in 0..images.len() {
            for j in i + 1..images.len() {
                let (gap, pair) = min_gap_between(&images[i].1, &images[j].1);
                if !gap.is_positive() && witness.is_none() {
                    witness = Some((pair, (u, images[i].0, images[j].0)));
                }
                if min_gap.as_ref().map_or(true, |(g, _)| gap < *g) {
                    min_gap = Some((gap, (u, images[i].0, images[j].0)));
                }
            }
        }
    }

    let separation = match witness {
        Some((pair, closest)) => SeparationReport {
            status: SeparationStatus::UnknownAtDepth,
            depth,
            level,
            witness: Some(pair),
            min_gap_sq: min_gap.map(|(g, _)| g),
            closest: Some(closest),
        },
        None => SeparationReport {
            status: SeparationStatus::Certified,
            depth,
            level,
            witness: None,
            closest: min_gap.as_ref().map(|(_, c)| *c),
            min_gap_sq: min_gap.map(|(g, _)| g),
        },
    };

    let partition = check_partition_covers(&fine, &levels[level]);
    let hull = ExactBox::hull(fine.iter().flatten()).unwrap_or_else(|| ExactBox::unit(ifs.dim()));
    Ok(VerificationReport {
        depth,
        level,
        mismatch,
        separation,
        partition,
        hull,
    })
}

fn check_partition_covers(covers: &[Cover], attractor: &Cover) -> PartitionCheck {
    let mut union = Cover::new();
    let mut disjoint = true;
    for cover in covers {
        for b in cover {
            if !union.insert(b.clone()) {
                disjoint = false;
            }
        }
    }
    PartitionCheck {
        disjoint,
        covers_attractor: union == *attractor,
    }
}

/// Partition property of the pieces at `depth` (see [`cover_level`]).
pub fn check_partition(
    ifs: &HomogeneousIfs,
    pieces: &[PieceSpec],
    depth: usize,
) -> Result<PartitionCheck, GdsError> {
    let level = cover_level(pieces, depth);
    let covers: Vec<Cover> = pieces
        .iter()
        .map(|p| piece_cover(ifs, p, level))
        .collect::<Result<_, _>>()?;
    Ok(check_partition_covers(&covers, &attractor_cover(ifs, level)))
}

#[derive(Clone, Copy)]
struct FloatBox {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl FloatBox {
    fn new(b: &ExactBox) -> Self {
        let (lo, hi) = b.to_f64();
        let mut out = FloatBox {
            lo: [0.0; 2],
            hi: [0.0; 2],
        };
        out.lo[..lo.len()].copy_from_slice(&lo);
        out.hi[..hi.len()].copy_from_slice(&hi);
        out
    }

    fn gap(&self, other: &FloatBox) -> f64 {
        let mut sq = 0.0;
        for a in 0..2 {
            let g = (other.lo[a] - self.hi[a]).max(self.lo[a] - other.hi[a]).max(0.0);
            sq += g * g;
        }
        sq.sqrt()
    }
}

/// Absolute slack covering f64 rounding in coordinates within `[0, 1]`.
const FLOAT_SLACK: f64 = 1e-12;

/// Exact minimum squared distance between two nonempty box families.
///
/// A float pass finds the near-minimal pairs; only those are compared
/// exactly, so the result is exact.
pub fn min_gap_between(a: &[ExactBox], b: &[ExactBox]) -> (Rational, (ExactBox, ExactBox)) {
    assert!(!a.is_empty() && !b.is_empty(), "empty image in gap computation");
    let fa: Vec<FloatBox> = a.iter().map(FloatBox::new).collect();
    let fb: Vec<FloatBox> = b.iter().map(FloatBox::new).collect();
    let mut approx = f64::INFINITY;
    for x in &fa {
        for y in &fb {
            approx = approx.min(x.gap(y));
        }
    }
    let threshold = approx + FLOAT_SLACK;
    let mut best: Option<(Rational, (usize, usize))> = None;
    for (i, x) in fa.iter().enumerate() {
        for (j, y) in fb.iter().enumerate() {
            if x.gap(y) > threshold {
                continue;
            }
            let g = a[i].gap_sq(&b[j]);
            if best.as_ref().map_or(true, |(bg, _)| g < *bg) {
                let done = g.is_zero();
                best = Some((g, (i, j)));
                if done {
                    break;
                }
            }
        }
    }
    let (g, (i, j)) = best.expect("threshold admits the float minimiser");
    (g, (a[i].clone(), b[j].clone()))
}
