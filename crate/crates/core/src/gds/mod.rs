//! Graph-directed systems: the partition built from a class certificate,
//! user-supplied partitions, verification, and structural comparison.

mod canon;
mod cover;

pub use canon::Signature;
pub use cover::{
    attractor_cover, check_partition, cover_level, min_gap_between, piece_cover,
    verify_equations, Cover, EquationMismatch, MismatchSide, PartitionCheck, SeparationReport,
    SeparationStatus, VerificationReport,
};

use thiserror::Error;

use crate::algebra::{Affine, Rational};
use crate::ifs::{
    gamma_signature, normalize_right_free, overlap_word, ClassCertificate, ClassViolation,
    HomogeneousIfs, IfsError,
};

/// Cover depth used when none is given.
pub const DEFAULT_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GdsError {
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error("vertex {vertex} out of range 1..={count}")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("vertex {0} has no outgoing edge")]
    NoOutEdge(usize),
    #[error("edge {edge} uses a via word of length {len}; only single maps keep the ratio λ")]
    NonHomogeneousEdge { edge: usize, len: usize },
    #[error("{pieces} pieces for {vertices} vertices")]
    PieceCountMismatch { pieces: usize, vertices: usize },
    #[error("translations leave the unit cube, covers would not enclose the attractor")]
    LeavesUnitCube,
    #[error("f_m overlaps f_(m-1); normalize the IFS first")]
    NotNormalized,
    #[error("depth must be at least 1")]
    DepthZero,
    #[error("cover level {level} is shallower than a piece word of length {word_len}")]
    LevelTooShallow { level: usize, word_len: usize },
    #[error("equation of vertex {} fails at depth {}: {:?} box {}", .0.vertex, .0.depth, .0.side, .0.witness)]
    EquationMismatch(EquationMismatch),
    #[error("sibling images are not separated at depth {}", .0.depth)]
    DisjointnessFailure(SeparationReport),
}

/// Edge `from → to` realised by the IFS map `map` (ratio λ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// 1-based index of the source IFS map; the provenance word is `[map]`.
    pub map: usize,
    pub translation: Vec<Rational>,
}

impl Edge {
    pub fn provenance(&self) -> Vec<usize> {
        vec![self.map]
    }
}

/// A piece `f_base(K) ∖ ⋃ f_s(K)` of the attractor `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PieceSpec {
    pub base: Vec<usize>,
    pub minus: Vec<Vec<usize>>,
}

impl PieceSpec {
    pub fn new(base: Vec<usize>, minus: Vec<Vec<usize>>) -> Self {
        Self { base, minus }
    }

    pub fn whole(base: Vec<usize>) -> Self {
        Self {
            base,
            minus: Vec::new(),
        }
    }
}

/// Vertices `1..=n`; every edge is a similitude of ratio λ taken from the
/// source IFS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDirectedSystem {
    vertex_count: usize,
    source: HomogeneousIfs,
    edges: Vec<Edge>,
}

impl GraphDirectedSystem {
    /// Edges are `(from, to, map)` triples; they are stored sorted.
    pub fn new(
        source: HomogeneousIfs,
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, GdsError> {
        let mut built = Vec::new();
        for (from, to, map) in edges {
            for v in [from, to] {
                if v == 0 || v > vertex_count {
                    return Err(GdsError::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            let translation = source.map(map)?.shift.clone();
            built.push(Edge {
                from,
                to,
                map,
                translation,
            });
        }
        built.sort_by(|a, b| (a.from, a.to, a.map).cmp(&(b.from, b.to, b.map)));
        let gds = Self {
            vertex_count,
            source,
            edges: built,
        };
        if let Some(u) = (1..=vertex_count).find(|&u| gds.out_edges(u).next().is_none()) {
            return Err(GdsError::NoOutEdge(u));
        }
        Ok(gds)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn lambda(&self) -> &Rational {
        self.source.lambda()
    }

    pub fn source(&self) -> &HomogeneousIfs {
        &self.source
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Edges leaving `u`, with their ids.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == u)
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (1..=self.vertex_count)
            .map(|u| self.out_edges(u).count())
            .collect()
    }

    pub fn edge_map(&self, edge: &Edge) -> Affine {
        Affine::new(self.lambda().clone(), edge.translation.clone())
    }

    /// `counts[u-1][v-1]` = number of edges `u → v`.
    pub fn count_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count;
        let mut counts = vec![vec![0; n]; n];
        for e in &self.edges {
            counts[e.from - 1][e.to - 1] += 1;
        }
        counts
    }
}

/// Partition of `K` into `m + k₁ − 2` pieces and their attractor equations.
///
/// With `h` the certificate's relabelling and `N = m + k₁ − 2`:
/// * `j ∈ γ_ℓ`: piece `h(j) = f_j(K) ∖ f_j f_m^{k_ℓ−1}(K)`, edges `f_j` to `1..=m+k_ℓ−3`;
/// * `j` free: piece `h(j) = f_j(K)`, edges `f_j` to `1..=N`;
/// * piece `m = f_m(K) ∖ f_m²(K)` (when `k₁ ≥ 3`), edges `f_m` to `1..=m−1`;
/// * piece `m+t = f_m^{t+1}(K) ∖ f_m^{t+2}(K)` for `1 ≤ t < k₁−2`, one edge `f_m` to `m+t−1`;
/// * piece `N = f_m^{k₁−1}(K)`, edges `f_m` to `{N−1, N}` when `k₁ ≥ 3`, to `1..=m` when `k₁ = 2`.
///
/// Without overlaps the system is `K` itself with `m` self-loops.
pub fn build_partition_graph(
    ifs: &HomogeneousIfs,
    cert: &ClassCertificate,
) -> Result<(GraphDirectedSystem, Vec<PieceSpec>), GdsError> {
    let m = cert.map_count;
    if cert.exponent_at(m - 1).is_some() {
        return Err(GdsError::NotNormalized);
    }
    let Some(k1) = cert.largest_exponent() else {
        let gds = GraphDirectedSystem::new(ifs.clone(), 1, (1..=m).map(|i| (1, 1, i)))?;
        return Ok((gds, vec![PieceSpec::whole(Vec::new())]));
    };
    let k1 = k1 as usize;
    let n = m + k1 - 2;
    let h = cert.relabeling();
    let mut pieces = vec![PieceSpec::whole(Vec::new()); n];
    let mut edges = Vec::new();

    for j in 1..m {
        let label = h[j - 1];
        match cert.exponent_at(j) {
            Some(k) => {
                let k = k as usize;
                pieces[label - 1] = PieceSpec::new(vec![j], vec![overlap_word(j, m, k)]);
                edges.extend((1..=m + k - 3).map(|v| (label, v, j)));
            }
            None => {
                pieces[label - 1] = PieceSpec::whole(vec![j]);
                edges.extend((1..=n).map(|v| (label, v, j)));
            }
        }
    }
    for t in 0..k1.saturating_sub(2) {
        let label = m + t;
        pieces[label - 1] = PieceSpec::new(vec![m; t + 1], vec![vec![m; t + 2]]);
        if t == 0 {
            edges.extend((1..m).map(|v| (label, v, m)));
        } else {
            edges.push((label, label - 1, m));
        }
    }
    pieces[n - 1] = PieceSpec::whole(vec![m; k1 - 1]);
    if k1 >= 3 {
        edges.push((n, n - 1, m));
        edges.push((n, n, m));
    } else {
        edges.extend((1..=m).map(|v| (n, v, m)));
    }

    let gds = GraphDirectedSystem::new(ifs.clone(), n, edges)?;
    Ok((gds, pieces))
}

/// The graph of a user-described partition, before any verification.
pub fn assemble_custom_graph(
    ifs: &HomogeneousIfs,
    piece_count: usize,
    edges: &[(usize, usize, Vec<usize>)],
) -> Result<GraphDirectedSystem, GdsError> {
    if !ifs.maps_unit_cube_into_itself() {
        return Err(GdsError::LeavesUnitCube);
    }
    let mut triples = Vec::with_capacity(edges.len());
    for (i, (from, to, via)) in edges.iter().enumerate() {
        if via.len() != 1 {
            return Err(GdsError::NonHomogeneousEdge {
                edge: i + 1,
                len: via.len(),
            });
        }
        triples.push((*from, *to, via[0]));
    }
    GraphDirectedSystem::new(ifs.clone(), piece_count, triples)
}

/// A user-described partition, accepted only if its equations verify and
/// its siblings separate at `depth`.
pub fn build_custom_graph(
    ifs: &HomogeneousIfs,
    pieces: Vec<PieceSpec>,
    edges: &[(usize, usize, Vec<usize>)],
    depth: usize,
) -> Result<VerifiedSystem, GdsError> {
    let gds = assemble_custom_graph(ifs, pieces.len(), edges)?;
    let report = verify_equations(&gds, &pieces, depth)?;
    if let Some(mismatch) = report.mismatch.clone() {
        return Err(GdsError::EquationMismatch(mismatch));
    }
    if !report.separation.is_certified() {
        return Err(GdsError::DisjointnessFailure(report.separation));
    }
    Ok(VerifiedSystem {
        gds,
        pieces,
        report,
    })
}

/// A system together with its pieces and verification report.
#[derive(Clone, Debug)]
pub struct VerifiedSystem {
    pub gds: GraphDirectedSystem,
    pub pieces: Vec<PieceSpec>,
    pub report: VerificationReport,
}

impl VerifiedSystem {
    pub fn verify(
        gds: GraphDirectedSystem,
        pieces: Vec<PieceSpec>,
        depth: usize,
    ) -> Result<Self, GdsError> {
        let report = verify_equations(&gds, &pieces, depth)?;
        Ok(Self {
            gds,
            pieces,
            report,
        })
    }
}

/// Canonical ratio-labelled multigraph of the system.
pub fn signature(gds: &GraphDirectedSystem) -> Signature {
    let (counts, _) = canon::canonical_form(&gds.count_matrix());
    Signature {
        vertex_count: gds.vertex_count(),
        ratio_exponent: 1,
        counts,
    }
}

/// A vertex bijection `a → b` preserving edge counts, if one exists; the
/// identity is returned whenever it qualifies. Entry `u-1` is the image of
/// vertex `u`.
pub fn find_isomorphism(a: &GraphDirectedSystem, b: &GraphDirectedSystem) -> Option<Vec<usize>> {
    if a.vertex_count() != b.vertex_count() {
        return None;
    }
    let identity: Vec<usize> = (1..=a.vertex_count()).collect();
    if is_isomorphism(a, b, &identity) {
        return Some(identity);
    }
    let (canon_a, pos_a) = canon::canonical_form(&a.count_matrix());
    let (canon_b, pos_b) = canon::canonical_form(&b.count_matrix());
    if canon_a != canon_b {
        return None;
    }
    let mut at_position = vec![0; b.vertex_count()];
    for (v, &p) in pos_b.iter().enumerate() {
        at_position[p] = v + 1;
    }
    Some(pos_a.iter().map(|&p| at_position[p]).collect())
}

/// True when `matching` maps every edge count of `a` onto `b`.
pub fn is_isomorphism(a: &GraphDirectedSystem, b: &GraphDirectedSystem, matching: &[usize]) -> bool {
    let n = a.vertex_count();
    if b.vertex_count() != n || matching.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in matching {
        if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
            return false;
        }
    }
    let (ca, cb) = (a.count_matrix(), b.count_matrix());
    (0..n).all(|u| (0..n).all(|v| ca[u][v] == cb[matching[u] - 1][matching[v] - 1]))
}

/// Why no equivalence was concluded. The sufficient condition is silent
/// here; this is never a proof of non-equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconclusive {
    RatiosDiffer,
    MapCountsDiffer { a: usize, b: usize },
    KVectorsDiffer { a: Vec<u32>, b: Vec<u32> },
    GammaCountsDiffer { a: Vec<usize>, b: Vec<usize> },
    SignaturesDiffer,
    NotCertified { which: Which },
}

impl std::fmt::Display for Inconclusive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Inconclusive::RatiosDiffer => f.write_str("contraction ratios differ"),
            Inconclusive::MapCountsDiffer { a, b } => write!(f, "map counts differ ({a} vs {b})"),
            Inconclusive::KVectorsDiffer { a, b } => write!(f, "k-vectors differ ({a:?} vs {b:?})"),
            Inconclusive::GammaCountsDiffer { a, b } => {
                write!(f, "gamma counts differ ({a:?} vs {b:?})")
            }
            Inconclusive::SignaturesDiffer => f.write_str("graph signatures differ"),
            Inconclusive::NotCertified { which } => {
                write!(f, "system {which:?} not certified at this depth")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    A,
    B,
}

/// Two certified systems with isomorphic graphs.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub a: VerifiedSystem,
    pub b: VerifiedSystem,
    /// Entry `u-1` is the vertex of `b` matched with vertex `u` of `a`.
    pub matching: Vec<usize>,
    /// Present on the class path: whether each IFS was reflected.
    pub reflected: Option<(bool, bool)>,
}

#[derive(Clone, Debug)]
pub enum Decision {
    Equivalent(Box<Equivalence>),
    Inconclusive(Inconclusive),
}

impl Decision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Decision::Equivalent(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("IFS {which:?} is outside the class: {violation}")]
    Class {
        which: Which,
        violation: ClassViolation,
    },
    #[error(transparent)]
    Gds(#[from] GdsError),
}

/// Equal k-vectors and γ counts give equivalent attractors; otherwise
/// the answer is `Inconclusive`.
pub fn decide_equivalence(
    a: &HomogeneousIfs,
    b: &HomogeneousIfs,
    depth: usize,
) -> Result<Decision, DecideError> {
    let na = normalize_right_free(a).map_err(|violation| DecideError::Class {
        which: Which::A,
        violation,
    })?;
    let nb = normalize_right_free(b).map_err(|violation| DecideError::Class {
        which: Which::B,
        violation,
    })?;
    if a.lambda() != b.lambda() {
        return Ok(Decision::Inconclusive(Inconclusive::RatiosDiffer));
    }
    if na.cert.map_count != nb.cert.map_count {
        return Ok(Decision::Inconclusive(Inconclusive::MapCountsDiffer {
            a: na.cert.map_count,
            b: nb.cert.map_count,
        }));
    }
    if na.cert.k_vector != nb.cert.k_vector {
        return Ok(Decision::Inconclusive(Inconclusive::KVectorsDiffer {
            a: na.cert.k_vector.clone(),
            b: nb.cert.k_vector.clone(),
        }));
    }
    let (ga, gb) = (gamma_signature(&na.cert), gamma_signature(&nb.cert));
    if ga != gb {
        return Ok(Decision::Inconclusive(Inconclusive::GammaCountsDiffer { a: ga, b: gb }));
    }
    let (gds_a, pieces_a) = build_partition_graph(&na.ifs, &na.cert)?;
    let (gds_b, pieces_b) = build_partition_graph(&nb.ifs, &nb.cert)?;
    let sys_a = VerifiedSystem::verify(gds_a, pieces_a, depth)?;
    let sys_b = VerifiedSystem::verify(gds_b, pieces_b, depth)?;
    let decision = decide_systems(sys_a, sys_b)?;
    Ok(match decision {
        Decision::Equivalent(mut eq) => {
            eq.reflected = Some((na.reflected, nb.reflected));
            Decision::Equivalent(eq)
        }
        other => other,
    })
}

/// Equivalence of two verified systems through their graph structure.
pub fn decide_systems(a: VerifiedSystem, b: VerifiedSystem) -> Result<Decision, DecideError> {
    if a.gds.lambda() != b.gds.lambda() {
        return Ok(Decision::Inconclusive(Inconclusive::RatiosDiffer));
    }
    if !a.report.is_certified() {
        return Ok(Decision::Inconclusive(Inconclusive::NotCertified { which: Which::A }));
    }
    if !b.report.is_certified() {
        return Ok(Decision::Inconclusive(Inconclusive::NotCertified { which: Which::B }));
    }
    let Some(matching) = find_isomorphism(&a.gds, &b.gds) else {
        return Ok(Decision::Inconclusive(Inconclusive::SignaturesDiffer));
    };
    Ok(Decision::Equivalent(Box::new(Equivalence {
        a,
        b,
        matching,
        reflected: None,
    })))
}

#[cfg(test)]
mod tests;
