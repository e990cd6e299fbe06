//! Coding maps of graph-directed attractors and the bi-Lipschitz
//! certificate for `Π_G ∘ Π_F⁻¹`.
//!
//! Points are finite edge words; a word of length `k` stands for the box
//! `f_{e₁} ∘ … ∘ f_{e_k}([0,1]^d)` of side `λ^k`, which contains the image
//! of every infinite extension.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{pow, rat, sqrt_bracket, to_f64, Affine, Rational};
use crate::gds::{is_isomorphism, piece_cover, GraphDirectedSystem, VerifiedSystem};
use crate::ifs::ExactBox;

/// Bits of precision for square-root brackets.
const SQRT_BITS: u32 = 96;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("edge word is not admissible at position {position}")]
    NotAdmissible { position: usize },
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("system {0} is not separation-certified")]
    NotSeparated(&'static str),
    #[error("vertex matching is not an isomorphism of the two graphs")]
    SignatureMismatch,
    #[error("distortion bound violated by pair {pair}: {detail}")]
    DistortionViolation { pair: usize, detail: String },
    #[error("point lies in several sibling covers at step {step}")]
    AmbiguousAtDepth { step: usize },
    #[error("point lies in no sibling cover at step {step}")]
    NotInAttractor { step: usize },
    #[error("point has {got} coordinates, system dimension is {expected}")]
    PointDimension { got: usize, expected: usize },
    #[error("no vertex has two outgoing edges; distinct codings cannot be sampled")]
    NoBranching,
}

/// Finite admissible edge sequence starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeWord {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl EdgeWord {
    /// Checks that consecutive edges chain and the first leaves `start`.
    pub fn new(gds: &GraphDirectedSystem, start: usize, edges: Vec<usize>) -> Result<Self, CodingError> {
        if start == 0 || start > gds.vertex_count() {
            return Err(CodingError::BadVertex(start));
        }
        let mut at = start;
        for (position, &id) in edges.iter().enumerate() {
            match gds.edges().get(id) {
                Some(e) if e.from == at => at = e.to,
                _ => return Err(CodingError::NotAdmissible { position: position + 1 }),
            }
        }
        Ok(Self { start, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// 1-based position of the first differing edge.
    pub fn first_difference(&self, other: &EdgeWord) -> Option<usize> {
        self.edges
            .iter()
            .zip(&other.edges)
            .position(|(a, b)| a != b)
            .map(|p| p + 1)
    }

    /// Vertex reached after the last edge.
    pub fn end(&self, gds: &GraphDirectedSystem) -> usize {
        self.edges.last().map_or(self.start, |&id| gds.edge(id).to)
    }
}

fn word_map(gds: &GraphDirectedSystem, word: &EdgeWord) -> Affine {
    word.edges.iter().fold(Affine::identity(gds.dim()), |acc, &id| {
        acc.compose(&gds.edge_map(gds.edge(id)))
            .expect("edges share the system dimension")
    })
}

/// `f_{e₁} ∘ … ∘ f_{e_k}([0,1]^d)`.
pub fn pi_eval(gds: &GraphDirectedSystem, word: &EdgeWord) -> Result<ExactBox, CodingError> {
    EdgeWord::new(gds, word.start, word.edges.clone())?;
    Ok(ExactBox::image_of_unit(&word_map(gds, word)))
}

/// Constants of the distortion bound `c_* ∏ρ ≤ |x − y| ≤ c^* ∏ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilipCertificate {
    /// Exact smallest squared sibling gap over both systems.
    pub c_star_sq: Rational,
    /// Rational lower bound of `√c_star_sq`.
    pub c_star: Rational,
    /// Rational upper bound on the diameter of both attractors.
    pub c_upper: Rational,
    /// `c_upper / c_star`.
    pub c: Rational,
    pub depth_used: usize,
}

/// Certifies the bi-Lipschitz constant from the two verification reports.
pub fn bilip_constants(f: &VerifiedSystem, g: &VerifiedSystem) -> Result<BilipCertificate, CodingError> {
    if !f.report.is_certified() {
        return Err(CodingError::NotSeparated("F"));
    }
    if !g.report.is_certified() {
        return Err(CodingError::NotSeparated("G"));
    }
    if crate::gds::signature(&f.gds) != crate::gds::signature(&g.gds) {
        return Err(CodingError::SignatureMismatch);
    }
    let c_upper = [&f.report.hull, &g.report.hull]
        .iter()
        .map(|h| sqrt_bracket(&h.diameter_sq(), SQRT_BITS).1)
        .max()
        .expect("two hulls");
    let gaps = [&f.report.separation.min_gap_sq, &g.report.separation.min_gap_sq];
    let c_star_sq = match gaps.iter().filter_map(|g| g.as_ref()).min() {
        Some(g) => g.clone(),
        // no sibling pairs anywhere: every attractor piece is a single point
        None => &c_upper * &c_upper,
    };
    let c_star = sqrt_bracket(&c_star_sq, SQRT_BITS).0;
    let c = &c_upper / &c_star;
    Ok(BilipCertificate {
        c_star_sq,
        c_star,
        c_upper,
        c,
        depth_used: f.report.depth.min(g.report.depth),
    })
}

/// Edge bijection induced by a vertex matching: parallel edges are paired
/// in id order. Entry `i` is the `G` edge matched with `F` edge `i`.
pub fn edge_matching(
    f: &GraphDirectedSystem,
    g: &GraphDirectedSystem,
    matching: &[usize],
) -> Result<Vec<usize>, CodingError> {
    if !is_isomorphism(f, g, matching) {
        return Err(CodingError::SignatureMismatch);
    }
    let mut out = vec![usize::MAX; f.edges().len()];
    for (id, e) in f.edges().iter().enumerate() {
        if out[id] != usize::MAX {
            continue;
        }
        let f_par = f
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.from == e.from && x.to == e.to)
            .map(|(i, _)| i);
        let (gu, gv) = (matching[e.from - 1], matching[e.to - 1]);
        let g_par = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.from == gu && x.to == gv)
            .map(|(i, _)| i);
        for (a, b) in f_par.zip(g_par) {
            out[a] = b;
        }
    }
    Ok(out)
}

/// Inverse of a vertex matching.
pub fn invert_matching(matching: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; matching.len()];
    for (u, &v) in matching.iter().enumerate() {
        inv[v - 1] = u + 1;
    }
    inv
}

/// The `G`-word corresponding to an `F`-word, with its box.
pub fn bilip_map(
    f: &GraphDirectedSystem,
    g: &GraphDirectedSystem,
    matching: &[usize],
    word: &EdgeWord,
) -> Result<(EdgeWord, ExactBox), CodingError> {
    let edges = edge_matching(f, g, matching)?;
    EdgeWord::new(f, word.start, word.edges.clone())?;
    map_word(g, &edges, matching, word)
}

fn map_word(
    g: &GraphDirectedSystem,
    edges: &[usize],
    matching: &[usize],
    word: &EdgeWord,
) -> Result<(EdgeWord, ExactBox), CodingError> {
    let image = EdgeWord::new(
        g,
        matching[word.start - 1],
        word.edges.iter().map(|&e| edges[e]).collect(),
    )?;
    let b = pi_eval(g, &image)?;
    Ok((image, b))
}

/// Outcome of a sampled distortion check.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub pairs: usize,
    pub depth: usize,
    pub seed: u64,
    /// Largest `max(d_G/d_F, d_F/d_G)` over sampled midpoint pairs.
    pub max_ratio: f64,
    /// Additive slack `(c + 1)·D·λ^depth` in both bounds.
    pub slack: Rational,
    pub round_trip_failures: usize,
}

fn unit_diameter_bound(dim: usize) -> Rational {
    if dim == 1 {
        Rational::one()
    } else {
        rat(3, 2)
    }
}

fn random_word(gds: &GraphDirectedSystem, start: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut at = start;
    let mut edges = Vec::with_capacity(len);
    for _ in 0..len {
        let out: Vec<usize> = gds.out_edges(at).map(|(id, _)| id).collect();
        let id = out[rng.gen_range(0..out.len())];
        edges.push(id);
        at = gds.edge(id).to;
    }
    edges
}

/// Two admissible words from the same start vertex, differing first at a
/// uniformly drawn position.
fn random_pair(gds: &GraphDirectedSystem, depth: usize, rng: &mut ChaCha8Rng) -> (EdgeWord, EdgeWord) {
    loop {
        let start = rng.gen_range(1..=gds.vertex_count());
        let first = random_word(gds, start, depth, rng);
        let ell = rng.gen_range(1..=depth);
        let at = if ell == 1 { start } else { gds.edge(first[ell - 2]).to };
        let siblings: Vec<usize> = gds
            .out_edges(at)
            .map(|(id, _)| id)
            .filter(|&id| id != first[ell - 1])
            .collect();
        if siblings.is_empty() {
            continue;
        }
        let mut second = first[..ell - 1].to_vec();
        let branch = siblings[rng.gen_range(0..siblings.len())];
        second.push(branch);
        second.extend(random_word(gds, gds.edge(branch).to, depth - ell, rng));
        return (
            EdgeWord { start, edges: first },
            EdgeWord { start, edges: second },
        );
    }
}

fn distance_bracket(a: &ExactBox, b: &ExactBox) -> (Rational, Rational) {
    let (p, q) = (a.midpoint(), b.midpoint());
    let sq = p
        .iter()
        .zip(&q)
        .fold(Rational::zero(), |acc, (x, y)| acc + (x - y) * (x - y));
    sqrt_bracket(&sq, SQRT_BITS)
}

/// Samples `pair_count` pairs of distinct admissible words of length
/// `depth` (deterministic in `seed`) and checks that box midpoints obey
/// the certified distortion bound up to the box-width slack.
pub fn sample_bilip_check(
    f: &GraphDirectedSystem,
    g: &GraphDirectedSystem,
    matching: &[usize],
    cert: &BilipCertificate,
    pair_count: usize,
    depth: usize,
    seed: u64,
) -> Result<DistortionReport, CodingError> {
    let forward = edge_matching(f, g, matching)?;
    let inverse_matching = invert_matching(matching);
    let backward = edge_matching(g, f, &inverse_matching)?;
    if !(1..=f.vertex_count()).any(|u| f.out_edges(u).nth(1).is_some()) {
        return Err(CodingError::NoBranching);
    }
    let depth = depth.max(1);
    let width = pow(f.lambda(), depth).max(pow(g.lambda(), depth));
    let diameter = unit_diameter_bound(f.dim()).max(unit_diameter_bound(g.dim()));
    let slack = (&cert.c + Rational::one()) * diameter * width;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 1.0;
    let mut round_trip_failures = 0;
    for pair in 0..pair_count {
        let (x, y) = random_pair(f, depth, &mut rng);
        let (fx, fy) = (pi_eval(f, &x)?, pi_eval(f, &y)?);
        let (gx_word, gx) = map_word(g, &forward, matching, &x)?;
        let (gy_word, gy) = map_word(g, &forward, matching, &y)?;
        for (original, image) in [(&x, &gx_word), (&y, &gy_word)] {
            let (back, _) = map_word(f, &backward, &inverse_matching, image)?;
            if back != *original {
                round_trip_failures += 1;
            }
        }

        let (df_lo, df_hi) = distance_bracket(&fx, &fy);
        let (dg_lo, dg_hi) = distance_bracket(&gx, &gy);
        let too_far = dg_lo > &cert.c * &df_hi + &slack;
        let too_close = df_lo > &cert.c * &dg_hi + &slack;
        if too_far || too_close {
            return Err(CodingError::DistortionViolation {
                pair,
                detail: format!(
                    "d_F ~ {:.6e}, d_G ~ {:.6e}, c = {}",
                    to_f64(&df_hi),
                    to_f64(&dg_hi),
                    cert.c
                ),
            });
        }
        if df_hi.is_positive() && dg_hi.is_positive() {
            let (a, b) = (to_f64(&df_hi), to_f64(&dg_hi));
            max_ratio = max_ratio.max(a / b).max(b / a);
        }
    }
    Ok(DistortionReport {
        pairs: pair_count,
        depth,
        seed,
        max_ratio,
        slack,
        round_trip_failures,
    })
}

/// Finds the coding of an exact point by descending through the separated
/// sibling covers of a verified system.
pub struct Locator<'a> {
    system: &'a VerifiedSystem,
    /// `images[id]`: boxes of `f_e(cover(F_{e⁺}))` for edge `id`.
    images: Vec<Vec<ExactBox>>,
}

impl<'a> Locator<'a> {
    pub fn new(system: &'a VerifiedSystem) -> Self {
        let gds = &system.gds;
        let level = system.report.level - 1;
        let covers: Vec<Vec<ExactBox>> = system
            .pieces
            .iter()
            .map(|p| {
                piece_cover(gds.source(), p, level)
                    .expect("pieces were verified at this level")
                    .into_iter()
                    .collect()
            })
            .collect();
        let images = gds
            .edges()
            .iter()
            .map(|e| {
                let map = gds.edge_map(e);
                covers[e.to - 1]
                    .iter()
                    .map(|b| ExactBox {
                        lower: map.apply(&b.lower),
                        upper: map.apply(&b.upper),
                    })
                    .collect()
            })
            .collect();
        Self { system, images }
    }

    /// Edge word of length `depth` from `start` whose box holds `point`.
    pub fn locate(&self, start: usize, point: &[Rational], depth: usize) -> Result<EdgeWord, CodingError> {
        let gds = &self.system.gds;
        if start == 0 || start > gds.vertex_count() {
            return Err(CodingError::BadVertex(start));
        }
        if point.len() != gds.dim() {
            return Err(CodingError::PointDimension {
                got: point.len(),
                expected: gds.dim(),
            });
        }
        let mut at = start;
        let mut local = point.to_vec();
        let mut edges = Vec::with_capacity(depth);
        for step in 1..=depth {
            let hits: Vec<usize> = gds
                .out_edges(at)
                .map(|(id, _)| id)
                .filter(|&id| self.images[id].iter().any(|b| b.contains_point(&local)))
                .collect();
            let id = match hits.as_slice() {
                [id] => *id,
                [] => return Err(CodingError::NotInAttractor { step }),
                _ => return Err(CodingError::AmbiguousAtDepth { step }),
            };
            let e = gds.edge(id);
            let lambda = gds.lambda();
            local = local
                .iter()
                .zip(&e.translation)
                .map(|(x, t)| (x - t) / lambda)
                .collect();
            edges.push(id);
            at = e.to;
        }
        Ok(EdgeWord { start, edges })
    }
}

/// Fixed point of the composition along a cyclic edge word: the point
/// coded by repeating the cycle forever.
pub fn cycle_fixed_point(gds: &GraphDirectedSystem, cycle: &EdgeWord) -> Result<Vec<Rational>, CodingError> {
    let word = EdgeWord::new(gds, cycle.start, cycle.edges.clone())?;
    if word.is_empty() || word.end(gds) != word.start {
        return Err(CodingError::NotAdmissible { position: word.len() + 1 });
    }
    let map = word_map(gds, &word);
    let denom = Rational::one() - &map.scale;
    Ok(map.shift.iter().map(|s| s / &denom).collect())
}
