//! Canonical form of small directed multigraphs by exhaustive
//! individualisation/refinement.

use std::collections::BTreeMap;

/// Canonical adjacency-count matrix of a ratio-labelled multigraph.
///
/// All edges of a homogeneous system carry the ratio `λ^1`, so the label
/// is recorded once. Equal signatures mean isomorphic multigraphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub vertex_count: usize,
    pub ratio_exponent: u32,
    /// Row-major `n × n` counts in canonical vertex order.
    pub counts: Vec<u32>,
}

impl Signature {
    pub fn out_degrees(&self) -> Vec<u32> {
        self.counts
            .chunks(self.vertex_count.max(1))
            .map(|row| row.iter().sum())
            .collect()
    }
}

/// Returns the canonical matrix and, for each vertex (0-based), its
/// position in the canonical order.
pub(crate) fn canonical_form(counts: &[Vec<u32>]) -> (Vec<u32>, Vec<usize>) {
    let n = counts.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    search(counts, vec![0; n], &mut best);
    best.expect("search visits at least one leaf")
}

fn search(counts: &[Vec<u32>], colors: Vec<usize>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
    let colors = refine(counts, colors);
    let n = counts.len();
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(v);
    }
    if cells.len() == n {
        let encoded = permuted(counts, &colors);
        if best.as_ref().map_or(true, |(b, _)| encoded < *b) {
            *best = Some((encoded, colors));
        }
        return;
    }
    // first non-singleton cell in colour order
    let cell = cells
        .values()
        .find(|c| c.len() > 1)
        .expect("some cell is not a singleton")
        .clone();
    for &chosen in &cell {
        let next: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(w, &c)| 2 * c + usize::from(cell.contains(&w) && w != chosen))
            .collect();
        search(counts, next, best);
    }
}

/// Colour refinement until stable. Colours are ranks `0..k` and the
/// ordering of cells is label-invariant.
fn refine(counts: &[Vec<u32>], mut colors: Vec<usize>) -> Vec<usize> {
    let n = counts.len();
    colors = rank(&colors);
    loop {
        let before = distinct(&colors);
        let keys: Vec<_> = (0..n)
            .map(|v| {
                let mut out: Vec<(usize, u32)> = (0..n)
                    .filter(|&w| counts[v][w] > 0)
                    .map(|w| (colors[w], counts[v][w]))
                    .collect();
                let mut inc: Vec<(usize, u32)> = (0..n)
                    .filter(|&w| counts[w][v] > 0)
                    .map(|w| (colors[w], counts[w][v]))
                    .collect();
                out.sort_unstable();
                inc.sort_unstable();
                (colors[v], out, inc)
            })
            .collect();
        colors = rank(&keys);
        if distinct(&colors) == before {
            return colors;
        }
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn permuted(counts: &[Vec<u32>], position: &[usize]) -> Vec<u32> {
    let n = counts.len();
    let mut out = vec![0; n * n];
    for u in 0..n {
        for v in 0..n {
            out[position[u] * n + position[v]] = counts[u][v];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permute(counts: &[Vec<u32>], perm: &[usize]) -> Vec<Vec<u32>> {
        let n = counts.len();
        let mut out = vec![vec![0; n]; n];
        for u in 0..n {
            for v in 0..n {
                out[perm[u]][perm[v]] = counts[u][v];
            }
        }
        out
    }

    #[test]
    fn invariant_under_relabelling() {
        let m = vec![
            vec![1, 1, 1, 1, 0],
            vec![1, 1, 1, 1, 0],
            vec![1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 1],
        ];
        let (canon, _) = canonical_form(&m);
        for perm in [[4, 3, 2, 1, 0], [1, 0, 4, 2, 3], [2, 4, 0, 3, 1]] {
            assert_eq!(canonical_form(&permute(&m, &perm)).0, canon);
        }
    }

    #[test]
    fn positions_realise_the_canonical_matrix() {
        let m = vec![vec![0, 2, 0], vec![0, 0, 1], vec![1, 0, 1]];
        let (canon, pos) = canonical_form(&m);
        assert_eq!(permute(&m, &pos).concat(), canon);
    }

    #[test]
    fn separates_non_isomorphic_regular_graphs() {
        // directed 4-cycle vs two directed 2-cycles: same degrees everywhere
        let cycle = vec![
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
        ];
        let pairs = vec![
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 1, 0],
        ];
        assert_ne!(canonical_form(&cycle).0, canonical_form(&pairs).0);
    }
}
