//! Worked systems with complete overlaps: two 5-map line systems with
//! different overlap positions, two planar 6-map systems, and a 6-map line
//! system embedded in the plane, each with its hand-built partition.

use crate::algebra::Rational;
use crate::gds::PieceSpec;
use crate::ifs::HomogeneousIfs;

/// Edge list `(from, to, via)` of a custom partition.
pub type EdgeList = Vec<(usize, usize, Vec<usize>)>;

fn line(lambda: Rational, exprs: &[&str]) -> HomogeneousIfs {
    HomogeneousIfs::parse_1d(lambda, exprs).expect("catalog expressions are well formed")
}

fn plane(lambda: Rational, exprs: &[[&str; 2]]) -> HomogeneousIfs {
    let maps: Vec<Vec<&str>> = exprs.iter().map(|p| p.to_vec()).collect();
    HomogeneousIfs::parse(lambda, &maps).expect("catalog expressions are well formed")
}

/// Overlaps at (1,2) and (2,3), both of length λ². In the class for λ < 1/5.
pub fn line5_a(lambda: Rational) -> HomogeneousIfs {
    line(lambda, &["0", "l*(1-l)", "2*l*(1-l)", "3*l", "1-l"])
}

/// Overlaps at (1,2) and (3,4), both of length λ². In the class for λ < 1/5.
pub fn line5_b(lambda: Rational) -> HomogeneousIfs {
    line(lambda, &["0", "l*(1-l)", "2*l", "3*l-l^2", "1-l"])
}

/// A single λ² overlap at (1,2); same k-vector as [`line5_a`], fewer overlaps.
pub fn line5_single(lambda: Rational) -> HomogeneousIfs {
    line(lambda, &["0", "l*(1-l)", "2*l", "3*l+l^2", "1-l"])
}

/// Six maps on the line with λ² overlaps at (2,3) and (3,4). In the class
/// for λ < 1/7.
pub fn line6(lambda: Rational) -> HomogeneousIfs {
    line(lambda, &["0", "2*l", "3*l-l^2", "4*l-2*l^2", "5*l", "1-l"])
}

/// Planar system with `f_4 f_2 = f_5 f_4` and `f_6 f_3 = f_5 f_1`.
pub fn plane6_f(lambda: Rational) -> HomogeneousIfs {
    plane(
        lambda,
        &[
            ["0", "0"],
            ["1-l", "0"],
            ["1-l", "1-l"],
            ["0", "1-l"],
            ["l*(1-l)", "(1-l)^2"],
            ["0", "(1-l)*(1-2*l)"],
        ],
    )
}

/// [`plane6_f`] with the sixth map moved to `(λ(1−λ), λ(1−λ))`.
pub fn plane6_g(lambda: Rational) -> HomogeneousIfs {
    plane(
        lambda,
        &[
            ["0", "0"],
            ["1-l", "0"],
            ["1-l", "1-l"],
            ["0", "1-l"],
            ["l*(1-l)", "(1-l)^2"],
            ["l*(1-l)", "l*(1-l)"],
        ],
    )
}

/// [`line6`] placed on the x-axis of the plane.
pub fn line6_in_plane(lambda: Rational) -> HomogeneousIfs {
    plane(
        lambda,
        &[
            ["0", "0"],
            ["2*l", "0"],
            ["3*l-l^2", "0"],
            ["4*l-2*l^2", "0"],
            ["5*l", "0"],
            ["1-l", "0"],
        ],
    )
}

fn full_rows(rows: &[(usize, usize)], n: usize) -> EdgeList {
    rows.iter()
        .flat_map(|&(vertex, via)| (1..=n).map(move |v| (vertex, v, vec![via])))
        .collect()
}

fn rows_without(vertex: usize, via: usize, skip: usize, n: usize) -> EdgeList {
    (1..=n)
        .filter(|&v| v != skip)
        .map(|v| (vertex, v, vec![via]))
        .collect()
}

/// Pieces `f_i(F)` for i = 1,2,3,5, `f_4(F) ∖ f_4 f_2(F)`, `f_6(F) ∖ f_6 f_3(F)`.
pub fn plane6_f_partition() -> (Vec<PieceSpec>, EdgeList) {
    let pieces = vec![
        PieceSpec::whole(vec![1]),
        PieceSpec::whole(vec![2]),
        PieceSpec::whole(vec![3]),
        PieceSpec::new(vec![4], vec![vec![4, 2]]),
        PieceSpec::whole(vec![5]),
        PieceSpec::new(vec![6], vec![vec![6, 3]]),
    ];
    let mut edges = full_rows(&[(1, 1), (2, 2), (3, 3), (5, 5)], 6);
    edges.extend(rows_without(4, 4, 2, 6));
    edges.extend(rows_without(6, 6, 3, 6));
    (pieces, edges)
}

/// Pieces `g_5(G)`, `g_2(G)`, `g_3(G)`, `g_4(G) ∖ g_4 g_2(G)`, `g_6(G)`,
/// `g_1(G) ∖ g_1 g_3(G)`.
pub fn plane6_g_partition() -> (Vec<PieceSpec>, EdgeList) {
    let pieces = vec![
        PieceSpec::whole(vec![5]),
        PieceSpec::whole(vec![2]),
        PieceSpec::whole(vec![3]),
        PieceSpec::new(vec![4], vec![vec![4, 2]]),
        PieceSpec::whole(vec![6]),
        PieceSpec::new(vec![1], vec![vec![1, 3]]),
    ];
    let mut edges = full_rows(&[(1, 5), (2, 2), (3, 3), (5, 6)], 6);
    edges.extend(rows_without(4, 4, 2, 6));
    edges.extend(rows_without(6, 1, 3, 6));
    (pieces, edges)
}

/// Pieces `f_3`, `f_1`, `f_6`, `f_4 ∖ f_4 f_1`, `f_5`, `f_2 ∖ f_2 f_6`.
pub fn line6_in_plane_partition() -> (Vec<PieceSpec>, EdgeList) {
    let pieces = vec![
        PieceSpec::whole(vec![3]),
        PieceSpec::whole(vec![1]),
        PieceSpec::whole(vec![6]),
        PieceSpec::new(vec![4], vec![vec![4, 1]]),
        PieceSpec::whole(vec![5]),
        PieceSpec::new(vec![2], vec![vec![2, 6]]),
    ];
    let mut edges = full_rows(&[(1, 3), (2, 1), (3, 6), (5, 5)], 6);
    edges.extend(rows_without(4, 4, 2, 6));
    edges.extend(rows_without(6, 2, 3, 6));
    (pieces, edges)
}
