use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;

use super::*;
use crate::algebra::rat;
use crate::catalog;
use crate::gds::{build_custom_graph, build_partition_graph};
use crate::ifs::{normalize_right_free, validate_class, ClassCertificate, ExactBox};

fn system(ifs: &HomogeneousIfs, depth: usize) -> VerifiedSystem {
    let n = normalize_right_free(ifs).unwrap();
    let (gds, pieces) = build_partition_graph(&n.ifs, &n.cert).unwrap();
    VerifiedSystem::verify(gds, pieces, depth).unwrap()
}

fn golden_ratio_like() -> f64 {
    // x² − 5x + 2 = 0, larger root
    (5.0 + 17f64.sqrt()) / 2.0
}

fn matrix(rows: &[&[u32]]) -> CountMatrix {
    CountMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

#[test]
fn trivial_spectra() {
    let one = spectral_radius(&matrix(&[&[1]]), DEFAULT_TOL).unwrap();
    assert!((one.rho - 1.0).abs() < 1e-12);
    let swap = spectral_radius(&matrix(&[&[0, 1], &[1, 0]]), DEFAULT_TOL).unwrap();
    assert!((swap.rho - 1.0).abs() < 1e-12);
    let full = spectral_radius(&matrix(&[&[3]]), DEFAULT_TOL).unwrap();
    assert_eq!(full.rho, 3.0);
}

#[test]
fn line_pair_matrix_and_radius() {
    let sys = system(&catalog::line5_a(rat(1, 6)), 4);
    let m = count_matrix(&sys.gds);
    let small: &[u32] = &[1, 1, 1, 1, 0];
    let big: &[u32] = &[1, 1, 1, 1, 1];
    assert_eq!(m, matrix(&[small, small, big, big, big]));
    assert_eq!(m.edge_total(), 23);
    let est = spectral_radius(&m, DEFAULT_TOL).unwrap();
    let oracle = golden_ratio_like();
    assert!((est.rho - oracle).abs() < 1e-9, "{} vs {oracle}", est.rho);
    assert!(est.lower <= oracle + 1e-12 && oracle <= est.upper + 1e-12);
    assert!(est.residual < 1e-12);
}

#[test]
fn line_pair_dimensions_agree() {
    let oracle = golden_ratio_like().ln() / 6f64.ln();
    let a = hausdorff_dim(&system(&catalog::line5_a(rat(1, 6)), 4), DEFAULT_TOL).unwrap();
    let b = hausdorff_dim(&system(&catalog::line5_b(rat(1, 6)), 4), DEFAULT_TOL).unwrap();
    assert!((a.dimension - oracle).abs() < 1e-9);
    assert!((a.dimension - 0.84702).abs() < 1e-5);
    assert!((a.dimension - b.dimension).abs() < 2e-9);
}

#[test]
fn full_shift_dimension() {
    let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "2*l", "1-l"]).unwrap();
    let dim = hausdorff_dim(&system(&ifs, 2), DEFAULT_TOL).unwrap();
    assert_eq!(dim.spectral.rho, 3.0);
    assert!((dim.dimension - 3f64.ln() / 5f64.ln()).abs() < 1e-15);
}

#[test]
fn planar_partition_matrix() {
    let (pieces, edges) = catalog::plane6_f_partition();
    let sys = build_custom_graph(&catalog::plane6_f(rat(1, 4)), pieces, &edges, 3).unwrap();
    let m = count_matrix(&sys.gds);
    assert_eq!(m.size(), 6);
    assert!(m.rows().iter().flatten().all(|&c| c <= 1));
    assert_eq!(m.row_sums(), vec![6, 6, 6, 5, 6, 5]);
    let dim = hausdorff_dim(&sys, DEFAULT_TOL).unwrap();
    let rho = dim.spectral.rho;
    assert!(rho > 5.0 && rho < 6.0);
    assert!((dim.dimension - rho.ln() / 4f64.ln()).abs() < 1e-15);
}

#[test]
fn uncertified_systems_have_no_dimension() {
    let mut sys = system(&catalog::line5_a(rat(1, 6)), 4);
    sys.report.separation.status = SeparationStatus::UnknownAtDepth;
    assert_eq!(hausdorff_dim(&sys, DEFAULT_TOL).unwrap_err(), DimensionError::NotCertified);
}

#[test]
fn matrix_and_tolerance_errors() {
    assert_eq!(CountMatrix::new(vec![]).unwrap_err(), DimensionError::Empty);
    assert_eq!(
        CountMatrix::new(vec![vec![1, 0], vec![1]]).unwrap_err(),
        DimensionError::NotSquare { row: 2, len: 1, expected: 2 }
    );
    assert_eq!(CountMatrix::new(vec![vec![1, 1], vec![0, 0]]).unwrap_err(), DimensionError::ZeroRow(2));
    let m = matrix(&[&[1]]);
    assert!(matches!(spectral_radius(&m, 0.0), Err(DimensionError::BadTolerance(_))));
    assert!(matches!(spectral_radius(&m, f64::NAN), Err(DimensionError::BadTolerance(_))));
}

#[test]
fn reducible_without_gap_does_not_converge() {
    // Perron vector has a zero entry, so the bracket never closes
    let m = matrix(&[&[2, 1], &[0, 1]]);
    assert_eq!(
        spectral_radius_with(&m, DEFAULT_TOL, 500).unwrap_err(),
        DimensionError::NotConverged { max_iters: 500 }
    );
}

#[test]
fn depth_two_count_for_the_line() {
    let count = box_count_dim(&catalog::line5_a(rat(1, 6)), 2, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!(count.counts, vec![5, 23]);
}

#[test]
fn box_count_slope_tracks_the_spectral_value() {
    let ifs = catalog::line5_a(rat(1, 6));
    let count = box_count_dim(&ifs, 8, DEFAULT_ENUM_CAP).unwrap();
    let spectral = golden_ratio_like().ln() / 6f64.ln();
    assert!((count.slope - spectral).abs() < 0.05, "slope {}", count.slope);
    for w in count.counts.windows(2) {
        assert!(w[1] <= 5 * w[0]);
    }
    // N_k ≥ ρ^k / C with C calibrated on this fixture
    let rho = golden_ratio_like();
    for (k, &n) in count.counts.iter().enumerate() {
        assert!(n as f64 >= rho.powi(k as i32 + 1) / 2.0);
    }
}

#[test]
fn integer_and_rational_recursions_agree() {
    let fixtures = [
        catalog::line5_a(rat(1, 6)),
        catalog::line5_b(rat(2, 13)),
        catalog::line6(rat(1, 8)),
        catalog::plane6_f(rat(1, 4)),
        catalog::plane6_g(rat(1, 4)),
        catalog::line6_in_plane(rat(1, 8)),
    ];
    for ifs in &fixtures {
        let scaled = scaled_corner_counts(ifs, 5).unwrap();
        assert_eq!(scaled, rational_corner_counts(ifs, 5));
    }
    // q^k overflows i128 long before the rational path struggles
    let huge = catalog::line5_a(rat(1, 1_000_000_007));
    assert!(scaled_corner_counts(&huge, 6).is_none());
    assert_eq!(box_count_dim(&huge, 6, DEFAULT_ENUM_CAP).unwrap().counts[1], 23);
}

#[test]
fn full_shift_counts_every_word() {
    let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "2*l", "1-l"]).unwrap();
    let count = box_count_dim(&ifs, 6, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!(count.counts, (1..=6).map(|k| 3u64.pow(k)).collect::<Vec<_>>());
    assert!((count.slope - 3f64.ln() / 5f64.ln()).abs() < 1e-12);
}

#[test]
fn box_count_limits() {
    let ifs = catalog::line5_a(rat(1, 6));
    assert_eq!(
        box_count_dim(&ifs, 3, 100).unwrap_err(),
        DimensionError::BudgetExceeded { words: 125, cap: 100 }
    );
    assert_eq!(box_count_dim(&ifs, 1, 100).unwrap_err(), DimensionError::DepthTooSmall(1));
}

fn all_words(m: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|w| {
                (1..=m).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect()
    })
}

/// Words are identified under substitution of `i m^{k-1}` by `(i+1) 1^{k-1}`
/// at any position; returns a class label per word.
fn rewrite_classes(cert: &ClassCertificate, words: &[Vec<usize>]) -> BTreeMap<Vec<usize>, usize> {
    let m = cert.map_count;
    let rules: Vec<(Vec<usize>, Vec<usize>)> = cert
        .overlaps
        .iter()
        .map(|o| {
            let k = o.exponent as usize;
            let mut left = vec![o.index];
            left.extend(std::iter::repeat(m).take(k - 1));
            let mut right = vec![o.index + 1];
            right.extend(std::iter::repeat(1).take(k - 1));
            (left, right)
        })
        .collect();
    let mut label = BTreeMap::new();
    let mut next = 0;
    for start in words {
        if label.contains_key(start) {
            continue;
        }
        let mut queue = VecDeque::from([start.clone()]);
        label.insert(start.clone(), next);
        while let Some(w) = queue.pop_front() {
            for (l, r) in &rules {
                for (from, to) in [(l, r), (r, l)] {
                    for at in 0..=w.len().saturating_sub(from.len()) {
                        if w.len() >= from.len() && &w[at..at + from.len()] == from.as_slice() {
                            let mut v = w.clone();
                            v.splice(at..at + from.len(), to.iter().copied());
                            if !label.contains_key(&v) {
                                label.insert(v.clone(), next);
                                queue.push_back(v);
                            }
                        }
                    }
                }
            }
        }
        next += 1;
    }
    label
}

#[test]
fn dedup_matches_enumeration_and_rewriting() {
    for ifs in [catalog::line5_a(rat(1, 6)), catalog::line5_b(rat(1, 6)), catalog::line5_single(rat(1, 7))] {
        let cert = validate_class(&ifs).unwrap();
        let count = box_count_dim(&ifs, 3, DEFAULT_ENUM_CAP).unwrap();
        for k in 1..=3 {
            let words = all_words(ifs.map_count(), k);
            let boxes: Vec<ExactBox> = words.iter().map(|w| ifs.cylinder(w).unwrap()).collect();
            let distinct: BTreeSet<&ExactBox> = boxes.iter().collect();
            assert_eq!(distinct.len() as u64, count.counts[k - 1]);

            let classes = rewrite_classes(&cert, &words);
            for (i, u) in words.iter().enumerate() {
                for (j, v) in words.iter().enumerate().skip(i + 1) {
                    assert_eq!(boxes[i] == boxes[j], classes[u] == classes[v], "{u:?} {v:?}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_grow_at_most_by_the_map_count(num in 1i64..6, extra in 0i64..3, seed in 0usize..3) {
        // λ ≤ 1/8 keeps the line fixtures in class
        let lambda = rat(1, 7 + num + extra);
        let ifs = [catalog::line5_a, catalog::line5_b, catalog::line5_single][seed](lambda);
        let count = box_count_dim(&ifs, 4, DEFAULT_ENUM_CAP).unwrap();
        prop_assert_eq!(count.counts[0], 5);
        for w in count.counts.windows(2) {
            prop_assert!(w[1] <= 5 * w[0]);
            prop_assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn spectral_bracket_contains_row_sum_bounds(rows in prop::collection::vec(prop::collection::vec(1u32..5, 3), 3)) {
        let m = CountMatrix::new(rows).unwrap();
        let est = spectral_radius(&m, 1e-10).unwrap();
        let sums = m.row_sums();
        let (lo, hi) = (*sums.iter().min().unwrap() as f64, *sums.iter().max().unwrap() as f64);
        prop_assert!(est.rho >= lo - 1e-9 && est.rho <= hi + 1e-9);
        prop_assert!(est.residual <= 1e-10);
    }
}
