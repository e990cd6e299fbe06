use super::*;
use crate::algebra::rat;
use crate::catalog;
use crate::ifs::{validate_class, ClassCertificate};

fn partition(ifs: &HomogeneousIfs) -> (GraphDirectedSystem, Vec<PieceSpec>, ClassCertificate) {
    let n = normalize_right_free(ifs).unwrap();
    let (gds, pieces) = build_partition_graph(&n.ifs, &n.cert).unwrap();
    (gds, pieces, n.cert)
}

/// Out-degrees predicted from the certificate alone.
fn predicted_degrees(cert: &ClassCertificate) -> Vec<usize> {
    let m = cert.map_count;
    let Some(k1) = cert.largest_exponent() else {
        return vec![m];
    };
    let k1 = k1 as usize;
    let n = m + k1 - 2;
    let h = cert.relabeling();
    let mut deg = vec![0; n];
    for j in 1..m {
        deg[h[j - 1] - 1] = match cert.exponent_at(j) {
            Some(k) => m + k as usize - 3,
            None => n,
        };
    }
    for t in 0..k1.saturating_sub(2) {
        deg[m + t - 1] = if t == 0 { m - 1 } else { 1 };
    }
    deg[n - 1] = if k1 >= 3 { 2 } else { m };
    deg
}

fn deep_overlap(k: u32) -> HomogeneousIfs {
    let expr = format!("l - l^{k}");
    HomogeneousIfs::parse_1d(rat(1, 10), &["0", &expr, "1-l"]).unwrap()
}

fn mixed_overlaps() -> HomogeneousIfs {
    HomogeneousIfs::parse_1d(rat(1, 10), &["0", "l-l^3", "2*l-l^2-l^3", "1-l"]).unwrap()
}

#[test]
fn example2_graph_shape() {
    let (gds, pieces, _) = partition(&catalog::line5_a(rat(1, 6)));
    assert_eq!(gds.vertex_count(), 5);
    assert_eq!(gds.edges().len(), 23);
    assert_eq!(gds.out_degrees(), vec![4, 4, 5, 5, 5]);
    assert_eq!(
        gds.count_matrix(),
        vec![
            vec![1, 1, 1, 1, 0],
            vec![1, 1, 1, 1, 0],
            vec![1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 1],
        ]
    );
    assert_eq!(pieces[0], PieceSpec::new(vec![1], vec![vec![1, 5]]));
    assert_eq!(pieces[4], PieceSpec::whole(vec![5]));
}

#[test]
fn example2_graph_verifies() {
    let (gds, pieces, _) = partition(&catalog::line5_a(rat(1, 6)));
    let report = verify_equations(&gds, &pieces, 4).unwrap();
    assert_eq!(report.level, 6);
    assert!(report.equations_hold(), "{:?}", report.mismatch);
    assert!(report.separation.is_certified());
    assert_eq!(report.partition, PartitionCheck { disjoint: true, covers_attractor: true });
}

#[test]
fn relabeling_of_second_example() {
    let cert = validate_class(&catalog::line5_b(rat(1, 6))).unwrap();
    assert_eq!(cert.relabeling(), vec![1, 3, 2, 4]);
    let (gds, pieces, _) = partition(&catalog::line5_b(rat(1, 6)));
    assert_eq!(pieces[1], PieceSpec::new(vec![3], vec![vec![3, 5]]));
    assert_eq!(gds.out_degrees(), vec![4, 4, 5, 5, 5]);
}

#[test]
fn smallest_class_member() {
    let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "l-l^2", "1-l"]).unwrap();
    let (gds, pieces, _) = partition(&ifs);
    assert_eq!(gds.out_degrees(), vec![2, 3, 3]);
    assert!(verify_equations(&gds, &pieces, 4).unwrap().is_certified());
}

#[test]
fn deeper_overlaps_verify() {
    for (ifs, degrees) in [
        (deep_overlap(3), vec![3, 4, 2, 2]),
        (deep_overlap(4), vec![4, 5, 2, 1, 2]),
        (mixed_overlaps(), vec![4, 3, 5, 3, 2]),
    ] {
        let (gds, pieces, cert) = partition(&ifs);
        assert_eq!(gds.out_degrees(), degrees);
        assert_eq!(predicted_degrees(&cert), degrees);
        let report = verify_equations(&gds, &pieces, 3).unwrap();
        assert!(report.equations_hold(), "{:?}", report.mismatch);
        assert!(report.separation.is_certified());
        assert!(report.partition.disjoint && report.partition.covers_attractor);
    }
}

#[test]
fn degrees_follow_the_certificate() {
    let fixtures = [
        catalog::line5_a(rat(1, 6)),
        catalog::line5_b(rat(1, 7)),
        catalog::line5_single(rat(1, 10)),
        catalog::line6(rat(1, 8)),
        deep_overlap(5),
        mixed_overlaps(),
    ];
    for ifs in &fixtures {
        let (gds, _, cert) = partition(ifs);
        let n = cert.largest_exponent().map_or(1, |k| cert.map_count + k as usize - 2);
        assert_eq!(gds.vertex_count(), n);
        assert_eq!(gds.out_degrees(), predicted_degrees(&cert));
        for e in gds.edges() {
            let map = gds.source().word_map(&e.provenance()).unwrap();
            assert_eq!(map.scale, *gds.lambda());
            assert_eq!(map.shift, e.translation);
        }
    }
}

#[test]
fn full_shift_without_overlaps() {
    let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "1/2-1/2*l", "1-l"]).unwrap();
    let (gds, pieces, _) = partition(&ifs);
    assert_eq!(gds.vertex_count(), 1);
    assert_eq!(gds.count_matrix(), vec![vec![3]]);
    assert!(verify_equations(&gds, &pieces, 3).unwrap().is_certified());
}

#[test]
fn dropped_edge_is_caught() {
    let (gds, pieces, _) = partition(&catalog::line5_a(rat(1, 6)));
    let edges: Vec<_> = gds
        .edges()
        .iter()
        .skip(1)
        .map(|e| (e.from, e.to, e.map))
        .collect();
    let broken = GraphDirectedSystem::new(gds.source().clone(), 5, edges).unwrap();
    let report = verify_equations(&broken, &pieces, 4).unwrap();
    let mismatch = report.mismatch.expect("missing edge must show");
    assert_eq!(mismatch.vertex, 1);
    assert_eq!(mismatch.side, MismatchSide::LeftOnly);
}

#[test]
fn rejects_unnormalized_input() {
    let reflected = crate::ifs::reflect(&catalog::line5_a(rat(1, 6)));
    let cert = validate_class(&reflected).unwrap();
    assert_eq!(
        build_partition_graph(&reflected, &cert).unwrap_err(),
        GdsError::NotNormalized
    );
}

#[test]
fn structural_errors() {
    let ifs = catalog::line5_a(rat(1, 6));
    assert_eq!(
        GraphDirectedSystem::new(ifs.clone(), 2, [(1, 1, 1)]).unwrap_err(),
        GdsError::NoOutEdge(2)
    );
    assert!(matches!(
        GraphDirectedSystem::new(ifs.clone(), 1, [(1, 2, 1)]).unwrap_err(),
        GdsError::VertexOutOfRange { vertex: 2, count: 1 }
    ));
    assert!(matches!(
        GraphDirectedSystem::new(ifs.clone(), 1, [(1, 1, 9)]).unwrap_err(),
        GdsError::Ifs(_)
    ));
    let err = build_custom_graph(&ifs, vec![PieceSpec::whole(vec![])], &[(1, 1, vec![1, 2])], 2);
    assert!(matches!(err, Err(GdsError::NonHomogeneousEdge { edge: 1, len: 2 })));
}

#[test]
fn signatures() {
    let (ga, _, _) = partition(&catalog::line5_a(rat(1, 6)));
    let (gb, _, _) = partition(&catalog::line5_b(rat(1, 6)));
    assert_eq!(signature(&ga), signature(&gb));

    // relabel vertices 1..5 by a fixed permutation
    let perm = [3, 5, 1, 4, 2];
    let permuted = GraphDirectedSystem::new(
        ga.source().clone(),
        5,
        ga.edges().iter().map(|e| (perm[e.from - 1], perm[e.to - 1], e.map)),
    )
    .unwrap();
    assert_eq!(signature(&permuted), signature(&ga));
    let matching = find_isomorphism(&ga, &permuted).unwrap();
    assert!(is_isomorphism(&ga, &permuted, &matching));

    // degrees (4,5,5,5,5)
    let mut edges: Vec<_> = ga.edges().iter().map(|e| (e.from, e.to, e.map)).collect();
    edges.push((2, 5, 2));
    let more = GraphDirectedSystem::new(ga.source().clone(), 5, edges).unwrap();
    assert_ne!(signature(&more), signature(&ga));
    assert!(find_isomorphism(&ga, &more).is_none());
    assert!(!is_isomorphism(&ga, &more, &[1, 2, 3, 4, 5]));
}

#[test]
fn planar_partitions() {
    let (pf, ef) = catalog::plane6_f_partition();
    let f = build_custom_graph(&catalog::plane6_f(rat(1, 4)), pf, &ef, 3).unwrap();
    assert_eq!(f.gds.out_degrees(), vec![6, 6, 6, 5, 6, 5]);
    assert!(f.report.partition.disjoint && f.report.partition.covers_attractor);

    let (pg, eg) = catalog::plane6_g_partition();
    let g = build_custom_graph(&catalog::plane6_g(rat(1, 4)), pg, &eg, 3).unwrap();
    assert_eq!(g.gds.count_matrix(), f.gds.count_matrix());
    assert!(is_isomorphism(&f.gds, &g.gds, &[1, 2, 3, 4, 5, 6]));

    let (ps, es) = catalog::line6_in_plane_partition();
    let star = build_custom_graph(&catalog::line6_in_plane(rat(1, 8)), ps, &es, 3).unwrap();
    assert_eq!(signature(&star.gds), signature(&g.gds));
    assert_eq!(signature(&f.gds), signature(&g.gds));
}

#[test]
fn corrupted_custom_edges_fail() {
    let (pf, mut ef) = catalog::plane6_f_partition();
    // F_4 must not reach F_2
    ef.push((4, 2, vec![4]));
    let err = build_custom_graph(&catalog::plane6_f(rat(1, 4)), pf, &ef, 3).unwrap_err();
    match err {
        GdsError::EquationMismatch(m) => {
            assert_eq!(m.vertex, 4);
            assert_eq!(m.side, MismatchSide::RightOnly);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn class_decisions() {
    for lambda in [rat(1, 6), rat(1, 7), rat(1, 10)] {
        let d = decide_equivalence(
            &catalog::line5_a(lambda.clone()),
            &catalog::line5_b(lambda.clone()),
            DEFAULT_DEPTH,
        )
        .unwrap();
        let Decision::Equivalent(eq) = d else {
            panic!("expected equivalence at {lambda}")
        };
        assert!(is_isomorphism(&eq.a.gds, &eq.b.gds, &eq.matching));
        assert_eq!(eq.reflected, Some((false, false)));
    }
    let a = catalog::line5_a(rat(1, 6));
    let same = decide_equivalence(&a, &a, 3).unwrap();
    assert!(same.is_equivalent());

    let d = decide_equivalence(&a, &catalog::line5_single(rat(1, 6)), 3).unwrap();
    match d {
        Decision::Inconclusive(r) => {
            assert_eq!(r, Inconclusive::GammaCountsDiffer { a: vec![2], b: vec![1] });
            assert_eq!(r.to_string(), "gamma counts differ ([2] vs [1])");
        }
        _ => panic!("expected inconclusive"),
    }

    let d = decide_equivalence(&a, &deep_overlap(3).with_lambda(rat(1, 6)).unwrap(), 3).unwrap();
    assert!(matches!(d, Decision::Inconclusive(Inconclusive::MapCountsDiffer { a: 5, b: 3 })));

    let err = decide_equivalence(&a, &catalog::line5_a(rat(1, 2)), 3).unwrap_err();
    assert!(matches!(err, DecideError::Class { which: Which::B, .. }));
}

#[test]
fn reflected_inputs_decide_through_normalisation() {
    let a = catalog::line5_a(rat(1, 6));
    let c = crate::ifs::reflect(&a);
    let Decision::Equivalent(eq) = decide_equivalence(&a, &c, 3).unwrap() else {
        panic!("a and its mirror image must match")
    };
    assert_eq!(eq.reflected, Some((false, true)));
}
