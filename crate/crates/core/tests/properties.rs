mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relnpi::angles::{gauss_bonnet, vertex_curvature};
use relnpi::certify::{
    certify_standard, curvature_drop_vertices, emit_certificate, parse_certificate, search_zero_one, DropClause, DropVertex,
};
use relnpi::coloring::{
    coloring_test, relative_coloring_test, relative_coloring_test_oracle, strong_relative_coloring_test,
    strong_relative_coloring_test_with, witness_is_valid, StrongMethod,
};
use relnpi::complex::essential_part;
use relnpi::graph::{is_relative_forest, is_relative_forest_by_search, is_strong_relative_forest, is_strong_relative_forest_by_quotient, is_strong_relative_forest_by_search};
use relnpi::immersion::{audit_npi, audit_relative, audit_relative_with_angles, enumerate_immersions, naive_enumerate, validate_instance, ImmersionBudget, ViolationKind};
use relnpi::lot::{core, core_parts, lot_complex, parse_lot, reduction_flags, write_lot, Log, LotEdge};
use relnpi::map::{is_immersion, pullback_angles};
use relnpi::parse::write_complex;
use relnpi::{parse_complex, standard_angles, ComplexBuilder, Subcomplex, TwoComplex};

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closure of a random set of cells and edges.
fn random_sub(r: &mut impl Rng, k: &TwoComplex) -> Subcomplex {
    let cells: Vec<usize> = (0..k.cell_count()).filter(|_| r.gen_bool(0.4)).collect();
    let edges: Vec<usize> = (0..k.edge_count()).filter(|_| r.gen_bool(0.2)).collect();
    Subcomplex::closure(k, [], edges, cells)
}

fn random_lot(r: &mut impl Rng, n: usize) -> Log {
    let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let edges: Vec<LotEdge> = (1..n)
        .map(|v| {
            let p = r.gen_range(0..v);
            let (src, dst) = if r.gen_bool(0.5) { (p, v) } else { (v, p) };
            LotEdge { src, dst, label: r.gen_range(0..n) }
        })
        .collect();
    Log::new("random", vertices, edges).expect("random tree is a LOT")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gauss_bonnet_residual_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 3, 6, 4, 8);
        let w = random_angles(&mut r, &k, -3, 3);
        let report = gauss_bonnet(&k, &w).unwrap();
        prop_assert_eq!(report.residual, 0);
        prop_assert_eq!(report.vertex.iter().sum::<i64>() + report.cell.iter().sum::<i64>(), 2 * k.euler_characteristic());
    }

    #[test]
    fn complex_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 3, 6, 4, 8);
        let s = random_sub(&mut r, &k);
        let text = write_complex(&k, &[("S".to_string(), s.clone())]);
        let doc = parse_complex(&text).unwrap();
        prop_assert_eq!(&doc.complex, &k);
        prop_assert_eq!(doc.sub("S"), Some(&s));
        prop_assert_eq!(write_complex(&doc.complex, &doc.subs), text);
    }

    #[test]
    fn relative_with_empty_sub_is_absolute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 2, 5, 4, 6);
        let w = random_angles(&mut r, &k, 0, 1);
        let abs = coloring_test(&k, &w).unwrap();
        let rel = relative_coloring_test(&k, &Subcomplex::empty(), &w).unwrap();
        let strong = strong_relative_coloring_test(&k, &Subcomplex::empty(), &w).unwrap();
        prop_assert_eq!(abs.pass, rel.pass);
        prop_assert_eq!(abs.pass, strong.pass);
    }

    #[test]
    fn strong_implies_relative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 2, 5, 4, 6);
        let s = random_sub(&mut r, &k);
        let w = random_angles(&mut r, &k, 0, 1);
        let strong = strong_relative_coloring_test(&k, &s, &w).unwrap();
        let quotient = strong_relative_coloring_test_with(&k, &s, &w, StrongMethod::Quotient).unwrap();
        prop_assert_eq!(strong.pass, quotient.pass);
        if strong.pass {
            prop_assert!(relative_coloring_test(&k, &s, &w).unwrap().pass);
        }
    }

    #[test]
    fn witnesses_are_checkable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 2, 5, 4, 6);
        let s = random_sub(&mut r, &k);
        let w = random_angles(&mut r, &k, 0, 1);
        for v in [coloring_test(&k, &w).unwrap(), relative_coloring_test(&k, &s, &w).unwrap()] {
            prop_assert_eq!(v.pass, v.witnesses.is_empty());
        }
        let abs = coloring_test(&k, &w).unwrap();
        for wit in &abs.witnesses {
            prop_assert!(witness_is_valid(&k, &Subcomplex::empty(), &w, wit), "{:?}", wit);
        }
        let rel = relative_coloring_test(&k, &s, &w).unwrap();
        for wit in &rel.witnesses {
            prop_assert!(witness_is_valid(&k, &s, &w, wit), "{:?}", wit);
        }
    }

    #[test]
    fn strong_forest_three_ways(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 10, 15);
        let s = random_subgraph(&mut r, &g);
        let a = is_strong_relative_forest(&g, &s).unwrap().pass;
        prop_assert_eq!(a, is_strong_relative_forest_by_quotient(&g, &s).unwrap().pass);
        prop_assert_eq!(a, is_strong_relative_forest_by_search(&g, &s).unwrap().pass);
        prop_assert_eq!(is_relative_forest(&g, &s).unwrap().pass, is_relative_forest_by_search(&g, &s).unwrap().pass);
        if a {
            prop_assert!(is_relative_forest(&g, &s).unwrap().pass);
        }
    }

    #[test]
    fn lot_complex_has_zero_euler_characteristic(seed in any::<u64>(), n in 1usize..8) {
        let g = random_lot(&mut rng(seed), n);
        prop_assert_eq!(lot_complex(&g).euler_characteristic(), 0);
    }

    #[test]
    fn core_is_idempotent(seed in any::<u64>(), n in 1usize..8) {
        let g = random_lot(&mut rng(seed), n);
        let c = core(&g);
        let cc = core(&c);
        prop_assert_eq!(&c.vertices, &cc.vertices);
        prop_assert_eq!(&c.edges, &cc.edges);
        prop_assert!(reduction_flags(&c).boundary_reduced || c.edges.is_empty());
    }

    #[test]
    fn lot_text_round_trips(seed in any::<u64>(), n in 2usize..8) {
        let g = random_lot(&mut rng(seed), n);
        let back = parse_lot(&write_lot(&g)).unwrap();
        prop_assert_eq!(&back.edges, &g.edges);
        prop_assert_eq!(&back.vertices, &g.vertices);
    }

    #[test]
    fn zero_one_search_results_pass(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 2, 4, 3, 6);
        let s = search_zero_one(&k, 1 << 14, |w| coloring_test(&k, w).map(|v| v.pass)).unwrap();
        if let Some(w) = &s.found {
            prop_assert!(w.is_zero_one());
            prop_assert!(coloring_test(&k, w).unwrap().pass);
        }
    }
}

proptest! {
    // The walk-enumeration oracle is exponential in link degree; a fixed
    // seed keeps its running time reproducible.
    #![proptest_config(ProptestConfig { cases: 128, rng_seed: RngSeed::Fixed(0x5eed_0c1e), ..ProptestConfig::default() })]

    #[test]
    fn relative_test_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 2, 5, 3, 6);
        prop_assume!(max_link_corners(&k) <= 12);
        let s = random_sub(&mut r, &k);
        let w = random_angles(&mut r, &k, 0, 1);
        let fast = relative_coloring_test(&k, &s, &w).unwrap();
        let slow = relative_coloring_test_oracle(&k, &s, &w).unwrap();
        prop_assert_eq!(fast.pass, slow.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumerated_instances_are_valid_immersions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_complex(&mut r, 1, 2, 2, 4);
        let en = enumerate_immersions(&l, &ImmersionBudget::cells(2));
        prop_assert!(en.completed);
        for inst in &en.instances {
            let v = validate_instance(&l, inst);
            prop_assert!(v.is_ok(), "{:?}\n{}\n{}", v, write_complex(&l, &[]), inst.to_text(&l));
            prop_assert!(is_immersion(&inst.x, &l, &inst.f));
            prop_assert!(essential_part(&inst.x, &Subcomplex::full(&inst.x)) == Subcomplex::full(&inst.x));
        }
        prop_assert_eq!(en.instances.len(), naive_enumerate(&l, 2).len());
    }

    #[test]
    fn npi_audit_is_relative_audit_with_empty_sub(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_complex(&mut r, 1, 3, 2, 5);
        let b = ImmersionBudget::cells(2);
        let a = audit_npi(&l, &b);
        let mut rel = audit_relative(&l, &Subcomplex::empty(), &b);
        prop_assert!(rel.relative);
        rel.relative = false;
        prop_assert_eq!(a, rel);
    }

    #[test]
    fn strong_pairs_stay_strong_under_immersion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_complex(&mut r, 1, 3, 3, 6);
        let k = random_sub(&mut r, &l);
        let w = standard_angles(&l);
        prop_assume!(strong_relative_coloring_test(&l, &k, &w).unwrap().pass);
        let report = audit_relative_with_angles(&l, &k, &w, &ImmersionBudget::cells(2));
        prop_assert!(report.violations.iter().all(|v| v.kind != ViolationKind::Heredity), "{:?}", report.violations);
    }

    #[test]
    fn pulled_back_standard_angles_are_standard(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_complex(&mut r, 1, 2, 2, 5);
        let w = standard_angles(&l);
        for inst in enumerate_immersions(&l, &ImmersionBudget::cells(2)).instances {
            let pulled = pullback_angles(&inst.x, &l, &inst.f, &w).unwrap();
            prop_assert_eq!(pulled, standard_angles(&inst.x));
        }
    }

    #[test]
    fn immersions_into_lot_complexes_land_in_the_core(seed in any::<u64>(), n in 2usize..5) {
        let g = random_lot(&mut rng(seed), n);
        let l = lot_complex(&g);
        let (core_edges, core_vertices) = core_parts(&g);
        let en = enumerate_immersions(&l, &ImmersionBudget::cells(2));
        for inst in &en.instances {
            for img in &inst.f.cell_map {
                prop_assert!(core_edges.contains(&img.cell), "cell r{} outside the core", img.cell);
            }
            for &e in &inst.f.edge_map {
                prop_assert!(core_vertices.contains(&e));
            }
        }
    }
}

#[test]
fn path_with_ends_is_relative_but_not_strong() {
    let (g, s) = path_with_ends();
    assert!(is_relative_forest(&g, &s).unwrap().pass);
    assert!(!is_strong_relative_forest(&g, &s).unwrap().pass);
    assert!(!is_strong_relative_forest_by_quotient(&g, &s).unwrap().pass);
    assert!(!is_strong_relative_forest_by_search(&g, &s).unwrap().pass);
}

fn wedge_of_tori() -> TwoComplex {
    ComplexBuilder::new("wedge")
        .vertex("v")
        .edge("a", "v", "v")
        .edge("b", "v", "v")
        .edge("c", "v", "v")
        .edge("d", "v", "v")
        .cell("T1", "a b -a -b")
        .cell("T2", "c d -c -d")
        .build()
        .unwrap()
}

#[test]
fn isolated_boundary_vertex_drops_curvature() {
    let x = wedge_of_tori();
    let y = Subcomplex::closure(&x, [], [], [0]);
    let w = standard_angles(&x);
    let report = curvature_drop_vertices(&x, &y, &w).unwrap();
    assert_eq!(report.vertices, vec![DropVertex { vertex: 0, clause: DropClause::Isolated, kappa_x: -2, kappa_y: 0 }]);
    assert!(report.unconfirmed.is_empty());
    assert_eq!(vertex_curvature(&x, &w, 0).unwrap(), -2);
}

#[test]
fn corpus_certificates_round_trip() {
    for n in 1..=4 {
        let doc = corpus(&format!("torus_hnn_k{n}.2cx"));
        let l = &doc.complex;
        let cert = certify_standard(l, doc.sub("K").unwrap(), l.edge_index("y1").unwrap()).unwrap();
        assert_eq!(parse_certificate(&emit_certificate(&cert)).unwrap(), cert);
    }
}

#[test]
fn lot_cores_drop_leaves() {
    let g = Log::from_triples("leafy", &[("1", "2", "3"), ("2", "3", "1"), ("3", "4", "1")]).unwrap();
    let (edges, vertices) = core_parts(&g);
    assert_eq!(edges, BTreeSet::from([0, 1]));
    assert_eq!(vertices, BTreeSet::from([0, 1, 2]));
}
