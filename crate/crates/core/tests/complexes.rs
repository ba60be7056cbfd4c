//! Glued-complex scenarios: sheet atlases, Maslov potentials with torsion,
//! and generator bookkeeping on swallowtail squares.

use std::collections::BTreeMap;

use celldga_core::catalog;
use celldga_core::cellcomplex::atlas::{global_sheets, maslov};
use celldga_core::cellcomplex::profile::EdgeType;
use celldga_core::cellcomplex::{
    single_square, validate, ComplexIndex, Decomposition, EdgeData, SidesData, SquareData,
};
use celldga_core::dgabuild::{build_dga, build_dga_with, BuildOptions, GenKind};
use celldga_core::freealg::Polynomial;

/// A cylinder of three squares around which the Maslov constraint cycle
/// has defect 2: a cusp square, a crossing square exchanging the two middle
/// sheets, and a second cusp square, closed up left to right and top to
/// bottom.
fn torsion_complex() -> Decomposition {
    let edges = vec![
        EdgeData { id: "eA".into(), tail: "vAl".into(), head: "vAr".into(), etype: EdgeType::cu(4, 2) },
        EdgeData { id: "eB".into(), tail: "vAr".into(), head: "vBr".into(), etype: EdgeType::one_cr(4, 2) },
        EdgeData { id: "eC".into(), tail: "vAl".into(), head: "vBr".into(), etype: EdgeType::cu(4, 2) },
        EdgeData { id: "e1".into(), tail: "vAr".into(), head: "vAr".into(), etype: EdgeType::pv(4) },
        EdgeData { id: "e2".into(), tail: "vBr".into(), head: "vBr".into(), etype: EdgeType::pv(4) },
        EdgeData { id: "e3".into(), tail: "vAl".into(), head: "vAl".into(), etype: EdgeType::pv(2) },
    ];
    let sq = |id: &str, stype: u8, l: &str, d: &str, r: &str, u: &str| SquareData {
        id: id.into(),
        stype,
        n: 4,
        k: Some(2),
        l: None,
        reflected: false,
        sides: SidesData { l: l.into(), d: d.into(), r: r.into(), u: u.into() },
    };
    Decomposition {
        vertices: vec!["vAl".into(), "vAr".into(), "vBr".into()],
        edges,
        squares: vec![
            sq("A", 9, "e3", "eA", "e1", "eA"),
            sq("B", 2, "e1", "eB", "e2", "eB"),
            sq("C", 9, "e3", "eC", "e2", "eC"),
        ],
    }
}

#[test]
fn torsion_complex_has_m_2() {
    let dec = torsion_complex();
    let report = validate(&dec);
    assert!(report.is_valid(), "{:?}", report.violations);
    let idx = ComplexIndex::new(&dec).unwrap();
    let atlas = global_sheets(&idx).unwrap();
    assert_eq!(atlas.region_count, 4);
    let md = maslov(&idx, &atlas, &BTreeMap::new(), None).unwrap();
    assert_eq!(md.m, 2);
    // A forced modulus must divide the computed one.
    assert!(maslov(&idx, &atlas, &BTreeMap::new(), Some(2)).is_ok());
    assert!(maslov(&idx, &atlas, &BTreeMap::new(), Some(1)).is_ok());
    assert!(maslov(&idx, &atlas, &BTreeMap::new(), Some(4)).is_err());
    assert!(maslov(&idx, &atlas, &BTreeMap::new(), Some(0)).is_err());

    let built = build_dga(&dec).unwrap();
    assert_eq!(built.dga.m, 2);
    assert!(built.d2_failures.is_empty());
    assert!(built.dga.degree_failures().is_empty());

    // Stable moves respect the mod-2 grading.
    let dga = built.dga;
    let before = dga.to_json();
    let st = celldga_core::transform::stabilize(&dga, -3);
    let pair = celldga_core::transform::list_cancel_pairs(&st)
        .into_iter()
        .find(|p| st.name_of(p.x).starts_with('x'))
        .unwrap();
    let back = celldga_core::transform::cancel(&st, &pair).unwrap();
    assert_eq!(back.to_json(), before);
}

#[test]
fn torus_regions_and_gradings() {
    let dec = catalog::get("torus-2x2-n2").unwrap();
    let idx = ComplexIndex::new(&dec).unwrap();
    let atlas = global_sheets(&idx).unwrap();
    assert_eq!(atlas.region_count, 2);
    // Re-pinning base potentials shifts degrees, never the modulus.
    let mut opts = BuildOptions::default();
    opts.base_mu.insert(0, 7);
    let shifted = build_dga_with(&dec, &opts).unwrap().dga;
    assert_eq!(shifted.m, 0);
    let plain = build_dga(&dec).unwrap().dga;
    for g in plain.gen_ids() {
        let name = plain.name_of(g).to_string();
        let sg = shifted.lookup(&name).unwrap();
        let (a, b) = (plain.degree(g), shifted.degree(sg));
        assert_eq!((b - a).abs(), 7, "{name}: {a} vs {b}");
    }
}

#[test]
fn type9_square_region_count() {
    for n in 2..=5u32 {
        let dec = single_square(9, n, Some(1), None, false).unwrap();
        let idx = ComplexIndex::new(&dec).unwrap();
        let atlas = global_sheets(&idx).unwrap();
        assert_eq!(atlas.region_count, n as usize);
    }
}

#[test]
fn swallowtail_generator_census() {
    // Type (13), n = 3, k = 1: the cusp blocks the left side and the
    // crossing arc blocks the bottom pair.
    let dec = single_square(13, 3, Some(1), None, false).unwrap();
    let dga = build_dga(&dec).unwrap().dga;
    let count = |kind: GenKind| dga.gen_ids().filter(|g| dga.info(*g).kind == kind).count();
    assert_eq!(count(GenKind::A), 5);
    assert_eq!(count(GenKind::B), 8);
    assert_eq!(count(GenKind::C), 3);
    // No left-edge generators at all (one sheet over the left edge).
    assert!(dga.gen_ids().all(|g| dga.info(g).cell != "eL"));
    // The bottom edge misses the crossed pair.
    assert!(dga.lookup("b:eD:2,3").is_none());
    assert!(dga.lookup("b:eD:1,2").is_some());
    assert!(dga.lookup("b:eD:1,3").is_some());
}

#[test]
fn swallowtail_unit_term() {
    // For the minimal upward swallowtail, dc_{2,3} picks up the constant
    // from the bottom-edge conjugation: 1 + b^U_{2,3} + b^R_{2,3}.
    let dec = single_square(13, 3, Some(1), None, false).unwrap();
    let dga = build_dga(&dec).unwrap().dga;
    let c = dga.lookup("c:sq:2,3").unwrap();
    let want = Polynomial::one()
        .add(&Polynomial::gen(dga.lookup("b:eU:2,3").unwrap()))
        .add(&Polynomial::gen(dga.lookup("b:eR:2,3").unwrap()));
    assert_eq!(*dga.diff_of(c), want, "got {}", dga.render(dga.diff_of(c)));
}

#[test]
fn cusp_square_constant_column() {
    // Type (9) with the cusp pair away from the top sheet: the 1 in the
    // initial-corner matrix feeds c-terms into the differential.
    let dec = single_square(9, 3, Some(2), None, false).unwrap();
    let dga = build_dga(&dec).unwrap().dga;
    // dc_{1,3} = b^U + b^L(zeroed rows) ... + c_{1,2} * A(2,3)-entry 1.
    let c13 = dga.lookup("c:sq:1,3").unwrap();
    let c12 = dga.lookup("c:sq:1,2").unwrap();
    assert!(
        dga.diff_of(c13).contains(&vec![c12]),
        "got {}",
        dga.render(dga.diff_of(c13))
    );
    // Rows 2, 3 of the left matrix vanish, so no b^L appears in dc_{2,3};
    // the constant sits in the cusp edge differential instead, where the
    // generator has degree 1.
    let c23 = dga.lookup("c:sq:2,3").unwrap();
    let rendered = dga.render(dga.diff_of(c23));
    assert!(!rendered.contains("b:eL"), "{rendered}");
    let b23 = dga.lookup("b:eU:2,3").unwrap();
    assert!(dga.diff_of(b23).contains(&vec![]), "no unit in the cusp edge");
    assert_eq!(dga.degree(b23), 1);
}

#[test]
fn saucer_has_unique_augmentation() {
    let dec = catalog::get("saucer").unwrap();
    let dga = build_dga(&dec).unwrap().dga;
    let augs = celldga_core::invariants::augmentations(&dga, 12).unwrap();
    assert_eq!(augs.len(), 1);
    assert!(augs[0].eps.values().all(|v| *v));
}

#[test]
fn empty_decomposition_builds_empty_dga() {
    let dec = Decomposition::default();
    let built = build_dga(&dec).unwrap();
    assert_eq!(built.dga.gen_count(), 0);
    assert!(built.d2_failures.is_empty());
}

#[test]
fn sigma_maps_of_swallowtail_square() {
    use celldga_core::cellcomplex::profile::{sigma_maps, square_profile, EdgeTag, Side};
    // Type (13): R is a single crossing of the two upper swallowtail
    // sheets, U and D carry the cusp, L is plain with n-2 sheets.
    let p = square_profile(13, 4, Some(2), None, false).unwrap();
    let s = sigma_maps(&p);
    assert_eq!(s.sides[Side::R.idx()], EdgeType::one_cr(4, 3));
    assert_eq!(s.sides[Side::U.idx()], EdgeType::cu(4, 2));
    assert_eq!(s.sides[Side::D.idx()], EdgeType::cu(4, 2));
    assert_eq!(s.sides[Side::L.idx()].tag, EdgeTag::Pv);
    assert_eq!(s.sides[Side::L.idx()].n, 2);
    // Cusping sheets take the doubled half-integer slot.
    assert_eq!(s.sigma_l[1], Some(3)); // sheet 2 at position 1.5
}

/// Refinement of glued complexes: a Type (6) square whose left edge is
/// shared with a crossing square, and a chain of two Type (5) squares
/// sharing a doubled edge. Splits then propagate into neighbors.
#[test]
fn parallel_refinement_of_glued_complexes() {
    use celldga_core::cellcomplex::parallel::to_parallel;
    use celldga_core::dgabuild::build_parallel_dga;

    // Type (6) with a Type (2) square across its left edge.
    let e = |id: &str, tail: &str, head: &str, etype: EdgeType| EdgeData {
        id: id.into(),
        tail: tail.into(),
        head: head.into(),
        etype,
    };
    let six_and_two = Decomposition {
        vertices: ["a0", "a1", "a2", "a3", "b0", "b1"].iter().map(|s| s.to_string()).collect(),
        edges: vec![
            e("estar", "a0", "a1", EdgeType::one_cr(3, 2)),
            e("ad", "a0", "a2", EdgeType::one_cr(3, 1)),
            e("ar", "a2", "a3", EdgeType::two_cr(3, 1)),
            e("au", "a1", "a3", EdgeType::pv(3)),
            e("bl", "b0", "a0", EdgeType::pv(3)),
            e("bd", "b0", "b1", EdgeType::one_cr(3, 2)),
            e("br", "b1", "a1", EdgeType::pv(3)),
        ],
        squares: vec![
            SquareData {
                id: "A".into(),
                stype: 6,
                n: 3,
                k: Some(1),
                l: None,
                reflected: false,
                sides: SidesData { l: "estar".into(), d: "ad".into(), r: "ar".into(), u: "au".into() },
            },
            SquareData {
                id: "B".into(),
                stype: 2,
                n: 3,
                k: Some(2),
                l: None,
                reflected: false,
                sides: SidesData { l: "bl".into(), d: "bd".into(), r: "br".into(), u: "estar".into() },
            },
        ],
    };
    let report = validate(&six_and_two);
    assert!(report.is_valid(), "{:?}", report.violations);
    let base = build_dga(&six_and_two).unwrap();
    assert!(base.d2_failures.is_empty());
    let par = to_parallel(&six_and_two).unwrap();
    assert_eq!(par.split_edges.len(), 2); // estar and ar
    let refined = build_parallel_dga(&par, &BuildOptions::default()).unwrap();
    assert!(
        refined.d2_failures.is_empty(),
        "{:?}",
        refined
            .d2_failures
            .iter()
            .map(|(g, p)| format!("{} -> {}", refined.dga.name_of(*g), refined.dga.render(p)))
            .collect::<Vec<_>>()
    );

    // Two Type (5) squares sharing a doubled edge.
    let five_chain = Decomposition {
        vertices: ["p0", "p1", "p2", "p3", "q2", "q3"].iter().map(|s| s.to_string()).collect(),
        edges: vec![
            e("al", "p0", "p1", EdgeType::two_cr(3, 1)),
            e("ad", "p0", "p2", EdgeType::pv(3)),
            e("mid", "p2", "p3", EdgeType::two_cr(3, 1)),
            e("au", "p1", "p3", EdgeType::pv(3)),
            e("cd", "p2", "q2", EdgeType::pv(3)),
            e("cr", "q2", "q3", EdgeType::two_cr(3, 1)),
            e("cu", "p3", "q3", EdgeType::pv(3)),
        ],
        squares: vec![
            SquareData {
                id: "A".into(),
                stype: 5,
                n: 3,
                k: Some(1),
                l: None,
                reflected: false,
                sides: SidesData { l: "al".into(), d: "ad".into(), r: "mid".into(), u: "au".into() },
            },
            SquareData {
                id: "C".into(),
                stype: 5,
                n: 3,
                k: Some(1),
                l: None,
                reflected: false,
                sides: SidesData { l: "mid".into(), d: "cd".into(), r: "cr".into(), u: "cu".into() },
            },
        ],
    };
    let report = validate(&five_chain);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert!(build_dga(&five_chain).unwrap().d2_failures.is_empty());
    let par = to_parallel(&five_chain).unwrap();
    // Only right-image sides split: the shared edge once, and C's own.
    assert_eq!(par.split_edges.len(), 2);
    assert_eq!(par.subdivided.len(), 2);
    let refined = build_parallel_dga(&par, &BuildOptions::default()).unwrap();
    assert!(
        refined.d2_failures.is_empty(),
        "{:?}",
        refined
            .d2_failures
            .iter()
            .map(|(g, p)| format!("{} -> {}", refined.dga.name_of(*g), refined.dga.render(p)))
            .collect::<Vec<_>>()
    );
}

/// A reflected upward swallowtail square glued to the reflected cusp
/// square across its left edge: the mirrored correction terms and the
/// crossed-pair constant must still square to zero together.
#[test]
fn reflected_swallowtail_pair() {
    let e = |id: &str, tail: &str, head: &str, etype: EdgeType| EdgeData {
        id: id.into(),
        tail: tail.into(),
        head: head.into(),
        etype,
    };
    for (n, k) in [(3u32, 1u32), (4, 2), (5, 2)] {
        let dec = Decomposition {
            vertices: ["w0", "w1", "w2", "w3", "w4", "w5"].iter().map(|s| s.to_string()).collect(),
            edges: vec![
                e("f0", "w0", "w1", EdgeType::cu(n, k)),
                e("sd", "w0", "w2", EdgeType::pv(n - 2)),
                e("sr", "w2", "w3", EdgeType::cu(n, k)),
                e("su", "w1", "w3", EdgeType::one_cr(n, k + 1)),
                e("tl", "w4", "w5", EdgeType::cu(n, k)),
                e("td", "w4", "w0", EdgeType::pv(n - 2)),
                e("tu", "w5", "w1", EdgeType::pv(n)),
            ],
            squares: vec![
                SquareData {
                    id: "S".into(),
                    stype: 13,
                    n,
                    k: Some(k),
                    l: None,
                    reflected: true,
                    sides: SidesData { l: "f0".into(), d: "sd".into(), r: "sr".into(), u: "su".into() },
                },
                SquareData {
                    id: "T".into(),
                    stype: 9,
                    n,
                    k: Some(k),
                    l: None,
                    reflected: true,
                    sides: SidesData { l: "tl".into(), d: "td".into(), r: "f0".into(), u: "tu".into() },
                },
            ],
        };
        let report = validate(&dec);
        assert!(report.is_valid(), "n={n} k={k}: {:?}", report.violations);
        let built = build_dga(&dec).unwrap();
        assert!(
            built.d2_failures.is_empty(),
            "n={n} k={k}: {:?}",
            built
                .d2_failures
                .iter()
                .map(|(g, p)| format!("{} -> {}", built.dga.name_of(*g), built.dga.render(p)))
                .collect::<Vec<_>>()
        );
        assert!(built.dga.degree_failures().is_empty());
        // The crossed-pair slot of the shared edge is the constant, not a
        // generator, and the symbol never reaches any differential.
        let slot = format!("b:f0:{},{}", k + 1, k + 2);
        assert!(built.dga.lookup(&slot).is_none(), "n={n}: {slot} exists");
    }
}
