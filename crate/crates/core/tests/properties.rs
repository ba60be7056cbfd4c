//! Property tests for the algebra layer and the structural invariants of
//! the builders.

use std::collections::BTreeMap;

use celldga_core::freealg::{derive, substitute, GenId, Polynomial};
use celldga_core::matrix::GenMatrix;
use proptest::prelude::*;

fn arb_word(gens: u32, len: usize) -> impl Strategy<Value = Vec<GenId>> {
    prop::collection::vec((0..gens).prop_map(GenId), 0..=len)
}

fn arb_poly(gens: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(arb_word(gens, 3), 0..=3).prop_map(Polynomial::from_words)
}

fn arb_images(gens: u32) -> impl Strategy<Value = BTreeMap<GenId, Polynomial>> {
    prop::collection::vec(arb_poly(gens), gens as usize).prop_map(|ps| {
        ps.into_iter()
            .enumerate()
            .map(|(i, p)| (GenId(i as u32), p))
            .collect()
    })
}

proptest! {
    #[test]
    fn add_involutive(p in arb_poly(4), q in arb_poly(4)) {
        prop_assert!(p.add(&p).is_zero());
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.add(&q).add(&q), p);
    }

    #[test]
    fn unit_laws(p in arb_poly(4)) {
        prop_assert_eq!(p.mul(&Polynomial::one()).unwrap(), p.clone());
        prop_assert_eq!(Polynomial::one().mul(&p).unwrap(), p);
    }

    #[test]
    fn mul_associative(p in arb_poly(3), q in arb_poly(3), r in arb_poly(3)) {
        let left = p.mul(&q).unwrap().mul(&r).unwrap();
        let right = p.mul(&q.mul(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mul_distributive(p in arb_poly(3), q in arb_poly(3), r in arb_poly(3)) {
        let left = p.add(&q).mul(&r).unwrap();
        let right = p.mul(&r).unwrap().add(&q.mul(&r).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn derive_satisfies_leibniz(
        w in arb_word(3, 3),
        v in arb_word(3, 3),
        images in arb_images(3),
    ) {
        let d = |g: GenId| images.get(&g).cloned();
        let wv = Polynomial::from_word([w.clone(), v.clone()].concat());
        let dwv = derive(&d, &wv).unwrap();
        let pw = Polynomial::from_word(w);
        let pv = Polynomial::from_word(v);
        let by_rule = derive(&d, &pw)
            .unwrap()
            .mul(&pv)
            .unwrap()
            .add(&pw.mul(&derive(&d, &pv).unwrap()).unwrap());
        prop_assert_eq!(dwv, by_rule);
    }

    #[test]
    fn substitute_is_multiplicative(
        p in arb_poly(3),
        q in arb_poly(3),
        images in arb_images(3),
    ) {
        let h = |g: GenId| images.get(&g).cloned();
        let lhs = substitute(&h, &p.mul(&q).unwrap()).unwrap();
        let rhs = substitute(&h, &p).unwrap().mul(&substitute(&h, &q).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn strictly_upper_nilpotent(n in 2usize..5, seed in any::<u64>()) {
        // Fill a strictly upper triangular matrix with random generators.
        let mut m = GenMatrix::zero(n);
        let mut state = seed | 1;
        for i in 0..n {
            for j in i + 1..n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                if state & 4 != 0 {
                    m.set_gen(i, j, GenId((state >> 8) as u32 % 7));
                }
            }
        }
        let mut acc = m.clone();
        for _ in 1..n {
            acc = acc.mul(&m).unwrap();
        }
        prop_assert_eq!(acc, GenMatrix::zero(n));
    }
}

mod structural {
    use celldga_core::catalog;
    use celldga_core::cellcomplex::{parallel::to_parallel, validate, Decomposition};
    use celldga_core::dgabuild::build_dga;
    use celldga_core::invariants::{augmentations, betti, linearize};
    use celldga_core::transform::{cancel, elementary_iso, list_cancel_pairs, stabilize};
    use celldga_core::freealg::Polynomial;

    /// Round trip through the JSON format for every catalog entry.
    #[test]
    fn catalog_round_trip() {
        for name in catalog::names() {
            let d = catalog::get(&name).unwrap();
            let text = d.to_json();
            let back = Decomposition::from_json(&text).unwrap();
            assert_eq!(d, back, "{name}");
        }
    }

    /// Builds are deterministic, byte for byte.
    #[test]
    fn build_is_deterministic() {
        for name in ["square-8-n4-k2", "swallowtail-ST-n4", "torus-2x2-n2"] {
            let d = catalog::get(name).unwrap();
            let a = build_dga(&d).unwrap().dga.to_json();
            let b = build_dga(&d).unwrap().dga.to_json();
            assert_eq!(a, b);
        }
    }

    /// The refinement never touches squares of the remaining types.
    #[test]
    fn to_parallel_idempotent_on_fixed_types() {
        for name in catalog::names().iter().filter(|n| n.starts_with("square-")) {
            let t: u8 = name.split('-').nth(1).unwrap().parse().unwrap();
            if matches!(t, 5 | 6 | 8 | 12) {
                continue;
            }
            let d = catalog::get(name).unwrap();
            let par = to_parallel(&d).unwrap();
            assert!(par.split_edges.is_empty(), "{name}");
            assert!(par.subdivided.is_empty(), "{name}");
        }
    }

    /// Betti numbers survive elementary isomorphisms and
    /// stabilize-then-cancel roundtrips.
    #[test]
    fn betti_invariance() {
        for name in ["square-2-n3-k1", "torus-2x2-n2", "saucer", "square-13-n3-k1"] {
            let dga = build_dga(&catalog::get(name).unwrap()).unwrap().dga;
            let augs = augmentations(&dga, 16).unwrap();
            let Some(eps) = augs.first() else { continue };
            let reference = betti(&linearize(&dga, eps).unwrap());

            // Stabilize-then-cancel is the identity, so betti is too.
            let st = stabilize(&dga, 2);
            let pair = list_cancel_pairs(&st)
                .into_iter()
                .find(|p| st.name_of(p.x).starts_with('x'))
                .unwrap();
            let back = cancel(&st, &pair).unwrap();
            assert_eq!(betti(&linearize(&back, eps).unwrap()), reference, "{name}");

            // An elementary isomorphism g -> g + v with v of matching
            // degree; pick v as another generator of the same degree.
            let mut done = false;
            'outer: for g in dga.gen_ids() {
                for h in dga.gen_ids() {
                    if g != h
                        && dga.degree(g) == dga.degree(h)
                        && !dga.diff_of(h).mentions(g)
                        && !dga.apply_diff(&Polynomial::gen(g)).unwrap().mentions(h)
                    {
                        let (iso, phi) = elementary_iso(&dga, g, &Polynomial::gen(h)).unwrap();
                        assert!(iso.d_squared().is_empty(), "{name}");
                        let _ = phi;
                        // The new DGA's augmentations correspond; evaluate
                        // betti at a transported augmentation.
                        let augs2 = augmentations(&iso, 16).unwrap();
                        if let Some(eps2) = augs2.first() {
                            let b2 = betti(&linearize(&iso, eps2).unwrap());
                            let all: Vec<_> = augs
                                .iter()
                                .map(|e| betti(&linearize(&dga, e).unwrap()))
                                .collect();
                            assert!(all.contains(&b2), "{name}: betti escaped the augmentation orbit");
                        }
                        done = true;
                        break 'outer;
                    }
                }
            }
            let _ = done;
        }
    }

    /// Relabeling square-local data consistently yields an isomorphic DGA:
    /// renaming cells of the decomposition permutes generator names only.
    #[test]
    fn relabeling_invariance() {
        let d = catalog::get("square-8-n3-k1").unwrap();
        let mut renamed = d.clone();
        for v in &mut renamed.vertices {
            *v = format!("z{v}");
        }
        for e in &mut renamed.edges {
            e.tail = format!("z{}", e.tail);
            e.head = format!("z{}", e.head);
        }
        assert!(validate(&renamed).is_valid());
        let a = build_dga(&d).unwrap().dga;
        let b = build_dga(&renamed).unwrap().dga;
        assert_eq!(a.gen_count(), b.gen_count());
        for g in a.gen_ids() {
            let name = a.name_of(g);
            let mapped = if name.contains(":v") {
                name.replace(":v", ":zv")
            } else {
                name.to_string()
            };
            let bg = b.lookup(&mapped).unwrap_or_else(|| panic!("missing {mapped}"));
            assert_eq!(a.degree(g), b.degree(bg));
        }
    }
}
