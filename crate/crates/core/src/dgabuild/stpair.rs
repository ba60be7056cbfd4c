//! The decorated square pair at a swallowtail point: an upward swallowtail
//! square together with the cusp square bordering it below, carrying the S
//! and T decorations. Supports both the transverse-side differential and
//! the decorated cellular one, plus the connecting tame isomorphism.

use std::collections::BTreeMap;

use crate::cellcomplex::profile::EdgeType;
use crate::cellcomplex::{Decomposition, EdgeData, SidesData, SquareData};
use crate::freealg::Polynomial;
use crate::matrix::GenMatrix;
use crate::transform::DgaMorphism;

use super::{build_dga, BuildError, Dga, GenKind};

/// Cell ids used by the two-square complex.
pub const SQ_S: &str = "sqS";
pub const SQ_T: &str = "sqT";
pub const EDGE_B0: &str = "b0";

/// The two-square complex of the S/T pair: an upward swallowtail square
/// `sqS` whose bottom edge is the top edge of the cusp square `sqT`.
pub fn st_complex(n: u32, k: u32) -> Decomposition {
    assert!(n >= 3 && k >= 1 && k + 2 <= n, "need 1 <= k, k+2 <= n");
    let pv = EdgeType::pv;
    let cu = EdgeType::cu;
    let one = EdgeType::one_cr;
    let edges = vec![
        EdgeData { id: EDGE_B0.into(), tail: "vA".into(), head: "v1".into(), etype: cu(n, k) },
        EdgeData { id: "b1".into(), tail: "v5".into(), head: "vA".into(), etype: pv(n - 2) },
        EdgeData { id: "b2".into(), tail: "v5".into(), head: "v2".into(), etype: cu(n, k) },
        EdgeData { id: "b3".into(), tail: "v2".into(), head: "v1".into(), etype: pv(n) },
        EdgeData { id: "b4".into(), tail: "vA".into(), head: "v4".into(), etype: pv(n - 2) },
        EdgeData { id: "b5".into(), tail: "v4".into(), head: "v3".into(), etype: cu(n, k) },
        EdgeData { id: "b6".into(), tail: "v1".into(), head: "v3".into(), etype: one(n, k + 1) },
    ];
    Decomposition {
        vertices: ["vA", "v1", "v2", "v3", "v4", "v5"].iter().map(|s| s.to_string()).collect(),
        edges,
        squares: vec![
            SquareData {
                id: SQ_S.into(),
                stype: 13,
                n,
                k: Some(k),
                l: None,
                reflected: false,
                sides: SidesData { l: "b4".into(), d: EDGE_B0.into(), r: "b6".into(), u: "b5".into() },
            },
            SquareData {
                id: SQ_T.into(),
                stype: 9,
                n,
                k: Some(k),
                l: None,
                reflected: false,
                sides: SidesData { l: "b1".into(), d: "b2".into(), r: "b3".into(), u: EDGE_B0.into() },
            },
        ],
    }
}

pub struct StPair {
    pub n: u32,
    pub k: u32,
    /// Differential from the transverse-side matrix formulas.
    pub d1: Dga,
    /// Decorated cellular differential of the refinement.
    pub d2: Dga,
}

/// Look up a generator as a matrix entry, at 1-based slot positions.
fn slot_gen(dga: &Dga, kind: GenKind, cell: &str, i: u32, j: u32) -> Option<Polynomial> {
    dga.lookup(&super::gen_name(kind, cell, i, j)).map(Polynomial::gen)
}

struct Frame<'a> {
    dga: &'a Dga,
    n: usize,
}

impl<'a> Frame<'a> {
    /// Matrix of generators of one cell placed through a slot map, with
    /// constant ones at the listed slots.
    fn matrix(
        &self,
        kind: GenKind,
        cell: &str,
        map: &dyn Fn(u32) -> Option<u32>,
        ones: &[(u32, u32)],
    ) -> GenMatrix {
        let n = self.n as u32;
        let mut out = GenMatrix::zero(self.n);
        for (i, j) in ones {
            out.set(*i as usize - 1, *j as usize - 1, Polynomial::one());
        }
        for i in 1..=n {
            for j in i + 1..=n {
                if ones.contains(&(i, j)) {
                    continue;
                }
                let (Some(p), Some(q)) = (map(i), map(j)) else { continue };
                if p < q {
                    if let Some(g) = slot_gen(self.dga, kind, cell, p, q) {
                        out.set(i as usize - 1, j as usize - 1, g);
                    }
                }
            }
        }
        out
    }
}

/// Build both differentials on the S/T pair.
pub fn st_pair(n: u32, k: u32) -> Result<StPair, BuildError> {
    let dec = st_complex(n, k);
    let built = build_dga(&dec)?;
    let d1 = built.dga;
    let mut d2 = d1.clone();

    let fr = Frame { dga: &d1, n: n as usize };
    let id = |i: u32| Some(i);
    // vA has n-2 sheets; in the T frame the cusp pair k, k+1 is missing.
    let t_corner = |i: u32| -> Option<u32> {
        if i < k {
            Some(i)
        } else if i <= k + 1 {
            None
        } else {
            Some(i - 2)
        }
    };
    // In the S frame the missing sheets are k and k+2; k+1 denotes the
    // tilde sheet sitting at position k.
    let s_corner = |i: u32| -> Option<u32> {
        if i < k {
            Some(i)
        } else if i == k + 1 {
            Some(k)
        } else if i == k || i == k + 2 {
            None
        } else {
            Some(i - 2)
        }
    };
    // The left edge of the S square: the tilde sheet is indexed k+2 there.
    let s_left = |i: u32| -> Option<u32> {
        if i < k {
            Some(i)
        } else if i == k + 2 {
            Some(k)
        } else if i == k || i == k + 1 {
            None
        } else {
            Some(i - 2)
        }
    };
    // The shared edge read in S-square labels: Q conjugation.
    let q_map = |i: u32| -> Option<u32> {
        if i == k + 1 {
            Some(k + 2)
        } else if i == k + 2 {
            Some(k + 1)
        } else {
            Some(i)
        }
    };

    let e = |r: u32, c: u32| GenMatrix::elementary(n as usize, r as usize - 1, c as usize - 1);
    let ident = GenMatrix::identity(n as usize);

    // T frame matrices.
    let b0 = fr.matrix(GenKind::B, EDGE_B0, &id, &[]);
    let b1 = fr.matrix(GenKind::B, "b1", &t_corner, &[]);
    let b2 = fr.matrix(GenKind::B, "b2", &id, &[]);
    let b3 = fr.matrix(GenKind::B, "b3", &id, &[]);
    let a1 = fr.matrix(GenKind::A, "v1", &id, &[]);
    let a_hat_t = fr.matrix(GenKind::A, "vA", &t_corner, &[(k, k + 1)]);
    // The lower-left corner of the cusp square, with the cusp pair's 1.
    let a_hat_ll = fr.matrix(GenKind::A, "v5", &t_corner, &[(k, k + 1)]);
    let c1 = fr.matrix(GenKind::C, SQ_T, &id, &[]);
    let et = e(k + 1, k + 2);
    let tmat = et.plus_identity();

    // d2 on the shared edge: A1 [I+B0] + [I+B0] [I+E] A_hat [I+E].
    let ib0 = b0.plus_identity();
    let d2_b0 = a1
        .mul(&ib0)?
        .add(&ib0.mul(&tmat)?.mul(&a_hat_t)?.mul(&tmat)?)?;
    for i in 1..=n {
        for j in i + 1..=n {
            if let Some(g) = d1.lookup(&super::gen_name(GenKind::B, EDGE_B0, i, j)) {
                d2.set_diff(g, d2_b0.get(i as usize - 1, j as usize - 1).clone());
            }
        }
    }

    // d2 C1 = A1 C1 + C1 A_hat_ll + [I+B0] T [I+B1] + [I+B3][I+B2]:
    // the dotted T edge contributes its matrix along the upper path.
    let d2_c1 = a1
        .mul(&c1)?
        .add(&c1.mul(&a_hat_ll)?)?
        .add(&ib0.mul(&tmat)?.mul(&b1.plus_identity())?)?
        .add(&b3.plus_identity().mul(&b2.plus_identity())?)?;
    for i in 1..=n {
        for j in i + 1..=n {
            if let Some(g) = d1.lookup(&super::gen_name(GenKind::C, SQ_T, i, j)) {
                d2.set_diff(g, d2_c1.get(i as usize - 1, j as usize - 1).clone());
            }
        }
    }

    // S frame matrices.
    let b4 = fr.matrix(GenKind::B, "b4", &s_left, &[]);
    let b5 = fr.matrix(GenKind::B, "b5", &id, &[]);
    let b6 = fr.matrix(GenKind::B, "b6", &id, &[]);
    let a3 = fr.matrix(GenKind::A, "v3", &id, &[]);
    let a_hat_s = fr.matrix(GenKind::A, "vA", &s_corner, &[(k, k + 2)]);
    let c2 = fr.matrix(GenKind::C, SQ_S, &id, &[]);
    let qb0q = fr.matrix(GenKind::B, EDGE_B0, &q_map, &[]);
    let ie = e(k + 2, k + 1).plus_identity();
    // S = I + A_hat_{k,k+2} E_{k+1,k} + E_{k+1,k+2}.
    let smat = ident.add(&a_hat_s.mul(&e(k + 1, k))?)?.add(&e(k + 1, k + 2))?;

    let d2_c2 = a3
        .mul(&c2)?
        .add(&c2.mul(&ie)?.mul(&a_hat_s)?.mul(&ie)?)?
        .add(&b5.plus_identity().mul(&b4.plus_identity())?.mul(&smat)?)?
        .add(&b6.plus_identity().mul(&qb0q.plus_identity())?)?;
    for i in 1..=n {
        for j in i + 1..=n {
            if let Some(g) = d1.lookup(&super::gen_name(GenKind::C, SQ_S, i, j)) {
                d2.set_diff(g, d2_c2.get(i as usize - 1, j as usize - 1).clone());
            }
        }
    }

    Ok(StPair { n, k, d1, d2 })
}

/// The tame isomorphism Phi: entrywise Phi(B0) = B0 [I + E_{k+1,k+2}], all
/// other generators fixed.
pub fn swallowtail_phi(pair: &StPair) -> DgaMorphism {
    let (n, k) = (pair.n, pair.k);
    let mut phi = DgaMorphism::identity();
    for i in 1..=n {
        let target = super::gen_name(GenKind::B, EDGE_B0, i, k + 2);
        let source = super::gen_name(GenKind::B, EDGE_B0, i, k + 1);
        if let (Some(t), Some(s)) = (pair.d1.lookup(&target), pair.d1.lookup(&source)) {
            phi.gen_images
                .insert(t, Polynomial::gen(t).add(&Polynomial::gen(s)));
        }
    }
    phi
}

/// Deliberately wrong version of Phi (the E factor dropped): the identity.
pub fn corrupted_phi() -> DgaMorphism {
    DgaMorphism::identity()
}

/// Helper: a map from generator names for morphism dumps.
pub fn phi_images_by_name(pair: &StPair) -> BTreeMap<String, String> {
    let phi = swallowtail_phi(pair);
    phi.gen_images
        .iter()
        .map(|(g, p)| (pair.d1.name_of(*g).to_string(), pair.d1.render(p)))
        .collect()
}
