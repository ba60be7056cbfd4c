//! Generator enumeration and assembly of the cellular DGA differential.

mod cells;
pub mod stpair;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cellcomplex::parallel::ParallelComplex;
use crate::cellcomplex::profile::Label;
use crate::cellcomplex::{ComplexError, Decomposition};
use crate::freealg::{derive, AlgError, GenId, Grading, InhomogeneousError, Polynomial};
use crate::matrix::{GenMatrix, MatError};

pub use cells::{build_cells, build_parallel_cells, CellSet, EdgeCtx, FaceCtx, FaceKind, Factor, VertexCtx};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum GenKind {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "aux")]
    Aux,
}

impl GenKind {
    pub fn letter(self) -> &'static str {
        match self {
            GenKind::A => "a",
            GenKind::B => "b",
            GenKind::C => "c",
            GenKind::Aux => "x",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenInfo {
    pub name: String,
    pub cell: String,
    pub kind: GenKind,
    pub sheets: (u32, u32),
    pub degree: i64,
}

/// A semi-free DGA over Z/2: a generator table, a grading modulus and the
/// differential on generators.
#[derive(Clone, Debug, Default)]
pub struct Dga {
    pub m: u32,
    gens: Vec<GenInfo>,
    by_name: BTreeMap<String, GenId>,
    diff: BTreeMap<GenId, Polynomial>,
}

impl Dga {
    pub fn new(m: u32) -> Self {
        Dga { m, ..Default::default() }
    }

    pub fn push_gen(&mut self, info: GenInfo) -> GenId {
        let id = GenId(self.gens.len() as u32);
        self.by_name.insert(info.name.clone(), id);
        self.gens.push(info);
        self.diff.insert(id, Polynomial::zero());
        id
    }

    pub fn set_diff(&mut self, g: GenId, p: Polynomial) {
        self.diff.insert(g, p);
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.gens.len() as u32).map(GenId)
    }

    pub fn info(&self, g: GenId) -> &GenInfo {
        &self.gens[g.0 as usize]
    }

    pub fn name_of(&self, g: GenId) -> &str {
        &self.gens[g.0 as usize].name
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.by_name.get(name).copied()
    }

    pub fn diff_of(&self, g: GenId) -> &Polynomial {
        &self.diff[&g]
    }

    pub fn degree(&self, g: GenId) -> i64 {
        self.gens[g.0 as usize].degree
    }

    pub fn reduce(&self, d: i64) -> i64 {
        if self.m == 0 {
            d
        } else {
            d.rem_euclid(self.m as i64)
        }
    }

    pub fn grading(&self) -> Grading {
        Grading {
            m: self.m,
            deg: self
                .gen_ids()
                .map(|g| (g, self.gens[g.0 as usize].degree))
                .collect(),
        }
    }

    pub fn render(&self, p: &Polynomial) -> String {
        p.render(&|g| self.name_of(g).to_string())
    }

    /// Apply the differential to an arbitrary polynomial by the Leibniz
    /// rule.
    pub fn apply_diff(&self, p: &Polynomial) -> Result<Polynomial, AlgError> {
        derive(&|g| self.diff.get(&g).cloned(), p)
    }

    /// Generators whose differential does not square to zero, with the
    /// offending residual.
    pub fn d_squared(&self) -> Vec<(GenId, Polynomial)> {
        let mut out = Vec::new();
        for g in self.gen_ids() {
            match self.apply_diff(self.diff_of(g)) {
                Ok(p) if p.is_zero() => {}
                Ok(p) => out.push((g, p)),
                Err(_) => out.push((g, self.diff_of(g).clone())),
            }
        }
        out
    }

    /// Generators whose differential is not homogeneous of degree
    /// degree(g) - 1.
    pub fn degree_failures(&self) -> Vec<(GenId, String)> {
        let grading = self.grading();
        let mut out = Vec::new();
        for g in self.gen_ids() {
            let want = self.reduce(self.degree(g) - 1);
            match grading.poly_degree(self.diff_of(g)) {
                Ok(None) => {}
                Ok(Some(d)) if d == want => {}
                Ok(Some(d)) => out.push((g, format!("diff degree {d}, expected {want}"))),
                Err(InhomogeneousError::Mixed(a, b)) => {
                    out.push((g, format!("inhomogeneous diff: degrees {a} and {b}")))
                }
                Err(e) => out.push((g, e.to_string())),
            }
        }
        out
    }

    /// Renumber generators, keeping those for which `keep` holds. Returns
    /// the id remapping. Differentials are not rewritten; callers substitute
    /// first.
    pub fn retain(&self, keep: &dyn Fn(GenId) -> bool) -> (Dga, BTreeMap<GenId, GenId>) {
        let mut out = Dga::new(self.m);
        let mut remap = BTreeMap::new();
        for g in self.gen_ids() {
            if keep(g) {
                let ng = out.push_gen(self.gens[g.0 as usize].clone());
                remap.insert(g, ng);
            }
        }
        (out, remap)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct GenDump<'a> {
            id: &'a str,
            cell: &'a str,
            kind: GenKind,
            sheets: [u32; 2],
            degree: i64,
        }
        #[derive(Serialize)]
        struct Dump<'a> {
            m: u32,
            generators: Vec<GenDump<'a>>,
            diff: BTreeMap<&'a str, String>,
        }
        let mut order: Vec<GenId> = self.gen_ids().collect();
        order.sort_by(|a, b| {
            let (x, y) = (self.info(*a), self.info(*b));
            (&x.cell, x.kind, x.sheets).cmp(&(&y.cell, y.kind, y.sheets))
        });
        let generators = order
            .iter()
            .map(|g| {
                let i = self.info(*g);
                GenDump {
                    id: &i.name,
                    cell: &i.cell,
                    kind: i.kind,
                    sheets: [i.sheets.0, i.sheets.1],
                    degree: i.degree,
                }
            })
            .collect();
        let diff = self
            .gen_ids()
            .map(|g| (self.name_of(g), self.render(self.diff_of(g))))
            .collect();
        let mut s =
            serde_json::to_string_pretty(&Dump { m: self.m, generators, diff }).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Error, Debug)]
pub enum BuildError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("missing boundary data: {0}")]
    MissingBoundaryData(String),
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub m_override: Option<u32>,
    /// Pinned Maslov potential per base region id.
    pub base_mu: BTreeMap<usize, i64>,
}

pub struct BuildResult {
    pub dga: Dga,
    pub d2_failures: Vec<(GenId, Polynomial)>,
}

pub fn gen_name(kind: GenKind, cell: &str, i: u32, j: u32) -> String {
    format!("{}:{}:{},{}", kind.letter(), cell, i, j)
}

/// Build the cellular DGA of a transverse square decomposition.
pub fn build_dga(dec: &Decomposition) -> Result<BuildResult, BuildError> {
    build_dga_with(dec, &BuildOptions::default())
}

pub fn build_dga_with(dec: &Decomposition, opts: &BuildOptions) -> Result<BuildResult, BuildError> {
    let cells = build_cells(dec, opts)?;
    assemble(cells)
}

/// Build the cellular DGA of the E_par refinement (subdivided squares get
/// the triple-product differentials).
pub fn build_parallel_dga(
    par: &ParallelComplex,
    opts: &BuildOptions,
) -> Result<BuildResult, BuildError> {
    let cells = build_parallel_cells(par, opts)?;
    assemble(cells)
}

/// Assemble generator tables and differentials from prepared cell contexts.
pub fn assemble(cells: CellSet) -> Result<BuildResult, BuildError> {
    let mut dga = Dga::new(cells.m);
    let mu = &cells.mu;
    let red = |d: i64| if cells.m == 0 { d } else { d.rem_euclid(cells.m as i64) };

    // Enumerate generators in the canonical (cell, kind, i, j) order.
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    struct Key(String, GenKind, u32, u32);
    let mut keys: Vec<Key> = Vec::new();
    for (vid, v) in &cells.vertices {
        for i in 1..=v.n {
            for j in i + 1..=v.n {
                if !v.omitted.contains(&(i, j)) {
                    keys.push(Key(vid.clone(), GenKind::A, i, j));
                }
            }
        }
    }
    for (eid, e) in &cells.edges {
        for i in 1..=e.n {
            for j in i + 1..=e.n {
                if !e.omitted.contains(&(i, j)) && !e.ones.contains(&(i, j)) {
                    keys.push(Key(eid.clone(), GenKind::B, i, j));
                }
            }
        }
    }
    for f in &cells.faces {
        let n = f.labels.len() as u32;
        for i in 1..=n {
            for j in i + 1..=n {
                keys.push(Key(f.id.clone(), GenKind::C, i, j));
            }
        }
    }
    keys.sort();

    let mut by_key: BTreeMap<(String, GenKind, u32, u32), GenId> = BTreeMap::new();
    for Key(cell, kind, i, j) in keys {
        let (ri, rj) = match kind {
            GenKind::A => {
                let v = &cells.vertices[&cell];
                (v.regions[i as usize - 1], v.regions[j as usize - 1])
            }
            GenKind::B => {
                let e = &cells.edges[&cell];
                (e.regions[i as usize - 1], e.regions[j as usize - 1])
            }
            GenKind::C => {
                let f = cells.faces.iter().find(|f| f.id == cell).unwrap();
                (f.regions[i as usize - 1], f.regions[j as usize - 1])
            }
            GenKind::Aux => unreachable!(),
        };
        let shift = match kind {
            GenKind::A => -1,
            GenKind::B => 0,
            GenKind::C => 1,
            GenKind::Aux => 0,
        };
        let degree = red(mu[ri] - mu[rj] + shift);
        let id = dga.push_gen(GenInfo {
            name: gen_name(kind, &cell, i, j),
            cell: cell.clone(),
            kind,
            sheets: (i, j),
            degree,
        });
        by_key.insert((cell, kind, i, j), id);
    }

    let gen_at = |cell: &str, kind: GenKind, i: u32, j: u32| -> Option<GenId> {
        by_key.get(&(cell.to_string(), kind, i, j)).copied()
    };

    // Vertex matrices (plain a-generators, zeros elsewhere).
    let vertex_matrix = |vid: &str| -> GenMatrix {
        let v = &cells.vertices[vid];
        let mut m = GenMatrix::zero(v.n as usize);
        for i in 1..=v.n {
            for j in i + 1..=v.n {
                if let Some(g) = gen_at(vid, GenKind::A, i, j) {
                    m.set_gen(i as usize - 1, j as usize - 1, g);
                }
            }
        }
        m
    };

    // d(a) rows: dA = A^2 for every vertex.
    for vid in cells.vertices.keys() {
        let a = vertex_matrix(vid);
        let sq = a.mul(&a)?;
        let v = &cells.vertices[vid];
        for i in 1..=v.n {
            for j in i + 1..=v.n {
                if let Some(g) = gen_at(vid, GenKind::A, i, j) {
                    dga.set_diff(g, sq.get(i as usize - 1, j as usize - 1).clone());
                }
            }
        }
    }

    // Remap a vertex matrix through a position map (face or edge slots to
    // vertex positions), inserting constant ones at the given slots.
    let mapped_vertex = |vid: &str, n: usize, map: &[Option<u32>], ones: &[(u32, u32)]| -> GenMatrix {
        let mut m = GenMatrix::zero(n);
        for (i, j) in ones {
            m.set(*i as usize - 1, *j as usize - 1, Polynomial::one());
        }
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                if ones.contains(&(i, j)) {
                    continue;
                }
                let (Some(p), Some(q)) = (map[i as usize - 1], map[j as usize - 1]) else {
                    continue;
                };
                if p < q {
                    if let Some(g) = gen_at(vid, GenKind::A, p, q) {
                        m.set_gen(i as usize - 1, j as usize - 1, g);
                    }
                }
            }
        }
        m
    };

    // d(b) rows: dB = A_plus (I+B) + (I+B) A_minus per edge.
    for (eid, e) in &cells.edges {
        let n = e.n as usize;
        let mut b = GenMatrix::zero(n);
        for i in 1..=e.n {
            for j in i + 1..=e.n {
                if e.ones.contains(&(i, j)) {
                    b.set(i as usize - 1, j as usize - 1, Polynomial::one());
                } else if let Some(g) = gen_at(eid, GenKind::B, i, j) {
                    b.set_gen(i as usize - 1, j as usize - 1, g);
                }
            }
        }
        let identity_map: Vec<Option<u32>> = (1..=e.n).map(Some).collect();
        let a_plus = mapped_vertex(&e.head, n, &identity_map, &[]);
        let ones: Vec<(u32, u32)> = e.a_minus_ones.iter().copied().collect();
        let a_minus = mapped_vertex(&e.tail, n, &e.tail_map, &ones);
        let ib = b.plus_identity();
        let db = a_plus.mul(&ib)?.add(&ib.mul(&a_minus)?)?;
        for i in 1..=e.n {
            for j in i + 1..=e.n {
                if let Some(g) = gen_at(eid, GenKind::B, i, j) {
                    dga.set_diff(g, db.get(i as usize - 1, j as usize - 1).clone());
                }
            }
        }
    }

    // d(c) rows per face.
    for f in &cells.faces {
        let n = f.labels.len();
        let mut c = GenMatrix::zero(n);
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                if let Some(g) = gen_at(&f.id, GenKind::C, i, j) {
                    c.set_gen(i as usize - 1, j as usize - 1, g);
                }
            }
        }
        let factor_matrix = |fac: &Factor| -> GenMatrix {
            let mut m = GenMatrix::zero(n);
            for (i, j) in &fac.ones {
                m.set(*i as usize - 1, *j as usize - 1, Polynomial::one());
            }
            for i in 1..=n as u32 {
                for j in i + 1..=n as u32 {
                    if fac.ones.contains(&(i, j)) {
                        continue;
                    }
                    let (Some(p), Some(q)) = (fac.map[i as usize - 1], fac.map[j as usize - 1])
                    else {
                        continue;
                    };
                    if p < q {
                        if let Some(g) = gen_at(&fac.edge, GenKind::B, p, q) {
                            m.set_gen(i as usize - 1, j as usize - 1, g);
                        }
                    }
                }
            }
            m
        };
        let a1 = mapped_vertex(&f.v1, n, &f.a1_map, &[]);
        let a0 = mapped_vertex(&f.v0, n, &f.a0_map, &f.a0_ones);
        let product = |path: &[Factor]| -> Result<GenMatrix, BuildError> {
            let mut acc = GenMatrix::identity(n);
            // Factors multiply in reverse traversal order.
            for fac in path.iter().rev() {
                acc = acc.mul(&factor_matrix(fac).plus_identity())?;
            }
            Ok(acc)
        };
        let dc = match &f.kind {
            FaceKind::Standard { path1, path2 } => {
                let p1 = product(path1)?;
                let p2 = product(path2)?;
                a1.mul(&c)?.add(&c.mul(&a0)?)?.add(&p1)?.add(&p2)?
            }
            FaceKind::Swallow { up, param, sides, reflected } => {
                let e = |r: u32, cidx: u32| GenMatrix::elementary(n, r as usize - 1, cidx as usize - 1);
                let (e_lo, e_corr, e_k) = if *up {
                    let k = *param;
                    // (I+E_{k+2,k+1}) conjugation, I + A0 E_{k+1,k} + E_{k+1,k+2},
                    // and B_D (I + E_{k+2,k+1}).
                    (e(k + 2, k + 1), e(k + 1, k + 2), e(k + 1, k))
                } else {
                    let l = *param;
                    // Type (14): (I+E_{l-1,l-2}), I + E_{l,l-1} A0 + E_{l-2,l-1},
                    // and B_D (I + E_{l-1,l-2}).
                    (e(l - 1, l - 2), e(l - 2, l - 1), e(l, l - 1))
                };
                let ie = e_lo.plus_identity();
                let term_c = c.mul(&ie)?.mul(&a0)?.mul(&ie)?;
                let corr = if *up {
                    GenMatrix::identity(n).add(&a0.mul(&e_k)?)?.add(&e_corr)?
                } else {
                    GenMatrix::identity(n).add(&e_k.mul(&a0)?)?.add(&e_corr)?
                };
                let b = |s: crate::cellcomplex::profile::Side| factor_matrix(&sides[s.idx()]);
                use crate::cellcomplex::profile::Side;
                let (long_a, long_b, short_a, short_b) = if *reflected {
                    (Side::R, Side::D, Side::U, Side::L)
                } else {
                    (Side::U, Side::L, Side::R, Side::D)
                };
                // [I+B_U][I+B_L][corr] + [I+B_R][I + B_D(I+E)]
                let t3 = b(long_a)
                    .plus_identity()
                    .mul(&b(long_b).plus_identity())?
                    .mul(&corr)?;
                let t4 = b(short_a)
                    .plus_identity()
                    .mul(&b(short_b).mul(&ie)?.plus_identity())?;
                a1.mul(&c)?.add(&term_c)?.add(&t3)?.add(&t4)?
            }
        };
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                if let Some(g) = gen_at(&f.id, GenKind::C, i, j) {
                    dga.set_diff(g, dc.get(i as usize - 1, j as usize - 1).clone());
                }
            }
        }
    }

    let d2_failures = dga.d_squared();
    Ok(BuildResult { dga, d2_failures })
}

pub use cells::region_count;

#[allow(unused)]
fn label_name(l: Label) -> String {
    match l {
        Label::S(i) => format!("S{i}"),
        Label::Tilde => "S~".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cellcomplex::single_square;

    fn poly_of(dga: &Dga, names: &[&str]) -> Polynomial {
        let mut p = Polynomial::zero();
        for n in names {
            p = p.add(&Polynomial::gen(dga.lookup(n).unwrap_or_else(|| panic!("missing {n}"))));
        }
        p
    }

    #[test]
    fn type1_n2_formulas() {
        let d = single_square(1, 2, None, None, false).unwrap();
        let built = build_dga(&d).unwrap();
        let dga = &built.dga;
        assert!(built.d2_failures.is_empty());
        assert_eq!(dga.gen_count(), 9);
        let c = dga.lookup("c:sq:1,2").unwrap();
        let want = poly_of(dga, &["b:eU:1,2", "b:eL:1,2", "b:eR:1,2", "b:eD:1,2"]);
        assert_eq!(*dga.diff_of(c), want);
        let b = dga.lookup("b:eU:1,2").unwrap();
        let wantb = poly_of(dga, &["a:vur:1,2", "a:vul:1,2"]);
        assert_eq!(*dga.diff_of(b), wantb);
        let a = dga.lookup("a:vur:1,2").unwrap();
        assert!(dga.diff_of(a).is_zero());
    }

    #[test]
    fn vertex_n3_formula() {
        let d = single_square(1, 3, None, None, false).unwrap();
        let dga = build_dga(&d).unwrap().dga;
        let a13 = dga.lookup("a:vur:1,3").unwrap();
        let a12 = dga.lookup("a:vur:1,2").unwrap();
        let a23 = dga.lookup("a:vur:2,3").unwrap();
        assert_eq!(*dga.diff_of(a13), Polynomial::from_word(vec![a12, a23]));
    }

    #[test]
    fn all_squares_d2_zero() {
        for t in 1..=14u8 {
            for n in 2..=5u32 {
                for refl in [false, true] {
                    for k in 1..=n {
                        for l in [None, Some(1u32), Some(3), Some(4), Some(5)] {
                            let k_opt = if t == 1 { None } else { Some(k) };
                            let Ok(d) = single_square(t, n, k_opt, l, refl) else { continue };
                            if crate::cellcomplex::validate(&d).is_valid() {
                                let built = build_dga(&d).unwrap();
                                assert!(
                                    built.d2_failures.is_empty(),
                                    "type {t} n {n} k {k:?} l {l:?} refl {refl}: d^2 != 0 at {:?}",
                                    built
                                        .d2_failures
                                        .iter()
                                        .map(|(g, p)| format!(
                                            "{} -> {}",
                                            built.dga.name_of(*g),
                                            built.dga.render(p)
                                        ))
                                        .collect::<Vec<_>>()
                                );
                                let degree_fails = built.dga.degree_failures();
                                assert!(
                                    degree_fails.is_empty(),
                                    "type {t} n {n}: degree failure at {}: {}",
                                    built.dga.name_of(degree_fails[0].0),
                                    degree_fails[0].1
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn type2_n2_generator_set() {
        let d = single_square(2, 2, Some(1), None, false).unwrap();
        let dga = build_dga(&d).unwrap().dga;
        // 2 a's, 3 b's, 1 c.
        let count = |k: GenKind| dga.gen_ids().filter(|g| dga.info(*g).kind == k).count();
        assert_eq!(count(GenKind::A), 2);
        assert_eq!(count(GenKind::B), 3);
        assert_eq!(count(GenKind::C), 1);
        assert!(dga.lookup("b:eL:1,2").is_none());
        assert!(dga.lookup("a:vul:1,2").is_none());
        assert!(dga.lookup("a:vll:1,2").is_none());
    }

    #[test]
    fn cusp_edge_unit_term() {
        // Cu(1), n=2: d(b) = a_plus + 1.
        let d = single_square(9, 2, Some(1), None, false).unwrap();
        let dga = build_dga(&d).unwrap().dga;
        let b = dga.lookup("b:eU:1,2").unwrap();
        let a = dga.lookup("a:vur:1,2").unwrap();
        assert_eq!(
            *dga.diff_of(b),
            Polynomial::gen(a).add(&Polynomial::one())
        );
    }

    #[test]
    fn pv_n3_edge_formula() {
        let d = single_square(1, 3, None, None, false).unwrap();
        let dga = build_dga(&d).unwrap().dga;
        let b13 = dga.lookup("b:eU:1,3").unwrap();
        let terms: Vec<String> = dga
            .diff_of(b13)
            .terms()
            .map(|w| w.iter().map(|g| dga.name_of(*g).to_string()).collect::<Vec<_>>().join("·"))
            .collect();
        // a+_{1,3} + a-_{1,3} + a+_{1,2} b_{2,3} + b_{1,2} a-_{2,3}
        assert_eq!(terms.len(), 4, "{terms:?}");
        assert!(terms.contains(&"a:vur:1,3".to_string()));
        assert!(terms.contains(&"a:vul:1,3".to_string()));
        assert!(terms.contains(&"a:vur:1,2·b:eU:2,3".to_string()));
        assert!(terms.contains(&"b:eU:1,2·a:vul:2,3".to_string()));
    }

    #[test]
    fn catalog_entries_build() {
        for name in catalog::names() {
            let d = catalog::get(&name).unwrap();
            let built = build_dga(&d).unwrap();
            assert!(
                built.d2_failures.is_empty(),
                "{name}: d^2 failures at {:?}",
                built
                    .d2_failures
                    .iter()
                    .map(|(g, _)| built.dga.name_of(*g))
                    .collect::<Vec<_>>()
            );
        }
    }
}
