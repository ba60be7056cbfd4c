//! Per-cell sheet contexts: everything the assembler needs to place
//! generators into matrices. One builder serves both the transverse
//! decomposition and its E_par refinement; the former is the special case
//! with no split edges or subdivided squares.

use std::collections::{BTreeMap, BTreeSet};

use crate::cellcomplex::atlas::{global_sheets, maslov, SheetAtlas};
use crate::cellcomplex::parallel::{ParallelComplex, SplitEdge, SubdividedSquare};
use crate::cellcomplex::profile::{
    ArcTarget, Corner, EdgeTag, Label, Side, SquareProfile, SwallowKind,
};
use crate::cellcomplex::{validate, ComplexError, ComplexIndex, Decomposition};

use super::{BuildError, BuildOptions};

#[derive(Clone, Debug)]
pub struct VertexCtx {
    pub n: u32,
    pub regions: Vec<usize>,
    pub omitted: BTreeSet<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct EdgeCtx {
    pub n: u32,
    pub regions: Vec<usize>,
    pub omitted: BTreeSet<(u32, u32)>,
    /// Slots holding a constant 1 instead of a generator (the crossed pair
    /// of an edge under a swallowtail arc).
    pub ones: BTreeSet<(u32, u32)>,
    pub tail: String,
    pub head: String,
    /// Edge-local position above the head to position above the tail.
    pub tail_map: Vec<Option<u32>>,
    /// Slots of A_minus set to 1 (cusp pairs dying toward the tail).
    pub a_minus_ones: BTreeSet<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub edge: String,
    /// Face slot (1-based, by face label index) to edge-local position.
    pub map: Vec<Option<u32>>,
    pub ones: BTreeSet<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub enum FaceKind {
    Standard { path1: Vec<Factor>, path2: Vec<Factor> },
    Swallow { up: bool, param: u32, sides: Box<[Factor; 4]>, reflected: bool },
}

#[derive(Clone, Debug)]
pub struct FaceCtx {
    pub id: String,
    pub labels: Vec<Label>,
    pub regions: Vec<usize>,
    pub v0: String,
    pub v1: String,
    pub a0_map: Vec<Option<u32>>,
    pub a1_map: Vec<Option<u32>>,
    pub a0_ones: Vec<(u32, u32)>,
    pub kind: FaceKind,
}

pub struct CellSet {
    pub m: u32,
    pub mu: Vec<i64>,
    pub vertices: BTreeMap<String, VertexCtx>,
    pub edges: BTreeMap<String, EdgeCtx>,
    pub faces: Vec<FaceCtx>,
}

pub fn region_count(dec: &Decomposition) -> Result<usize, ComplexError> {
    let idx = ComplexIndex::new(dec)?;
    Ok(global_sheets(&idx)?.region_count)
}

struct SplitCtx {
    vertex: String,
    lower: String,
    upper: String,
    kappa: u32,
    /// Split-vertex position (1-based) to edge-local head position.
    vorder: Vec<u32>,
    /// Edge-local head position to split-vertex position.
    vinv: Vec<u32>,
    /// Merged pair at the split vertex, in vertex positions.
    merged: (u32, u32),
}

fn split_ctx(se: &SplitEdge, tag: EdgeTag, n: u32) -> SplitCtx {
    let k = se.kappa;
    let mut vorder: Vec<u32> = (1..=n).collect();
    let merged;
    match tag {
        EdgeTag::TwoCr => {
            // Between the two crossings: k, k+2, k+1.
            vorder[k as usize] = k + 2;
            vorder[k as usize + 1] = k + 1;
            merged = (k + 1, k + 2);
        }
        EdgeTag::OneCr => {
            vorder[k as usize - 1] = k + 1;
            vorder[k as usize] = k;
            merged = (k, k + 1);
        }
        _ => unreachable!("only crossing edges split"),
    }
    let mut vinv = vec![0u32; n as usize];
    for (p, s) in vorder.iter().enumerate() {
        vinv[*s as usize - 1] = p as u32 + 1;
    }
    SplitCtx {
        vertex: se.vertex.clone(),
        lower: se.lower.clone(),
        upper: se.upper.clone(),
        kappa: k,
        vorder,
        vinv,
        merged,
    }
}

struct Env<'a> {
    idx: ComplexIndex<'a>,
    atlas: SheetAtlas,
    splits: BTreeMap<String, SplitCtx>,
    subs: BTreeMap<usize, &'a SubdividedSquare>,
}

impl<'a> Env<'a> {
    fn profile(&self, si: usize) -> &SquareProfile {
        &self.idx.profiles[si]
    }

    fn region(&self, si: usize, label: Label) -> usize {
        self.atlas.region(si, label).expect("sheet in atlas")
    }

    fn diag_id(&self, si: usize) -> String {
        self.subs[&si].diagonal.clone()
    }

    /// Sheet order above the lower sub-face: the labels at the split-vertex
    /// positions of the right-image side.
    fn between_order(&self, si: usize) -> Vec<Label> {
        let sub = &self.subs[&si];
        let eid = self.idx.dec.squares[si].sides.get(sub.r_side);
        let split = &self.splits[eid];
        let order = &self.profile(si).side_order[sub.r_side.idx()];
        split
            .vorder
            .iter()
            .map(|p| order[*p as usize - 1])
            .collect()
    }

    /// The 1-cells along a side in tail-to-head order.
    fn side_cells(&self, si: usize, side: Side) -> Vec<String> {
        let eid = self.idx.dec.squares[si].sides.get(side);
        match self.splits.get(eid) {
            Some(s) => vec![s.lower.clone(), s.upper.clone()],
            None => vec![eid.to_string()],
        }
    }
}

/// Cell contexts for the transverse decomposition.
pub fn build_cells(dec: &Decomposition, opts: &BuildOptions) -> Result<CellSet, BuildError> {
    build_inner(dec, &BTreeMap::new(), &BTreeMap::new(), opts)
}

/// Cell contexts for the E_par refinement.
pub fn build_parallel_cells(
    par: &ParallelComplex,
    opts: &BuildOptions,
) -> Result<CellSet, BuildError> {
    let subs: BTreeMap<String, &SubdividedSquare> =
        par.subdivided.iter().map(|(k, v)| (k.clone(), v)).collect();
    build_inner(&par.base, &par.split_edges, &subs, opts)
}

fn build_inner(
    dec: &Decomposition,
    split_edges: &BTreeMap<String, SplitEdge>,
    subdivided: &BTreeMap<String, &SubdividedSquare>,
    opts: &BuildOptions,
) -> Result<CellSet, BuildError> {
    let report = validate(dec);
    if !report.is_valid() {
        return Err(BuildError::Complex(ComplexError::Invalid(
            report
                .violations
                .iter()
                .map(|v| format!("[{}] {}", v.code, v.detail))
                .collect::<Vec<_>>()
                .join("; "),
        )));
    }
    let idx = ComplexIndex::new(dec)?;
    let atlas = global_sheets(&idx)?;
    let md = maslov(&idx, &atlas, &opts.base_mu, opts.m_override)?;

    let mut splits = BTreeMap::new();
    for (eid, se) in split_edges {
        let e = dec.edge(eid).expect("validated edge");
        splits.insert(eid.clone(), split_ctx(se, e.etype.tag, e.etype.n));
    }
    let mut subs = BTreeMap::new();
    for (si, sq) in dec.squares.iter().enumerate() {
        if let Some(sub) = subdivided.get(&sq.id) {
            subs.insert(si, *sub);
        }
    }
    let env = Env { idx, atlas, splits, subs };

    let mut vertices: BTreeMap<String, VertexCtx> = BTreeMap::new();
    let mut edges: BTreeMap<String, EdgeCtx> = BTreeMap::new();

    // Original vertices, resolved through every incident square corner.
    for (si, _) in dec.squares.iter().enumerate() {
        let p = env.profile(si);
        for corner in Corner::ALL {
            let vid = env.idx.corner_vertex(si, corner).to_string();
            let order = &p.corner_order[corner.idx()];
            let regions: Vec<usize> = order.iter().map(|l| env.region(si, *l)).collect();
            match vertices.get(&vid) {
                None => {
                    vertices.insert(
                        vid,
                        VertexCtx { n: order.len() as u32, regions, omitted: BTreeSet::new() },
                    );
                }
                Some(v) => {
                    if v.regions != regions {
                        return Err(BuildError::Complex(ComplexError::InconsistentGluing(
                            format!("vertex {vid} resolves to different sheets from different squares"),
                        )));
                    }
                }
            }
        }
    }

    // Split vertices.
    for (eid, sc) in &env.splits {
        let uses = &env.idx.edge_uses[eid.as_str()];
        let (si, side) = uses[0];
        let order = &env.profile(si).side_order[side.idx()];
        let regions: Vec<usize> = sc
            .vorder
            .iter()
            .map(|p| env.region(si, order[*p as usize - 1]))
            .collect();
        let mut omitted = BTreeSet::new();
        omitted.insert(sc.merged);
        vertices.insert(
            sc.vertex.clone(),
            VertexCtx { n: regions.len() as u32, regions, omitted },
        );
    }

    // Edge contexts.
    for e in &dec.edges {
        let uses = &env.idx.edge_uses[e.id.as_str()];
        if uses.is_empty() {
            continue;
        }
        let (si, side) = uses[0];
        let order = &env.profile(si).side_order[side.idx()];
        let regions: Vec<usize> = order.iter().map(|l| env.region(si, *l)).collect();
        if let Some((sj, sidej)) = uses.get(1) {
            let other: Vec<usize> = env.profile(*sj).side_order[sidej.idx()]
                .iter()
                .map(|l| env.region(*sj, *l))
                .collect();
            if other != regions {
                return Err(BuildError::Complex(ComplexError::InconsistentGluing(format!(
                    "edge {} resolves to different sheets from its two sides",
                    e.id
                ))));
            }
        }
        let n = e.etype.n;
        match env.splits.get(&e.id) {
            None => {
                let tail_map: Vec<Option<u32>> =
                    (1..=n).map(|p| e.etype.sigma_minus(p)).collect();
                let a_minus_ones = e.etype.cusp_pair().into_iter().collect();
                edges.insert(
                    e.id.clone(),
                    EdgeCtx {
                        n,
                        regions,
                        omitted: BTreeSet::new(),
                        ones: BTreeSet::new(),
                        tail: e.tail.clone(),
                        head: e.head.clone(),
                        tail_map,
                        a_minus_ones,
                    },
                );
            }
            Some(sc) => {
                let lower_regions: Vec<usize> = sc
                    .vorder
                    .iter()
                    .map(|p| regions[*p as usize - 1])
                    .collect();
                let lower_tail_map: Vec<Option<u32>> = sc
                    .vorder
                    .iter()
                    .map(|p| e.etype.sigma_minus(*p))
                    .collect();
                edges.insert(
                    sc.lower.clone(),
                    EdgeCtx {
                        n,
                        regions: lower_regions,
                        omitted: BTreeSet::new(),
                        ones: BTreeSet::new(),
                        tail: e.tail.clone(),
                        head: sc.vertex.clone(),
                        tail_map: lower_tail_map,
                        a_minus_ones: BTreeSet::new(),
                    },
                );
                let upper_tail_map: Vec<Option<u32>> =
                    (1..=n).map(|p| Some(sc.vinv[p as usize - 1])).collect();
                edges.insert(
                    sc.upper.clone(),
                    EdgeCtx {
                        n,
                        regions,
                        omitted: BTreeSet::new(),
                        ones: BTreeSet::new(),
                        tail: sc.vertex.clone(),
                        head: e.head.clone(),
                        tail_map: upper_tail_map,
                        a_minus_ones: BTreeSet::new(),
                    },
                );
            }
        }
    }

    // Diagonal edges of subdivided squares.
    for &si in env.subs.keys() {
        let labels = env.between_order(si);
        let regions: Vec<usize> = labels.iter().map(|l| env.region(si, *l)).collect();
        let sub = &env.subs[&si];
        let r_split = &env.splits[dec.squares[si].sides.get(sub.r_side)];
        let p = env.profile(si);
        let (tail, tail_map): (String, Vec<Option<u32>>) = match sub.l_side {
            None => {
                let map = labels
                    .iter()
                    .map(|l| p.corner_pos(Corner::LL, *l))
                    .collect();
                (env.idx.corner_vertex(si, Corner::LL).to_string(), map)
            }
            Some(ls) => {
                let l_split = &env.splits[dec.squares[si].sides.get(ls)];
                let map = labels
                    .iter()
                    .map(|l| {
                        p.side_pos(ls, *l)
                            .map(|pos| l_split.vinv[pos as usize - 1])
                    })
                    .collect();
                (l_split.vertex.clone(), map)
            }
        };
        let a_minus_ones = p
            .cusps
            .iter()
            .filter_map(|c| slot_of_pair(&labels, c.upper, c.lower))
            .filter(|_| p.stype == 12)
            .collect();
        edges.insert(
            env.diag_id(si),
            EdgeCtx {
                n: labels.len() as u32,
                regions,
                omitted: BTreeSet::new(),
                ones: BTreeSet::new(),
                tail,
                head: r_split.vertex.clone(),
                tail_map,
                a_minus_ones,
            },
        );
    }

    apply_placements(&env, &mut vertices, &mut edges)?;

    let mut faces = Vec::new();
    for (si, _) in dec.squares.iter().enumerate() {
        if env.subs.contains_key(&si) {
            faces.extend(subdivided_faces(&env, si, &edges)?);
        } else {
            faces.push(plain_face(&env, si, &edges)?);
        }
    }
    faces.sort_by(|a, b| a.id.cmp(&b.id));

    Ok(CellSet { m: md.m, mu: md.mu, vertices, edges, faces })
}

fn slot_of_pair(labels: &[Label], a: Label, b: Label) -> Option<(u32, u32)> {
    let pa = labels.iter().position(|l| *l == a)? as u32 + 1;
    let pb = labels.iter().position(|l| *l == b)? as u32 + 1;
    Some((pa.min(pb), pa.max(pb)))
}

/// Record arc placements: omitted generator slots on every closed cell an
/// arc occupies, and the constant-1 slots under swallowtail arcs.
fn apply_placements(
    env: &Env,
    vertices: &mut BTreeMap<String, VertexCtx>,
    edges: &mut BTreeMap<String, EdgeCtx>,
) -> Result<(), BuildError> {
    let dec = env.idx.dec;
    // Crossings of an arc that coincide with the split vertex of a refined
    // edge, excluding the listed sides (the ends of a diagonal target).
    let vertex_crossings = |arc: &crate::cellcomplex::profile::Arc,
                            sq: &crate::cellcomplex::SquareData,
                            exclude: &[Side]|
     -> Vec<(Side, (u32, u32))> {
        let mut out = Vec::new();
        for (side, pair) in &arc.crossings {
            if exclude.contains(side) {
                continue;
            }
            let eid = sq.sides.get(*side);
            let Some(sc) = env.splits.get(eid) else { continue };
            let e = dec.edge(eid).unwrap();
            let split_pair = match e.etype.tag {
                EdgeTag::TwoCr => (sc.kappa + 1, sc.kappa + 2),
                EdgeTag::OneCr => (sc.kappa, sc.kappa + 1),
                _ => continue,
            };
            if *pair == split_pair {
                out.push((*side, *pair));
            }
        }
        out
    };
    // The pushed arc runs along the tail piece of such an edge on its way
    // to the target: the pair loses its chords there and at the piece tail.
    let cover_split_tails = |crossings: &[(Side, (u32, u32))],
                             sq: &crate::cellcomplex::SquareData,
                             vertices: &mut BTreeMap<String, VertexCtx>,
                             edges: &mut BTreeMap<String, EdgeCtx>| {
        for (side, pair) in crossings {
            let sc = &env.splits[sq.sides.get(*side)];
            let vslot = (
                sc.vinv[pair.0 as usize - 1].min(sc.vinv[pair.1 as usize - 1]),
                sc.vinv[pair.0 as usize - 1].max(sc.vinv[pair.1 as usize - 1]),
            );
            let tail_slot = pair_map(&edges[&sc.lower].tail_map.clone(), vslot);
            let tail = edges[&sc.lower].tail.clone();
            edges.get_mut(&sc.lower).unwrap().omitted.insert(vslot);
            if let Some(s) = tail_slot {
                vertices.get_mut(&tail).unwrap().omitted.insert(s);
            }
        }
    };
    for (si, sq) in dec.squares.iter().enumerate() {
        let p = env.profile(si);
        for arc in &p.arcs {
            let (a, b) = arc.pair;
            // In the refinement, the arc matching the upper crossing of the
            // right-image side moves to the diagonal.
            let to_diagonal = env.subs.get(&si).is_some_and(|sub| {
                let eid = sq.sides.get(sub.r_side);
                let kappa = env.splits[eid].kappa;
                arc.crossings
                    .iter()
                    .any(|(s, pair)| *s == sub.r_side && *pair == (kappa + 1, kappa + 2))
            });
            if to_diagonal {
                let sub0 = env.subs[&si];
                let mut exclude = vec![sub0.r_side];
                exclude.extend(sub0.l_side);
                let vc = vertex_crossings(arc, sq, &exclude);
                cover_split_tails(&vc, sq, vertices, edges);
                let diag = env.diag_id(si);
                let labels = env.between_order(si);
                if let Some(slot) = slot_of_pair(&labels, a, b) {
                    edges.get_mut(&diag).unwrap().omitted.insert(slot);
                }
                // Endpoint vertices of the diagonal.
                let sub = env.subs[&si];
                match sub.l_side {
                    None => {
                        let vid = env.idx.corner_vertex(si, Corner::LL).to_string();
                        let pa = p.corner_pos(Corner::LL, a);
                        let pb = p.corner_pos(Corner::LL, b);
                        omit_slot(vertices, &vid, pa, pb);
                    }
                    Some(ls) => {
                        let sc = &env.splits[sq.sides.get(ls)];
                        let pa = p.side_pos(ls, a).map(|q| sc.vinv[q as usize - 1]);
                        let pb = p.side_pos(ls, b).map(|q| sc.vinv[q as usize - 1]);
                        let vid = sc.vertex.clone();
                        omit_slot(vertices, &vid, pa, pb);
                    }
                }
                let sc = &env.splits[sq.sides.get(sub.r_side)];
                let pa = p.side_pos(sub.r_side, a).map(|q| sc.vinv[q as usize - 1]);
                let pb = p.side_pos(sub.r_side, b).map(|q| sc.vinv[q as usize - 1]);
                let vid = sc.vertex.clone();
                omit_slot(vertices, &vid, pa, pb);
                continue;
            }
            match arc.target {
                ArcTarget::LowerLeftVertex => {
                    let vid = env.idx.corner_vertex(si, Corner::LL).to_string();
                    let pa = p.corner_pos(Corner::LL, a);
                    let pb = p.corner_pos(Corner::LL, b);
                    omit_slot(vertices, &vid, pa, pb);
                }
                ArcTarget::OntoSide(side) => {
                    let vc = vertex_crossings(arc, sq, &[side]);
                    cover_split_tails(&vc, sq, vertices, edges);
                    if !vertex_crossings(arc, sq, &[]).iter().all(|(s, _)| *s != side) {
                        return Err(BuildError::MissingBoundaryData(format!(
                            "square {}: crossing arc meets the split vertex of its target side",
                            sq.id
                        )));
                    }
                    let eid = sq.sides.get(side);
                    let pa = env.profile(si).side_pos(side, a);
                    let pb = env.profile(si).side_pos(side, b);
                    let (Some(pa), Some(pb)) = (pa, pb) else {
                        return Err(BuildError::MissingBoundaryData(format!(
                            "arc sheets missing over side {} of square {}",
                            side.name(),
                            sq.id
                        )));
                    };
                    let slot = (pa.min(pb), pa.max(pb));
                    match env.splits.get(eid) {
                        None => {
                            let ctx = edges.get_mut(eid).unwrap();
                            if arc.swallowtail {
                                ctx.ones.insert(slot);
                            } else {
                                ctx.omitted.insert(slot);
                            }
                            let tail_slot = pair_map(&ctx.tail_map.clone(), slot);
                            let head_slot = Some(slot);
                            let (tail, head) = (ctx.tail.clone(), ctx.head.clone());
                            if let Some(s) = tail_slot {
                                vertices.get_mut(&tail).unwrap().omitted.insert(s);
                            }
                            if let Some(s) = head_slot {
                                vertices.get_mut(&head).unwrap().omitted.insert(s);
                            }
                        }
                        Some(sc) => {
                            // All pieces and interior/endpoint vertices.
                            let vslot = (
                                sc.vinv[slot.0 as usize - 1].min(sc.vinv[slot.1 as usize - 1]),
                                sc.vinv[slot.0 as usize - 1].max(sc.vinv[slot.1 as usize - 1]),
                            );
                            edges.get_mut(&sc.lower).unwrap().omitted.insert(vslot);
                            edges.get_mut(&sc.upper).unwrap().omitted.insert(slot);
                            vertices.get_mut(&sc.vertex).unwrap().omitted.insert(vslot);
                            if let Some(s) =
                                pair_map(&edges[&sc.lower].tail_map.clone(), vslot)
                            {
                                let tail = edges[&sc.lower].tail.clone();
                                vertices.get_mut(&tail).unwrap().omitted.insert(s);
                            }
                            let head = edges[&sc.upper].head.clone();
                            vertices.get_mut(&head).unwrap().omitted.insert(slot);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn pair_map(map: &[Option<u32>], slot: (u32, u32)) -> Option<(u32, u32)> {
    let a = map[slot.0 as usize - 1]?;
    let b = map[slot.1 as usize - 1]?;
    Some((a.min(b), a.max(b)))
}

fn omit_slot(
    vertices: &mut BTreeMap<String, VertexCtx>,
    vid: &str,
    pa: Option<u32>,
    pb: Option<u32>,
) {
    if let (Some(pa), Some(pb)) = (pa, pb) {
        if pa != pb {
            vertices
                .get_mut(vid)
                .expect("vertex context")
                .omitted
                .insert((pa.min(pb), pa.max(pb)));
        }
    }
}

/// Face slots of the edge `ones` of a factor's edge, translated through the
/// factor map.
fn translate_ones(fac_map: &[Option<u32>], edge_ones: &BTreeSet<(u32, u32)>) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for i in 1..=fac_map.len() as u32 {
        for j in i + 1..=fac_map.len() as u32 {
            if let (Some(p), Some(q)) = (fac_map[i as usize - 1], fac_map[j as usize - 1]) {
                let slot = (p.min(q), p.max(q));
                if edge_ones.contains(&slot) {
                    out.insert((i, j));
                }
            }
        }
    }
    out
}

struct FaceBuild<'e> {
    env: &'e Env<'e>,
    si: usize,
    labels: Vec<Label>,
    edges: &'e BTreeMap<String, EdgeCtx>,
}

impl<'e> FaceBuild<'e> {
    /// Factor for one 1-cell of a side (the lower or upper half when the
    /// edge is split).
    fn factor(&self, side: Side, cell_id: &str, suppress_ones: bool) -> Factor {
        let eid = self.env.idx.dec.squares[self.si].sides.get(side);
        let split = self.env.splits.get(eid);
        let is_lower = split.is_some_and(|s| s.lower == cell_id);
        let base_map: Vec<Option<u32>> = self
            .labels
            .iter()
            .map(|l| {
                let pos = self.label_side_pos(side, *l)?;
                match (split, is_lower) {
                    (Some(sc), true) => Some(sc.vinv[pos as usize - 1]),
                    _ => Some(pos),
                }
            })
            .collect();
        let edge_ones = &self.edges[cell_id].ones;
        let ones = if suppress_ones {
            BTreeSet::new()
        } else {
            translate_ones(&base_map, edge_ones)
        };
        Factor { edge: cell_id.to_string(), map: base_map, ones }
    }

    /// Edge-local position of a face label over a side, honoring the
    /// swallowtail subscript conventions for the left-image side.
    fn label_side_pos(&self, side: Side, l: Label) -> Option<u32> {
        let p = self.env.profile(self.si);
        let tilde_side = match p.swallow {
            SwallowKind::None => None,
            _ => Some(if p.reflected { Side::D } else { Side::L }),
        };
        if Some(side) == tilde_side {
            // b entries with an endpoint on the tilde sheet are placed in
            // the row/column of the sheet it continues above the half-plane
            // containing this side.
            match (p.swallow, l) {
                (SwallowKind::Up { k }, Label::S(i)) if i == k + 2 => p.side_pos(side, Label::Tilde),
                (SwallowKind::Up { k }, Label::S(i)) if i == k || i == k + 1 => None,
                (SwallowKind::Down { l: sl }, Label::S(i)) if i == sl - 2 => {
                    p.side_pos(side, Label::Tilde)
                }
                (SwallowKind::Down { l: sl }, Label::S(i)) if i == sl - 1 || i == sl => None,
                _ => p.side_pos(side, l),
            }
        } else {
            p.side_pos(side, l)
        }
    }

    /// Position of a face label at a corner vertex, honoring the tilde
    /// conventions at the lower-left corner of swallowtail squares.
    fn label_corner_pos(&self, corner: Corner, l: Label) -> Option<u32> {
        let p = self.env.profile(self.si);
        if corner == Corner::LL {
            match (p.swallow, l) {
                (SwallowKind::Up { k }, Label::S(i)) if i == k + 1 => {
                    return p.corner_pos(corner, Label::Tilde)
                }
                (SwallowKind::Up { k }, Label::S(i)) if i == k || i == k + 2 => return None,
                (SwallowKind::Down { l: sl }, Label::S(i)) if i == sl - 1 => {
                    return p.corner_pos(corner, Label::Tilde)
                }
                (SwallowKind::Down { l: sl }, Label::S(i)) if i == sl - 2 || i == sl => {
                    return None
                }
                _ => {}
            }
        }
        p.corner_pos(corner, l)
    }

    fn side_factors(&self, side: Side, forward: bool, suppress_ones: bool) -> Vec<Factor> {
        let mut cells = self.env.side_cells(self.si, side);
        if !forward {
            cells.reverse();
        }
        cells
            .iter()
            .map(|c| self.factor(side, c, suppress_ones))
            .collect()
    }
}

fn plain_face(
    env: &Env,
    si: usize,
    edges: &BTreeMap<String, EdgeCtx>,
) -> Result<FaceCtx, BuildError> {
    let dec = env.idx.dec;
    let sq = &dec.squares[si];
    let p = env.profile(si);
    let labels: Vec<Label> = (1..=p.n).map(Label::S).collect();
    let regions: Vec<usize> = labels.iter().map(|l| env.region(si, *l)).collect();
    let fb = FaceBuild { env, si, labels: labels.clone(), edges };

    let a0_ones: Vec<(u32, u32)> = match p.swallow {
        SwallowKind::Up { k } => vec![(k, k + 2)],
        SwallowKind::Down { l } => vec![(l - 2, l)],
        SwallowKind::None => p
            .cusps
            .iter()
            .filter_map(|c| slot_of_pair(&labels, c.upper, c.lower))
            .collect(),
    };

    if p.swallow != SwallowKind::None {
        let arc_side = p.swallow_arc_side().unwrap();
        let mut sides: Vec<Factor> = Vec::with_capacity(4);
        for side in Side::ALL {
            let cells = env.side_cells(si, side);
            if cells.len() != 1 {
                return Err(BuildError::MissingBoundaryData(format!(
                    "swallowtail square {} has a subdivided side",
                    sq.id
                )));
            }
            sides.push(fb.factor(side, &cells[0], side == arc_side));
        }
        let (up, param) = match p.swallow {
            SwallowKind::Up { k } => (true, k),
            SwallowKind::Down { l } => (false, l),
            SwallowKind::None => unreachable!(),
        };
        let a0_map = labels
            .iter()
            .map(|l| fb.label_corner_pos(Corner::LL, *l))
            .collect();
        let a1_map = labels
            .iter()
            .map(|l| fb.label_corner_pos(Corner::UR, *l))
            .collect();
        return Ok(FaceCtx {
            id: sq.id.clone(),
            labels,
            regions,
            v0: env.idx.corner_vertex(si, Corner::LL).to_string(),
            v1: env.idx.corner_vertex(si, Corner::UR).to_string(),
            a0_map,
            a1_map,
            a0_ones,
            kind: FaceKind::Swallow {
                up,
                param,
                sides: Box::new([
                    sides.remove(0),
                    sides.remove(0),
                    sides.remove(0),
                    sides.remove(0),
                ]),
                reflected: p.reflected,
            },
        });
    }

    // Standard squares: initial and terminal vertices at the lower-left
    // and upper-right corners, boundary paths traversed from v0 to v1.
    let (c0, c1) = (Corner::LL, Corner::UR);
    let (path1, path2): (Vec<(Side, bool)>, Vec<(Side, bool)>) = (
        vec![(Side::L, true), (Side::U, true)],
        vec![(Side::D, true), (Side::R, true)],
    );
    let expand = |path: &[(Side, bool)]| -> Vec<Factor> {
        path.iter()
            .flat_map(|(side, fwd)| fb.side_factors(*side, *fwd, false))
            .collect()
    };
    let a0_map = labels.iter().map(|l| fb.label_corner_pos(c0, *l)).collect();
    let a1_map = labels.iter().map(|l| fb.label_corner_pos(c1, *l)).collect();
    Ok(FaceCtx {
        id: sq.id.clone(),
        labels,
        regions,
        v0: env.idx.corner_vertex(si, c0).to_string(),
        v1: env.idx.corner_vertex(si, c1).to_string(),
        a0_map,
        a1_map,
        a0_ones,
        kind: FaceKind::Standard { path1: expand(&path1), path2: expand(&path2) },
    })
}

fn subdivided_faces(
    env: &Env,
    si: usize,
    edges: &BTreeMap<String, EdgeCtx>,
) -> Result<Vec<FaceCtx>, BuildError> {
    let dec = env.idx.dec;
    let sq = &dec.squares[si];
    let p = env.profile(si);
    let sub = env.subs[&si];
    let refl = p.reflected;
    let r_side = sub.r_side;
    let r_eid = sq.sides.get(r_side);
    let r_split = &env.splits[r_eid];
    let diag = env.diag_id(si);
    let vsplit = r_split.vertex.clone();

    let cusp_ones = |labels: &Vec<Label>| -> Vec<(u32, u32)> {
        p.cusps
            .iter()
            .filter_map(|c| slot_of_pair(labels, c.upper, c.lower))
            .collect()
    };

    // Upper face: everything above the diagonal.
    let labels_p: Vec<Label> = (1..=p.n).map(Label::S).collect();
    let fb_p = FaceBuild { env, si, labels: labels_p.clone(), edges };
    let diag_factor = |labels: &[Label]| -> Factor {
        let order = env.between_order(si);
        let map = labels
            .iter()
            .map(|l| order.iter().position(|x| x == l).map(|p| p as u32 + 1))
            .collect();
        Factor { edge: diag.clone(), map, ones: BTreeSet::new() }
    };
    let upper_piece = |side: Side, fb: &FaceBuild| -> Factor {
        let sc = &env.splits[sq.sides.get(side)];
        fb.factor(side, &sc.upper.clone(), false)
    };
    let lower_piece = |side: Side, fb: &FaceBuild| -> Factor {
        let sc = &env.splits[sq.sides.get(side)];
        fb.factor(side, &sc.lower.clone(), false)
    };

    let (v0_p, a0_map_p, path1_p): (String, Vec<Option<u32>>, Vec<Factor>) = match sub.l_side {
        None => {
            let v0 = env.idx.corner_vertex(si, Corner::LL).to_string();
            let map = labels_p
                .iter()
                .map(|l| fb_p.label_corner_pos(Corner::LL, *l))
                .collect();
            let path1 = if refl {
                [(Side::D, true), (Side::R, true)]
                    .iter()
                    .flat_map(|(s, f)| fb_p.side_factors(*s, *f, false))
                    .collect()
            } else {
                [(Side::L, true), (Side::U, true)]
                    .iter()
                    .flat_map(|(s, f)| fb_p.side_factors(*s, *f, false))
                    .collect()
            };
            (v0, map, path1)
        }
        Some(ls) => {
            let l_split = &env.splits[sq.sides.get(ls)];
            let map = labels_p
                .iter()
                .map(|l| {
                    p.side_pos(ls, *l)
                        .map(|pos| l_split.vinv[pos as usize - 1])
                })
                .collect();
            let mut path1 = vec![upper_piece(ls, &fb_p)];
            let follow = if refl { Side::R } else { Side::U };
            path1.extend(fb_p.side_factors(follow, true, false));
            (l_split.vertex.clone(), map, path1)
        }
    };
    let path2_p = vec![diag_factor(&labels_p), upper_piece(r_side, &fb_p)];
    let a1_map_p = labels_p
        .iter()
        .map(|l| fb_p.label_corner_pos(Corner::UR, *l))
        .collect();
    let face_plus = FaceCtx {
        id: sub.face_plus.clone(),
        regions: labels_p.iter().map(|l| env.region(si, *l)).collect(),
        labels: labels_p.clone(),
        v0: v0_p,
        v1: env.idx.corner_vertex(si, Corner::UR).to_string(),
        a0_map: a0_map_p,
        a1_map: a1_map_p,
        a0_ones: cusp_ones(&labels_p),
        kind: FaceKind::Standard { path1: path1_p, path2: path2_p },
    };

    // Lower face: between the diagonal and the bottom-image path.
    let labels_m = env.between_order(si);
    let fb_m = FaceBuild { env, si, labels: labels_m.clone(), edges };
    let a0_map_m: Vec<Option<u32>> = labels_m
        .iter()
        .map(|l| fb_m.label_corner_pos(Corner::LL, *l))
        .collect();
    let a1_map_m: Vec<Option<u32>> = labels_m
        .iter()
        .map(|l| {
            p.side_pos(r_side, *l)
                .map(|pos| r_split.vinv[pos as usize - 1])
        })
        .collect();
    let mut path1_m: Vec<Factor> = Vec::new();
    if let Some(ls) = sub.l_side {
        path1_m.push(lower_piece(ls, &fb_m));
    }
    path1_m.push(diag_factor(&labels_m));
    let bottom = if refl { Side::L } else { Side::D };
    let mut path2_m: Vec<Factor> = fb_m.side_factors(bottom, true, false);
    path2_m.push(lower_piece(r_side, &fb_m));
    let face_minus = FaceCtx {
        id: sub.face_minus.clone(),
        regions: labels_m.iter().map(|l| env.region(si, *l)).collect(),
        labels: labels_m.clone(),
        v0: env.idx.corner_vertex(si, Corner::LL).to_string(),
        v1: vsplit,
        a0_map: a0_map_m,
        a1_map: a1_map_m,
        a0_ones: cusp_ones(&labels_m),
        kind: FaceKind::Standard { path1: path1_m, path2: path2_m },
    };

    Ok(vec![face_plus, face_minus])
}
