//! Data model and validation for transverse square decompositions.

pub mod atlas;
pub mod parallel;
pub mod profile;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use profile::{
    square_profile, Arc, ArcTarget, Corner, EdgeType, MalformedSquare, Side, SquareProfile,
    side_ends,
};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeData {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(rename = "type")]
    pub etype: EdgeType,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidesData {
    #[serde(rename = "L")]
    pub l: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "R")]
    pub r: String,
    #[serde(rename = "U")]
    pub u: String,
}

impl SidesData {
    pub fn get(&self, s: Side) -> &str {
        match s {
            Side::L => &self.l,
            Side::D => &self.d,
            Side::R => &self.r,
            Side::U => &self.u,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareData {
    pub id: String,
    #[serde(rename = "type")]
    pub stype: u8,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reflected: bool,
    pub sides: SidesData,
}

/// A transverse square decomposition: vertices, oriented typed edges, and
/// typed squares with their four side edges.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Decomposition {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeData>,
    pub squares: Vec<SquareData>,
}

impl Decomposition {
    pub fn from_json(text: &str) -> Result<Decomposition, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn edge(&self, id: &str) -> Option<&EdgeData> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn square(&self, id: &str) -> Option<&SquareData> {
        self.squares.iter().find(|s| s.id == id)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: &'static str, detail: String) {
        self.violations.push(Violation { code, detail });
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("decomposition is invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Malformed(#[from] MalformedSquare),
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
}

/// Square profiles plus indexing shared by validation and DGA assembly.
pub struct ComplexIndex<'a> {
    pub dec: &'a Decomposition,
    pub profiles: Vec<SquareProfile>,
    /// (square index, side) incidences per edge id.
    pub edge_uses: BTreeMap<&'a str, Vec<(usize, Side)>>,
    pub vertex_ids: BTreeSet<&'a str>,
}

impl<'a> ComplexIndex<'a> {
    pub fn new(dec: &'a Decomposition) -> Result<Self, ComplexError> {
        let mut profiles = Vec::with_capacity(dec.squares.len());
        for sq in &dec.squares {
            profiles.push(square_profile(sq.stype, sq.n, sq.k, sq.l, sq.reflected)?);
        }
        let mut edge_uses: BTreeMap<&str, Vec<(usize, Side)>> = BTreeMap::new();
        for e in &dec.edges {
            edge_uses.entry(e.id.as_str()).or_default();
        }
        for (si, sq) in dec.squares.iter().enumerate() {
            for side in Side::ALL {
                edge_uses
                    .entry(sq.sides.get(side))
                    .or_default()
                    .push((si, side));
            }
        }
        Ok(ComplexIndex {
            dec,
            profiles,
            edge_uses,
            vertex_ids: dec.vertices.iter().map(|v| v.as_str()).collect(),
        })
    }

    /// The vertex id at a corner of a square, via the side edges.
    pub fn corner_vertex(&self, si: usize, corner: Corner) -> &'a str {
        let sq = &self.dec.squares[si];
        let (side, take_head) = match corner {
            Corner::LL => (Side::L, false),
            Corner::UL => (Side::L, true),
            Corner::LR => (Side::R, false),
            Corner::UR => (Side::R, true),
        };
        let e = self.dec.edge(sq.sides.get(side)).expect("checked edge");
        if take_head {
            &e.head
        } else {
            &e.tail
        }
    }

    /// Sheet count above a vertex, if determined by some incident edge.
    pub fn vertex_sheet_count(&self, vid: &str) -> Option<u32> {
        for e in &self.dec.edges {
            if e.head == vid {
                return Some(e.etype.n);
            }
            if e.tail == vid {
                return Some(e.etype.tail_count());
            }
        }
        None
    }
}

/// Structural sanity: every reference resolves and ids are unique. These
/// problems make any further analysis meaningless, so they are reported
/// and validation stops.
fn structural_check(dec: &Decomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &dec.vertices {
        if !seen.insert(("v", v.as_str())) {
            out.push(Violation { code: "dup-id", detail: format!("duplicate vertex id {v}") });
        }
    }
    for e in &dec.edges {
        if !seen.insert(("e", e.id.as_str())) {
            out.push(Violation { code: "dup-id", detail: format!("duplicate edge id {}", e.id) });
        }
    }
    for s in &dec.squares {
        if !seen.insert(("s", s.id.as_str())) {
            out.push(Violation { code: "dup-id", detail: format!("duplicate square id {}", s.id) });
        }
    }
    let vids: BTreeSet<&str> = dec.vertices.iter().map(|v| v.as_str()).collect();
    let eids: BTreeSet<&str> = dec.edges.iter().map(|e| e.id.as_str()).collect();
    for e in &dec.edges {
        for v in [&e.tail, &e.head] {
            if !vids.contains(v.as_str()) {
                out.push(Violation {
                    code: "missing-vertex",
                    detail: format!("edge {} refers to unknown vertex {}", e.id, v),
                });
            }
        }
        if !e.etype.well_formed() {
            out.push(Violation {
                code: "bad-edge-type",
                detail: format!("edge {} has out-of-range type parameters", e.id),
            });
        }
    }
    for s in &dec.squares {
        for side in Side::ALL {
            let eid = s.sides.get(side);
            if !eids.contains(eid) {
                out.push(Violation {
                    code: "missing-edge",
                    detail: format!("square {} side {} refers to unknown edge {}", s.id, side.name(), eid),
                });
            }
        }
    }
    out
}

/// Validate a decomposition against the admissibility conditions: per-square
/// edge-type compatibility, the orientation pattern (A1), the T-set rule
/// (A2), non-adjacent Type (3) squares (A3), and the arc shifting rule (A4).
pub fn validate(dec: &Decomposition) -> ValidationReport {
    let mut report = ValidationReport::default();
    let structural = structural_check(dec);
    if !structural.is_empty() {
        report.violations = structural;
        return report;
    }

    let idx = match ComplexIndex::new(dec) {
        Ok(i) => i,
        Err(e) => {
            report.push("malformed-square", e.to_string());
            return report;
        }
    };

    // Induced edge types and (A1) incidence pattern.
    for (si, sq) in dec.squares.iter().enumerate() {
        let p = &idx.profiles[si];
        for side in Side::ALL {
            let eid = sq.sides.get(side);
            let e = dec.edge(eid).unwrap();
            let want = p.induced[side.idx()];
            if e.etype != want {
                report.push(
                    "edge-type-mismatch",
                    format!(
                        "square {} side {} needs {:?} but edge {} is {:?}",
                        sq.id,
                        side.name(),
                        want,
                        eid,
                        e.etype
                    ),
                );
            }
        }
        // (A1): L and D share their tail; heads/tails pair up around the square.
        let v = |side: Side, head: bool| -> &str {
            let e = dec.edge(sq.sides.get(side)).unwrap();
            if head {
                &e.head
            } else {
                &e.tail
            }
        };
        let checks = [
            (v(Side::L, false), v(Side::D, false), "LL"),
            (v(Side::L, true), v(Side::U, false), "UL"),
            (v(Side::D, true), v(Side::R, false), "LR"),
            (v(Side::R, true), v(Side::U, true), "UR"),
        ];
        for (a, b, corner) in checks {
            if a != b {
                report.push(
                    "orientation",
                    format!(
                        "square {}: side edges disagree at corner {corner} ({a} vs {b}); \
                         1-cells must run from the lower left to the upper right corner",
                        sq.id
                    ),
                );
            }
        }
    }
    if !report.is_valid() {
        // Sheet-count and arc bookkeeping below assume the incidences hold.
        return report;
    }

    // Each edge borders at most two square sides.
    for (eid, uses) in &idx.edge_uses {
        if uses.len() > 2 {
            report.push(
                "edge-overused",
                format!("edge {} borders {} square sides (max 2)", eid, uses.len()),
            );
        }
    }

    // Vertex sheet-count consistency across all incident cells.
    for vid in &idx.vertex_ids {
        let mut counts: BTreeSet<u32> = BTreeSet::new();
        for e in &dec.edges {
            if e.head == *vid {
                counts.insert(e.etype.n);
            }
            if e.tail == *vid {
                counts.insert(e.etype.tail_count());
            }
        }
        if counts.len() > 1 {
            report.push(
                "sheet-count",
                format!("vertex {} sees inconsistent sheet counts {:?}", vid, counts),
            );
        }
    }

    // (A2): for a pair of sheets above a vertex, at most two outgoing edges
    // carry their crossing, and two only for the L/D sides of a Type (3)
    // square based there.
    let mut t_sets: BTreeMap<(&str, u32, u32), Vec<&str>> = BTreeMap::new();
    for e in &dec.edges {
        for (a, b) in e.etype.crossing_pairs() {
            // Positions of the crossing pair above the tail vertex.
            let (pa, pb) = match (e.etype.sigma_minus(a), e.etype.sigma_minus(b)) {
                (Some(x), Some(y)) => (x.min(y), x.max(y)),
                _ => continue,
            };
            t_sets
                .entry((e.tail.as_str(), pa, pb))
                .or_default()
                .push(e.id.as_str());
        }
    }
    for ((vid, i, j), edges) in &t_sets {
        if edges.len() > 2 {
            report.push(
                "A2",
                format!("|T({vid}, S{i}, S{j})| = {} exceeds 2", edges.len()),
            );
        } else if edges.len() == 2 {
            let ok = dec.squares.iter().enumerate().any(|(si, sq)| {
                sq.stype == 3
                    && idx.corner_vertex(si, Corner::LL) == *vid
                    && {
                        let l = sq.sides.get(Side::L);
                        let d = sq.sides.get(Side::D);
                        (l == edges[0] && d == edges[1]) || (l == edges[1] && d == edges[0])
                    }
            });
            if !ok {
                report.push(
                    "A2",
                    format!(
                        "two 1-cells {:?} start at {vid} with sheets S{i}, S{j} crossing, \
                         but they are not the bottom and left edges of a Type (3) square",
                        edges
                    ),
                );
            }
        }
    }

    // (A3): Type (3) squares never share an edge or vertex.
    let type3: Vec<usize> = dec
        .squares
        .iter()
        .enumerate()
        .filter(|(_, s)| s.stype == 3)
        .map(|(i, _)| i)
        .collect();
    for (ai, &a) in type3.iter().enumerate() {
        for &b in &type3[ai + 1..] {
            let cells = |si: usize| -> BTreeSet<&str> {
                let mut out: BTreeSet<&str> = Side::ALL
                    .iter()
                    .map(|s| dec.squares[si].sides.get(*s))
                    .collect();
                for c in Corner::ALL {
                    out.insert(idx.corner_vertex(si, c));
                }
                out
            };
            if !cells(a).is_disjoint(&cells(b)) {
                report.push(
                    "A3",
                    format!(
                        "Type (3) squares {} and {} share a boundary cell",
                        dec.squares[a].id, dec.squares[b].id
                    ),
                );
            }
        }
    }

    // (A4), part 1: arcs shifted onto the same 1-cell must come from a single
    // Type (5), (6), (8) or (12) square.
    let mut placements: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (si, sq) in dec.squares.iter().enumerate() {
        for arc in &idx.profiles[si].arcs {
            if let ArcTarget::OntoSide(side) = arc.target {
                placements
                    .entry(sq.sides.get(side))
                    .or_default()
                    .push(si);
            }
        }
    }
    for (eid, sources) in &placements {
        if sources.len() > 1 {
            let same = sources.windows(2).all(|w| w[0] == w[1]);
            let doubling = matches!(dec.squares[sources[0]].stype, 5 | 6 | 8 | 12);
            if !(same && doubling) {
                report.push(
                    "A4",
                    format!(
                        "crossing arcs from distinct squares are shifted onto edge {}",
                        eid
                    ),
                );
            }
        }
    }

    // (A4), part 2: no closed crossing-locus component consists entirely of
    // Type (3) squares (such a component would be shrunk to a point).
    check_shrunk_components(&idx, &mut report);

    report
}

/// Walk the crossing locus through the complex. Segment ends are keyed by
/// (edge id, edge-local crossing pair); two segments in the squares on
/// either side of an edge join there.
fn check_shrunk_components(idx: &ComplexIndex, report: &mut ValidationReport) {
    type End<'a> = (&'a str, (u32, u32));
    // Each arc contributes its list of ends; interior stops (swallowtail
    // points) leave an arc with fewer than two ends, which keeps its
    // component open.
    struct Seg<'a> {
        square: usize,
        ends: Vec<End<'a>>,
    }
    let mut segs: Vec<Seg> = Vec::new();
    for (si, sq) in idx.dec.squares.iter().enumerate() {
        for arc in &idx.profiles[si].arcs {
            let ends = arc
                .crossings
                .iter()
                .map(|(side, pair)| (sq.sides.get(*side), *pair))
                .collect();
            segs.push(Seg { square: si, ends });
        }
    }
    let mut by_end: BTreeMap<End, Vec<usize>> = BTreeMap::new();
    for (i, s) in segs.iter().enumerate() {
        for e in &s.ends {
            by_end.entry(*e).or_default().push(i);
        }
    }
    // Union segments sharing an end.
    let mut parent: Vec<usize> = (0..segs.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for ids in by_end.values() {
        for w in ids.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    // A component is closed when every end is shared by two segments (or by
    // one segment twice, for self-gluing).
    let mut open: BTreeSet<usize> = BTreeSet::new();
    for (end, ids) in &by_end {
        if ids.len() < 2 {
            // The matching side of the edge may still close it up if the
            // same square borders the edge twice; count incidences.
            let uses = idx.edge_uses.get(end.0).map(|u| u.len()).unwrap_or(0);
            if uses < 2 {
                open.insert(find(&mut parent, ids[0]));
            }
        }
    }
    let mut all_type3: BTreeMap<usize, bool> = BTreeMap::new();
    for i in 0..segs.len() {
        let root = find(&mut parent, i);
        let e = all_type3.entry(root).or_insert(true);
        *e &= idx.dec.squares[segs[i].square].stype == 3;
    }
    for (root, t3) in all_type3 {
        if t3 && !open.contains(&root) {
            report.push(
                "A4",
                format!(
                    "a closed component of the crossing locus lies entirely in Type (3) \
                     squares and would be shrunk to a point (square {})",
                    idx.dec.squares[segs[root].square].id
                ),
            );
        }
    }
}

/// A crossing arc after the singular set is shifted into the 1-skeleton:
/// the closed cells it occupies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacedArc {
    pub square: String,
    /// Sheet pair in square labels (indices of S labels).
    pub pair: (u32, u32),
    /// Occupied closed cell: an edge id with its two endpoint vertex ids, or
    /// a single vertex id.
    pub cells: ArcCells,
    pub swallowtail: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArcCells {
    Edge { edge: String, tail: String, head: String },
    Vertex { vertex: String },
}

/// Positions of all crossing arcs after the shifting homotopy.
pub fn shift_singular(dec: &Decomposition) -> Result<Vec<PlacedArc>, ComplexError> {
    let report = validate(dec);
    if !report.is_valid() {
        return Err(ComplexError::Invalid(
            report
                .violations
                .iter()
                .map(|v| format!("[{}] {}", v.code, v.detail))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let idx = ComplexIndex::new(dec)?;
    Ok(placed_arcs(&idx))
}

pub(crate) fn placed_arcs(idx: &ComplexIndex) -> Vec<PlacedArc> {
    let mut out = Vec::new();
    for (si, sq) in idx.dec.squares.iter().enumerate() {
        for arc in &idx.profiles[si].arcs {
            let pair = match arc.pair {
                (profile::Label::S(a), profile::Label::S(b)) => (a, b),
                _ => continue,
            };
            let cells = match arc.target {
                ArcTarget::OntoSide(side) => {
                    let e = idx.dec.edge(sq.sides.get(side)).unwrap();
                    ArcCells::Edge {
                        edge: e.id.clone(),
                        tail: e.tail.clone(),
                        head: e.head.clone(),
                    }
                }
                ArcTarget::LowerLeftVertex => ArcCells::Vertex {
                    vertex: idx.corner_vertex(si, Corner::LL).to_string(),
                },
            };
            out.push(PlacedArc {
                square: sq.id.clone(),
                pair,
                cells,
                swallowtail: arc.swallowtail,
            });
        }
    }
    out
}

pub use profile::{sigma_maps, SigmaMaps};

/// Convenience: the arcs of one square profile (used by tests).
pub fn profile_arcs(p: &SquareProfile) -> &[Arc] {
    &p.arcs
}

/// Helper for constructing one-square decompositions programmatically.
pub fn single_square(
    stype: u8,
    n: u32,
    k: Option<u32>,
    l: Option<u32>,
    reflected: bool,
) -> Result<Decomposition, MalformedSquare> {
    let p = square_profile(stype, n, k, l, reflected)?;
    let vname = |c: Corner| {
        match c {
            Corner::LL => "vll",
            Corner::LR => "vlr",
            Corner::UL => "vul",
            Corner::UR => "vur",
        }
        .to_string()
    };
    let edges = Side::ALL
        .iter()
        .map(|s| {
            let (t, h) = side_ends(*s);
            EdgeData {
                id: format!("e{}", s.name()),
                tail: vname(t),
                head: vname(h),
                etype: p.induced[s.idx()],
            }
        })
        .collect();
    Ok(Decomposition {
        vertices: Corner::ALL.iter().map(|c| vname(*c)).collect(),
        edges,
        squares: vec![SquareData {
            id: "sq".to_string(),
            stype,
            n,
            k,
            l,
            reflected,
            sides: SidesData {
                l: "eL".into(),
                d: "eD".into(),
                r: "eR".into(),
                u: "eU".into(),
            },
        }],
    })
}
