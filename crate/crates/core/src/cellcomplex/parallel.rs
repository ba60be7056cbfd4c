//! The refinement E_par of a transverse decomposition: squares whose
//! shifted singular set doubles up on an edge (types 5, 6, 8, 12) are
//! subdivided so that the crossing arcs live on distinct 1-cells.

use std::collections::BTreeMap;

use serde::Serialize;

use super::profile::{EdgeTag, Side};
use super::{ComplexError, ComplexIndex, Decomposition, validate};

/// A split of an original edge at a new 0-cell. `lower` runs from the old
/// tail to the new vertex, `upper` from the new vertex to the old head.
/// `kappa` is the edge-local base index of the crossing the vertex sits at.
#[derive(Clone, Debug, Serialize)]
pub struct SplitEdge {
    pub vertex: String,
    pub lower: String,
    pub upper: String,
    pub kappa: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdividedSquare {
    /// The new 1-cell carrying the upper crossing arc; it runs from the
    /// square's lower-left corner (or the left split vertex for a Type (6)
    /// square) to the split vertex on the right-image side.
    pub diagonal: String,
    pub face_plus: String,
    pub face_minus: String,
    /// The side corresponding to the right edge of the model square (U when
    /// the square is reflected).
    pub r_side: Side,
    /// For Type (6) squares, the side corresponding to the left edge.
    pub l_side: Option<Side>,
}

#[derive(Clone, Debug)]
pub struct ParallelComplex {
    pub base: Decomposition,
    pub split_edges: BTreeMap<String, SplitEdge>,
    pub subdivided: BTreeMap<String, SubdividedSquare>,
}

impl ParallelComplex {
    /// Number of 0-, 1-, 2-cells after subdivision.
    pub fn cell_counts(&self) -> (usize, usize, usize) {
        let v = self.base.vertices.len() + self.split_edges.len();
        // Each split edge is replaced by two pieces; each subdivided square
        // adds its diagonal and one extra face.
        let e = self.base.edges.len() + self.split_edges.len() + self.subdivided.len();
        let f = self.base.squares.len() + self.subdivided.len();
        (v, e, f)
    }
}

/// Compute the E_par refinement. Squares of type 1-4, 7, 9-11, 13, 14 are
/// untouched, so the construction is idempotent on complexes without
/// doubled arcs.
pub fn to_parallel(dec: &Decomposition) -> Result<ParallelComplex, ComplexError> {
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
    let mut split_edges: BTreeMap<String, SplitEdge> = BTreeMap::new();
    let mut subdivided = BTreeMap::new();

    let mut split = |eid: &str, dec: &Decomposition| {
        if !split_edges.contains_key(eid) {
            let e = dec.edge(eid).expect("validated edge");
            let kappa = e.etype.k.expect("split edges carry a crossing");
            split_edges.insert(
                eid.to_string(),
                SplitEdge {
                    vertex: format!("{eid}:v"),
                    lower: format!("{eid}:-"),
                    upper: format!("{eid}:+"),
                    kappa,
                },
            );
        }
    };

    for (si, sq) in dec.squares.iter().enumerate() {
        if !matches!(sq.stype, 5 | 6 | 8 | 12) {
            continue;
        }
        let p = &idx.profiles[si];
        let r_side = if p.reflected { Side::U } else { Side::R };
        let l_side = if sq.stype == 6 {
            Some(if p.reflected { Side::D } else { Side::L })
        } else {
            None
        };
        split(sq.sides.get(r_side), dec);
        if let Some(ls) = l_side {
            split(sq.sides.get(ls), dec);
        }
        subdivided.insert(
            sq.id.clone(),
            SubdividedSquare {
                diagonal: format!("{}:c", sq.id),
                face_plus: format!("{}:+", sq.id),
                face_minus: format!("{}:-", sq.id),
                r_side,
                l_side,
            },
        );
    }

    // Sanity: only crossing-bearing edges are ever split.
    for eid in split_edges.keys() {
        let tag = dec.edge(eid).unwrap().etype.tag;
        debug_assert!(matches!(tag, EdgeTag::TwoCr | EdgeTag::OneCr));
    }

    Ok(ParallelComplex { base: dec.clone(), split_edges, subdivided })
}

/// Serializable summary of the refinement, used by the CLI.
#[derive(Serialize)]
pub struct ParallelDump<'a> {
    pub vertices: Vec<String>,
    pub edges: Vec<ParallelEdgeDump>,
    pub faces: Vec<ParallelFaceDump>,
    #[serde(skip)]
    _phantom: std::marker::PhantomData<&'a ()>,
}

#[derive(Serialize)]
pub struct ParallelEdgeDump {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
}

#[derive(Serialize)]
pub struct ParallelFaceDump {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
}

pub fn dump(par: &ParallelComplex) -> ParallelDump<'_> {
    let mut vertices = par.base.vertices.clone();
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for e in &par.base.edges {
        if let Some(split) = par.split_edges.get(&e.id) {
            vertices.push(split.vertex.clone());
            edges.push(ParallelEdgeDump {
                id: split.lower.clone(),
                tail: e.tail.clone(),
                head: split.vertex.clone(),
                from: Some(e.id.clone()),
            });
            edges.push(ParallelEdgeDump {
                id: split.upper.clone(),
                tail: split.vertex.clone(),
                head: e.head.clone(),
                from: Some(e.id.clone()),
            });
        } else {
            edges.push(ParallelEdgeDump {
                id: e.id.clone(),
                tail: e.tail.clone(),
                head: e.head.clone(),
                from: None,
            });
        }
    }
    for sq in &par.base.squares {
        if let Some(sub) = par.subdivided.get(&sq.id) {
            let idx = ComplexIndex::new(&par.base).expect("validated");
            let si = par.base.squares.iter().position(|s| s.id == sq.id).unwrap();
            let r_edge = sq.sides.get(sub.r_side);
            let r_split = &par.split_edges[r_edge];
            let tail = match sub.l_side {
                Some(ls) => par.split_edges[sq.sides.get(ls)].vertex.clone(),
                None => idx
                    .corner_vertex(si, super::profile::Corner::LL)
                    .to_string(),
            };
            edges.push(ParallelEdgeDump {
                id: sub.diagonal.clone(),
                tail,
                head: r_split.vertex.clone(),
                from: Some(sq.id.clone()),
            });
            faces.push(ParallelFaceDump { id: sub.face_plus.clone(), from: Some(sq.id.clone()) });
            faces.push(ParallelFaceDump { id: sub.face_minus.clone(), from: Some(sq.id.clone()) });
        } else {
            faces.push(ParallelFaceDump { id: sq.id.clone(), from: None });
        }
    }
    vertices.sort();
    ParallelDump { vertices, edges, faces, _phantom: std::marker::PhantomData }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::single_square;

    #[test]
    fn untouched_types_are_fixed() {
        for t in [1u8, 2, 3, 4, 7, 9, 10, 11, 13, 14] {
            let (k, l) = match t {
                1 => (None, None),
                7 | 10 | 11 => (Some(1), Some(3)),
                14 => (None, Some(3)),
                _ => (Some(1), None),
            };
            let n = if matches!(t, 7 | 10 | 11) { 5 } else { 4 };
            let d = single_square(t, n, k, l, false).unwrap();
            let par = to_parallel(&d).unwrap();
            assert!(par.split_edges.is_empty(), "type {t}");
            assert!(par.subdivided.is_empty(), "type {t}");
        }
    }

    #[test]
    fn type8_counts() {
        let d = single_square(8, 3, Some(1), None, false).unwrap();
        let par = to_parallel(&d).unwrap();
        let (v, e, f) = par.cell_counts();
        // +1 vertex, +2 edges net (two halves replace one edge, plus the
        // diagonal), +1 face.
        assert_eq!((v, e, f), (5, 6, 2));
    }

    #[test]
    fn type6_counts() {
        let d = single_square(6, 3, Some(1), None, false).unwrap();
        let par = to_parallel(&d).unwrap();
        let (v, e, f) = par.cell_counts();
        // +2 vertices, +3 edges net, +1 face.
        assert_eq!((v, e, f), (6, 7, 2));
    }
}
