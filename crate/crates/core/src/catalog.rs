//! Built-in example decompositions: every elementary square with its
//! boundary, closed-surface grids, a cusp sphere, and the swallowtail S/T
//! pairs.

use crate::cellcomplex::profile::EdgeType;
use crate::cellcomplex::{single_square, Decomposition, EdgeData, SidesData, SquareData};
use crate::dgabuild::stpair;

/// Parameter lists per square type and sheet count.
fn params(stype: u8, n: u32) -> Vec<(Option<u32>, Option<u32>)> {
    let pairs_disjoint = |n: u32| -> Vec<(Option<u32>, Option<u32>)> {
        let mut out = Vec::new();
        for k in 1..n {
            for l in 1..n {
                if k.abs_diff(l) >= 2 {
                    out.push((Some(k), Some(l)));
                }
            }
        }
        out
    };
    match stype {
        1 => vec![(None, None)],
        2 | 3 | 4 | 9 => (1..n).map(|k| (Some(k), None)).collect(),
        5 | 6 | 8 | 12 | 13 => {
            if n < 3 {
                vec![]
            } else {
                (1..n - 1).map(|k| (Some(k), None)).collect()
            }
        }
        7 | 10 | 11 => pairs_disjoint(n),
        14 => (3..=n).map(|l| (None, Some(l))).collect(),
        _ => vec![],
    }
}

fn square_name(stype: u8, n: u32, k: Option<u32>, l: Option<u32>, reflected: bool) -> String {
    let mut s = format!("square-{stype}-n{n}");
    if let Some(k) = k {
        s.push_str(&format!("-k{k}"));
    }
    if let Some(l) = l {
        s.push_str(&format!("-l{l}"));
    }
    if reflected {
        s.push_str("-r");
    }
    s
}

/// All catalog entry names in a stable order.
pub fn names() -> Vec<String> {
    let mut out = Vec::new();
    for stype in 1..=14u8 {
        for n in 2..=6u32 {
            for (k, l) in params(stype, n) {
                for reflected in [false, true] {
                    out.push(square_name(stype, n, k, l, reflected));
                }
            }
        }
    }
    out.push("torus-n2".into());
    out.push("torus-2x2-n2".into());
    out.push("sphere-n2".into());
    out.push("saucer".into());
    for n in 3..=5 {
        out.push(format!("swallowtail-ST-n{n}"));
    }
    out
}

/// Parameters (n, k) of the swallowtail S/T pair entries.
pub fn st_params(name: &str) -> Option<(u32, u32)> {
    let n: u32 = name.strip_prefix("swallowtail-ST-n")?.parse().ok()?;
    Some((n, 1))
}

/// Fetch a catalog entry by name.
pub fn get(name: &str) -> Option<Decomposition> {
    if let Some(rest) = name.strip_prefix("square-") {
        let reflected = rest.ends_with("-r");
        let rest = rest.strip_suffix("-r").unwrap_or(rest);
        let mut stype = None;
        let mut n = None;
        let mut k = None;
        let mut l = None;
        for (i, part) in rest.split('-').enumerate() {
            if i == 0 {
                stype = part.parse().ok();
            } else if let Some(v) = part.strip_prefix('n') {
                n = v.parse().ok();
            } else if let Some(v) = part.strip_prefix('k') {
                k = v.parse().ok();
            } else {
                let v = part.strip_prefix('l')?;
                l = v.parse().ok();
            }
        }
        return single_square(stype?, n?, k, l, reflected).ok();
    }
    match name {
        "torus-n2" => Some(torus_1x1()),
        "torus-2x2-n2" => Some(torus_2x2()),
        "sphere-n2" => Some(sphere()),
        "saucer" => Some(saucer()),
        _ => st_params(name).map(|(n, k)| stpair::st_complex(n, k)),
    }
}

/// One flat square with opposite sides identified: the smallest torus grid.
fn torus_1x1() -> Decomposition {
    Decomposition {
        vertices: vec!["v".into()],
        edges: vec![
            EdgeData { id: "h".into(), tail: "v".into(), head: "v".into(), etype: EdgeType::pv(2) },
            EdgeData { id: "w".into(), tail: "v".into(), head: "v".into(), etype: EdgeType::pv(2) },
        ],
        squares: vec![SquareData {
            id: "sq".into(),
            stype: 1,
            n: 2,
            k: None,
            l: None,
            reflected: false,
            sides: SidesData { l: "w".into(), d: "h".into(), r: "w".into(), u: "h".into() },
        }],
    }
}

/// A 2x2 grid of flat squares over the torus, two sheets everywhere.
fn torus_2x2() -> Decomposition {
    let v = |r: u32, c: u32| format!("v{}{}", r % 2, c % 2);
    let h = |r: u32, c: u32| format!("h{}{}", r % 2, c % 2);
    let w = |r: u32, c: u32| format!("w{}{}", r % 2, c % 2);
    let mut edges = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            edges.push(EdgeData {
                id: h(r, c),
                tail: v(r, c),
                head: v(r, c + 1),
                etype: EdgeType::pv(2),
            });
            edges.push(EdgeData {
                id: w(r, c),
                tail: v(r, c),
                head: v(r + 1, c),
                etype: EdgeType::pv(2),
            });
        }
    }
    let mut squares = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            squares.push(SquareData {
                id: format!("sq{r}{c}"),
                stype: 1,
                n: 2,
                k: None,
                l: None,
                reflected: false,
                sides: SidesData { l: w(r, c), d: h(r, c), r: w(r, c + 1), u: h(r + 1, c) },
            });
        }
    }
    Decomposition {
        vertices: vec!["v00".into(), "v01".into(), "v10".into(), "v11".into()],
        edges,
        squares,
    }
}

/// Two flat squares glued along their whole boundary: a two-sheet sphere.
fn sphere() -> Decomposition {
    let mut d = single_square(1, 2, None, None, false).unwrap();
    d.squares.push(SquareData {
        id: "sq2".into(),
        stype: 1,
        n: 2,
        k: None,
        l: None,
        reflected: false,
        sides: d.squares[0].sides.clone(),
    });
    d
}

/// The flying saucer: two cusp squares glued along their whole boundary.
/// The cusp circle bounds a disk with two sheets inside and none outside.
fn saucer() -> Decomposition {
    let mut d = single_square(9, 2, Some(1), None, false).unwrap();
    d.squares.push(SquareData {
        id: "sq2".into(),
        stype: 9,
        n: 2,
        k: Some(1),
        l: None,
        reflected: false,
        sides: d.squares[0].sides.clone(),
    });
    d
}

/// The ordered cancellation pipeline that removes the subdivision cells of
/// a Type (8) square of the refinement: first the generators on the lower
/// right half-edge against the split vertex and lower-right corner, then
/// the lower half-square against the diagonal and bottom edge. Pair order
/// follows the gap |i-j|: decreasing for the first stage, increasing for
/// the second, ties lexicographic.
pub fn type8_pipeline(n: u32, k: u32) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    // Stage 1: b^{R,-}_{k+1,k+2} cancels the lower-right corner chord of
    // the crossed pair (slots (k,k+2) in corner positions), then the rest
    // cancel against the split-vertex chords.
    pairs.push((
        format!("b:eR:-:{},{}", k + 1, k + 2),
        format!("a:vlr:{},{}", k, k + 2),
    ));
    let mut rest: Vec<(u32, u32)> = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if (i, j) != (k + 1, k + 2) {
                rest.push((i, j));
            }
        }
    }
    rest.sort_by_key(|(i, j)| (std::cmp::Reverse(j - i), *i, *j));
    for (i, j) in &rest {
        pairs.push((format!("b:eR:-:{i},{j}"), format!("a:eR:v:{i},{j}")));
    }
    // Stage 2: c^-_{k+1,k+2} cancels b^D of the crossed pair, the rest
    // cancel against the diagonal chords, smallest gap first.
    pairs.push((
        format!("c:sq:-:{},{}", k + 1, k + 2),
        format!("b:eD:{},{}", k, k + 2),
    ));
    rest.sort_by_key(|(i, j)| (j - i, *i, *j));
    for (i, j) in &rest {
        pairs.push((format!("c:sq:-:{i},{j}"), format!("b:sq:c:{i},{j}")));
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::validate;

    #[test]
    fn every_entry_validates() {
        for name in names() {
            let d = get(&name).unwrap_or_else(|| panic!("{name} missing"));
            let r = validate(&d);
            assert!(r.is_valid(), "{name}: {:?}", r.violations);
        }
    }

    #[test]
    fn names_resolve_uniquely() {
        let all = names();
        let set: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }
}
