//! Global sheet regions (union-find over square-local sheets) and Maslov
//! potentials.

use std::collections::BTreeMap;

use super::profile::{Label, Side};
use super::{ComplexError, ComplexIndex};

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping region numbering stable under
            // relabeling of inputs.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Equivalence classes of (square, local sheet label) under gluing.
#[derive(Clone, Debug)]
pub struct SheetAtlas {
    pub region_count: usize,
    assignment: BTreeMap<(usize, Label), usize>,
}

impl SheetAtlas {
    pub fn region(&self, square: usize, label: Label) -> Option<usize> {
        self.assignment.get(&(square, label)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, Label), &usize)> {
        self.assignment.iter()
    }
}

/// Union-find closure of the per-edge sheet identifications; swallowtail
/// squares identify their tilde sheet with the sheets it continues.
pub fn global_sheets(idx: &ComplexIndex) -> Result<SheetAtlas, ComplexError> {
    // Dense node ids per (square, label).
    let mut node_ids: BTreeMap<(usize, Label), usize> = BTreeMap::new();
    for (si, p) in idx.profiles.iter().enumerate() {
        for i in 1..=p.n {
            let id = node_ids.len();
            node_ids.insert((si, Label::S(i)), id);
        }
        if p.swallow != super::profile::SwallowKind::None {
            let id = node_ids.len();
            node_ids.insert((si, Label::Tilde), id);
        }
    }
    let mut uf = UnionFind::new(node_ids.len());

    for (si, p) in idx.profiles.iter().enumerate() {
        for (a, b) in &p.region_merges {
            uf.union(node_ids[&(si, *a)], node_ids[&(si, *b)]);
        }
    }

    for (eid, uses) in &idx.edge_uses {
        if uses.len() < 2 {
            continue;
        }
        let (s1, x1) = uses[0];
        let (s2, x2) = uses[1];
        let o1 = &idx.profiles[s1].side_order[x1.idx()];
        let o2 = &idx.profiles[s2].side_order[x2.idx()];
        if o1.len() != o2.len() {
            return Err(ComplexError::InconsistentGluing(format!(
                "edge {} has {} sheets from one side and {} from the other",
                eid,
                o1.len(),
                o2.len()
            )));
        }
        for (a, b) in o1.iter().zip(o2.iter()) {
            uf.union(node_ids[&(s1, *a)], node_ids[&(s2, *b)]);
        }
    }

    // Renumber roots in order of first appearance.
    let mut region_ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut assignment = BTreeMap::new();
    let keys: Vec<(usize, Label)> = node_ids.keys().copied().collect();
    for key in keys {
        let root = uf.find(node_ids[&key]);
        let next = region_ids.len();
        let rid = *region_ids.entry(root).or_insert(next);
        assignment.insert(key, rid);
    }
    Ok(SheetAtlas { region_count: region_ids.len(), assignment })
}

/// Maslov data: the modulus `m` (0 for a Z-grading) and a potential per
/// region.
#[derive(Clone, Debug)]
pub struct MaslovData {
    pub m: u32,
    pub mu: Vec<i64>,
}

impl MaslovData {
    pub fn reduce(&self, v: i64) -> i64 {
        if self.m == 0 {
            v
        } else {
            v.rem_euclid(self.m as i64)
        }
    }
}

/// Compute the Maslov number and a potential. Cusp adjacencies impose
/// mu(upper) - mu(lower) = 1; crossings and gluings impose equality (they
/// are already merged in the atlas). `m` is the gcd of all cycle defects
/// over a spanning forest; one base region per constraint-graph component
/// is pinned (to 0 unless overridden).
pub fn maslov(
    idx: &ComplexIndex,
    atlas: &SheetAtlas,
    base_mu: &BTreeMap<usize, i64>,
    m_override: Option<u32>,
) -> Result<MaslovData, ComplexError> {
    let nreg = atlas.region_count;
    // Constraint edges: (lower region, upper region): mu(u) = mu(l) + 1.
    let mut cons: Vec<(usize, usize)> = Vec::new();
    for (si, p) in idx.profiles.iter().enumerate() {
        for c in &p.cusps {
            let u = atlas.region(si, c.upper).expect("cusp sheet exists");
            let l = atlas.region(si, c.lower).expect("cusp sheet exists");
            cons.push((l, u));
        }
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nreg];
    for &(l, u) in &cons {
        adj[l].push((u, 1));
        adj[u].push((l, -1));
    }
    let mut pot: Vec<Option<i64>> = vec![None; nreg];
    let mut defects: Vec<i64> = Vec::new();
    for start in 0..nreg {
        if pot[start].is_some() {
            continue;
        }
        pot[start] = Some(base_mu.get(&start).copied().unwrap_or(0));
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let pv = pot[v].unwrap();
            for &(w, d) in &adj[v] {
                match pot[w] {
                    None => {
                        pot[w] = Some(pv + d);
                        stack.push(w);
                    }
                    Some(pw) => {
                        let defect = (pv + d - pw).abs();
                        if defect != 0 {
                            defects.push(defect);
                        }
                    }
                }
            }
        }
    }
    let mut m: u32 = 0;
    for d in defects {
        m = gcd(m, d.unsigned_abs() as u32);
    }
    if let Some(mo) = m_override {
        let compatible = if m == 0 { true } else { mo != 0 && m.is_multiple_of(mo) };
        if !compatible {
            return Err(ComplexError::Invalid(format!(
                "m override {mo} is incompatible with cusp constraints (need a divisor of {m})"
            )));
        }
        m = mo;
    }
    let md = MaslovData { m, mu: pot.into_iter().map(|p| p.unwrap_or(0)).collect() };
    let mu = md.mu.iter().map(|v| md.reduce(*v)).collect();
    Ok(MaslovData { m: md.m, mu })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Convenience wrapper: atlas and Maslov data for a decomposition assumed
/// valid.
pub fn sheets_and_maslov(
    idx: &ComplexIndex,
    base_mu: &BTreeMap<usize, i64>,
    m_override: Option<u32>,
) -> Result<(SheetAtlas, MaslovData), ComplexError> {
    let atlas = global_sheets(idx)?;
    let md = maslov(idx, &atlas, base_mu, m_override)?;
    Ok((atlas, md))
}

/// Region of the sheet at a 1-based position above a side of a square.
pub fn side_region(
    idx: &ComplexIndex,
    atlas: &SheetAtlas,
    si: usize,
    side: Side,
    pos: u32,
) -> Option<usize> {
    let order = &idx.profiles[si].side_order[side.idx()];
    let label = order.get(pos as usize - 1)?;
    atlas.region(si, *label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::{single_square, validate, ComplexIndex, Decomposition};

    fn idx_atlas(d: &Decomposition) -> (ComplexIndex<'_>, SheetAtlas) {
        assert!(validate(d).is_valid());
        let idx = ComplexIndex::new(d).unwrap();
        let atlas = global_sheets(&idx).unwrap();
        (idx, atlas)
    }

    #[test]
    fn single_type9_has_n_regions() {
        let d = single_square(9, 4, Some(2), None, false).unwrap();
        let (_, atlas) = idx_atlas(&d);
        assert_eq!(atlas.region_count, 4);
    }

    #[test]
    fn swallowtail_merges_regions() {
        let d = single_square(13, 3, Some(1), None, false).unwrap();
        let (idx, atlas) = idx_atlas(&d);
        // S2, S3 and the tilde sheet are one region; S1 is another.
        assert_eq!(atlas.region_count, 2);
        let md = maslov(&idx, &atlas, &BTreeMap::new(), None).unwrap();
        assert_eq!(md.m, 0);
        let r1 = atlas.region(0, Label::S(1)).unwrap();
        let r2 = atlas.region(0, Label::S(2)).unwrap();
        assert_eq!(md.mu[r1] - md.mu[r2], 1);
    }

    #[test]
    fn cusp_constraint_direction() {
        let d = single_square(9, 2, Some(1), None, false).unwrap();
        let (idx, atlas) = idx_atlas(&d);
        let md = maslov(&idx, &atlas, &BTreeMap::new(), None).unwrap();
        let up = atlas.region(0, Label::S(1)).unwrap();
        let lo = atlas.region(0, Label::S(2)).unwrap();
        assert_eq!(md.mu[up] - md.mu[lo], 1);
    }
}
