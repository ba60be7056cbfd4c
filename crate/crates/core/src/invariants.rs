//! Desk-scale invariants: Z/2 augmentation enumeration and linearized
//! homology.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dgabuild::Dga;
use crate::freealg::{AlgError, GenId, Polynomial};

#[derive(Error, Debug)]
pub enum InvariantError {
    #[error("too many degree-0 unknowns: {0} exceeds cap {1}")]
    TooManyUnknowns(usize, usize),
    #[error("not an augmentation: violated at {0}")]
    InvalidAugmentation(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// A graded Z/2 augmentation: 1 is allowed only on degree-0 generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Augmentation {
    pub eps: BTreeMap<GenId, bool>,
}

impl Augmentation {
    pub fn zero() -> Self {
        Augmentation { eps: BTreeMap::new() }
    }

    pub fn value(&self, g: GenId) -> bool {
        self.eps.get(&g).copied().unwrap_or(false)
    }

    /// Evaluate the unital extension on a polynomial.
    pub fn eval(&self, p: &Polynomial) -> bool {
        let mut acc = false;
        for w in p.terms() {
            acc ^= w.iter().all(|g| self.value(*g));
        }
        acc
    }

    pub fn dump(&self, dga: &Dga) -> BTreeMap<String, u8> {
        self.eps
            .iter()
            .map(|(g, v)| (dga.name_of(*g).to_string(), *v as u8))
            .collect()
    }
}

pub const DEFAULT_AUG_CAP: usize = 24;

/// Degree-0 generators, the only ones a graded augmentation may send to 1.
pub fn degree_zero_gens(dga: &Dga) -> Vec<GenId> {
    dga.gen_ids()
        .filter(|g| dga.reduce(dga.degree(*g)) == 0)
        .collect()
}

/// Brute-force enumeration of all graded augmentations.
pub fn augmentations(dga: &Dga, cap: usize) -> Result<Vec<Augmentation>, InvariantError> {
    let vars = degree_zero_gens(dga);
    if vars.len() > cap.min(63) {
        return Err(InvariantError::TooManyUnknowns(vars.len(), cap.min(63)));
    }
    // Per generator, eps(diff g) as an XOR of monomials in the unknowns:
    // each word becomes the AND of its factors, words with a factor of
    // nonzero degree vanish.
    let var_index: BTreeMap<GenId, usize> = vars.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut constraints: Vec<Vec<u64>> = Vec::new();
    for g in dga.gen_ids() {
        let mut monomials: Vec<u64> = Vec::new();
        for w in dga.diff_of(g).terms() {
            let mut mask: Option<u64> = Some(0);
            for f in w {
                match var_index.get(f) {
                    Some(i) => mask = mask.map(|m| m | (1u64 << i)),
                    None => {
                        mask = None;
                        break;
                    }
                }
            }
            if let Some(m) = mask {
                monomials.push(m);
            }
        }
        if !monomials.is_empty() {
            constraints.push(monomials);
        }
    }
    let mut out = Vec::new();
    for assignment in 0u64..(1u64 << vars.len()) {
        let ok = constraints.iter().all(|mons| {
            let mut acc = false;
            for m in mons {
                acc ^= (assignment & m) == *m;
            }
            !acc
        });
        if ok {
            let eps = vars
                .iter()
                .enumerate()
                .map(|(i, g)| (*g, assignment & (1 << i) != 0))
                .collect();
            out.push(Augmentation { eps });
        }
    }
    Ok(out)
}

/// Check eps . diff = 0 on every generator, independently of the search.
pub fn is_augmentation(dga: &Dga, eps: &Augmentation) -> bool {
    for g in dga.gen_ids() {
        if eps.value(g) && dga.reduce(dga.degree(g)) != 0 {
            return false;
        }
        if eps.eval(dga.diff_of(g)) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Gf2Matrix { rows, cols, bits: vec![0; rows * words] }
    }

    fn words(&self) -> usize {
        self.cols.div_ceil(64).max(1)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = self.words();
        let idx = r * w + c / 64;
        if v {
            self.bits[idx] |= 1 << (c % 64);
        } else {
            self.bits[idx] &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        let w = self.words();
        self.bits[r * w + c / 64] ^= 1 << (c % 64);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        if self.rows == 0 || self.cols == 0 {
            return false;
        }
        let w = self.words();
        self.bits[r * w + c / 64] & (1 << (c % 64)) != 0
    }

    /// Rank over GF(2) by row reduction.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let w = self.words();
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| self.bits[r * w..(r + 1) * w].to_vec())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (wi, bi) = (col / 64, col % 64);
            let pivot = (rank..rows.len()).find(|r| rows[*r][wi] & (1 << bi) != 0);
            let Some(p) = pivot else { continue };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[wi] & (1 << bi) != 0 {
                    for i in 0..w {
                        row[i] ^= pivot_row[i];
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Is self * other the zero matrix (self: C_d -> C_{d-1} applied after
    /// other: C_{d+1} -> C_d)?
    pub fn compose_is_zero(&self, other: &Gf2Matrix) -> bool {
        debug_assert_eq!(self.cols, other.rows);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = false;
                for k in 0..self.cols {
                    acc ^= self.get(r, k) && other.get(k, c);
                }
                if acc {
                    return false;
                }
            }
        }
        true
    }
}

/// A degree-indexed chain complex over Z/2; `mats[&d]` maps degree-d
/// generators to degree-(d-1) generators.
#[derive(Clone, Debug)]
pub struct LinearizedComplex {
    pub m: u32,
    pub gens_by_degree: BTreeMap<i64, Vec<GenId>>,
    pub mats: BTreeMap<i64, Gf2Matrix>,
}

impl LinearizedComplex {
    fn prev_degree(&self, d: i64) -> i64 {
        if self.m == 0 {
            d - 1
        } else {
            (d - 1).rem_euclid(self.m as i64)
        }
    }
}

/// Conjugate diff by g -> g + eps(g), keep words of length 1, and organize
/// the resulting boundary maps by degree. Composition-zero is verified.
pub fn linearize(dga: &Dga, eps: &Augmentation) -> Result<LinearizedComplex, InvariantError> {
    if !is_augmentation(dga, eps) {
        let bad = dga
            .gen_ids()
            .find(|g| eps.eval(dga.diff_of(*g)))
            .map(|g| dga.name_of(g).to_string())
            .unwrap_or_else(|| "a degree constraint".into());
        return Err(InvariantError::InvalidAugmentation(bad));
    }
    let mut gens_by_degree: BTreeMap<i64, Vec<GenId>> = BTreeMap::new();
    for g in dga.gen_ids() {
        gens_by_degree
            .entry(dga.reduce(dga.degree(g)))
            .or_default()
            .push(g);
    }
    let pos: BTreeMap<GenId, usize> = gens_by_degree
        .values()
        .flat_map(|gs| gs.iter().enumerate().map(|(i, g)| (*g, i)))
        .collect();

    let mut lc = LinearizedComplex { m: dga.m, gens_by_degree: gens_by_degree.clone(), mats: BTreeMap::new() };
    for (d, gens) in &gens_by_degree {
        let target = lc.prev_degree(*d);
        let rows = gens_by_degree.get(&target).map(|v| v.len()).unwrap_or(0);
        let mut mat = Gf2Matrix::zero(rows, gens.len());
        for (col, g) in gens.iter().enumerate() {
            // phi_eps(diff g): g -> g + eps(g); then the length-1 words.
            let conj = crate::freealg::substitute(
                &|h| {
                    let mut p = Polynomial::gen(h);
                    if eps.value(h) {
                        p = p.add(&Polynomial::one());
                    }
                    Some(p)
                },
                dga.diff_of(*g),
            )?;
            for w in conj.terms() {
                if w.len() == 1 {
                    let h = w[0];
                    if dga.reduce(dga.degree(h)) == target {
                        mat.flip(pos[&h], col);
                    }
                }
            }
        }
        lc.mats.insert(*d, mat);
    }
    // d . d = 0 on the linearized complex.
    for (d, mat) in &lc.mats {
        let prev = lc.prev_degree(*d);
        if let Some(pm) = lc.mats.get(&prev) {
            if pm.rows > 0 && !pm.compose_is_zero(mat) {
                return Err(InvariantError::InvalidAugmentation(format!(
                    "linearized differential does not square to zero at degree {d}"
                )));
            }
        }
    }
    Ok(lc)
}

/// Homology ranks per degree: dim ker(M_d) - rank(M_{d+1}).
pub fn betti(lc: &LinearizedComplex) -> BTreeMap<i64, usize> {
    let next_degree = |d: i64| {
        if lc.m == 0 {
            d + 1
        } else {
            (d + 1).rem_euclid(lc.m as i64)
        }
    };
    let mut out = BTreeMap::new();
    for (d, gens) in &lc.gens_by_degree {
        let dim = gens.len();
        let rank_d = lc.mats.get(d).map(|m| m.rank()).unwrap_or(0);
        let rank_next = lc.mats.get(&next_degree(*d)).map(|m| m.rank()).unwrap_or(0);
        out.insert(*d, dim - rank_d - rank_next);
    }
    out
}
