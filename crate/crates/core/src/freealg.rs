//! Arithmetic in the free unital associative algebra over Z/2 on a finite
//! generator set.
//!
//! A polynomial is a finite set of words; presence of a word means
//! coefficient 1. Words are sequences of generator ids, kept in a
//! `BTreeSet` so every polynomial has a canonical (lexicographic) term
//! order and equality is plain set equality.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Opaque generator token. Ids are dense indices assigned by whoever owns
/// the generator table (a [`crate::dgabuild::Dga`], a test, ...).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenId(pub u32);

/// A word in the free monoid on generators; the empty word is the unit 1.
pub type Word = Vec<GenId>;

/// Hard cap on the number of terms a single product may produce. Free
/// algebra products can blow up combinatorially; we fail loudly instead of
/// thrashing.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("term count exceeded cap of {0}")]
    TermCap(usize),
    #[error("no image for generator {0:?}")]
    UnknownGenerator(GenId),
}

/// A Z/2 linear combination of words, stored as the set of words with
/// coefficient 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Polynomial {
    terms: BTreeSet<Word>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeSet::new() }
    }

    pub fn one() -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(Vec::new());
        Polynomial { terms }
    }

    pub fn gen(g: GenId) -> Self {
        Polynomial::from_word(vec![g])
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(w);
        Polynomial { terms }
    }

    /// Z/2 sum of the given words: duplicates cancel in pairs.
    pub fn from_words<I: IntoIterator<Item = Word>>(words: I) -> Self {
        let mut p = Polynomial::zero();
        for w in words {
            p.toggle(w);
        }
        p
    }

    fn toggle(&mut self, w: Word) {
        if !self.terms.remove(&w) {
            self.terms.insert(w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().unwrap().is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Word> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.terms.contains(w)
    }

    /// True if some word of `self` has `g` among its factors.
    pub fn mentions(&self, g: GenId) -> bool {
        self.terms.iter().any(|w| w.contains(&g))
    }

    pub fn generators(&self) -> BTreeSet<GenId> {
        self.terms.iter().flatten().copied().collect()
    }

    /// If the polynomial is the single word `[g]`, return `g`.
    pub fn as_single_gen(&self) -> Option<GenId> {
        if self.terms.len() == 1 {
            let w = self.terms.iter().next().unwrap();
            if w.len() == 1 {
                return Some(w[0]);
            }
        }
        None
    }

    /// Symmetric difference of term sets: p + p = 0.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for w in &other.terms {
            out.toggle(w.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, AlgError> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    /// Concatenation product, distributed over both term sets.
    pub fn mul_capped(&self, other: &Polynomial, cap: usize) -> Result<Polynomial, AlgError> {
        let mut out = Polynomial::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.toggle(w);
                if out.terms.len() > cap {
                    return Err(AlgError::TermCap(cap));
                }
            }
        }
        Ok(out)
    }

    /// Canonical text rendering: terms joined by " + ", factors by "·",
    /// the unit as "1" and zero as "0".
    pub fn render(&self, name: &dyn Fn(GenId) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|g| name(*g)).collect::<Vec<_>>().join("·")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Extend `d` (defined on generators) to `p` by the Z/2 Leibniz rule:
/// d(1) = 0 and d(w·v) = d(w)·v + w·d(v).
pub fn derive(
    d: &dyn Fn(GenId) -> Option<Polynomial>,
    p: &Polynomial,
) -> Result<Polynomial, AlgError> {
    let mut out = Polynomial::zero();
    for w in p.terms() {
        for (pos, g) in w.iter().enumerate() {
            let dg = d(*g).ok_or(AlgError::UnknownGenerator(*g))?;
            // prefix · d(g) · suffix
            for t in dg.terms() {
                let mut word: Word = w[..pos].to_vec();
                word.extend_from_slice(t);
                word.extend_from_slice(&w[pos + 1..]);
                out.toggle(word);
                if out.term_count() > DEFAULT_TERM_CAP {
                    return Err(AlgError::TermCap(DEFAULT_TERM_CAP));
                }
            }
        }
    }
    Ok(out)
}

/// Apply the unique unital algebra homomorphism extending `h` to `p`.
pub fn substitute(
    h: &dyn Fn(GenId) -> Option<Polynomial>,
    p: &Polynomial,
) -> Result<Polynomial, AlgError> {
    let mut out = Polynomial::zero();
    for w in p.terms() {
        let mut acc = Polynomial::one();
        for g in w {
            let hg = h(*g).ok_or(AlgError::UnknownGenerator(*g))?;
            acc = acc.mul(&hg)?;
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// Substitute from a map, keeping generators without an image fixed.
pub fn substitute_or_keep(
    images: &BTreeMap<GenId, Polynomial>,
    p: &Polynomial,
) -> Result<Polynomial, AlgError> {
    substitute(
        &|g| Some(images.get(&g).cloned().unwrap_or_else(|| Polynomial::gen(g))),
        p,
    )
}

/// Grading data: degrees of generators mod `m`, with `m = 0` meaning a
/// Z-grading.
#[derive(Clone, Debug, Default)]
pub struct Grading {
    pub m: u32,
    pub deg: BTreeMap<GenId, i64>,
}

impl Grading {
    pub fn reduce(&self, d: i64) -> i64 {
        if self.m == 0 {
            d
        } else {
            d.rem_euclid(self.m as i64)
        }
    }

    pub fn degree_of(&self, g: GenId) -> Result<i64, AlgError> {
        self.deg.get(&g).copied().ok_or(AlgError::UnknownGenerator(g))
    }

    /// Degree of a word: sum of factor degrees, mod m. The empty word has
    /// degree 0.
    pub fn word_degree(&self, w: &Word) -> Result<i64, AlgError> {
        let mut d = 0i64;
        for g in w {
            d += self.degree_of(*g)?;
        }
        Ok(self.reduce(d))
    }

    /// Degree of a polynomial if all its words share one; `None` for the
    /// zero polynomial, error on an inhomogeneous value.
    pub fn poly_degree(&self, p: &Polynomial) -> Result<Option<i64>, InhomogeneousError> {
        let mut it = p.terms();
        let first = match it.next() {
            None => return Ok(None),
            Some(w) => self.word_degree(w).map_err(InhomogeneousError::Ungraded)?,
        };
        for w in it {
            let d = self.word_degree(w).map_err(InhomogeneousError::Ungraded)?;
            if d != first {
                return Err(InhomogeneousError::Mixed(first, d));
            }
        }
        Ok(Some(first))
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum InhomogeneousError {
    #[error("ungraded generator: {0}")]
    Ungraded(AlgError),
    #[error("inhomogeneous polynomial: degrees {0} and {1}")]
    Mixed(i64, i64),
}
