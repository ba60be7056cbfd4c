//! Square matrices with polynomial entries.
//!
//! Assembly matrices are strictly upper triangular with entries 0, 1 or a
//! single generator; products of those stay upper triangular and are
//! nilpotent, which is what makes the differential formulas finite.

use crate::freealg::{AlgError, GenId, Polynomial};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenMatrix {
    n: usize,
    entries: Vec<Polynomial>,
}

impl GenMatrix {
    pub fn zero(n: usize) -> Self {
        GenMatrix { n, entries: vec![Polynomial::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = GenMatrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Polynomial::one();
        }
        m
    }

    /// Elementary matrix with a single 1 in (row, col); 0-based indices.
    pub fn elementary(n: usize, row: usize, col: usize) -> Self {
        let mut m = GenMatrix::zero(n);
        m.entries[row * n + col] = Polynomial::one();
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.n + j] = p;
    }

    pub fn set_gen(&mut self, i: usize, j: usize, g: GenId) {
        self.set(i, j, Polynomial::gen(g));
    }

    pub fn add(&self, other: &GenMatrix) -> Result<GenMatrix, MatError> {
        if self.n != other.n {
            return Err(MatError::DimensionMismatch(self.n, other.n));
        }
        let mut out = GenMatrix::zero(self.n);
        for i in 0..self.n * self.n {
            out.entries[i] = self.entries[i].add(&other.entries[i]);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &GenMatrix) -> Result<GenMatrix, MatError> {
        if self.n != other.n {
            return Err(MatError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = GenMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b)?;
                    out.entries[i * n + j] = out.entries[i * n + j].add(&prod);
                }
            }
        }
        Ok(out)
    }

    /// self + I, the usual unitalization appearing in the formulas.
    pub fn plus_identity(&self) -> GenMatrix {
        self.add(&GenMatrix::identity(self.n)).expect("same dimension")
    }

    pub fn is_strictly_upper(&self) -> bool {
        for i in 0..self.n {
            for j in 0..=i {
                if !self.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Every nonzero entry is the unit or a single generator.
    pub fn entries_atomic(&self) -> bool {
        self.entries
            .iter()
            .all(|p| p.is_zero() || p.is_one() || p.as_single_gen().is_some())
    }
}

/// Entrywise add or multiply, as a single entry point mirroring the rest of
/// the matrix API.
pub enum MatOp {
    Add,
    Mul,
}

pub fn mat_op(a: &GenMatrix, b: &GenMatrix, op: MatOp) -> Result<GenMatrix, MatError> {
    match op {
        MatOp::Add => a.add(b),
        MatOp::Mul => a.mul(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_products() {
        let e12 = GenMatrix::elementary(3, 0, 1);
        let e23 = GenMatrix::elementary(3, 1, 2);
        let e13 = GenMatrix::elementary(3, 0, 2);
        assert_eq!(e12.mul(&e23).unwrap(), e13);
        assert_eq!(e23.mul(&e12).unwrap(), GenMatrix::zero(3));
    }

    #[test]
    fn unit_factor_product() {
        // (I+B_U)(I+B_L) for n=2 with single-generator entries.
        let (bu, bl) = (GenId(0), GenId(1));
        let mut u = GenMatrix::zero(2);
        u.set_gen(0, 1, bu);
        let mut l = GenMatrix::zero(2);
        l.set_gen(0, 1, bl);
        let prod = u.plus_identity().mul(&l.plus_identity()).unwrap();
        assert!(prod.get(0, 0).is_one());
        assert_eq!(
            *prod.get(0, 1),
            Polynomial::gen(bu).add(&Polynomial::gen(bl))
        );
    }

    #[test]
    fn strictly_upper_nilpotent() {
        let mut a = GenMatrix::zero(2);
        a.set_gen(0, 1, GenId(5));
        assert_eq!(a.mul(&a).unwrap(), GenMatrix::zero(2));
    }

    #[test]
    fn dimension_mismatch() {
        let a = GenMatrix::zero(2);
        let b = GenMatrix::zero(3);
        assert!(matches!(a.add(&b), Err(MatError::DimensionMismatch(2, 3))));
    }
}
