//! Square nonnegative integer matrices.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
}

/// A square matrix of nonnegative integers, stored row-major.
///
/// Serializes as a JSON array of rows.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct NonNegMatrix {
    dim: usize,
    entries: Vec<u64>,
}

impl NonNegMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare { row, len: r.len(), dim });
            }
            entries.extend(r);
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from a generator function.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> u64) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self, MatrixError> {
        Self::from_fn(dim, |i, j| u64::from(i == j))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.entries.chunks(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.rows().map(<[u64]>::to_vec).collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }

    /// Exact product `self · rhs`, failing on `u64` overflow.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let n = self.dim;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let p = a.checked_mul(rhs.get(k, j)).ok_or(MatrixError::Overflow)?;
                    let e = &mut entries[i * n + j];
                    *e = e.checked_add(p).ok_or(MatrixError::Overflow)?;
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.checked_add(*b).ok_or(MatrixError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self { dim: self.dim, entries })
    }

    /// Exact `n`-th power with arbitrary-precision entries.
    pub fn pow_exact(&self, n: u32) -> BigMatrix {
        let base = BigMatrix::from(self);
        let mut result = BigMatrix::identity(self.dim);
        let mut acc = base;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&acc);
            }
            e >>= 1;
            if e > 0 {
                acc = acc.mul(&acc);
            }
        }
        result
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MatrixError> {
        if perm.len() != self.dim {
            return Err(MatrixError::DimensionMismatch { left: self.dim, right: perm.len() });
        }
        Self::from_fn(self.dim, |i, j| self.get(perm[i], perm[j]))
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self, MatrixError> {
        Self::from_fn(indices.len(), |i, j| self.get(indices[i], indices[j]))
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.get(j, i)).expect("dim > 0")
    }

    /// `true` when every entry of `self` is at most the matching entry of `other`.
    pub fn entrywise_le(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(|&x| x > 0)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.rows()
            .map(|r| r.iter().zip(v).map(|(&a, &x)| a as f64 * x).sum())
            .collect()
    }

    pub fn trace(&self) -> u64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

impl TryFrom<Vec<Vec<u64>>> for NonNegMatrix {
    type Error = MatrixError;

    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self, Self::Error> {
        Self::new(rows)
    }
}

impl From<NonNegMatrix> for Vec<Vec<u64>> {
    fn from(m: NonNegMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for NonNegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for NonNegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Square matrix with arbitrary-precision nonnegative entries, used for exact powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMatrix {
    dim: usize,
    entries: Vec<BigUint>,
}

impl BigMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigUint::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigUint::one();
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(|x| !x.is_zero())
    }

    /// Converts back to machine integers when every entry fits in `u64`.
    pub fn to_nonneg(&self) -> Result<NonNegMatrix, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|x| x.to_u64().ok_or(MatrixError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        NonNegMatrix::from_fn(self.dim, |i, j| entries[i * self.dim + j])
    }

    /// Nearest-double rows; entries beyond `f64` range become infinite.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect())
            .collect()
    }
}

impl From<&NonNegMatrix> for BigMatrix {
    fn from(m: &NonNegMatrix) -> Self {
        Self { dim: m.dim, entries: m.entries.iter().map(|&x| BigUint::from(x)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_empty() {
        assert_eq!(NonNegMatrix::new(vec![]), Err(MatrixError::Empty));
        assert!(matches!(
            NonNegMatrix::new(vec![vec![1, 2], vec![3]]),
            Err(MatrixError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn exact_power_matches_repeated_product() {
        let m = NonNegMatrix::new(vec![vec![3, 1, 1, 0], vec![4, 1, 3, 2], vec![1, 0, 2, 1], vec![1, 0, 1, 1]])
            .unwrap();
        let mut p = NonNegMatrix::identity(4).unwrap();
        for n in 0..6 {
            assert_eq!(m.pow_exact(n).to_nonneg().unwrap(), p);
            p = p.checked_mul(&m).unwrap();
        }
    }

    #[test]
    fn overflow_is_reported() {
        let m = NonNegMatrix::new(vec![vec![u64::MAX, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.checked_mul(&m), Err(MatrixError::Overflow));
        assert!(m.pow_exact(3).to_nonneg().is_err());
    }

    #[test]
    fn json_shape() {
        let m = NonNegMatrix::new(vec![vec![1, 2], vec![0, 3]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1,2],[0,3]]");
        let back: NonNegMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<NonNegMatrix>("[[1,-2],[0,3]]").is_err());
        assert!(serde_json::from_str::<NonNegMatrix>("[[1,2,3],[0,3]]").is_err());
    }
}
