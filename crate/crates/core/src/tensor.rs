//! Dense row-major tensors over exact integers or complex doubles.
//!
//! An operator on `V^{⊗d}` (with `dim V = m`) is stored with shape `[m; 2d]`:
//! the first `d` axes index the output slots, the last `d` the input slots,
//! so the flat data is the `m^d × m^d` matrix in row-major order.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::CMatrix;

/// Upper bound on the number of entries of any materialized tensor.
pub const MAX_TENSOR_ENTRIES: usize = 1 << 22;

pub trait Scalar:
    Copy + Debug + PartialEq + Zero + One + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + Send + Sync
{
    fn from_i64(x: i64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for i64 {
    fn from_i64(x: i64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self as f64, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_i64(x: i64) -> Self {
        Complex64::new(x as f64, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

pub type IntTensor = DenseTensor<i64>;
pub type ComplexTensor = DenseTensor<Complex64>;

/// Product of `shape`, or an error if it exceeds [`MAX_TENSOR_ENTRIES`].
pub fn checked_size(shape: &[usize]) -> Result<usize> {
    shape
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .filter(|&n| n <= MAX_TENSOR_ENTRIES)
        .ok_or_else(|| Error::BoundExceeded(format!("tensor of shape {shape:?} exceeds {MAX_TENSOR_ENTRIES} entries")))
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let size = checked_size(&shape)?;
        if size != data.len() {
            return Err(Error::ShapeMismatch(format!("shape {shape:?} needs {size} entries, got {}", data.len())));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let size = checked_size(&shape)?;
        Ok(Self {
            shape,
            data: vec![T::zero(); size],
        })
    }

    /// Identity operator on `V^{⊗d}`.
    pub fn identity_operator(m: usize, d: usize) -> Result<Self> {
        let mut t = Self::zeros(vec![m; 2 * d])?;
        let n = m.pow(d as u32);
        for i in 0..n {
            t.data[i * n + i] = T::one();
        }
        Ok(t)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// `(m, d)` when this is an operator on `V^{⊗d}`.
    pub fn operator_dims(&self) -> Result<(usize, usize)> {
        let r = self.shape.len();
        let m = self.shape.first().copied().unwrap_or(0);
        if r == 0 || !r.is_multiple_of(2) || self.shape.iter().any(|&s| s != m) {
            return Err(Error::ShapeMismatch(format!("shape {:?} is not an operator on a tensor power", self.shape)));
        }
        Ok((m, r / 2))
    }

    pub fn get(&self, index: &[usize]) -> T {
        let s = strides(&self.shape);
        self.data[index.iter().zip(&s).map(|(i, s)| i * s).sum::<usize>()]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseTensor<U> {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexTensor {
        self.map(Scalar::to_complex)
    }

    /// New tensor whose axis `k` is axis `order[k]` of `self`.
    pub fn permute_axes(&self, order: &[usize]) -> Result<Self> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if order.len() != r || order.iter().any(|&a| a >= r || std::mem::replace(&mut seen[a], true)) {
            return Err(Error::ShapeMismatch(format!("{order:?} is not an axis permutation of rank {r}")));
        }
        let old_strides = strides(&self.shape);
        let new_shape: Vec<usize> = order.iter().map(|&a| self.shape[a]).collect();
        let src_strides: Vec<usize> = order.iter().map(|&a| old_strides[a]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; r];
        let mut offset = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[offset]);
            // odometer over the new shape, tracking the source offset
            for k in (0..r).rev() {
                idx[k] += 1;
                offset += src_strides[k];
                if idx[k] < new_shape[k] {
                    break;
                }
                offset -= src_strides[k] * new_shape[k];
                idx[k] = 0;
            }
        }
        Ok(Self { shape: new_shape, data })
    }

    /// `out[.., z, ..] = Σ_c self[.., c, ..] · mat[c][z]` along `axis`, with
    /// `mat` square and row-major.
    pub fn contract_axis(&self, axis: usize, mat: &[T]) -> Result<Self> {
        let m = *self
            .shape
            .get(axis)
            .ok_or_else(|| Error::ShapeMismatch(format!("axis {axis} out of range")))?;
        if mat.len() != m * m {
            return Err(Error::ShapeMismatch(format!("{} matrix entries for axis of size {m}", mat.len())));
        }
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut data = vec![T::zero(); self.data.len()];
        for o in 0..outer {
            let base = o * m * inner;
            for c in 0..m {
                let row = &mat[c * m..(c + 1) * m];
                for i in 0..inner {
                    let s = self.data[base + c * inner + i];
                    // diagram operators are sparse, so skip zeros entrywise
                    if s == T::zero() {
                        continue;
                    }
                    for (z, &w) in row.iter().enumerate() {
                        let d = &mut data[base + z * inner + i];
                        *d = *d + s * w;
                    }
                }
            }
        }
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    /// Operator composition `self ∘ other` on `V^{⊗d}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (m, d) = self.operator_dims()?;
        if other.operator_dims()? != (m, d) {
            return Err(Error::ShapeMismatch("composing operators of different shapes".into()));
        }
        let n = m.pow(d as u32);
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] = data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }
}

impl ComplexTensor {
    /// Operator as an `m^d × m^d` matrix.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let (m, d) = self.operator_dims()?;
        let n = m.pow(d as u32);
        Ok(CMatrix::from_row_slice(n, n, &self.data))
    }

    pub fn from_matrix(m: usize, d: usize, mat: &CMatrix) -> Result<Self> {
        let n = m.pow(d as u32);
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::ShapeMismatch(format!("{}x{} matrix is not an operator on a {d}-fold power of dim {m}", mat.nrows(), mat.ncols())));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(mat[(i, j)]);
            }
        }
        Self::new(vec![m; 2 * d], data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(shape: Vec<usize>) -> IntTensor {
        let n = shape.iter().product::<usize>();
        IntTensor::new(shape, (0..n as i64).collect()).unwrap()
    }

    #[test]
    fn permute_axes_matches_index_formula() {
        let t = seq(vec![2, 3, 4]);
        let p = t.permute_axes(&[2, 0, 1]).unwrap();
        assert_eq!(p.shape(), &[4, 2, 3]);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..4 {
                    assert_eq!(p.get(&[c, a, b]), t.get(&[a, b, c]));
                }
            }
        }
        assert!(t.permute_axes(&[0, 0, 1]).is_err());
    }

    #[test]
    fn contract_axis_is_matrix_product() {
        let t = seq(vec![2, 2]);
        let mat = vec![0, 1, -1, 0];
        let out = t.contract_axis(1, &mat).unwrap();
        // rows of [[0,1],[2,3]] times [[0,1],[-1,0]]
        assert_eq!(out.data(), &[-1, 0, -3, 2]);
    }

    #[test]
    fn size_bound_is_enforced() {
        assert!(IntTensor::zeros(vec![2; 23]).is_err());
        assert!(checked_size(&[usize::MAX, 2]).is_err());
        assert!(IntTensor::new(vec![2, 2], vec![0; 3]).is_err());
    }

    #[test]
    fn identity_composes_neutrally() {
        let id = IntTensor::identity_operator(2, 2).unwrap();
        let t = seq(vec![2, 2, 2, 2]);
        assert_eq!(id.compose(&t).unwrap(), t);
        assert_eq!(t.compose(&id).unwrap(), t);
    }
}
