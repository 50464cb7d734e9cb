//! Dense column-major n×q blocks of vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An n×q block stored column-major.
///
/// `n0` is the logical panel width: a block produced by expanding a user
/// block `V` (n×n0) over several time values is laid out time-major, so
/// columns `k*n0 .. (k+1)*n0` hold the panel for the k-th time value.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector<T> {
    n: usize,
    q: usize,
    n0: usize,
    data: Vec<T>,
}

impl<T: Scalar> BlockVector<T> {
    pub fn zeros(n: usize, q: usize) -> Self {
        BlockVector {
            n,
            q,
            n0: 1,
            data: vec![T::zero(); n * q],
        }
    }

    /// Builds a block from column-major data, rejecting non-finite entries.
    pub fn from_col_major(n: usize, q: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * q {
            return Err(Error::dims(format!(
                "{} entries supplied for a {n}x{q} block",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::contract(format!(
                "non-finite entry at row {}, column {}",
                pos % n.max(1),
                pos / n.max(1)
            )));
        }
        Ok(BlockVector { n, q, n0: 1, data })
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let q = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::dims("columns of unequal length"));
        }
        Self::from_col_major(n, q, columns.concat())
    }

    pub fn from_vec(v: Vec<T>) -> Result<Self> {
        let n = v.len();
        Self::from_col_major(n, 1, v)
    }

    /// Builds a block from a row-generating function.
    pub fn from_fn(n: usize, q: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * q);
        for j in 0..q {
            for i in 0..n {
                data.push(f(i, j));
            }
        }
        BlockVector { n, q, n0: 1, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn panel_width(&self) -> usize {
        self.n0
    }

    pub fn with_panel_width(mut self, n0: usize) -> Result<Self> {
        if n0 == 0 || self.q % n0 != 0 {
            return Err(Error::dims(format!(
                "panel width {n0} does not divide {} columns",
                self.q
            )));
        }
        self.n0 = n0;
        Ok(self)
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.n + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    /// Mutable access to two distinct columns.
    pub fn column_pair_mut(&mut self, a: usize, b: usize) -> (&mut [T], &mut [T]) {
        assert!(a != b, "column_pair_mut needs distinct columns");
        let n = self.n;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * n);
            (&mut lo[a * n..(a + 1) * n], &mut hi[..n])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * n);
            (&mut hi[..n], &mut lo[b * n..(b + 1) * n])
        }
    }

    /// Columns `k*n0 .. (k+1)*n0` as a new block of width n0.
    pub fn panel(&self, k: usize) -> BlockVector<T> {
        let n0 = self.n0;
        BlockVector {
            n: self.n,
            q: n0,
            n0,
            data: self.data[k * n0 * self.n..(k + 1) * n0 * self.n].to_vec(),
        }
    }

    /// Horizontal concatenation of blocks with equal row count.
    pub fn hcat(blocks: &[&BlockVector<T>]) -> Result<Self> {
        let n = blocks.first().map_or(0, |b| b.n);
        if blocks.iter().any(|b| b.n != n) {
            return Err(Error::dims("hcat of blocks with different row counts"));
        }
        let q = blocks.iter().map(|b| b.q).sum();
        let mut data = Vec::with_capacity(n * q);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(BlockVector { n, q, n0: 1, data })
    }

    /// Maximum absolute row sum (the matrix ∞-norm); max |x_i| for a vector.
    pub fn inf_norm(&self) -> f64 {
        if self.q == 1 {
            return self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()));
        }
        let mut rows = vec![0.0f64; self.n];
        for j in 0..self.q {
            for (r, x) in rows.iter_mut().zip(self.column(j)) {
                *r += x.abs();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.q)
            .map(|j| self.column(j).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= a);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.n, self.q), (other.n, other.q));
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += *y;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.q), (other.n, other.q));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= *y;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> BlockVector<U> {
        BlockVector {
            n: self.n,
            q: self.q,
            n0: self.n0,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_complex(&self) -> BlockVector<Complex64> {
        self.map(Scalar::to_complex)
    }

    /// Relative difference `‖self − other‖₁ / ‖other‖₁` using the block 1-norm.
    pub fn rel_diff(&self, reference: &Self) -> f64 {
        let den = reference.one_norm();
        let num = self.sub(reference).one_norm();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

impl BlockVector<Complex64> {
    pub fn re(&self) -> BlockVector<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> BlockVector<f64> {
        self.map(|z| z.im)
    }
}
