use crate::error::{Error, Result};

/// A real vector of dimension `dim` that stores only its nonzero entries.
///
/// Indices are 0-based, strictly increasing and `< dim`; stored values are
/// never zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// The all-zero vector.
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs in any order. Zero values are
    /// dropped; duplicate or out-of-range indices and non-finite values are
    /// rejected.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        let mut last = None;
        for (i, v) in pairs {
            if i >= dim {
                return Err(Error::invalid(format!("index {i} out of range for dim {dim}")));
            }
            if last == Some(i) {
                return Err(Error::invalid(format!("duplicate index {i}")));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite value at index {i}")));
            }
            last = Some(i);
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        Ok(SparseVector {
            dim,
            indices,
            values,
        })
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Value at `index` (0 for unstored entries).
    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn scale(&self, factor: f64) -> SparseVector {
        if factor == 0.0 {
            return SparseVector::zeros(self.dim);
        }
        SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `<self, dense>` for a dense vector of the same dimension.
    pub fn dot_dense(&self, dense: &[f64]) -> Result<f64> {
        check_dims(self.dim, dense.len())?;
        Ok(self.iter().map(|(i, v)| v * dense[i]).sum())
    }

    /// Adds `factor * self` into `dense`.
    pub fn axpy_into(&self, factor: f64, dense: &mut [f64]) -> Result<()> {
        check_dims(self.dim, dense.len())?;
        for (i, v) in self.iter() {
            dense[i] += factor * v;
        }
        Ok(())
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Walks the union of the supports of `x1` and `x2` in index order, calling
/// `f(index, x1_k, x2_k)` with 0 for a side that has no entry.
pub(crate) fn for_each_union(
    x1: &SparseVector,
    x2: &SparseVector,
    mut f: impl FnMut(usize, f64, f64),
) {
    let (mut p, mut q) = (0, 0);
    let (i1, v1, i2, v2) = (&x1.indices, &x1.values, &x2.indices, &x2.values);
    while p < i1.len() && q < i2.len() {
        match i1[p].cmp(&i2[q]) {
            std::cmp::Ordering::Equal => {
                f(i1[p], v1[p], v2[q]);
                p += 1;
                q += 1;
            }
            std::cmp::Ordering::Less => {
                f(i1[p], v1[p], 0.0);
                p += 1;
            }
            std::cmp::Ordering::Greater => {
                f(i2[q], 0.0, v2[q]);
                q += 1;
            }
        }
    }
    for k in p..i1.len() {
        f(i1[k], v1[k], 0.0);
    }
    for k in q..i2.len() {
        f(i2[k], 0.0, v2[k]);
    }
}

/// Sparse scalar product over the intersection of the two supports.
pub fn dot(x1: &SparseVector, x2: &SparseVector) -> Result<f64> {
    check_dims(x1.dim, x2.dim)?;
    let (mut p, mut q) = (0, 0);
    let mut sum = 0.0;
    while p < x1.indices.len() && q < x2.indices.len() {
        match x1.indices[p].cmp(&x2.indices[q]) {
            std::cmp::Ordering::Equal => {
                sum += x1.values[p] * x2.values[q];
                p += 1;
                q += 1;
            }
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
        }
    }
    Ok(sum)
}

/// `||x1 - x2||^2`, accumulated componentwise over the union of supports.
pub fn sq_distance(x1: &SparseVector, x2: &SparseVector) -> Result<f64> {
    check_dims(x1.dim, x2.dim)?;
    let mut sum = 0.0;
    for_each_union(x1, x2, |_, a, b| {
        let d = a - b;
        sum += d * d;
    });
    Ok(sum)
}
