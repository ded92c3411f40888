//! Covariance estimation, cyclic Jacobi eigendecomposition, and the
//! whitening transform `tau(x) = sqrt(Cov^-1) x` that turns the NDK with
//! `a = 1, c = 0` into the negative squared Mahalanobis distance.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::svm::{decide_dual, Decision, SvmModel, TrainingSet};
use crate::veccore::{sparse_mod_product, NdkParams, SparseVector};

use super::{decide_complex_primal, decide_precomputed, require_ndk, ComplexPrimalModel, NdkFastModel};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-12;

/// Sample covariance (divisor `N - 1`) of the feature columns, accumulated in
/// one pass with running means and co-moments.
pub fn covariance(vectors: &[SparseVector]) -> Result<DMatrix<f64>> {
    if vectors.len() < 2 {
        return Err(Error::invalid("covariance needs at least two rows"));
    }
    let dim = vectors[0].dim();
    let mut mean = vec![0.0; dim];
    let mut comoment = DMatrix::<f64>::zeros(dim, dim);
    let mut delta = vec![0.0; dim];
    for (count, x) in vectors.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: x.dim(),
            });
        }
        let n = (count + 1) as f64;
        let dense = x.to_dense();
        for k in 0..dim {
            delta[k] = dense[k] - mean[k];
            mean[k] += delta[k] / n;
        }
        // M += (x - mean_old)(x - mean_new)^T
        for j in 0..dim {
            let after = dense[j] - mean[j];
            if after == 0.0 {
                continue;
            }
            for i in 0..dim {
                comoment[(i, j)] += delta[i] * after;
            }
        }
    }
    let mut cov = comoment / (vectors.len() - 1) as f64;
    symmetrize(&mut cov);
    Ok(cov)
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// `A = V diag(values) V^T`; eigenvectors are the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `1e-12 * ||A||_F`.
pub fn jacobi_eigen(matrix: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::invalid("eigendecomposition needs a square matrix"));
    }
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm();
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
        }
        if off.sqrt() <= JACOBI_REL_TOL * norm {
            return Ok(SymmetricEigen {
                values: (0..n).map(|i| a[(i, i)]).collect(),
                vectors: v,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::EigenNotConverged(JACOBI_MAX_SWEEPS))
}

/// `1e-6 * trace(cov) / dim`, the ridge used when the covariance is singular.
pub fn default_ridge(cov: &DMatrix<f64>) -> f64 {
    let n = cov.nrows().max(1);
    1e-6 * cov.trace() / n as f64
}

/// `C = sqrt(Cov^-1)`, symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteningTransform {
    pub c: DMatrix<f64>,
    pub dim: usize,
}

/// Eigenvalues are clamped to at least `ridge`; with `ridge == 0` a
/// non-positive eigenvalue is an error.
pub fn whitening_from_covariance(cov: &DMatrix<f64>, ridge: f64) -> Result<WhiteningTransform> {
    let n = cov.nrows();
    if cov.ncols() != n {
        return Err(Error::invalid("covariance must be square"));
    }
    if !(ridge >= 0.0) {
        return Err(Error::invalid(format!("ridge must be >= 0, got {ridge}")));
    }
    let scale = cov.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-9 * scale {
                return Err(Error::invalid(format!("covariance not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = jacobi_eigen(cov)?;
    from_eigen(&eig, ridge)
}

fn from_eigen(eig: &SymmetricEigen, ridge: f64) -> Result<WhiteningTransform> {
    let n = eig.values.len();
    let mut inv_sqrt = Vec::with_capacity(n);
    for &lambda in &eig.values {
        if ridge == 0.0 && lambda <= 0.0 {
            return Err(Error::SingularCovariance(lambda));
        }
        inv_sqrt.push(1.0 / lambda.max(ridge).sqrt());
    }
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for (j, s) in inv_sqrt.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    let mut c = scaled * v.transpose();
    symmetrize(&mut c);
    Ok(WhiteningTransform { c, dim: n })
}

impl WhiteningTransform {
    /// Covariance of `vectors`, with the default ridge applied when the
    /// smallest eigenvalue is not clearly positive.
    pub fn fit(vectors: &[SparseVector]) -> Result<Self> {
        let cov = covariance(vectors)?;
        let eig = jacobi_eigen(&cov)?;
        let max = eig.values.iter().cloned().fold(0.0, f64::max);
        let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let ridge = if min <= 1e-12 * max { default_ridge(&cov) } else { 0.0 };
        if ridge == 0.0 && max <= 0.0 {
            return Err(Error::SingularCovariance(max));
        }
        from_eigen(&eig, ridge)
    }

    pub fn identity(dim: usize) -> Self {
        WhiteningTransform {
            c: DMatrix::identity(dim, dim),
            dim,
        }
    }

    /// `tau(x) = C x`. The result is generally dense: `O(dim * nnz(x))`.
    pub fn apply(&self, x: &SparseVector) -> Result<SparseVector> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for (k, v) in x.iter() {
            for (o, ck) in out.iter_mut().zip(self.c.column(k).iter()) {
                *o += v * ck;
            }
        }
        Ok(SparseVector::from_dense(&out))
    }

    pub fn apply_set(&self, data: &TrainingSet) -> Result<TrainingSet> {
        let vectors = data
            .vectors()
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<Vec<_>>>()?;
        TrainingSet::new(vectors, data.labels().to_vec())
    }
}

/// `<*phi_c(C x), phi_c(C z)>` with `a = 1, c = 0`, i.e.
/// `-(x - z)^T Cov^-1 (x - z)`.
pub fn mahalanobis_kernel(w: &WhiteningTransform, x: &SparseVector, z: &SparseVector) -> Result<f64> {
    let unit = NdkParams::new(1.0, 0.0)?;
    sparse_mod_product(&w.apply(x)?, &w.apply(z)?, &unit)
}

#[derive(Debug, Clone)]
pub enum MahalanobisRoute {
    Dual(SvmModel),
    Precomputed(NdkFastModel),
    Primal(ComplexPrimalModel),
}

/// An NDK model (`a = 1, c = 0`) trained on whitened vectors, together with
/// the whitening that must be applied to every probe.
#[derive(Debug, Clone)]
pub struct MahalanobisNdk {
    pub transform: WhiteningTransform,
    pub route: MahalanobisRoute,
}

impl MahalanobisNdk {
    pub fn new(transform: WhiteningTransform, route: MahalanobisRoute) -> Result<Self> {
        let (params, dim) = match &route {
            MahalanobisRoute::Dual(m) => (require_ndk(m)?, m.dim()),
            MahalanobisRoute::Precomputed(f) => (f.params, f.dim),
            MahalanobisRoute::Primal(p) => (p.params, p.dim),
        };
        if params.a() != 1.0 || params.c() != 0.0 {
            return Err(Error::invalid(
                "Mahalanobis NDK needs a = 1 and c = 0",
            ));
        }
        if dim != transform.dim {
            return Err(Error::DimensionMismatch {
                left: transform.dim,
                right: dim,
            });
        }
        Ok(MahalanobisNdk { transform, route })
    }

    pub fn decide(&self, x: &SparseVector) -> Result<Decision> {
        let tx = self.transform.apply(x)?;
        match &self.route {
            MahalanobisRoute::Dual(m) => decide_dual(m, &tx),
            MahalanobisRoute::Precomputed(f) => decide_precomputed(f, &tx),
            MahalanobisRoute::Primal(p) => decide_complex_primal(p, &tx),
        }
    }
}
