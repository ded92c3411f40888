//! Binary soft-margin SVMs: SMO training, dual-form decisions, and primal
//! extraction for the linear kernel.

mod smo;

pub use smo::{max_kkt_violation, smo_train, smo_train_detailed, SmoConfig, SmoOutcome};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernels::{kernel_eval, KernelSpec};
use crate::veccore::SparseVector;

/// Labelled binary training data; labels are `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingSet {
    vectors: Vec<SparseVector>,
    labels: Vec<i8>,
}

impl TrainingSet {
    pub fn new(vectors: Vec<SparseVector>, labels: Vec<i8>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if let Some(first) = vectors.first() {
            if let Some(bad) = vectors.iter().find(|v| v.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    left: first.dim(),
                    right: bad.dim(),
                });
            }
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::invalid(format!("label {bad} is not -1 or +1")));
        }
        Ok(TrainingSet { vectors, labels })
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(SparseVector::dim)
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub(crate) fn check_trainable(&self) -> Result<()> {
        let pos = self.positives();
        if pos == 0 || pos == self.len() {
            return Err(Error::invalid(
                "training needs at least one example of each label",
            ));
        }
        Ok(())
    }

    pub fn into_parts(self) -> (Vec<SparseVector>, Vec<i8>) {
        (self.vectors, self.labels)
    }
}

/// Signed decision value and its sign (`0` exactly on the hyperplane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub value: f64,
    pub label: i8,
}

impl Decision {
    pub fn from_value(value: f64) -> Self {
        Decision {
            value,
            label: crate::sgn(value),
        }
    }
}

/// Dual-form model: `f(x) = sum_j coeffs[j] K(x, svs[j]) + bias` with
/// `coeffs[j] = alpha_j y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    kernel: KernelSpec,
    svs: Vec<SparseVector>,
    coeffs: Vec<f64>,
    bias: f64,
    dim: usize,
}

impl SvmModel {
    pub fn new(
        kernel: KernelSpec,
        svs: Vec<SparseVector>,
        coeffs: Vec<f64>,
        bias: f64,
        dim: usize,
    ) -> Result<Self> {
        kernel.validate()?;
        if svs.len() != coeffs.len() {
            return Err(Error::invalid(format!(
                "{} support vectors but {} coefficients",
                svs.len(),
                coeffs.len()
            )));
        }
        if let Some(bad) = svs.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        if !bias.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("model coefficients must be finite"));
        }
        Ok(SvmModel {
            kernel,
            svs,
            coeffs,
            bias,
            dim,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn support_vectors(&self) -> &[SparseVector] {
        &self.svs
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sv(&self) -> usize {
        self.svs.len()
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn set_bias(&mut self, bias: f64) {
        self.bias = bias;
    }

    /// SHA-256 over the model's exact bit patterns, truncated to 64 bits.
    /// Derived models record it so a file cannot pair them with another model.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        for line in self.kernel.to_kv_lines() {
            h.update(line.as_bytes());
        }
        h.update((self.dim as u64).to_le_bytes());
        h.update(self.bias.to_bits().to_le_bytes());
        for (sv, c) in self.svs.iter().zip(&self.coeffs) {
            h.update(c.to_bits().to_le_bytes());
            for (i, v) in sv.iter() {
                h.update((i as u64).to_le_bytes());
                h.update(v.to_bits().to_le_bytes());
            }
        }
        let digest = h.finalize();
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(first)
    }
}

/// `sum_j coeffs[j] K(x, svs[j]) + bias`; one kernel evaluation per SV.
pub fn decide_dual(model: &SvmModel, x: &SparseVector) -> Result<Decision> {
    if x.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            left: model.dim,
            right: x.dim(),
        });
    }
    let mut value = model.bias;
    for (sv, c) in model.svs.iter().zip(&model.coeffs) {
        value += c * kernel_eval(&model.kernel, x, sv)?;
    }
    Ok(Decision::from_value(value))
}

/// Explicit hyperplane of a linear-kernel model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPrimal {
    pub w: Vec<f64>,
    pub bias: f64,
}

impl LinearPrimal {
    pub fn decide(&self, x: &SparseVector) -> Result<Decision> {
        Ok(Decision::from_value(x.dot_dense(&self.w)? + self.bias))
    }
}

pub fn extract_linear_primal(model: &SvmModel) -> Result<LinearPrimal> {
    if model.kernel != KernelSpec::Linear {
        return Err(Error::WrongKernel {
            expected: "linear",
            found: model.kernel.family().to_string(),
        });
    }
    let mut w = vec![0.0; model.dim];
    for (sv, c) in model.svs.iter().zip(&model.coeffs) {
        sv.axpy_into(*c, &mut w)?;
    }
    Ok(LinearPrimal {
        w,
        bias: model.bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> SparseVector {
        SparseVector::from_dense(v)
    }

    #[test]
    fn training_set_validation() {
        assert!(TrainingSet::new(vec![d(&[1.0])], vec![1, -1]).is_err());
        assert!(TrainingSet::new(vec![d(&[1.0]), d(&[1.0, 2.0])], vec![1, -1]).is_err());
        assert!(TrainingSet::new(vec![d(&[1.0])], vec![0]).is_err());
        let one_class = TrainingSet::new(vec![d(&[1.0]), d(&[2.0])], vec![1, 1]).unwrap();
        assert!(one_class.check_trainable().is_err());
    }

    #[test]
    fn single_sv_primal() {
        let m = SvmModel::new(KernelSpec::Linear, vec![d(&[1.0, 0.0])], vec![2.0], -1.0, 2).unwrap();
        let p = extract_linear_primal(&m).unwrap();
        assert_eq!(p.w, vec![2.0, 0.0]);
        assert_eq!(p.bias, -1.0);
    }

    #[test]
    fn primal_rejects_nonlinear() {
        let m = SvmModel::new(KernelSpec::rbf(1.0).unwrap(), vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        assert!(matches!(extract_linear_primal(&m), Err(Error::WrongKernel { .. })));
    }

    #[test]
    fn decide_dual_dim_mismatch() {
        let m = SvmModel::new(KernelSpec::Linear, vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        assert!(decide_dual(&m, &d(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let m = SvmModel::new(KernelSpec::Linear, vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        let m2 = m.clone().with_bias(1e-300);
        assert_eq!(m.fingerprint(), m.clone().fingerprint());
        assert_ne!(m.fingerprint(), m2.fingerprint());
    }
}
