use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::svm::{Decision, SvmModel};
use crate::veccore::{phi_component, ComplexVector, NdkParams, SparseVector};

use super::require_ndk;

/// Largest imaginary part tolerated in `<*w, phi_c(x)>` for real `x`.
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Complex primal weight `w = sum_j alpha_j y_j phi_c(x_j)` in `C^(4n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPrimalModel {
    pub w: ComplexVector,
    pub bias: f64,
    pub params: NdkParams,
    pub dim: usize,
    /// `<*w, phi_c(0)>`: what every block contributes when its component of
    /// the probe is zero, plus the `sqrt(c)` tail. A probe only has to
    /// correct this for its nonzero components.
    zero_base: Complex64,
    pub provenance: u64,
}

impl ComplexPrimalModel {
    pub fn from_parts(
        w: ComplexVector,
        bias: f64,
        params: NdkParams,
        dim: usize,
        provenance: u64,
    ) -> Result<Self> {
        if w.len() != 4 * dim + 1 {
            return Err(Error::invalid(format!(
                "primal weight has length {}, expected {}",
                w.len(),
                4 * dim + 1
            )));
        }
        let sqrt_c = params.sqrt_c()?;
        let phi0 = phi_component(0.0, &params);
        let comps = w.components();
        let mut zero_base = comps[4 * dim] * sqrt_c;
        for block in comps[..4 * dim].chunks_exact(4) {
            zero_base += block[0] * phi0[0] + block[1] * phi0[1];
        }
        Ok(ComplexPrimalModel {
            w,
            bias,
            params,
            dim,
            zero_base,
            provenance,
        })
    }

    /// `<*w, phi_c(x)>` without the bias, touching only the blocks of the
    /// nonzero components of `x`.
    pub fn score(&self, x: &SparseVector) -> Result<Complex64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        let phi0 = phi_component(0.0, &self.params);
        let w = self.w.components();
        let mut acc = self.zero_base;
        for (k, v) in x.iter() {
            let block = &w[4 * k..4 * k + 4];
            let phi = phi_component(v, &self.params);
            for t in 0..4 {
                acc += block[t] * (phi[t] - phi0[t]);
            }
        }
        Ok(acc)
    }
}

pub fn build_complex_primal(model: &SvmModel) -> Result<ComplexPrimalModel> {
    let params = require_ndk(model)?;
    let sqrt_c = params.sqrt_c()?;
    let dim = model.dim();
    let coeff_sum: f64 = model.coeffs().iter().sum();
    let phi0 = phi_component(0.0, &params);

    let mut w = ComplexVector::zeros(4 * dim + 1);
    let comps = w.components_mut();
    for block in comps[..4 * dim].chunks_exact_mut(4) {
        for t in 0..4 {
            block[t] = phi0[t] * coeff_sum;
        }
    }
    for (sv, &coeff) in model.support_vectors().iter().zip(model.coeffs()) {
        for (k, v) in sv.iter() {
            let phi = phi_component(v, &params);
            for t in 0..4 {
                comps[4 * k + t] += (phi[t] - phi0[t]) * coeff;
            }
        }
    }
    comps[4 * dim] = Complex64::new(sqrt_c * coeff_sum, 0.0);
    ComplexPrimalModel::from_parts(w, model.bias(), params, dim, model.fingerprint())
}

pub fn decide_complex_primal(pm: &ComplexPrimalModel, x: &SparseVector) -> Result<Decision> {
    let score = pm.score(x)?;
    if score.im.abs() > IMAG_TOLERANCE {
        return Err(Error::ImaginaryResidual(score.im));
    }
    Ok(Decision::from_value(score.re + pm.bias))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::veccore::{mod_scalar_product, phi_c};

    fn d(v: &[f64]) -> SparseVector {
        SparseVector::from_dense(v)
    }

    #[test]
    fn single_zero_sv() {
        let m = SvmModel::new(KernelSpec::ndk(1.0, 0.0).unwrap(), vec![d(&[0.0])], vec![1.0], 0.0, 1).unwrap();
        let pm = build_complex_primal(&m).unwrap();
        let expect = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        assert_eq!(pm.w.components(), &expect);
        let dec = decide_complex_primal(&pm, &d(&[2.0])).unwrap();
        assert!((dec.value + 4.0).abs() < 1e-12);
        assert_eq!(dec.label, -1);
    }

    #[test]
    fn cancelling_svs_give_zero_weight() {
        let x = d(&[0.3, 1.5, 0.0]);
        let m = SvmModel::new(KernelSpec::ndk(2.0, 1.0).unwrap(), vec![x.clone(), x], vec![1.0, -1.0], 0.25, 3)
            .unwrap();
        let pm = build_complex_primal(&m).unwrap();
        assert!(pm.w.components().iter().all(|z| z.norm() == 0.0));
        let dec = decide_complex_primal(&pm, &d(&[9.0, -1.0, 4.0])).unwrap();
        assert_eq!(dec.value, 0.25);
    }

    #[test]
    fn blockwise_score_matches_full_product() {
        let svs = vec![d(&[0.5, 0.0, -1.0, 2.0]), d(&[0.0, 1.0, 0.0, 0.0]), d(&[1.0, 1.0, 1.0, 0.0])];
        let m = SvmModel::new(KernelSpec::ndk(0.8, 2.0).unwrap(), svs, vec![0.4, -0.9, 0.5], 0.1, 4).unwrap();
        let pm = build_complex_primal(&m).unwrap();
        let x = d(&[0.0, -0.7, 3.0, 0.0]);
        let full = mod_scalar_product(&pm.w, &phi_c(&x, &pm.params).unwrap()).unwrap();
        let fast = pm.score(&x).unwrap();
        assert!((full - fast).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        let neg = SvmModel::new(KernelSpec::ndk(1.0, -1.0).unwrap(), vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        assert!(matches!(build_complex_primal(&neg), Err(Error::NegativeOffset(_))));
        let lin = SvmModel::new(KernelSpec::Linear, vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        assert!(matches!(build_complex_primal(&lin), Err(Error::WrongKernel { .. })));
        let ok = SvmModel::new(KernelSpec::ndk(1.0, 0.0).unwrap(), vec![d(&[1.0])], vec![1.0], 0.0, 1).unwrap();
        let pm = build_complex_primal(&ok).unwrap();
        assert!(decide_complex_primal(&pm, &d(&[1.0, 2.0])).is_err());
    }
}
