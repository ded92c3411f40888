use crate::error::{Error, Result};
use crate::svm::{Decision, SvmModel};
use crate::veccore::{NdkParams, SparseVector};

use super::require_ndk;

/// The dual NDK decision with every per-model sum hoisted out:
///
/// ```text
/// S  = sum_j alpha_j y_j
/// z  = a sum_j alpha_j y_j x_j
/// u  = a sum_j alpha_j y_j <x_j, x_j>
/// c' = c S
/// f(x) = -a <x,x> S + 2 <x,z> - u + c' + b
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct NdkFastModel {
    pub params: NdkParams,
    pub coeff_sum: f64,
    pub z: Vec<f64>,
    pub u: f64,
    pub c_prime: f64,
    pub bias: f64,
    pub dim: usize,
    /// [`SvmModel::fingerprint`] of the source model.
    pub provenance: u64,
}

pub fn precompute_dual(model: &SvmModel) -> Result<NdkFastModel> {
    let params = require_ndk(model)?;
    let a = params.a();
    let mut coeff_sum = 0.0;
    let mut z = vec![0.0; model.dim()];
    let mut u = 0.0;
    for (sv, &coeff) in model.support_vectors().iter().zip(model.coeffs()) {
        coeff_sum += coeff;
        sv.axpy_into(a * coeff, &mut z)?;
        u += a * coeff * sv.squared_norm();
    }
    Ok(NdkFastModel {
        params,
        coeff_sum,
        z,
        u,
        c_prime: params.c() * coeff_sum,
        bias: model.bias(),
        dim: model.dim(),
        provenance: model.fingerprint(),
    })
}

pub fn decide_precomputed(fm: &NdkFastModel, x: &SparseVector) -> Result<Decision> {
    if x.dim() != fm.dim {
        return Err(Error::DimensionMismatch {
            left: fm.dim,
            right: x.dim(),
        });
    }
    let mut xx = 0.0;
    let mut xz = 0.0;
    for (i, v) in x.iter() {
        xx += v * v;
        xz += v * fm.z[i];
    }
    let value = -fm.params.a() * xx * fm.coeff_sum + 2.0 * xz - fm.u + fm.c_prime + fm.bias;
    Ok(Decision::from_value(value))
}
