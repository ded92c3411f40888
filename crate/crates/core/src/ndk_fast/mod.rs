//! Three interchangeable NDK decision routes, and the Mahalanobis variant.
//!
//! For a trained model with multipliers `alpha_j y_j` and support vectors
//! `x_j`, all of the following produce the same decision value:
//!
//! - the dual sum `sum_j alpha_j y_j (-a ||x - x_j||^2 + c) + b`
//!   ([`crate::svm::decide_dual`], cost `O(m * nnz)`);
//! - the precomputed dual `-a <x,x> S + 2 <x,z> - u + c' + b`
//!   ([`decide_precomputed`], cost `O(nnz(x))`);
//! - the complex primal `<*w, phi_c(x)> + b` ([`decide_complex_primal`],
//!   cost `O(nnz(x))`).

mod mahalanobis;
mod precomputed;
mod primal;

pub use mahalanobis::{
    covariance, default_ridge, jacobi_eigen, mahalanobis_kernel, whitening_from_covariance,
    MahalanobisNdk, SymmetricEigen, WhiteningTransform,
};
pub use precomputed::{decide_precomputed, precompute_dual, NdkFastModel};
pub use primal::{build_complex_primal, decide_complex_primal, ComplexPrimalModel, IMAG_TOLERANCE};

use crate::error::{Error, Result};
use crate::svm::SvmModel;
use crate::veccore::NdkParams;

pub(crate) fn require_ndk(model: &SvmModel) -> Result<NdkParams> {
    model.kernel().ndk_params().ok_or_else(|| Error::WrongKernel {
        expected: "ndk",
        found: model.kernel().family().to_string(),
    })
}
