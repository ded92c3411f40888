//! Support vector machines built around the quadratic power kernel, also
//! known as the negative Euclidean distance kernel (NDK):
//!
//! ```text
//! K(x1, x2) = -a * ||x1 - x2||^2 + c
//! ```
//!
//! The NDK has no real-valued feature map, but it does have a complex one,
//! `R^n -> C^(4n+1)`, under the non-conjugating product `<*u, v> = sum(u_k v_k)`.
//! That lets a trained dual model collapse into a single primal weight vector
//! so that classification cost no longer depends on the number of support
//! vectors.
//!
//! Modules:
//!
//! - [`veccore`]: sparse vectors, complex vectors, the complex feature map
//! - [`kernels`]: linear / polynomial / RBF / NDK evaluation
//! - [`svm`]: SMO training, dual decisions, model files
//! - [`ndk_fast`]: precomputed dual, complex primal, Mahalanobis whitening
//! - [`textfeat`]: tokenization, tfidf, GSS, document featurization
//! - [`evalbench`]: one-vs-rest assignment, metrics, grid search, timing
//! - [`format`]: the `label idx:val ...` sparse text format

pub mod error;
pub mod evalbench;
pub mod format;
pub mod kernels;
pub mod ndk_fast;
pub mod svm;
pub mod textfeat;
pub mod veccore;

pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use ndk_fast::{ComplexPrimalModel, NdkFastModel, WhiteningTransform};
pub use svm::{SmoConfig, SvmModel, TrainingSet};
pub use veccore::{ComplexVector, NdkParams, SparseVector};

/// Sign with `sgn(0) = 0`: a point exactly on the hyperplane gets no class.
pub fn sgn(value: f64) -> i8 {
    if value > 0.0 {
        1
    } else if value < 0.0 {
        -1
    } else {
        0
    }
}
