//! Sparse real vectors, complex vectors, and the complex feature map of the
//! NDK together with the non-conjugating product it is paired with.

mod complex;
mod sparse;

pub use complex::{
    mod_scalar_product, phi_c, phi_component, phi_component_product, sparse_mod_product,
    ComplexVector, NdkParams,
};
pub use sparse::{dot, sq_distance, SparseVector};
