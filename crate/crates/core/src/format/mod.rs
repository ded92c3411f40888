//! Plain-text file formats: sparse vector data files and model files.

mod model;
mod sparse;

pub use model::{load_model, read_model, save_model, write_model, ModelFile, MODEL_FORMAT_VERSION};
pub use sparse::{
    load_sparse, parse_binary_label, read_sparse, save_sparse, split_categories, to_training_set,
    write_sparse, SparseRecord,
};
