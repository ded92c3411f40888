//! One-vs-rest multi-label classification and the evaluation protocol:
//! metrics, bias tuning, grid search, oversampling, timing, and report
//! tables.

mod bench;
mod grid;
mod histogram;
mod metrics;
mod multilabel;
mod oversample;
mod report;
mod tune;

pub use bench::{
    bench_predict, median, synthetic_ndk_model, synthetic_probes, time_path, BenchCategory, BenchRow, BenchTable,
    BENCH_COLUMNS,
};
pub use grid::{default_c_grid, default_grid, grid_search, GridPoint, GridReport, GridRow};
pub use histogram::{category_histogram, CategoryHistogram};
pub use metrics::{evaluate, evaluate_assignments, CategoryMetrics, Confusion, EvalReport};
pub use multilabel::{
    assign_labels, category_training_set, train_one_vs_rest, AssignmentMode, CategoryModel, DocVectors, LabeledDoc,
    MultiLabelClassifier, PredictPath,
};
pub use oversample::{balance_oversample, max_positive_ratio, required_positives};
pub use report::{f_score_table, macro_table, precision_recall_table, timing_table, Table};
pub use tune::{tune_bias, tune_bias_scores, tune_classifier, TuneOutcome};
