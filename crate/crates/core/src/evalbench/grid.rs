use super::metrics::evaluate;
use super::multilabel::{train_one_vs_rest, AssignmentMode, LabeledDoc, MultiLabelClassifier, PredictPath};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::svm::{SmoConfig, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub kernel: KernelSpec,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub point: GridPoint,
    /// Validation macro-F1, absent when training failed.
    pub macro_f1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
    pub best: usize,
}

impl GridReport {
    pub fn best_point(&self) -> &GridPoint {
        &self.rows[self.best].point
    }

    pub fn best_f1(&self) -> f64 {
        self.rows[self.best].macro_f1.unwrap_or(0.0)
    }
}

pub fn default_c_grid() -> Vec<f64> {
    vec![0.1, 1.0, 10.0, 100.0]
}

fn pow2(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 2f64.powi(e)).collect()
}

/// Default search space for `family`: one of `linear`, `square`, `cubic`,
/// `rbf`, `ndk`. Kernel parameters vary slowest, C fastest.
pub fn default_grid(family: &str) -> Result<Vec<GridPoint>> {
    let kernels: Vec<KernelSpec> = match family {
        "linear" => vec![KernelSpec::Linear],
        "square" | "cubic" => {
            let degree = if family == "square" { 2 } else { 3 };
            let mut v = Vec::new();
            for a in [0.5, 1.0, 2.0] {
                for c in [0.0, 1.0] {
                    v.push(KernelSpec::polynomial(a, c, degree)?);
                }
            }
            v
        }
        "rbf" => pow2(-7, 3).into_iter().map(KernelSpec::rbf).collect::<Result<_>>()?,
        "ndk" => {
            let mut v = Vec::new();
            for a in pow2(-5, 3) {
                for c in [0.0, 1.0, 10.0] {
                    v.push(KernelSpec::ndk(a, c)?);
                }
            }
            v
        }
        _ => return Err(Error::invalid(format!("no default grid for `{family}`"))),
    };
    Ok(kernels
        .into_iter()
        .flat_map(|kernel| {
            default_c_grid().into_iter().map(move |c| GridPoint {
                kernel: kernel.clone(),
                c,
            })
        })
        .collect())
}

/// Trains a one-vs-rest classifier per grid point and scores it on the
/// validation documents. The best point has the highest macro-F1; ties go
/// to the earliest. Points whose training fails are kept in the table.
pub fn grid_search(
    names: &[String],
    train: &[TrainingSet],
    validation: &[LabeledDoc],
    grid: &[GridPoint],
    base: &SmoConfig,
    mode: AssignmentMode,
    workers: usize,
) -> Result<GridReport> {
    if grid.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, point) in grid.iter().enumerate() {
        let cfg = SmoConfig {
            c: point.c,
            ..base.clone()
        };
        let outcome = train_one_vs_rest(names, train, std::slice::from_ref(&point.kernel), &cfg, workers)
            .and_then(|models| {
                let mut clf = MultiLabelClassifier::new(models, mode)?;
                let path = if point.kernel.ndk_params().is_some() {
                    clf.build_fast()?;
                    PredictPath::Precomputed
                } else {
                    PredictPath::Dual
                };
                evaluate(&clf, validation, path)
            });
        let row = match outcome {
            Ok(report) => {
                if best.is_none_or(|(_, f)| report.macro_f1 > f) {
                    best = Some((i, report.macro_f1));
                }
                GridRow {
                    point: point.clone(),
                    macro_f1: Some(report.macro_f1),
                    error: None,
                }
            }
            Err(e) => GridRow {
                point: point.clone(),
                macro_f1: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    match best {
        Some((best, _)) => Ok(GridReport { rows, best }),
        None => Err(Error::invalid(format!(
            "every grid point failed; first error: {}",
            rows[0].error.as_deref().unwrap_or("")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::multilabel::{category_training_set, DocVectors};
    use crate::veccore::SparseVector;
    use std::collections::BTreeSet;

    fn doc(id: usize, x: [f64; 2], cat: &str) -> LabeledDoc {
        LabeledDoc {
            id: id.to_string(),
            vectors: DocVectors::Shared(SparseVector::from_dense(&x)),
            categories: BTreeSet::from([cat.to_string()]),
        }
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(default_grid("linear").unwrap().len(), 4);
        assert_eq!(default_grid("square").unwrap().len(), 24);
        assert_eq!(default_grid("rbf").unwrap().len(), 44);
        assert_eq!(default_grid("ndk").unwrap().len(), 108);
        assert!(default_grid("sigmoid").is_err());
        let g = default_grid("rbf").unwrap();
        assert_eq!(g[0].kernel, KernelSpec::rbf(2f64.powi(-7)).unwrap());
        assert_eq!(g[1].c, 1.0);
    }

    #[test]
    fn picks_the_separating_configuration() {
        // XOR layout: a linear kernel cannot separate it, the square kernel can.
        let pts = [([0.0, 0.0], "a"), ([1.0, 1.0], "a"), ([1.0, 0.0], "b"), ([0.0, 1.0], "b")];
        let docs: Vec<LabeledDoc> = pts.iter().enumerate().map(|(i, (x, c))| doc(i, *x, c)).collect();
        let names = vec!["a".to_string(), "b".to_string()];
        let sets: Vec<TrainingSet> = names
            .iter()
            .enumerate()
            .map(|(i, n)| category_training_set(&docs, i, n).unwrap())
            .collect();
        let grid = vec![
            GridPoint { kernel: KernelSpec::Linear, c: 10.0 },
            GridPoint { kernel: KernelSpec::polynomial(1.0, 1.0, 2).unwrap(), c: 100.0 },
        ];
        let cfg = SmoConfig::default();
        let r = grid_search(&names, &sets, &docs, &grid, &cfg, AssignmentMode::ArgmaxFallback, 1).unwrap();
        assert_eq!(r.best, 1);
        assert_eq!(r.best_f1(), 1.0);
        assert!(r.rows[0].macro_f1.unwrap() < 1.0);

        let single = grid_search(&names, &sets, &docs, &grid[..1], &cfg, AssignmentMode::ArgmaxFallback, 1).unwrap();
        assert_eq!(single.best, 0);
        assert!(grid_search(&names, &sets, &docs, &[], &cfg, AssignmentMode::ArgmaxFallback, 1).is_err());
    }
}
