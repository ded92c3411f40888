use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::ndk_fast::{
    build_complex_primal, decide_complex_primal, decide_precomputed, precompute_dual, ComplexPrimalModel,
    NdkFastModel,
};
use crate::svm::{decide_dual, smo_train, SmoConfig, SvmModel, TrainingSet};
use crate::veccore::SparseVector;

/// Feature vectors of one document: a single vector shared by all
/// categories, or one per category when features are category-dependent.
#[derive(Debug, Clone, PartialEq)]
pub enum DocVectors {
    Shared(SparseVector),
    PerCategory(Vec<SparseVector>),
}

impl DocVectors {
    pub fn for_category(&self, index: usize) -> Result<&SparseVector> {
        match self {
            DocVectors::Shared(v) => Ok(v),
            DocVectors::PerCategory(vs) => vs
                .get(index)
                .ok_or_else(|| Error::invalid(format!("no feature vector for category {index}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDoc {
    pub id: String,
    pub vectors: DocVectors,
    pub categories: BTreeSet<String>,
}

/// Which NDK decision route to use. Non-NDK models always use the dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictPath {
    Dual,
    Precomputed,
    Primal,
}

impl PredictPath {
    pub fn name(self) -> &'static str {
        match self {
            PredictPath::Dual => "dual",
            PredictPath::Precomputed => "precomputed",
            PredictPath::Primal => "primal",
        }
    }
}

impl FromStr for PredictPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(PredictPath::Dual),
            "precomputed" => Ok(PredictPath::Precomputed),
            "primal" => Ok(PredictPath::Primal),
            _ => Err(Error::invalid(format!("unknown path `{s}` (dual|precomputed|primal)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentMode {
    /// Every category with a non-negative value; possibly none.
    IndependentThreshold,
    /// As above, but if every value is negative the single largest one wins.
    ArgmaxFallback,
}

impl FromStr for AssignmentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" | "independent_threshold" => Ok(AssignmentMode::IndependentThreshold),
            "fallback" | "argmax_fallback" => Ok(AssignmentMode::ArgmaxFallback),
            _ => Err(Error::invalid(format!("unknown assignment mode `{s}`"))),
        }
    }
}

/// Indices of the assigned categories, ascending. Ties in the fallback go to
/// the lowest index.
pub fn assign_labels(values: &[f64], mode: AssignmentMode) -> Vec<usize> {
    let hits: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= 0.0).collect();
    if !hits.is_empty() || mode == AssignmentMode::IndependentThreshold || values.is_empty() {
        return hits;
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    vec![best]
}

/// A binary model for one category plus its optional fast NDK forms.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryModel {
    pub name: String,
    pub model: SvmModel,
    pub precomputed: Option<NdkFastModel>,
    pub primal: Option<ComplexPrimalModel>,
}

impl CategoryModel {
    pub fn new(name: impl Into<String>, model: SvmModel) -> Self {
        CategoryModel {
            name: name.into(),
            model,
            precomputed: None,
            primal: None,
        }
    }

    /// Builds the precomputed and (when `c >= 0`) primal forms of an NDK
    /// model. A no-op for other kernels.
    pub fn build_fast(&mut self) -> Result<()> {
        if let Some(p) = self.model.kernel().ndk_params() {
            self.precomputed = Some(precompute_dual(&self.model)?);
            if p.c() >= 0.0 {
                self.primal = Some(build_complex_primal(&self.model)?);
            }
        }
        Ok(())
    }

    pub fn set_bias(&mut self, bias: f64) {
        self.model.set_bias(bias);
        if let Some(fm) = &mut self.precomputed {
            fm.bias = bias;
        }
        if let Some(pm) = &mut self.primal {
            pm.bias = bias;
        }
    }

    pub fn decide(&self, x: &SparseVector, path: PredictPath) -> Result<f64> {
        let d = match (path, &self.precomputed, &self.primal) {
            (PredictPath::Precomputed, Some(fm), _) => decide_precomputed(fm, x)?,
            (PredictPath::Primal, _, Some(pm)) => decide_complex_primal(pm, x)?,
            (PredictPath::Dual, _, _) => decide_dual(&self.model, x)?,
            _ if self.model.kernel().ndk_params().is_some() => {
                return Err(Error::invalid(format!(
                    "category `{}` has no {} form; build it first",
                    self.name,
                    path.name()
                )))
            }
            _ => decide_dual(&self.model, x)?,
        };
        Ok(d.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelClassifier {
    pub categories: Vec<CategoryModel>,
    pub mode: AssignmentMode,
}

impl MultiLabelClassifier {
    pub fn new(categories: Vec<CategoryModel>, mode: AssignmentMode) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::invalid("classifier needs at least one category"));
        }
        Ok(MultiLabelClassifier { categories, mode })
    }

    pub fn names(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn build_fast(&mut self) -> Result<()> {
        self.categories.iter_mut().try_for_each(CategoryModel::build_fast)
    }

    pub fn decision_values(&self, x: &DocVectors, path: PredictPath) -> Result<Vec<f64>> {
        self.categories
            .iter()
            .enumerate()
            .map(|(i, c)| c.decide(x.for_category(i)?, path))
            .collect()
    }

    pub fn assign(&self, x: &DocVectors, path: PredictPath) -> Result<Vec<usize>> {
        Ok(assign_labels(&self.decision_values(x, path)?, self.mode))
    }
}

/// Binary data for one category: documents carrying `name` are positive.
pub fn category_training_set(docs: &[LabeledDoc], index: usize, name: &str) -> Result<TrainingSet> {
    let mut vectors = Vec::with_capacity(docs.len());
    let mut labels = Vec::with_capacity(docs.len());
    for d in docs {
        vectors.push(d.vectors.for_category(index)?.clone());
        labels.push(if d.categories.contains(name) { 1 } else { -1 });
    }
    TrainingSet::new(vectors, labels)
}

/// Trains one model per category on `workers` threads (at least one).
/// `kernels` holds one spec for all categories or one per category.
pub fn train_one_vs_rest(
    names: &[String],
    sets: &[TrainingSet],
    kernels: &[KernelSpec],
    cfg: &SmoConfig,
    workers: usize,
) -> Result<Vec<CategoryModel>> {
    if names.len() != sets.len() || !(kernels.len() == 1 || kernels.len() == names.len()) {
        return Err(Error::invalid("one training set (and one or all kernels) per category expected"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..names.len())
            .into_par_iter()
            .map(|i| {
                let k = &kernels[if kernels.len() == 1 { 0 } else { i }];
                let model = smo_train(&sets[i], k, cfg)?;
                Ok(CategoryModel::new(names[i].clone(), model))
            })
            .collect()
    })
}
