use std::collections::BTreeSet;
use std::time::Instant;

use super::multilabel::{assign_labels, LabeledDoc, MultiLabelClassifier, PredictPath};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Confusion {
    pub fn add(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall; 0 when both are 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMetrics {
    pub name: String,
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_category: Vec<CategoryMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub path: PredictPath,
    /// Milliseconds spent computing each category's decision values.
    pub timing_ms: Vec<f64>,
}

impl EvalReport {
    pub fn total_ms(&self) -> f64 {
        self.timing_ms.iter().sum()
    }
}

/// Scores assigned category indices against the true category names.
/// Macro averages are unweighted means over `names`.
pub fn evaluate_assignments(
    names: &[String],
    truth: &[BTreeSet<String>],
    assigned: &[Vec<usize>],
) -> Result<Vec<CategoryMetrics>> {
    if truth.len() != assigned.len() {
        return Err(Error::invalid("one assignment per document expected"));
    }
    let mut conf = vec![Confusion::default(); names.len()];
    for (t, a) in truth.iter().zip(assigned) {
        for (i, name) in names.iter().enumerate() {
            conf[i].add(t.contains(name), a.contains(&i));
        }
    }
    Ok(names
        .iter()
        .zip(conf)
        .map(|(name, c)| CategoryMetrics {
            name: name.clone(),
            precision: c.precision(),
            recall: c.recall(),
            f1: c.f1(),
            confusion: c,
        })
        .collect())
}

fn macro_avg(per: &[CategoryMetrics], f: impl Fn(&CategoryMetrics) -> f64) -> f64 {
    if per.is_empty() {
        0.0
    } else {
        per.iter().map(f).sum::<f64>() / per.len() as f64
    }
}

pub(crate) fn report_from(per_category: Vec<CategoryMetrics>, path: PredictPath, timing_ms: Vec<f64>) -> EvalReport {
    EvalReport {
        macro_precision: macro_avg(&per_category, |m| m.precision),
        macro_recall: macro_avg(&per_category, |m| m.recall),
        macro_f1: macro_avg(&per_category, |m| m.f1),
        per_category,
        path,
        timing_ms,
    }
}

/// Classifies every document with `path` and scores the assignments.
pub fn evaluate(clf: &MultiLabelClassifier, docs: &[LabeledDoc], path: PredictPath) -> Result<EvalReport> {
    let n_cat = clf.categories.len();
    let mut values = vec![vec![0.0; n_cat]; docs.len()];
    let mut timing_ms = vec![0.0; n_cat];
    for (c, cm) in clf.categories.iter().enumerate() {
        let start = Instant::now();
        for (d, doc) in docs.iter().enumerate() {
            values[d][c] = cm.decide(doc.vectors.for_category(c)?, path)?;
        }
        timing_ms[c] = start.elapsed().as_secs_f64() * 1e3;
    }
    let assigned: Vec<Vec<usize>> = values.iter().map(|v| assign_labels(v, clf.mode)).collect();
    let truth: Vec<BTreeSet<String>> = docs.iter().map(|d| d.categories.clone()).collect();
    let names: Vec<String> = clf.categories.iter().map(|c| c.name.clone()).collect();
    Ok(report_from(evaluate_assignments(&names, &truth, &assigned)?, path, timing_ms))
}
