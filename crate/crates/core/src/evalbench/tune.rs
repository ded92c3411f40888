use super::metrics::Confusion;
use super::multilabel::{LabeledDoc, MultiLabelClassifier, PredictPath};
use crate::error::{Error, Result};
use crate::svm::{decide_dual, SvmModel, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOutcome {
    pub bias: f64,
    pub f1_before: f64,
    pub f1_after: f64,
}

fn f1_at(scores: &[f64], labels: &[i8], bias: f64) -> f64 {
    let mut c = Confusion::default();
    for (s, y) in scores.iter().zip(labels) {
        c.add(*y > 0, s + bias >= 0.0);
    }
    c.f1()
}

/// Picks the bias maximizing F1 on held-out data, given the bias-free
/// scores. Candidates put the threshold below all scores, above all scores,
/// or midway between two consecutive distinct scores; together they realize
/// every achievable labelling. Ties go to the candidate nearest `original`,
/// which is kept when nothing beats it. Without held-out positives every
/// candidate scores 0 and the bias is set so that nothing is positive.
pub fn tune_bias_scores(scores: &[f64], labels: &[i8], original: f64) -> Result<TuneOutcome> {
    if scores.is_empty() {
        return Err(Error::invalid("bias tuning needs held-out data"));
    }
    if scores.len() != labels.len() {
        return Err(Error::invalid("one label per score expected"));
    }
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut thresholds = Vec::with_capacity(sorted.len() + 1);
    thresholds.push(sorted[0] - 1.0);
    thresholds.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    thresholds.push(sorted[sorted.len() - 1] + 1.0);

    let f1_before = f1_at(scores, labels, original);
    if labels.iter().all(|y| *y <= 0) {
        return Ok(TuneOutcome {
            bias: -(sorted[sorted.len() - 1] + 1.0),
            f1_before,
            f1_after: 0.0,
        });
    }
    let mut best = TuneOutcome {
        bias: original,
        f1_before,
        f1_after: f1_before,
    };
    for t in thresholds {
        let b = -t;
        let f = f1_at(scores, labels, b);
        if f > best.f1_after || (f == best.f1_after && (b - original).abs() < (best.bias - original).abs()) {
            best.bias = b;
            best.f1_after = f;
        }
    }
    Ok(best)
}

/// Retunes the bias of a dual model on held-out data.
pub fn tune_bias(model: &SvmModel, heldout: &TrainingSet) -> Result<TuneOutcome> {
    let b0 = model.bias();
    let scores = heldout
        .vectors()
        .iter()
        .map(|x| Ok(decide_dual(model, x)?.value - b0))
        .collect::<Result<Vec<_>>>()?;
    tune_bias_scores(&scores, heldout.labels(), b0)
}

/// Tunes every category's bias independently on held-out documents,
/// updating the fast forms as well.
pub fn tune_classifier(
    clf: &mut MultiLabelClassifier,
    heldout: &[LabeledDoc],
    path: PredictPath,
) -> Result<Vec<TuneOutcome>> {
    let mut out = Vec::with_capacity(clf.categories.len());
    for (i, cm) in clf.categories.iter_mut().enumerate() {
        let b0 = cm.model.bias();
        let mut scores = Vec::with_capacity(heldout.len());
        let mut labels = Vec::with_capacity(heldout.len());
        for d in heldout {
            scores.push(cm.decide(d.vectors.for_category(i)?, path)? - b0);
            labels.push(if d.categories.contains(&cm.name) { 1 } else { -1 });
        }
        let t = tune_bias_scores(&scores, &labels, b0)?;
        cm.set_bias(t.bias);
        out.push(t);
    }
    Ok(out)
}
