use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::svm::TrainingSet;

/// Largest positive fraction over the given per-category data.
pub fn max_positive_ratio(sets: &[TrainingSet]) -> f64 {
    sets.iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.positives() as f64 / s.len() as f64)
        .fold(0.0, f64::max)
}

/// Smallest positive count `p` with `p / (p + negatives) >= target`.
pub fn required_positives(negatives: usize, target: f64) -> Result<usize> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!("target ratio must lie in (0, 1), got {target}")));
    }
    let exact = target * negatives as f64 / (1.0 - target);
    Ok((exact - 1e-9).ceil().max(0.0) as usize)
}

/// Appends positives drawn with replacement (seeded) until the positive
/// fraction reaches `target`. Existing examples keep their order; data
/// already at or above the target is returned unchanged.
pub fn balance_oversample(data: &TrainingSet, target: f64, seed: u64) -> Result<TrainingSet> {
    let pos: Vec<usize> = (0..data.len()).filter(|&i| data.labels()[i] > 0).collect();
    if pos.is_empty() {
        return Err(Error::invalid("cannot oversample without positive examples"));
    }
    let need = required_positives(data.len() - pos.len(), target)?;
    let mut vectors = data.vectors().to_vec();
    let mut labels = data.labels().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in pos.len()..need {
        let j = pos[rng.random_range(0..pos.len())];
        vectors.push(data.vectors()[j].clone());
        labels.push(1);
    }
    TrainingSet::new(vectors, labels)
}
