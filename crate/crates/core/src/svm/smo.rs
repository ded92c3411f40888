//! Pairwise coordinate ascent on the soft-margin dual.
//!
//! The outer loop walks the training points in order and stops at each KKT
//! violator `i`; the partner `j` is drawn at random from a seeded stream. If
//! that pair cannot move, the remaining partners are tried starting from a
//! random offset. After `max_passes` consecutive passes without an update the
//! bias is recomputed from the multipliers and the KKT conditions are checked
//! at the requested tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{decide_dual, SvmModel, TrainingSet};
use crate::error::{Error, Result};
use crate::kernels::{KernelCache, KernelSpec};

/// Multipliers at or below this are not support vectors.
pub const SV_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    /// Box constraint `0 <= alpha <= c`.
    pub c: f64,
    /// KKT tolerance on `y f(x)`.
    pub tol: f64,
    /// Consecutive update-free passes before the solver tries to stop.
    pub max_passes: usize,
    /// Upper bound on pair updates.
    pub max_iters: usize,
    pub seed: u64,
    /// Kernel rows kept in memory.
    pub cache_rows: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            max_iters: 1_000_000,
            seed: 0,
            cache_rows: 4096,
        }
    }
}

impl SmoConfig {
    pub fn with_c(c: f64) -> Self {
        SmoConfig {
            c,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be > 0"));
        }
        if self.max_passes == 0 || self.max_iters == 0 {
            return Err(Error::invalid("max_passes and max_iters must be positive"));
        }
        Ok(())
    }
}

/// Trained model plus the solver state needed to audit it.
#[derive(Debug, Clone)]
pub struct SmoOutcome {
    pub model: SvmModel,
    /// One multiplier per training example, in training order.
    pub alphas: Vec<f64>,
    pub iterations: usize,
    pub dual_objective: f64,
    pub max_kkt_violation: f64,
}

pub fn smo_train(data: &TrainingSet, kernel: &KernelSpec, cfg: &SmoConfig) -> Result<SvmModel> {
    smo_train_detailed(data, kernel, cfg).map(|o| o.model)
}

struct Solver<'a> {
    y: Vec<f64>,
    alpha: Vec<f64>,
    /// `f[k] = sum_l alpha_l y_l K(k, l)`, the decision value without bias.
    f: Vec<f64>,
    b: f64,
    c: f64,
    cache: KernelCache<'a>,
    objective: f64,
}

impl Solver<'_> {
    fn snap(&self, a: f64) -> f64 {
        if a <= SV_THRESHOLD {
            0.0
        } else if a >= self.c - SV_THRESHOLD * self.c.max(1.0) {
            self.c
        } else {
            a
        }
    }

    fn violates(&self, i: usize, tol: f64) -> bool {
        let r = self.y[i] * (self.f[i] + self.b - self.y[i]);
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    fn try_pair(&mut self, i: usize, j: usize, row_i: &[f64]) -> Result<bool> {
        if i == j {
            return Ok(false);
        }
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if hi - lo < 1e-15 {
            return Ok(false);
        }
        let (kii, kjj, kij) = (self.cache.diag(i), self.cache.diag(j), row_i[j]);
        let eta = kii + kjj - 2.0 * kij;
        if eta <= 1e-12 {
            return Ok(false);
        }
        let ei = self.f[i] + self.b - yi;
        let ej = self.f[j] + self.b - yj;
        let aj_new = self.snap((aj + yj * (ei - ej) / eta).clamp(lo, hi));
        if (aj_new - aj).abs() < 1e-12 {
            return Ok(false);
        }
        let ai_new = self.snap((ai + yi * yj * (aj - aj_new)).clamp(0.0, self.c));
        let (di, dj) = (ai_new - ai, aj_new - aj);

        let gi = 1.0 - yi * self.f[i];
        let gj = 1.0 - yj * self.f[j];
        let gain = gi * di + gj * dj
            - 0.5 * (di * di * kii + dj * dj * kjj + 2.0 * di * dj * yi * yj * kij);
        debug_assert!(
            gain >= -1e-9 * (1.0 + (gi * di).abs() + (gj * dj).abs()),
            "dual objective decreased by {gain}"
        );
        self.objective += gain;

        let row_j = self.cache.row(j)?;
        for (k, fk) in self.f.iter_mut().enumerate() {
            *fk += di * yi * row_i[k] + dj * yj * row_j[k];
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;

        let b1 = self.b - ei - yi * di * kii - yj * dj * kij;
        let b2 = self.b - ej - yi * di * kij - yj * dj * kjj;
        self.b = if ai_new > 0.0 && ai_new < self.c {
            b1
        } else if aj_new > 0.0 && aj_new < self.c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        Ok(true)
    }

    /// Mean of `y_i - f_i` over free multipliers; without any, the midpoint of
    /// the interval the bounded multipliers allow.
    fn settled_bias(&self) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for k in 0..self.y.len() {
            let target = self.y[k] - self.f[k];
            let a = self.alpha[k];
            if a > 0.0 && a < self.c {
                sum += target;
                free += 1;
            } else if (a == 0.0) == (self.y[k] > 0.0) {
                lo = lo.max(target);
            } else {
                hi = hi.min(target);
            }
        }
        if free > 0 {
            sum / free as f64
        } else {
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo,
                (false, true) => hi,
                (false, false) => 0.0,
            }
        }
    }

    fn max_violation(&self) -> f64 {
        (0..self.y.len())
            .map(|k| kkt_residual(self.y[k] * (self.f[k] + self.b), self.alpha[k], self.c))
            .fold(0.0, f64::max)
    }

    fn model(&self, data: &TrainingSet, kernel: &KernelSpec) -> Result<SvmModel> {
        let mut svs = Vec::new();
        let mut coeffs = Vec::new();
        for (k, &a) in self.alpha.iter().enumerate() {
            if a > SV_THRESHOLD {
                svs.push(data.vectors()[k].clone());
                coeffs.push(a * self.y[k]);
            }
        }
        SvmModel::new(*kernel, svs, coeffs, self.b, data.dim().unwrap_or(0))
    }
}

/// How far `margin = y f(x)` is from satisfying the KKT condition for `alpha`.
fn kkt_residual(margin: f64, alpha: f64, c: f64) -> f64 {
    if alpha <= SV_THRESHOLD {
        (1.0 - margin).max(0.0)
    } else if alpha >= c - SV_THRESHOLD * c.max(1.0) {
        (margin - 1.0).max(0.0)
    } else {
        (margin - 1.0).abs()
    }
}

pub fn smo_train_detailed(
    data: &TrainingSet,
    kernel: &KernelSpec,
    cfg: &SmoConfig,
) -> Result<SmoOutcome> {
    cfg.validate()?;
    kernel.validate()?;
    data.check_trainable()?;
    let n = data.len();
    let mut s = Solver {
        y: data.labels().iter().map(|&l| f64::from(l)).collect(),
        alpha: vec![0.0; n],
        f: vec![0.0; n],
        b: 0.0,
        c: cfg.c,
        cache: KernelCache::new(*kernel, data.vectors(), cfg.cache_rows)?,
        objective: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Converge to half the tolerance so that re-centring the bias at the end
    // cannot push any point past the full tolerance.
    let inner_tol = 0.5 * cfg.tol;
    let mut iterations = 0usize;
    let mut quiet_passes = 0usize;
    let mut stalled_checks = 0usize;

    loop {
        let mut changed = 0usize;
        for i in 0..n {
            if !s.violates(i, inner_tol) {
                continue;
            }
            let row_i = s.cache.row(i)?;
            let first = loop {
                let j = rng.random_range(0..n);
                if j != i {
                    break j;
                }
            };
            let mut moved = s.try_pair(i, first, &row_i)?;
            if !moved {
                let start = rng.random_range(0..n);
                for off in 0..n {
                    let j = (start + off) % n;
                    if j != first && s.try_pair(i, j, &row_i)? {
                        moved = true;
                        break;
                    }
                }
            }
            if moved {
                changed += 1;
                iterations += 1;
                if iterations >= cfg.max_iters {
                    s.b = s.settled_bias();
                    let violation = s.max_violation();
                    return Err(Error::NotConverged {
                        model: Box::new(s.model(data, kernel)?),
                        diagnostic: format!(
                            "{iterations} pair updates, max KKT violation {violation:.3e} (tol {})",
                            cfg.tol
                        ),
                    });
                }
            }
        }

        if changed > 0 {
            quiet_passes = 0;
            stalled_checks = 0;
            continue;
        }
        quiet_passes += 1;
        if quiet_passes < cfg.max_passes {
            continue;
        }
        s.b = s.settled_bias();
        let violation = s.max_violation();
        if violation <= cfg.tol {
            return Ok(SmoOutcome {
                model: s.model(data, kernel)?,
                alphas: s.alpha,
                iterations,
                dual_objective: s.objective,
                max_kkt_violation: violation,
            });
        }
        stalled_checks += 1;
        if stalled_checks > 2 {
            return Err(Error::NotConverged {
                model: Box::new(s.model(data, kernel)?),
                diagnostic: format!(
                    "no pair can improve the dual but max KKT violation is {violation:.3e} (tol {})",
                    cfg.tol
                ),
            });
        }
        quiet_passes = 0;
    }
}

/// Largest KKT residual of a trained model over its training data, given the
/// multiplier of every training example.
pub fn max_kkt_violation(data: &TrainingSet, model: &SvmModel, alphas: &[f64], c: f64) -> Result<f64> {
    if alphas.len() != data.len() {
        return Err(Error::invalid("one multiplier per training example expected"));
    }
    let mut worst = 0.0f64;
    for ((x, &y), &a) in data.vectors().iter().zip(data.labels()).zip(alphas) {
        let margin = f64::from(y) * decide_dual(model, x)?.value;
        worst = worst.max(kkt_residual(margin, a, c));
    }
    Ok(worst)
}
