//! Plain computations behind the page. Everything here works on 2-D points
//! in the square `[-1, 1]^2`.

use nalgebra::DMatrix;
use ndk_core::ndk_fast::{
    build_complex_primal, decide_complex_primal, decide_precomputed, precompute_dual, whitening_from_covariance,
};
use ndk_core::svm::{decide_dual, smo_train};
use ndk_core::veccore::{phi_c, mod_scalar_product};
use ndk_core::{KernelSpec, NdkParams, Result, SmoConfig, SparseVector, SvmModel, TrainingSet};

/// `n x n` cell centres over `[-1, 1]^2`, row-major, top row first.
pub fn grid_points(n: usize) -> Vec<[f64; 2]> {
    let h = 2.0 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        let y = 1.0 - (r as f64 + 0.5) * h;
        for c in 0..n {
            out.push([-1.0 + (c as f64 + 0.5) * h, y]);
        }
    }
    out
}

fn vec2(p: [f64; 2]) -> SparseVector {
    SparseVector::from_dense(&p)
}

pub fn train(points: &[[f64; 2]], labels: &[i8], kernel: KernelSpec, cost: f64) -> Result<SvmModel> {
    let data = TrainingSet::new(points.iter().map(|p| vec2(*p)).collect(), labels.to_vec())?;
    smo_train(&data, &kernel, &SmoConfig::with_c(cost))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    /// Indices of the training points that became support vectors.
    pub support: Vec<usize>,
    pub accuracy: f64,
    pub bias: f64,
}

/// Trains on the points and evaluates the decision function on an `n x n`
/// grid.
pub fn decision_field(points: &[[f64; 2]], labels: &[i8], kernel: KernelSpec, cost: f64, n: usize) -> Result<Field> {
    let model = train(points, labels, kernel, cost)?;
    let values = grid_points(n)
        .into_iter()
        .map(|p| Ok(decide_dual(&model, &vec2(p))?.value))
        .collect::<Result<Vec<_>>>()?;
    let support = points
        .iter()
        .enumerate()
        .filter(|(_, p)| model.support_vectors().contains(&vec2(**p)))
        .map(|(i, _)| i)
        .collect();
    let hits = points
        .iter()
        .zip(labels)
        .filter(|(p, y)| decide_dual(&model, &vec2(**p)).map(|d| d.label == **y).unwrap_or(false))
        .count();
    Ok(Field {
        values,
        support,
        accuracy: hits as f64 / points.len() as f64,
        bias: model.bias(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub probes: usize,
    pub n_sv: usize,
    pub label_mismatches: usize,
    pub max_gap_precomputed: f64,
    pub max_gap_primal: f64,
}

/// Trains an NDK model and compares the three decision routes on every
/// cell of an `n x n` grid.
pub fn path_agreement(points: &[[f64; 2]], labels: &[i8], a: f64, c: f64, cost: f64, n: usize) -> Result<Agreement> {
    let model = train(points, labels, KernelSpec::ndk(a, c)?, cost)?;
    let fm = precompute_dual(&model)?;
    let pm = build_complex_primal(&model)?;
    let probes: Vec<SparseVector> = grid_points(n).into_iter().map(vec2).collect();
    let dual = probes.iter().map(|x| decide_dual(&model, x)).collect::<Result<Vec<_>>>()?;
    let pre = probes.iter().map(|x| decide_precomputed(&fm, x)).collect::<Result<Vec<_>>>()?;
    let prim = probes.iter().map(|x| decide_complex_primal(&pm, x)).collect::<Result<Vec<_>>>()?;
    let mut out = Agreement {
        probes: probes.len(),
        n_sv: model.n_sv(),
        label_mismatches: 0,
        max_gap_precomputed: 0.0,
        max_gap_primal: 0.0,
    };
    for ((d, p), q) in dual.iter().zip(&pre).zip(&prim) {
        if d.label != p.label || d.label != q.label {
            out.label_mismatches += 1;
        }
        out.max_gap_precomputed = out.max_gap_precomputed.max((d.value - p.value).abs());
        out.max_gap_primal = out.max_gap_primal.max((d.value - q.value).abs());
    }
    Ok(out)
}

/// `<*phi_c(C x), phi_c(C z)>` for every grid cell `x`, where `C` whitens the
/// covariance `[[var_x, r], [r, var_y]]` with `r = corr * sqrt(var_x var_y)`.
pub fn mahalanobis_field(var_x: f64, var_y: f64, corr: f64, centre: [f64; 2], n: usize) -> Result<Vec<f64>> {
    let r = corr * (var_x * var_y).sqrt();
    let cov = DMatrix::from_row_slice(2, 2, &[var_x, r, r, var_y]);
    let w = whitening_from_covariance(&cov, 0.0)?;
    let unit = NdkParams::new(1.0, 0.0)?;
    let z = phi_c(&w.apply(&vec2(centre))?, &unit)?;
    grid_points(n)
        .into_iter()
        .map(|p| Ok(mod_scalar_product(&phi_c(&w.apply(&vec2(p))?, &unit)?, &z)?.re))
        .collect()
}
