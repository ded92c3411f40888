//! wasm-bindgen entry points for `www/index.html`. Points arrive as two
//! coordinate arrays; fields come back row-major, top row first.

pub mod explore;

use wasm_bindgen::prelude::*;

use ndk_core::KernelSpec;

fn points(xs: &[f64], ys: &[f64]) -> Result<Vec<[f64; 2]>, JsError> {
    if xs.len() != ys.len() {
        return Err(JsError::new("x and y arrays differ in length"));
    }
    Ok(xs.iter().zip(ys).map(|(x, y)| [*x, *y]).collect())
}

fn kernel(name: &str, a: f64, c: f64, gamma: f64) -> Result<KernelSpec, ndk_core::Error> {
    match name {
        "linear" => Ok(KernelSpec::Linear),
        "square" => KernelSpec::polynomial(a, c, 2),
        "cubic" => KernelSpec::polynomial(a, c, 3),
        "rbf" => KernelSpec::rbf(gamma),
        _ => KernelSpec::ndk(a, c),
    }
}

fn js(e: ndk_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Field(explore::Field);

#[wasm_bindgen]
impl Field {
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn support(&self) -> Vec<u32> {
        self.0.support.iter().map(|&i| i as u32).collect()
    }

    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.0.accuracy
    }

    #[wasm_bindgen(getter)]
    pub fn bias(&self) -> f64 {
        self.0.bias
    }
}

#[wasm_bindgen(js_name = decisionField)]
#[allow(clippy::too_many_arguments)]
pub fn decision_field(
    xs: &[f64],
    ys: &[f64],
    labels: &[i8],
    kernel_name: &str,
    a: f64,
    c: f64,
    gamma: f64,
    cost: f64,
    n: usize,
) -> Result<Field, JsError> {
    let k = kernel(kernel_name, a, c, gamma).map_err(js)?;
    explore::decision_field(&points(xs, ys)?, labels, k, cost, n)
        .map(Field)
        .map_err(js)
}

/// `[probes, n_sv, label_mismatches, gap_precomputed, gap_primal]`.
#[wasm_bindgen(js_name = pathAgreement)]
pub fn path_agreement(
    xs: &[f64],
    ys: &[f64],
    labels: &[i8],
    a: f64,
    c: f64,
    cost: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    let r = explore::path_agreement(&points(xs, ys)?, labels, a, c, cost, n).map_err(js)?;
    Ok(vec![
        r.probes as f64,
        r.n_sv as f64,
        r.label_mismatches as f64,
        r.max_gap_precomputed,
        r.max_gap_primal,
    ])
}

#[wasm_bindgen(js_name = mahalanobisField)]
pub fn mahalanobis_field(
    var_x: f64,
    var_y: f64,
    corr: f64,
    cx: f64,
    cy: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    explore::mahalanobis_field(var_x, var_y, corr, [cx, cy], n).map_err(js)
}
