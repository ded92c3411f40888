use num_complex::Complex64;

use super::sparse::{check_dims, for_each_union, SparseVector};
use crate::error::{Error, Result};

/// Scale `a > 0` and offset `c` of the NDK `-a * ||x1 - x2||^2 + c`.
///
/// [`NdkParams::new`] requires `c >= 0` so that the last component of the
/// complex feature map, `sqrt(c)`, is real. [`NdkParams::dual_only`] admits a
/// negative offset; such parameters work for every dual-form evaluation but
/// are rejected by anything that materializes the feature map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdkParams {
    a: f64,
    c: f64,
}

impl NdkParams {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::NegativeOffset(c));
        }
        Self::dual_only(a, c)
    }

    pub fn dual_only(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("NDK scale a must be > 0, got {a}")));
        }
        if !c.is_finite() {
            return Err(Error::invalid(format!("NDK offset c must be finite, got {c}")));
        }
        Ok(NdkParams { a, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sqrt_c(&self) -> Result<f64> {
        if self.c < 0.0 {
            Err(Error::NegativeOffset(self.c))
        } else {
            Ok(self.c.sqrt())
        }
    }
}

/// Fixed-length complex vector, stored as interleaved `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn zeros(len: usize) -> Self {
        ComplexVector(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_components(components: Vec<Complex64>) -> Self {
        ComplexVector(components)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn add(&self, other: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.len(), other.len())?;
        Ok(ComplexVector(
            self.0.iter().zip(&other.0).map(|(u, v)| u + v).collect(),
        ))
    }
}

/// Non-conjugating product `<*u, v> = sum_k u_k * v_k`.
///
/// Bilinear and symmetric, but not positive definite: the all-`i` vector has
/// `<*v, v> = -len`.
pub fn mod_scalar_product(u: &ComplexVector, v: &ComplexVector) -> Result<Complex64> {
    check_dims(u.len(), v.len())?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (a, b) in u.0.iter().zip(&v.0) {
        sum += a * b;
    }
    Ok(sum)
}

/// Feature map of one real component:
/// `(sqrt(a)(x^2 - 1), sqrt(a) i, sqrt(2a) x, sqrt(a) i x^2)`.
pub fn phi_component(x: f64, params: &NdkParams) -> [Complex64; 4] {
    let sa = params.a.sqrt();
    let x2 = x * x;
    [
        Complex64::new(sa * (x2 - 1.0), 0.0),
        Complex64::new(0.0, sa),
        Complex64::new((2.0 * params.a).sqrt() * x, 0.0),
        Complex64::new(0.0, sa * x2),
    ]
}

/// `<*phi(u), phi(v)>` for one pair of components, built blockwise without
/// allocating. Equals `-a (u - v)^2`.
pub fn phi_component_product(u: f64, v: f64, params: &NdkParams) -> Complex64 {
    let pu = phi_component(u, params);
    let pv = phi_component(v, params);
    pu[0] * pv[0] + pu[1] * pv[1] + pu[2] * pv[2] + pu[3] * pv[3]
}

/// The full map `R^n -> C^(4n+1)`: the blocks `phi(x_k)` for every
/// component (zeros included) followed by `sqrt(c)`.
pub fn phi_c(x: &SparseVector, params: &NdkParams) -> Result<ComplexVector> {
    let sqrt_c = params.sqrt_c()?;
    let mut out = Vec::with_capacity(4 * x.dim() + 1);
    let zero_block = phi_component(0.0, params);
    let mut next = 0;
    for (i, v) in x.iter() {
        for _ in next..i {
            out.extend_from_slice(&zero_block);
        }
        out.extend_from_slice(&phi_component(v, params));
        next = i + 1;
    }
    for _ in next..x.dim() {
        out.extend_from_slice(&zero_block);
    }
    out.push(Complex64::new(sqrt_c, 0.0));
    Ok(ComplexVector(out))
}

/// `<*phi_c(x1), phi_c(x2)>` evaluated over the union of the two supports.
///
/// Blocks where both components are zero contribute exactly zero, but a
/// block where only one side is zero contributes `-a x^2`, so the
/// intersection used by the ordinary sparse dot product is not enough.
pub fn sparse_mod_product(x1: &SparseVector, x2: &SparseVector, params: &NdkParams) -> Result<f64> {
    check_dims(x1.dim(), x2.dim())?;
    let mut sum = 0.0;
    for_each_union(x1, x2, |_, u, v| {
        sum += phi_component_product(u, v, params).re;
    });
    Ok(sum + params.c)
}
