//! Closed-form kernel evaluation over sparse vectors.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::veccore::{dot, sq_distance, NdkParams, SparseVector};

/// One kernel family with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `<x1, x2>`
    Linear,
    /// `(a <x1, x2> + c)^degree`
    Polynomial { a: f64, c: f64, degree: u32 },
    /// `exp(-gamma ||x1 - x2||^2)`; the feature map is infinite-dimensional
    /// and never materialized.
    Rbf { gamma: f64 },
    /// `-a ||x1 - x2||^2 + c`
    Ndk(NdkParams),
}

impl KernelSpec {
    pub fn polynomial(a: f64, c: f64, degree: u32) -> Result<Self> {
        let spec = KernelSpec::Polynomial { a, c, degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rbf(gamma: f64) -> Result<Self> {
        let spec = KernelSpec::Rbf { gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ndk(a: f64, c: f64) -> Result<Self> {
        Ok(KernelSpec::Ndk(NdkParams::dual_only(a, c)?))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { a, c, degree } => {
                if degree < 1 {
                    Err(Error::invalid("polynomial degree must be >= 1"))
                } else if !a.is_finite() || !c.is_finite() {
                    Err(Error::invalid("polynomial a and c must be finite"))
                } else {
                    Ok(())
                }
            }
            KernelSpec::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("RBF gamma must be > 0, got {gamma}")))
                }
            }
            KernelSpec::Ndk(p) => NdkParams::dual_only(p.a(), p.c()).map(|_| ()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Ndk(_) => "ndk",
        }
    }

    pub fn ndk_params(&self) -> Option<NdkParams> {
        match self {
            KernelSpec::Ndk(p) => Some(*p),
            _ => None,
        }
    }

    /// `key=value` lines as stored in model files.
    pub fn to_kv_lines(&self) -> Vec<String> {
        let mut out = vec![format!("kernel={}", self.family())];
        match *self {
            KernelSpec::Linear => {}
            KernelSpec::Polynomial { a, c, degree } => {
                out.push(format!("a={a:.16e}"));
                out.push(format!("c={c:.16e}"));
                out.push(format!("degree={degree}"));
            }
            KernelSpec::Rbf { gamma } => out.push(format!("gamma={gamma:.16e}")),
            KernelSpec::Ndk(p) => {
                out.push(format!("a={:.16e}", p.a()));
                out.push(format!("c={:.16e}", p.c()));
            }
        }
        out
    }

    /// Inverse of [`KernelSpec::to_kv_lines`]; `lookup` returns the value for a key.
    pub fn from_kv(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let num = |key: &str| -> Result<f64> {
            let raw = lookup(key).ok_or_else(|| Error::invalid(format!("missing kernel key `{key}`")))?;
            raw.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad number for `{key}`: {raw}")))
        };
        let family = lookup("kernel").ok_or_else(|| Error::invalid("missing `kernel` key"))?;
        let spec = match family.trim() {
            "linear" => KernelSpec::Linear,
            "polynomial" => {
                let raw = lookup("degree").ok_or_else(|| Error::invalid("missing `degree`"))?;
                let degree = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad degree: {raw}")))?;
                KernelSpec::Polynomial {
                    a: num("a")?,
                    c: num("c")?,
                    degree,
                }
            }
            "rbf" => KernelSpec::Rbf { gamma: num("gamma")? },
            "ndk" => KernelSpec::ndk(num("a")?, num("c")?)?,
            other => return Err(Error::invalid(format!("unknown kernel `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { a, c, degree } => write!(f, "poly(a={a},c={c},d={degree})"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
            KernelSpec::Ndk(p) => write!(f, "ndk(a={},c={})", p.a(), p.c()),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x1: &SparseVector, x2: &SparseVector) -> Result<f64> {
    Ok(match *spec {
        KernelSpec::Linear => dot(x1, x2)?,
        KernelSpec::Polynomial { a, c, degree } => {
            (a * dot(x1, x2)? + c).powi(degree as i32)
        }
        KernelSpec::Rbf { gamma } => (-gamma * sq_distance(x1, x2)?).exp(),
        KernelSpec::Ndk(p) => -p.a() * sq_distance(x1, x2)? + p.c(),
    })
}

/// Dense kernel matrix of `points` against themselves.
pub fn kernel_matrix(spec: &KernelSpec, points: &[SparseVector]) -> Result<Vec<Vec<f64>>> {
    let n = points.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = kernel_eval(spec, &points[i], &points[j])?;
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpdReport {
    pub min_quadratic_form: f64,
    pub trials: usize,
}

/// Samples `trials` random real coefficient vectors with zero sum and
/// returns the smallest `sum_jk c_j c_k K(x_j, x_k)` seen.
///
/// A conditionally positive definite kernel never goes below zero here.
pub fn check_cpd(
    spec: &KernelSpec,
    points: &[SparseVector],
    trials: usize,
    seed: u64,
) -> Result<CpdReport> {
    if points.len() < 2 {
        return Err(Error::invalid("check_cpd needs at least two points"));
    }
    let k = kernel_matrix(spec, points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let mut min = f64::INFINITY;
    let mut coeffs = vec![0.0; n];
    for _ in 0..trials {
        for c in coeffs.iter_mut() {
            *c = StandardNormal.sample(&mut rng);
        }
        let mean = coeffs.iter().sum::<f64>() / n as f64;
        coeffs.iter_mut().for_each(|c| *c -= mean);
        min = min.min(quadratic_form(&k, &coeffs));
    }
    Ok(CpdReport {
        min_quadratic_form: min,
        trials,
    })
}

pub fn quadratic_form(k: &[Vec<f64>], coeffs: &[f64]) -> f64 {
    let mut total = 0.0;
    for (row, cj) in k.iter().zip(coeffs) {
        let inner: f64 = row.iter().zip(coeffs).map(|(kjk, ck)| kjk * ck).sum();
        total += cj * inner;
    }
    total
}

/// Kernel rows for a training session, computed on demand and kept in a
/// bounded FIFO cache keyed by row index.
pub struct KernelCache<'a> {
    spec: KernelSpec,
    points: &'a [SparseVector],
    diagonal: Vec<f64>,
    rows: HashMap<usize, Rc<[f64]>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    pub fn new(spec: KernelSpec, points: &'a [SparseVector], capacity: usize) -> Result<Self> {
        let diagonal = points
            .iter()
            .map(|x| kernel_eval(&spec, x, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelCache {
            spec,
            points,
            diagonal,
            rows: HashMap::new(),
            order: VecDeque::new(),
            capacity: capacity.max(2),
        })
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diagonal[i]
    }

    pub fn row(&mut self, i: usize) -> Result<Rc<[f64]>> {
        if let Some(row) = self.rows.get(&i) {
            return Ok(Rc::clone(row));
        }
        let xi = &self.points[i];
        let row: Rc<[f64]> = self
            .points
            .iter()
            .map(|xj| kernel_eval(&self.spec, xi, xj))
            .collect::<Result<Vec<_>>>()?
            .into();
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.order.push_back(i);
        self.rows.insert(i, Rc::clone(&row));
        Ok(row)
    }

    pub fn cached_rows(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(v: &[f64]) -> SparseVector {
        SparseVector::from_dense(v)
    }

    #[test]
    fn eval_examples() {
        let x = dense(&[0.4, -1.0]);
        let ndk = KernelSpec::ndk(1.0, 7.0).unwrap();
        assert_eq!(kernel_eval(&ndk, &x, &x).unwrap(), 7.0);

        let ndk0 = KernelSpec::ndk(1.0, 0.0).unwrap();
        let v = kernel_eval(&ndk0, &dense(&[1.0, 0.0]), &dense(&[0.0, 1.0])).unwrap();
        assert_eq!(v, -2.0);

        let rbf = KernelSpec::rbf(0.5).unwrap();
        assert_eq!(kernel_eval(&rbf, &x, &x).unwrap(), 1.0);

        let poly = KernelSpec::polynomial(1.0, 1.0, 2).unwrap();
        let ones = dense(&[1.0, 1.0]);
        assert_eq!(kernel_eval(&poly, &ones, &ones).unwrap(), 9.0);

        assert!(kernel_eval(&poly, &ones, &dense(&[1.0])).is_err());
    }

    #[test]
    fn validation() {
        assert!(KernelSpec::rbf(0.0).is_err());
        assert!(KernelSpec::polynomial(1.0, 0.0, 0).is_err());
        assert!(KernelSpec::ndk(-1.0, 0.0).is_err());
        assert!(KernelSpec::ndk(1.0, -3.0).is_ok());
    }

    #[test]
    fn kv_round_trip() {
        for spec in [
            KernelSpec::Linear,
            KernelSpec::polynomial(0.5, 1.0, 3).unwrap(),
            KernelSpec::rbf(0.1).unwrap(),
            KernelSpec::ndk(0.3, 1.0 / 3.0).unwrap(),
        ] {
            let lines = spec.to_kv_lines();
            let back = KernelSpec::from_kv(|key| {
                lines.iter().find_map(|l| {
                    let (k, v) = l.split_once('=')?;
                    (k == key).then(|| v.to_string())
                })
            })
            .unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn cpd_two_identical_points() {
        // c = (1, -1) on identical points: K(x,x) - 2K(x,x) + K(x,x) = 0.
        let x = dense(&[0.3, 0.7]);
        let k = kernel_matrix(&KernelSpec::ndk(2.0, 1.0).unwrap(), &[x.clone(), x]).unwrap();
        assert_eq!(quadratic_form(&k, &[1.0, -1.0]), 0.0);
    }

    #[test]
    fn cache_evicts_and_recomputes() {
        let pts: Vec<_> = (0..5).map(|i| dense(&[i as f64, 1.0])).collect();
        let mut cache = KernelCache::new(KernelSpec::Linear, &pts, 2).unwrap();
        let r0 = cache.row(0).unwrap();
        cache.row(1).unwrap();
        cache.row(2).unwrap();
        assert_eq!(cache.cached_rows(), 2);
        assert_eq!(cache.row(0).unwrap(), r0);
        assert_eq!(cache.diag(3), 10.0);
    }
}
