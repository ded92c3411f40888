use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::ndk_fast::{build_complex_primal, decide_complex_primal, decide_precomputed, precompute_dual};
use crate::svm::{decide_dual, SvmModel};
use crate::veccore::SparseVector;

/// `(tsv key, two-line header)` of every timing column, in table order.
pub const BENCH_COLUMNS: [(&str, &str, &str); 7] = [
    ("ndk_primal", "NDK", "prim."),
    ("ndk_precomputed", "NDK", "prec."),
    ("ndk_dual", "NDK", "dual"),
    ("square", "Squ.", "dual"),
    ("cubic", "Cubic", "dual"),
    ("rbf", "RBF", "dual"),
    ("linear", "Lin.", "dual"),
];

/// Models of one category to be timed on the same probes.
#[derive(Debug, Clone)]
pub struct BenchCategory {
    pub name: String,
    pub ndk: SvmModel,
    pub square: Option<SvmModel>,
    pub cubic: Option<SvmModel>,
    pub rbf: Option<SvmModel>,
    pub linear: Option<SvmModel>,
    pub probes: Vec<SparseVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    /// Median milliseconds to classify all probes, per [`BENCH_COLUMNS`].
    pub ms: Vec<Option<f64>>,
    /// Milliseconds to build the precomputed and primal forms (untimed above).
    pub build_ms: [f64; 2],
}

impl BenchRow {
    /// NDK dual time over NDK primal time.
    pub fn dual_over_primal(&self) -> Option<f64> {
        Some(self.ms[2]? / self.ms[0]?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    /// Column means over the categories.
    pub all: BenchRow,
    pub reps: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median over `reps` timed passes (after one untimed warm-up pass) of the
/// milliseconds `decide` needs for all probes.
pub fn time_path(
    mut decide: impl FnMut(&SparseVector) -> Result<f64>,
    probes: &[SparseVector],
    reps: usize,
) -> Result<f64> {
    let mut sink = 0.0;
    for x in probes {
        sink += decide(x)?;
    }
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        for x in probes {
            sink += decide(black_box(x))?;
        }
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    black_box(sink);
    Ok(median(&mut times))
}

fn dual_time(model: &Option<SvmModel>, probes: &[SparseVector], reps: usize) -> Result<Option<f64>> {
    model
        .as_ref()
        .map(|m| time_path(|x| Ok(decide_dual(m, x)?.value), probes, reps))
        .transpose()
}

/// Times every path of every category on the calling thread. Building the
/// fast NDK forms is measured separately and excluded from the path times.
pub fn bench_predict(categories: &[BenchCategory], reps: usize) -> Result<BenchTable> {
    if reps < 5 {
        return Err(Error::invalid("bench needs at least 5 repetitions"));
    }
    if categories.is_empty() {
        return Err(Error::invalid("nothing to benchmark"));
    }
    let mut rows = Vec::with_capacity(categories.len());
    for cat in categories {
        let t = Instant::now();
        let fm = precompute_dual(&cat.ndk)?;
        let build_pre = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let pm = build_complex_primal(&cat.ndk)?;
        let build_prim = t.elapsed().as_secs_f64() * 1e3;
        let p = &cat.probes;
        let ms = vec![
            Some(time_path(|x| Ok(decide_complex_primal(&pm, x)?.value), p, reps)?),
            Some(time_path(|x| Ok(decide_precomputed(&fm, x)?.value), p, reps)?),
            Some(time_path(|x| Ok(decide_dual(&cat.ndk, x)?.value), p, reps)?),
            dual_time(&cat.square, p, reps)?,
            dual_time(&cat.cubic, p, reps)?,
            dual_time(&cat.rbf, p, reps)?,
            dual_time(&cat.linear, p, reps)?,
        ];
        rows.push(BenchRow {
            name: cat.name.clone(),
            ms,
            build_ms: [build_pre, build_prim],
        });
    }
    let mean = |f: &dyn Fn(&BenchRow) -> Option<f64>| {
        let v: Vec<f64> = rows.iter().filter_map(f).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let all = BenchRow {
        name: "all".into(),
        ms: (0..BENCH_COLUMNS.len()).map(|k| mean(&|r| r.ms[k])).collect(),
        build_ms: [
            mean(&|r| Some(r.build_ms[0])).unwrap_or(0.0),
            mean(&|r| Some(r.build_ms[1])).unwrap_or(0.0),
        ],
    };
    Ok(BenchTable { rows, all, reps })
}

/// `n` random vectors with `round(density * dim)` (at least one) nonzero
/// entries drawn uniformly from `(0, 1]`.
pub fn synthetic_probes(dim: usize, density: f64, n: usize, seed: u64) -> Vec<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nnz = ((density * dim as f64).round() as usize).clamp(1, dim);
    (0..n)
        .map(|_| {
            let idx = rand::seq::index::sample(&mut rng, dim, nnz);
            let pairs = idx.iter().map(|i| (i, 1.0 - rng.random::<f64>())).collect();
            SparseVector::from_pairs(dim, pairs).expect("valid random vector")
        })
        .collect()
}

/// An NDK model with `m` random support vectors and coefficients in
/// `[-1, 1)`, standing in for a trained model of that size.
pub fn synthetic_ndk_model(dim: usize, density: f64, m: usize, kernel: KernelSpec, seed: u64) -> Result<SvmModel> {
    let svs = synthetic_probes(dim, density, m, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let coeffs = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    SvmModel::new(kernel, svs, coeffs, rng.random_range(-1.0..1.0), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }

    #[test]
    fn synthetic_shapes() {
        let p = synthetic_probes(1000, 0.01, 5, 1);
        assert!(p.iter().all(|x| x.nnz() == 10 && x.dim() == 1000));
        assert_eq!(p, synthetic_probes(1000, 0.01, 5, 1));
        let m = synthetic_ndk_model(50, 0.1, 7, KernelSpec::ndk(1.0, 0.0).unwrap(), 2).unwrap();
        assert_eq!(m.n_sv(), 7);
    }

    #[test]
    fn table_has_every_column() {
        let k = KernelSpec::ndk(1.0, 1.0).unwrap();
        let cat = BenchCategory {
            name: "0".into(),
            ndk: synthetic_ndk_model(30, 0.2, 4, k, 3).unwrap(),
            square: Some(synthetic_ndk_model(30, 0.2, 4, KernelSpec::polynomial(1.0, 1.0, 2).unwrap(), 4).unwrap()),
            cubic: None,
            rbf: None,
            linear: Some(synthetic_ndk_model(30, 0.2, 4, KernelSpec::Linear, 5).unwrap()),
            probes: synthetic_probes(30, 0.2, 10, 6),
        };
        let t = bench_predict(&[cat], 5).unwrap();
        assert_eq!(t.all.ms.len(), BENCH_COLUMNS.len());
        assert!(t.all.ms[0].is_some() && t.all.ms[4].is_none());
        assert!(t.rows[0].dual_over_primal().unwrap() > 0.0);
        assert!(bench_predict(&[], 5).is_err());
    }
}
