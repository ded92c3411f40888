use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndk_core::evalbench::{
    balance_oversample, bench_predict, category_histogram, category_training_set, default_c_grid, default_grid,
    evaluate, f_score_table, grid_search, max_positive_ratio, precision_recall_table, synthetic_ndk_model,
    synthetic_probes, timing_table, train_one_vs_rest, tune_bias, tune_classifier, AssignmentMode, BenchCategory,
    CategoryModel, GridPoint, MultiLabelClassifier, PredictPath,
};
use ndk_core::format::{save_model, save_sparse, to_training_set, ModelFile, SparseRecord};
use ndk_core::svm::smo_train;
use ndk_core::textfeat::{Corpus, FeatureMode, FeatureSpace, TextPipeline};
use ndk_core::{Error, KernelSpec, Result, SvmModel, TrainingSet};

use crate::args::{
    parse_fractions, parse_list, BenchArgs, EvalArgs, FeaturizeArgs, GridArgs, HistogramArgs, PredictArgs, TrainArgs,
};
use crate::data::{binary_records, load_docs, load_model_dir, save_model_dir};

const SPLITS: [&str; 3] = ["train", "val", "test"];

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<out>.{train,val,test}.svm` (or per-category directories
/// `<out>.<split>/` in gmean mode), `<out>.{train,val,test}.ids`,
/// `<out>.vocab.tsv` and `<out>.categories.txt`.
pub fn featurize(a: &FeaturizeArgs, out: &mut dyn Write) -> Result<()> {
    let mode: FeatureMode = a.mode.parse()?;
    let fractions = parse_fractions(&a.split)?;
    let pipeline = match &a.stopwords {
        Some(p) => TextPipeline::from_stopword_file(p)?,
        None => TextPipeline::default(),
    };
    let corpus = Corpus::load(&a.corpus, &a.labels, a.none_category)?;
    let names = corpus.categories();
    let splits = corpus.split(fractions, a.seed)?;
    let space = FeatureSpace::fit(&splits[0], &names, pipeline, mode)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }

    writeln!(out, "split\tdocs\tdim")?;
    for (split, docs) in SPLITS.iter().zip(&splits) {
        let vectors = docs
            .iter()
            .map(|d| space.vectorize(&d.text))
            .collect::<Result<Vec<_>>>()?;
        let label = |i: usize| docs[i].categories.iter().cloned().collect::<Vec<_>>().join(",");
        match mode {
            FeatureMode::TfidfOnly => {
                let records: Vec<SparseRecord> = vectors
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        Ok(SparseRecord {
                            label: label(i),
                            vector: v.for_category(0)?.clone(),
                        })
                    })
                    .collect::<Result<_>>()?;
                save_sparse(with_suffix(&a.out, &format!(".{split}.svm")), &records, space.dim())?;
            }
            FeatureMode::GeometricMean => {
                let dir = with_suffix(&a.out, &format!(".{split}"));
                fs::create_dir_all(&dir)?;
                for (c, name) in names.iter().enumerate() {
                    let records: Vec<SparseRecord> = vectors
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            Ok(SparseRecord {
                                label: label(i),
                                vector: v.for_category(c)?.clone(),
                            })
                        })
                        .collect::<Result<_>>()?;
                    save_sparse(dir.join(format!("{name}.svm")), &records, space.dim())?;
                }
            }
        }
        let ids: String = docs.iter().map(|d| format!("{}\n", d.id)).collect();
        fs::write(with_suffix(&a.out, &format!(".{split}.ids")), ids)?;
        writeln!(out, "{split}\t{}\t{}", docs.len(), space.dim())?;
    }
    space
        .vocab
        .write(std::io::BufWriter::new(fs::File::create(with_suffix(&a.out, ".vocab.tsv"))?))?;
    fs::write(
        with_suffix(&a.out, ".categories.txt"),
        names.iter().map(|n| format!("{n}\n")).collect::<String>(),
    )?;
    Ok(())
}

fn oversample_sets(sets: Vec<TrainingSet>, target: Option<f64>, seed: u64) -> Result<Vec<TrainingSet>> {
    let target = target.unwrap_or_else(|| max_positive_ratio(&sets));
    sets.iter()
        .enumerate()
        .map(|(i, s)| balance_oversample(s, target, seed.wrapping_add(i as u64)))
        .collect()
}

pub fn train(a: &TrainArgs, workers: usize, out: &mut dyn Write) -> Result<()> {
    let kernel = a.kernel.spec()?;
    let cfg = a.smo.config();
    writeln!(out, "category\tn_sv\tbias")?;

    if let Some(dir) = &a.out_dir {
        let (names, docs) = load_docs(&a.data, None)?;
        let mut sets = names
            .iter()
            .enumerate()
            .map(|(i, n)| category_training_set(&docs, i, n))
            .collect::<Result<Vec<_>>>()?;
        if a.oversample {
            sets = oversample_sets(sets, a.target_ratio, cfg.seed)?;
        }
        let models = train_one_vs_rest(&names, &sets, &[kernel], &cfg, workers)?;
        let mut clf = MultiLabelClassifier::new(models, AssignmentMode::ArgmaxFallback)?;
        clf.build_fast()?;
        if let Some(heldout) = &a.tune_on {
            let (_, val) = load_docs(heldout, Some(&names))?;
            let path = if kernel.ndk_params().is_some() {
                PredictPath::Precomputed
            } else {
                PredictPath::Dual
            };
            tune_classifier(&mut clf, &val, path)?;
        }
        save_model_dir(dir, &clf.categories)?;
        for cm in &clf.categories {
            writeln!(out, "{}\t{}\t{}", cm.name, cm.model.n_sv(), cm.model.bias())?;
        }
        return Ok(());
    }

    let target = a.out.as_ref().expect("clap requires --out or --out-dir");
    let records = binary_records(&a.data, a.category.as_deref())?;
    let mut data = to_training_set(&records, a.category.as_deref())?;
    if a.oversample {
        data = oversample_sets(vec![data], a.target_ratio, cfg.seed)?.remove(0);
    }
    let (model, failure) = match smo_train(&data, &kernel, &cfg) {
        Ok(m) => (m, None),
        Err(Error::NotConverged { model, diagnostic }) => {
            let m = (*model).clone();
            (m, Some(Error::NotConverged { model, diagnostic }))
        }
        Err(e) => return Err(e),
    };
    let mut cm = CategoryModel::new(a.category.clone().unwrap_or_else(|| "+1".into()), model);
    cm.build_fast()?;
    if let Some(heldout) = &a.tune_on {
        let held = to_training_set(&binary_records(heldout, a.category.as_deref())?, a.category.as_deref())?;
        cm.set_bias(tune_bias(&cm.model, &held)?.bias);
    }
    save_model(
        target,
        &ModelFile {
            model: cm.model.clone(),
            precomputed: cm.precomputed.clone(),
            primal: cm.primal.clone(),
        },
    )?;
    writeln!(out, "{}\t{}\t{}", cm.name, cm.model.n_sv(), cm.model.bias())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn ensure_path(cm: &mut CategoryModel, path: PredictPath) -> Result<()> {
    let missing = match path {
        PredictPath::Dual => false,
        PredictPath::Precomputed => cm.precomputed.is_none(),
        PredictPath::Primal => cm.primal.is_none(),
    };
    if missing && cm.model.kernel().ndk_params().is_some() {
        cm.build_fast()?;
        if path == PredictPath::Primal && cm.primal.is_none() {
            // c < 0 has no primal form
            ndk_core::ndk_fast::build_complex_primal(&cm.model)?;
        }
    }
    Ok(())
}

pub fn predict(a: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let path: PredictPath = a.path.parse()?;
    let file = ndk_core::format::load_model(&a.model)?;
    let mut cm = CategoryModel {
        name: a.category.clone().unwrap_or_default(),
        model: file.model,
        precomputed: file.precomputed,
        primal: file.primal,
    };
    ensure_path(&mut cm, path)?;
    let records = binary_records(&a.input, a.category.as_deref())?;
    writeln!(out, "row\tvalue\tlabel")?;
    for (i, r) in records.iter().enumerate() {
        let v = cm.decide(&r.vector, path)?;
        writeln!(out, "{}\t{v}\t{}", i + 1, ndk_core::sgn(v))?;
    }
    Ok(())
}

fn kernel_label(model: &SvmModel) -> &'static str {
    match model.kernel() {
        KernelSpec::Linear => "Linear",
        KernelSpec::Polynomial { degree: 2, .. } => "Square",
        KernelSpec::Polynomial { degree: 3, .. } => "Cubic",
        KernelSpec::Polynomial { .. } => "Poly",
        KernelSpec::Rbf { .. } => "RBF",
        KernelSpec::Ndk(_) => "NDK",
    }
}

pub fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let path: PredictPath = a.path.parse()?;
    let mode: AssignmentMode = a.mode.parse()?;
    let mut models = load_model_dir(&a.models)?;
    for cm in &mut models {
        ensure_path(cm, path)?;
    }
    let clf = MultiLabelClassifier::new(models, mode)?;
    let names: Vec<String> = clf.names().iter().map(|s| s.to_string()).collect();
    let (_, docs) = load_docs(&a.data, Some(&names))?;
    let report = evaluate(&clf, &docs, path)?;
    if a.text {
        let label = kernel_label(&clf.categories[0].model);
        write!(out, "{}", precision_recall_table(&[(label, &report)]).to_text())?;
        writeln!(out)?;
        write!(out, "{}", f_score_table(&[(label, &report)]).to_text())?;
        return Ok(());
    }
    writeln!(out, "category\tprecision\trecall\tf1\ttp\tfp\tfn\ttime_ms")?;
    for (m, ms) in report.per_category.iter().zip(&report.timing_ms) {
        let c = m.confusion;
        writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{ms:.3}",
            m.name, m.precision, m.recall, m.f1, c.tp, c.fp, c.fn_
        )?;
    }
    writeln!(
        out,
        "macro\t{:.6}\t{:.6}\t{:.6}\t\t\t\t{:.3}",
        report.macro_precision,
        report.macro_recall,
        report.macro_f1,
        report.total_ms()
    )?;
    Ok(())
}

fn optional_dir(root: &Path, kernel: &str, names: &[String]) -> Result<Vec<Option<SvmModel>>> {
    let dir = root.join(kernel);
    if !dir.is_dir() {
        return Ok(vec![None; names.len()]);
    }
    let models = load_model_dir(&dir)?;
    Ok(names
        .iter()
        .map(|n| models.iter().find(|m| &m.name == n).map(|m| m.model.clone()))
        .collect())
}

pub fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cats: Vec<BenchCategory> = if a.synthetic {
        let n = a.categories.max(1);
        let gamma = 1.0 / (a.density * a.dim as f64).max(1.0);
        (0..n)
            .map(|k| {
                let seed = a.seed.wrapping_add(10 * k as u64);
                let model = |spec: KernelSpec, s: u64| synthetic_ndk_model(a.dim, a.density, a.m, spec, seed + s);
                Ok(BenchCategory {
                    name: k.to_string(),
                    ndk: model(KernelSpec::ndk(1.0, 1.0)?, 0)?,
                    square: Some(model(KernelSpec::polynomial(1.0, 1.0, 2)?, 1)?),
                    cubic: Some(model(KernelSpec::polynomial(1.0, 1.0, 3)?, 2)?),
                    rbf: Some(model(KernelSpec::rbf(gamma)?, 3)?),
                    linear: Some(model(KernelSpec::Linear, 4)?),
                    probes: synthetic_probes(a.dim, a.density, a.probes, seed + 5),
                })
            })
            .collect::<Result<_>>()?
    } else {
        let root = a.models.as_ref().expect("clap requires --models or --synthetic");
        let data = a
            .data
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--models needs --data with probe vectors".into()))?;
        let ndk = load_model_dir(&root.join("ndk"))?;
        let names: Vec<String> = ndk.iter().map(|m| m.name.clone()).collect();
        let (_, docs) = load_docs(data, Some(&names))?;
        let mut square = optional_dir(root, "square", &names)?;
        let mut cubic = optional_dir(root, "cubic", &names)?;
        let mut rbf = optional_dir(root, "rbf", &names)?;
        let mut linear = optional_dir(root, "linear", &names)?;
        ndk.into_iter()
            .enumerate()
            .map(|(i, cm)| {
                Ok(BenchCategory {
                    name: cm.name,
                    ndk: cm.model,
                    square: square[i].take(),
                    cubic: cubic[i].take(),
                    rbf: rbf[i].take(),
                    linear: linear[i].take(),
                    probes: docs
                        .iter()
                        .map(|d| d.vectors.for_category(i).cloned())
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?
    };
    let table = bench_predict(&cats, a.reps)?;
    let t = timing_table(&table);
    write!(out, "{}", if a.text { t.to_text() } else { t.to_tsv() })?;
    if let Some(r) = table.all.dual_over_primal() {
        eprintln!("dual/primal time ratio (all): {r:.2}");
    }
    Ok(())
}

pub fn gridsearch(a: &GridArgs, workers: usize, out: &mut dyn Write) -> Result<serde_json::Value> {
    let mode: AssignmentMode = a.mode.parse()?;
    let (names, train) = load_docs(&a.train, None)?;
    let (_, val) = load_docs(&a.validation, Some(&names))?;
    let mut sets = names
        .iter()
        .enumerate()
        .map(|(i, n)| category_training_set(&train, i, n))
        .collect::<Result<Vec<_>>>()?;
    if a.oversample {
        sets = oversample_sets(sets, None, a.seed)?;
    }
    let mut grid = default_grid(&a.family)?;
    if let Some(list) = &a.cost {
        let cs = parse_list(list)?;
        let per_kernel = default_c_grid().len();
        grid = grid
            .iter()
            .step_by(per_kernel)
            .flat_map(|p| cs.iter().map(|&c| GridPoint { kernel: p.kernel, c }))
            .collect();
    }
    let base = ndk_core::SmoConfig {
        tol: a.tol,
        seed: a.seed,
        ..Default::default()
    };
    let report = grid_search(&names, &sets, &val, &grid, &base, mode, workers)?;
    writeln!(out, "kernel\tC\tmacro_f1\terror")?;
    for r in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.point.kernel,
            r.point.c,
            r.macro_f1.map_or("-".into(), |f| format!("{f:.6}")),
            r.error.as_deref().unwrap_or("")
        )?;
    }
    let best = report.best_point();
    eprintln!("best: {} C={} macro-F1 {:.4}", best.kernel, best.c, report.best_f1());
    Ok(serde_json::json!({
        "best": {
            "kernel": best.kernel.to_kv_lines(),
            "C": best.c,
            "macro_f1": report.best_f1(),
        },
        "rows": report.rows.iter().map(|r| serde_json::json!({
            "kernel": r.point.kernel.to_string(),
            "C": r.point.c,
            "macro_f1": r.macro_f1,
            "error": r.error,
        })).collect::<Vec<_>>(),
    }))
}

pub fn histogram(a: &HistogramArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = Corpus::load(&a.corpus, &a.labels, a.none_category)?;
    write!(out, "{}", category_histogram(&corpus).to_tsv())?;
    Ok(())
}
