use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ndk_core::format::{load_model, load_sparse};
use ndk_core::svm::{decide_dual, smo_train, SmoConfig};
use ndk_core::textfeat::synthetic_corpus;
use ndk_core::KernelSpec;
use tempfile::TempDir;

fn ndk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndk")).args(args).output().expect("run ndk")
}

fn ok(args: &[&str]) -> String {
    let out = ndk(args);
    assert!(
        out.status.success(),
        "ndk {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_corpus(dir: &Path, docs: &[(&str, &str, &str)]) -> (PathBuf, PathBuf) {
    let texts = dir.join("texts");
    fs::create_dir_all(&texts).unwrap();
    let mut labels = String::new();
    for (id, text, cats) in docs {
        fs::write(texts.join(format!("{id}.txt")), text).unwrap();
        labels.push_str(&format!("{id}\t{cats}\n"));
    }
    let labels_path = dir.join("labels.tsv");
    fs::write(&labels_path, labels).unwrap();
    (texts, labels_path)
}

fn synthetic_files(dir: &Path, n: usize) -> (PathBuf, PathBuf) {
    let corpus = synthetic_corpus(n, 3, 5);
    let docs: Vec<(String, String, String)> = corpus
        .documents
        .iter()
        .map(|d| (d.id.clone(), d.text.clone(), d.categories.iter().cloned().collect::<Vec<_>>().join(",")))
        .collect();
    let refs: Vec<(&str, &str, &str)> = docs.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    write_corpus(dir, &refs)
}

const TOY: [(&str, &str, &str); 4] = [
    ("d1", "apple banana apple", "fruit"),
    ("d2", "banana cherry", "fruit"),
    ("d3", "dog cat", "animal"),
    ("d4", "dog eel", "animal"),
];

#[test]
fn featurize_matches_hand_computed_tfidf() {
    let tmp = TempDir::new().unwrap();
    let (texts, labels) = write_corpus(tmp.path(), &TOY);
    let prefix = tmp.path().join("out/toy");
    ok(&[
        "featurize", "--corpus", s(&texts), "--labels", s(&labels), "--out", s(&prefix),
        "--mode", "tfidf", "--split", "1,0,0",
    ]);
    let records = load_sparse(prefix.with_file_name("toy.train.svm")).unwrap();
    let ids = fs::read_to_string(prefix.with_file_name("toy.train.ids")).unwrap();
    let row = ids.lines().position(|l| l == "d1").unwrap();
    let x = &records[row].vector;
    assert_eq!(records[row].label, "fruit");
    assert_eq!(x.indices(), &[0, 1]);
    assert!((x.get(0) - 4.0 / 17f64.sqrt()).abs() < 1e-10);
    assert!((x.get(1) - 1.0 / 17f64.sqrt()).abs() < 1e-10);
    let vocab = fs::read_to_string(prefix.with_file_name("toy.vocab.tsv")).unwrap();
    assert!(vocab.contains("apple\t0\t1\n") && vocab.contains("dog\t4\t2\n"));
    assert!(prefix.with_file_name("toy.config.json").is_file());
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn featurize_is_byte_stable() {
    let tmp = TempDir::new().unwrap();
    let (texts, labels) = synthetic_files(tmp.path(), 60);
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        ok(&[
            "featurize", "--corpus", s(&texts), "--labels", s(&labels), "--out", s(&dir.join("f")), "--seed", "3",
        ]);
        dir
    };
    let (a, b) = (run("a"), run("b"));
    let fa = files_under(&a);
    assert!(fa.len() > 5);
    for f in fa {
        if f.ends_with("f.config.json") {
            continue;
        }
        let g = b.join(f.strip_prefix(&a).unwrap());
        assert_eq!(fs::read(&f).unwrap(), fs::read(&g).unwrap(), "{}", f.display());
    }
}

fn toy_binary(dir: &Path) -> PathBuf {
    let path = dir.join("toy.svm");
    fs::write(
        &path,
        "# dim=3\n+1 1:1 2:0.5\n+1 1:0.8 3:0.2\n+1 1:1.2 2:1\n-1 2:-1\n-1 3:1 2:-0.3\n-1 1:-0.5 3:0.7\n",
    )
    .unwrap();
    path
}

fn parse_predictions(text: &str) -> Vec<(f64, i8)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn train_predict_round_trip() {
    let tmp = TempDir::new().unwrap();
    let data = toy_binary(tmp.path());
    let model = tmp.path().join("m.model");
    ok(&[
        "train", "--data", s(&data), "--out", s(&model), "--kernel", "ndk", "--a", "0.5", "--c", "2", "--C", "10",
    ]);
    assert!(tmp.path().join("m.model.config.json").is_file());
    let dual = parse_predictions(&ok(&["predict", "--model", s(&model), "--input", s(&data), "--path", "dual"]));

    let records = load_sparse(&data).unwrap();
    let set = ndk_core::format::to_training_set(&records, None).unwrap();
    let cfg = SmoConfig { c: 10.0, ..SmoConfig::default() };
    let in_process = smo_train(&set, &KernelSpec::ndk(0.5, 2.0).unwrap(), &cfg).unwrap();
    assert_eq!(load_model(&model).unwrap().model, in_process);
    for (r, (v, label)) in records.iter().zip(&dual) {
        let d = decide_dual(&in_process, &r.vector).unwrap();
        assert_eq!(*v, d.value);
        assert_eq!(*label, d.label);
    }

    for path in ["primal", "precomputed"] {
        let other = parse_predictions(&ok(&["predict", "--model", s(&model), "--input", s(&data), "--path", path]));
        let labels: Vec<i8> = other.iter().map(|p| p.1).collect();
        assert_eq!(labels, dual.iter().map(|p| p.1).collect::<Vec<_>>(), "{path}");
        for (a, b) in other.iter().zip(&dual) {
            assert!((a.0 - b.0).abs() <= 1e-8 * b.0.abs().max(1.0));
        }
    }
}

#[test]
fn bench_emits_every_column() {
    let out = ok(&[
        "bench", "--synthetic", "--dim", "200", "--density", "0.05", "--m", "20", "--probes", "20", "--reps", "5",
    ]);
    let header: Vec<&str> = out.lines().next().unwrap().split('\t').collect();
    for col in ["NDK prim.", "NDK dual", "Squ. dual", "Cubic dual", "RBF dual", "Lin. dual"] {
        assert!(header.contains(&col), "{col} missing from {header:?}");
    }
    let all: Vec<&str> = out.lines().last().unwrap().split('\t').collect();
    assert_eq!(all[0], "all");
    assert!(all[1..7].iter().all(|v| v.parse::<f64>().is_ok()));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let texts = tmp.path().join("texts");
    fs::create_dir_all(&texts).unwrap();
    let missing = tmp.path().join("nope.tsv");
    let out = ndk(&["featurize", "--corpus", s(&texts), "--labels", s(&missing), "--out", s(&tmp.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let bad = tmp.path().join("bad.tsv");
    fs::write(&bad, "d1\tfruit\n\tfruit\n").unwrap();
    fs::write(texts.join("d1.txt"), "apple").unwrap();
    let out = ndk(&["featurize", "--corpus", s(&texts), "--labels", s(&bad), "--out", s(&tmp.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(ndk(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(ndk(&["predict", "--model", "m", "--input", "x", "--path", "fast"]).status.code(), Some(1));

    // negative offset has no primal form
    let data = toy_binary(tmp.path());
    let model = tmp.path().join("neg.model");
    ok(&["train", "--data", s(&data), "--out", s(&model), "--c=-1"]);
    assert_eq!(ndk(&["predict", "--model", s(&model), "--input", s(&data), "--path", "primal"]).status.code(), Some(1));
    ok(&["predict", "--model", s(&model), "--input", s(&data), "--path", "precomputed"]);
}

#[test]
fn full_pipeline_and_histogram() {
    let tmp = TempDir::new().unwrap();
    let (texts, labels) = synthetic_files(tmp.path(), 90);
    let prefix = tmp.path().join("feat");
    ok(&["featurize", "--corpus", s(&texts), "--labels", s(&labels), "--out", s(&prefix)]);
    let train = tmp.path().join("feat.train");
    let val = tmp.path().join("feat.val");
    let test = tmp.path().join("feat.test");
    let grid_out = tmp.path().join("grid.json");
    let table = ok(&[
        "gridsearch", "--train", s(&train), "--validation", s(&val), "--family", "ndk", "--C", "10",
        "--out", s(&grid_out),
    ]);
    assert_eq!(table.lines().count(), 1 + 27);
    let best: serde_json::Value = serde_json::from_str(&fs::read_to_string(&grid_out).unwrap()).unwrap();
    assert!(best["best"]["macro_f1"].as_f64().unwrap() > 0.5);

    let models = tmp.path().join("models");
    ok(&[
        "--workers", "2", "train", "--data", s(&train), "--out-dir", s(&models), "--kernel", "ndk", "--a", "0.25",
        "--C", "10", "--tune-on", s(&val), "--oversample",
    ]);
    let config: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(models.join("config.json")).unwrap()).unwrap();
    assert_eq!(config["workers"], 2);
    assert_eq!(config["run"]["command"], "train");

    let dual = ok(&["eval", "--models", s(&models), "--data", s(&test), "--path", "dual"]);
    let primal = ok(&["eval", "--models", s(&models), "--data", s(&test), "--path", "primal"]);
    let strip = |t: &str| t.lines().map(|l| l.rsplit_once('\t').unwrap().0.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(&dual), strip(&primal));
    let macro_f1: f64 = dual.lines().last().unwrap().split('\t').nth(3).unwrap().parse().unwrap();
    assert!(macro_f1 > 0.5, "{dual}");

    let bench_root = tmp.path().join("bench");
    fs::create_dir_all(&bench_root).unwrap();
    fs::rename(&models, bench_root.join("ndk")).unwrap();
    let out = ok(&["bench", "--models", s(&bench_root), "--data", s(&test), "--reps", "5"]);
    assert_eq!(out.lines().count(), 1 + 3 + 1);

    let hist = ok(&["histogram", "--corpus", s(&texts), "--labels", s(&labels)]);
    assert!(hist.starts_with("section\tkey\tdocs\n"));
    let per_doc: usize = hist
        .lines()
        .filter(|l| l.starts_with("assignments"))
        .map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(per_doc, 90);
}
