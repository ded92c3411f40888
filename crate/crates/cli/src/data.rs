use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use ndk_core::evalbench::{CategoryModel, DocVectors, LabeledDoc};
use ndk_core::format::{load_model, load_sparse, save_model, split_categories, ModelFile, SparseRecord};
use ndk_core::{Error, Result};

pub const CATEGORIES_FILE: &str = "categories.txt";

fn category_set(label: &str) -> BTreeSet<String> {
    split_categories(label).into_iter().map(String::from).collect()
}

/// Per-category feature files `<dir>/<category>.svm`, keyed by category.
fn per_category_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "svm") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string(), path);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!("no .svm files in {}", dir.display())));
    }
    Ok(out)
}

/// Documents from a single feature file (vectors shared by all categories)
/// or from a directory of per-category files. With `order`, per-category
/// vectors follow that category order; otherwise the sorted file stems.
/// Returns the category names together with the documents.
pub fn load_docs(path: &Path, order: Option<&[String]>) -> Result<(Vec<String>, Vec<LabeledDoc>)> {
    if !path.is_dir() {
        let records = load_sparse(path)?;
        let names: BTreeSet<String> = records.iter().flat_map(|r| category_set(&r.label)).collect();
        let docs = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| LabeledDoc {
                id: i.to_string(),
                categories: category_set(&r.label),
                vectors: DocVectors::Shared(r.vector),
            })
            .collect();
        let names = order.map_or_else(|| names.into_iter().collect(), <[String]>::to_vec);
        return Ok((names, docs));
    }
    let files = per_category_files(path)?;
    let names: Vec<String> = match order {
        Some(o) => o.to_vec(),
        None => files.keys().cloned().collect(),
    };
    let mut columns: Vec<Vec<SparseRecord>> = Vec::with_capacity(names.len());
    for name in &names {
        let file = files
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("no feature file for category `{name}` in {}", path.display())))?;
        columns.push(load_sparse(file)?);
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidInput("per-category feature files differ in length".into()));
    }
    let docs = (0..n)
        .map(|i| {
            let label = &columns[0][i].label;
            if columns.iter().any(|c| &c[i].label != label) {
                return Err(Error::InvalidInput(format!("record {}: labels differ between category files", i + 1)));
            }
            Ok(LabeledDoc {
                id: i.to_string(),
                categories: category_set(label),
                vectors: DocVectors::PerCategory(columns.iter().map(|c| c[i].vector.clone()).collect()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((names, docs))
}

/// The records a binary model sees: the shared file, or the category's own
/// file inside a per-category directory.
pub fn binary_records(path: &Path, category: Option<&str>) -> Result<Vec<SparseRecord>> {
    if path.is_dir() {
        let cat = category.ok_or_else(|| Error::InvalidInput("a per-category directory needs --category".into()))?;
        load_sparse(path.join(format!("{cat}.svm")))
    } else {
        load_sparse(path)
    }
}

pub fn save_model_dir(dir: &Path, models: &[CategoryModel]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut names = String::new();
    for cm in models {
        let file = ModelFile {
            model: cm.model.clone(),
            precomputed: cm.precomputed.clone(),
            primal: cm.primal.clone(),
        };
        save_model(dir.join(format!("{}.model", cm.name)), &file)?;
        names.push_str(&cm.name);
        names.push('\n');
    }
    fs::write(dir.join(CATEGORIES_FILE), names)?;
    Ok(())
}

pub fn load_model_dir(dir: &Path) -> Result<Vec<CategoryModel>> {
    let list = fs::read_to_string(dir.join(CATEGORIES_FILE))?;
    list.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|name| {
            let f = load_model(dir.join(format!("{name}.model")))?;
            Ok(CategoryModel {
                name: name.to_string(),
                model: f.model,
                precomputed: f.precomputed,
                primal: f.primal,
            })
        })
        .collect()
}
