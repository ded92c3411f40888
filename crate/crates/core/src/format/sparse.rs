//! `label idx:val idx:val ...`, one vector per line, 1-based indices.
//!
//! A `# dim=N` comment fixes the dimension; without it the largest index in
//! the file is used. Other `#` lines and blank lines are ignored. The label
//! is either a binary `+1`/`-1` or a comma-separated list of category names.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::svm::TrainingSet;
use crate::veccore::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecord {
    pub label: String,
    pub vector: SparseVector,
}

pub fn read_sparse<R: BufRead>(reader: R) -> Result<Vec<SparseRecord>> {
    let mut declared_dim = None;
    let mut rows = Vec::new();
    let mut max_index = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(raw) = comment.trim().strip_prefix("dim=") {
                let dim = raw
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno, format!("bad dim `{raw}`")))?;
                declared_dim = Some(dim);
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label = tokens.next().unwrap_or_default().to_string();
        if label.contains(':') {
            return Err(Error::parse(lineno, "missing label"));
        }
        let mut pairs = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(Error::parse(lineno, "indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad value `{val}`")))?;
            max_index = max_index.max(idx);
            pairs.push((idx - 1, val));
        }
        rows.push((lineno, label, pairs));
    }
    let dim = match declared_dim {
        Some(d) if d < max_index => {
            return Err(Error::parse(0, format!("index {max_index} exceeds declared dim {d}")))
        }
        Some(d) => d,
        None => max_index,
    };
    rows.into_iter()
        .map(|(lineno, label, pairs)| {
            let vector = SparseVector::from_pairs(dim, pairs).map_err(|e| Error::parse(lineno, e.to_string()))?;
            Ok(SparseRecord { label, vector })
        })
        .collect()
}

pub fn write_sparse<W: Write>(mut writer: W, records: &[SparseRecord], dim: usize) -> Result<()> {
    writeln!(writer, "# dim={dim}")?;
    for r in records {
        if r.vector.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: r.vector.dim(),
            });
        }
        write!(writer, "{}", r.label)?;
        for (i, v) in r.vector.iter() {
            write!(writer, " {}:{}", i + 1, v)?;
        }
        writeln!(writer)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn load_sparse(path: impl AsRef<Path>) -> Result<Vec<SparseRecord>> {
    read_sparse(BufReader::new(File::open(path)?))
}

pub fn save_sparse(path: impl AsRef<Path>, records: &[SparseRecord], dim: usize) -> Result<()> {
    write_sparse(BufWriter::new(File::create(path)?), records, dim)
}

pub fn parse_binary_label(label: &str) -> Option<i8> {
    match label {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        _ => None,
    }
}

/// Category names of a multi-label record (`a,b,c`).
pub fn split_categories(label: &str) -> Vec<&str> {
    label.split(',').filter(|s| !s.is_empty()).collect()
}

/// Binary training data from records. With `positive` set, a record is
/// positive when its category list contains that name; otherwise every
/// label must be `+1` or `-1`.
pub fn to_training_set(records: &[SparseRecord], positive: Option<&str>) -> Result<TrainingSet> {
    let mut labels = Vec::with_capacity(records.len());
    for (n, r) in records.iter().enumerate() {
        let y = match positive {
            Some(cat) => {
                if split_categories(&r.label).contains(&cat) {
                    1
                } else {
                    -1
                }
            }
            None => parse_binary_label(&r.label).ok_or_else(|| {
                Error::invalid(format!("record {}: label `{}` is not +1/-1", n + 1, r.label))
            })?,
        };
        labels.push(y);
    }
    TrainingSet::new(records.iter().map(|r| r.vector.clone()).collect(), labels)
}
