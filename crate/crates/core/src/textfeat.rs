//! Corpus ingestion and document featurization: tokenization, vocabulary,
//! tfidf, per-category GSS coefficients, and their geometric mean.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evalbench::DocVectors;
use crate::veccore::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub categories: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

/// Name of the artificial category for documents with no label.
pub const NONE_CATEGORY: &str = "none";

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::invalid(format!("duplicate doc id `{}`", d.id)));
            }
            if d.categories.is_empty() {
                return Err(Error::invalid(format!("document `{}` has no category", d.id)));
            }
        }
        Ok(Corpus { documents })
    }

    /// Sorted, de-duplicated category names.
    pub fn categories(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.documents.iter().flat_map(|d| &d.categories).collect();
        set.into_iter().cloned().collect()
    }

    /// Reads `doc_id<TAB>cat[,cat...]` lines and the text of each listed
    /// document from `dir/doc_id` or `dir/doc_id.txt`. With
    /// `none_category`, an empty category list maps to [`NONE_CATEGORY`].
    pub fn load(dir: impl AsRef<Path>, labels: impl AsRef<Path>, none_category: bool) -> Result<Self> {
        let dir = dir.as_ref();
        let reader = std::io::BufReader::new(fs::File::open(labels)?);
        let mut documents = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, cats) = match line.split_once('\t') {
                Some((id, cats)) => (id.trim(), cats.trim()),
                None => (line.trim(), ""),
            };
            if id.is_empty() {
                return Err(Error::parse(lineno, "empty doc id"));
            }
            let mut categories: BTreeSet<String> = cats
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(String::from)
                .collect();
            if categories.is_empty() {
                if !none_category {
                    return Err(Error::parse(lineno, format!("document `{id}` has no category")));
                }
                categories.insert(NONE_CATEGORY.to_string());
            }
            let plain = dir.join(id);
            let path = if plain.is_file() { plain } else { dir.join(format!("{id}.txt")) };
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::parse(lineno, format!("cannot read {}: {e}", path.display())))?;
            documents.push(Document {
                id: id.to_string(),
                text,
                categories,
            });
        }
        Corpus::new(documents).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::invalid(format!("labels file: {msg}")),
            other => other,
        })
    }

    /// Seeded train/validation/test split. Documents are ordered by id before
    /// shuffling so the result does not depend on input order.
    pub fn split(&self, fractions: [f64; 3], seed: u64) -> Result<[Vec<&Document>; 3]> {
        let total: f64 = fractions.iter().sum();
        if fractions.iter().any(|f| *f < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("split fractions must be >= 0 and sum to 1"));
        }
        let mut docs: Vec<&Document> = self.documents.iter().collect();
        docs.sort_by(|a, b| a.id.cmp(&b.id));
        docs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n = docs.len();
        let n_train = (fractions[0] * n as f64).round() as usize;
        let n_val = ((fractions[1] * n as f64).round() as usize).min(n - n_train);
        let test = docs.split_off(n_train + n_val);
        let val = docs.split_off(n_train);
        Ok([docs, val, test])
    }
}

/// Lowercases, splits on every non-alphanumeric character, and drops tokens
/// shorter than two characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect()
}

/// Tokenizer plus an optional stopword list.
#[derive(Debug, Clone, Default)]
pub struct TextPipeline {
    stopwords: HashSet<String>,
}

impl TextPipeline {
    pub fn new(stopwords: impl IntoIterator<Item = String>) -> Self {
        TextPipeline {
            stopwords: stopwords.into_iter().map(|s| s.to_lowercase()).collect(),
        }
    }

    /// One stopword per line; `#` starts a comment line.
    pub fn from_stopword_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        ))
    }

    pub fn terms(&self, text: &str) -> Vec<String> {
        let mut t = tokenize(text);
        if !self.stopwords.is_empty() {
            t.retain(|w| !self.stopwords.contains(w));
        }
        t
    }
}

/// Terms of the training split with dense indices (assigned in sorted term
/// order) and document frequencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let uniq: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
            for t in uniq {
                *df.entry(t).or_default() += 1;
            }
        }
        let mut v = Vocabulary {
            n_docs: docs.len(),
            ..Default::default()
        };
        for (i, (t, f)) in df.into_iter().enumerate() {
            v.index.insert(t.to_string(), i);
            v.terms.push(t.to_string());
            v.doc_freq.push(f);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    /// `term<TAB>index<TAB>doc_freq` lines, preceded by `# n_docs=N`.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# n_docs={}", self.n_docs)?;
        for (i, t) in self.terms.iter().enumerate() {
            writeln!(w, "{t}\t{i}\t{}", self.doc_freq[i])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut v = Vocabulary::default();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = n + 1;
            if let Some(rest) = line.strip_prefix("# n_docs=") {
                v.n_docs = rest.trim().parse().map_err(|_| Error::parse(lineno, "bad n_docs"))?;
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let [term, idx, df] = parts[..] else {
                return Err(Error::parse(lineno, "expected term<TAB>index<TAB>doc_freq"));
            };
            let idx: usize = idx.parse().map_err(|_| Error::parse(lineno, "bad index"))?;
            let df: usize = df.parse().map_err(|_| Error::parse(lineno, "bad doc_freq"))?;
            if idx != v.terms.len() {
                return Err(Error::parse(lineno, "indices must be dense and in order"));
            }
            if df == 0 {
                return Err(Error::parse(lineno, "doc_freq must be >= 1"));
            }
            v.index.insert(term.to_string(), idx);
            v.terms.push(term.to_string());
            v.doc_freq.push(df);
        }
        Ok(v)
    }
}

/// Document-level term/category co-occurrence counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryStats {
    categories: Vec<String>,
    n_docs: usize,
    /// Documents per category.
    cat_docs: Vec<usize>,
    /// Documents per term.
    term_docs: Vec<usize>,
    /// `joint[t][c]`: documents containing term `t` labelled with `c`.
    joint: Vec<Vec<usize>>,
}

impl CategoryStats {
    /// `docs[i]` holds the terms of document `i`, `labels[i]` its categories.
    pub fn build<S: AsRef<str>>(
        docs: &[Vec<S>],
        labels: &[BTreeSet<String>],
        vocab: &Vocabulary,
        categories: &[String],
    ) -> Result<Self> {
        if docs.len() != labels.len() {
            return Err(Error::invalid("one label set per document expected"));
        }
        let cat_index: HashMap<&str, usize> =
            categories.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let mut cat_docs = vec![0; categories.len()];
        let mut term_docs = vec![0; vocab.len()];
        let mut joint = vec![vec![0; categories.len()]; vocab.len()];
        for (doc, cats) in docs.iter().zip(labels) {
            let cs: Vec<usize> = cats.iter().filter_map(|c| cat_index.get(c.as_str()).copied()).collect();
            for &c in &cs {
                cat_docs[c] += 1;
            }
            let terms: BTreeSet<usize> = doc.iter().filter_map(|t| vocab.index_of(t.as_ref())).collect();
            for t in terms {
                term_docs[t] += 1;
                for &c in &cs {
                    joint[t][c] += 1;
                }
            }
        }
        Ok(CategoryStats {
            categories: categories.to_vec(),
            n_docs: docs.len(),
            cat_docs,
            term_docs,
            joint,
        })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == name)
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// `[n(t,c), n(t,!c), n(!t,c), n(!t,!c)]`; the four cells sum to `n_docs`.
    pub fn cells(&self, term: usize, category: usize) -> [usize; 4] {
        let tc = self.joint[term][category];
        let t_notc = self.term_docs[term] - tc;
        let nott_c = self.cat_docs[category] - tc;
        let nott_notc = self.n_docs - tc - t_notc - nott_c;
        [tc, t_notc, nott_c, nott_notc]
    }
}

/// `(term_count / doc_len) * ln(n_docs / doc_freq)`.
pub fn tfidf(term_count: usize, doc_len: usize, doc_freq: usize, n_docs: usize) -> Result<f64> {
    if doc_len == 0 {
        return Err(Error::invalid("tfidf of an empty document"));
    }
    if doc_freq == 0 || n_docs < doc_freq {
        return Err(Error::invalid(format!(
            "need 1 <= doc_freq <= n_docs, got {doc_freq} and {n_docs}"
        )));
    }
    Ok(term_count as f64 / doc_len as f64 * (n_docs as f64 / doc_freq as f64).ln())
}

/// GSS coefficient `P(t,c) P(!t,!c) - P(t,!c) P(!t,c)`, in `[-0.25, 0.25]`.
pub fn gss(stats: &CategoryStats, term: usize, category: usize) -> Result<f64> {
    gss_from_cells(stats.cells(term, category))
}

pub fn gss_from_cells(cells: [usize; 4]) -> Result<f64> {
    let n: usize = cells.iter().sum();
    if n == 0 {
        return Err(Error::invalid("GSS over zero documents"));
    }
    let p = |k: usize| cells[k] as f64 / n as f64;
    Ok(p(0) * p(3) - p(1) * p(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// tfidf weights only.
    TfidfOnly,
    /// `sqrt(tfidf * max(GSS, 0))` per category.
    GeometricMean,
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfidf" | "tfidf_only" => Ok(FeatureMode::TfidfOnly),
            "gmean" | "geometric_mean" => Ok(FeatureMode::GeometricMean),
            _ => Err(Error::invalid(format!("unknown feature mode `{s}`"))),
        }
    }
}

/// L2-normalized feature vector of one document. Out-of-vocabulary terms
/// are dropped; the vocabulary is never modified.
pub fn featurize<S: AsRef<str>>(
    terms: &[S],
    vocab: &Vocabulary,
    stats: &CategoryStats,
    category: Option<&str>,
    mode: FeatureMode,
) -> Result<SparseVector> {
    let cat = match mode {
        FeatureMode::TfidfOnly => None,
        FeatureMode::GeometricMean => {
            let name = category.ok_or_else(|| Error::invalid("geometric_mean mode needs a category"))?;
            Some(
                stats
                    .category_index(name)
                    .ok_or_else(|| Error::invalid(format!("unknown category `{name}`")))?,
            )
        }
    };
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in terms {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut pairs = Vec::with_capacity(counts.len());
    for (term, count) in counts {
        let w = tfidf(count, terms.len(), vocab.doc_freq(term), vocab.n_docs())?;
        let w = match cat {
            None => w,
            Some(c) => (w * gss(stats, term, c)?.max(0.0)).sqrt(),
        };
        if w != 0.0 {
            pairs.push((term, w));
        }
    }
    let norm = pairs.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        pairs.iter_mut().for_each(|(_, w)| *w /= norm);
    }
    SparseVector::from_pairs(vocab.len(), pairs)
}

/// Vocabulary and category statistics fitted on a training split.
#[derive(Debug, Clone)]
pub struct FeatureSpace {
    pub pipeline: TextPipeline,
    pub vocab: Vocabulary,
    pub stats: CategoryStats,
    pub mode: FeatureMode,
}

impl FeatureSpace {
    pub fn fit(train: &[&Document], categories: &[String], pipeline: TextPipeline, mode: FeatureMode) -> Result<Self> {
        let docs: Vec<Vec<String>> = train.iter().map(|d| pipeline.terms(&d.text)).collect();
        let labels: Vec<BTreeSet<String>> = train.iter().map(|d| d.categories.clone()).collect();
        let vocab = Vocabulary::build(&docs);
        let stats = CategoryStats::build(&docs, &labels, &vocab, categories)?;
        Ok(FeatureSpace {
            pipeline,
            vocab,
            stats,
            mode,
        })
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// One shared vector in tfidf mode, one per category in geometric-mean mode.
    pub fn vectorize(&self, text: &str) -> Result<DocVectors> {
        let terms = self.pipeline.terms(text);
        match self.mode {
            FeatureMode::TfidfOnly => Ok(DocVectors::Shared(featurize(
                &terms,
                &self.vocab,
                &self.stats,
                None,
                self.mode,
            )?)),
            FeatureMode::GeometricMean => self
                .stats
                .categories()
                .iter()
                .map(|c| featurize(&terms, &self.vocab, &self.stats, Some(c), self.mode))
                .collect::<Result<Vec<_>>>()
                .map(DocVectors::PerCategory),
        }
    }
}

/// Seeded corpus with categories `c0, c1, ...`. Each category owns 25
/// indicative words; every document mixes them with words from a shared
/// background pool of 300, and roughly one in five documents carries a
/// second category.
pub fn synthetic_corpus(n_docs: usize, n_categories: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let documents = (0..n_docs)
        .map(|i| {
            let first = rng.random_range(0..n_categories);
            let mut cats = vec![first];
            if n_categories > 1 && rng.random_bool(0.2) {
                let second = (first + rng.random_range(1..n_categories)) % n_categories;
                cats.push(second);
            }
            let len = rng.random_range(30..60);
            let words: Vec<String> = (0..len)
                .map(|_| {
                    if rng.random_bool(0.35) {
                        let c = cats[rng.random_range(0..cats.len())];
                        format!("topic{c}w{}", rng.random_range(0..25))
                    } else {
                        format!("bg{}", rng.random_range(0..300))
                    }
                })
                .collect();
            Document {
                id: format!("doc{i:05}"),
                text: words.join(" "),
                categories: cats.iter().map(|c| format!("c{c}")).collect(),
            }
        })
        .collect();
    Corpus { documents }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(cats: &[&str]) -> BTreeSet<String> {
        cats.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The cat, the CAT."), vec!["the", "cat", "the", "cat"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("SVM-Kernel 2015"), vec!["svm", "kernel", "2015"]);
        assert_eq!(tokenize("a b cd é"), vec!["cd"]);
        assert_eq!(tokenize("Über straße"), vec!["über", "straße"]);
    }

    #[test]
    fn stopwords() {
        let p = TextPipeline::new(["The".to_string()]);
        assert_eq!(p.terms("The cat the dog"), vec!["cat", "dog"]);
    }

    #[test]
    fn tfidf_examples() {
        assert_eq!(tfidf(3, 10, 5, 5).unwrap(), 0.0);
        let v = tfidf(2, 4, 1, 3).unwrap();
        assert!((v - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!(tfidf(1, 0, 1, 1).is_err());
        assert!(tfidf(1, 1, 0, 1).is_err());
        assert!(tfidf(1, 1, 3, 2).is_err());
    }

    #[test]
    fn gss_examples() {
        assert_eq!(gss_from_cells([5, 0, 0, 5]).unwrap(), 0.25);
        assert_eq!(gss_from_cells([3, 3, 3, 3]).unwrap(), 0.0);
        assert_eq!(gss_from_cells([0, 5, 5, 0]).unwrap(), -0.25);
        assert!(gss_from_cells([0, 0, 0, 0]).is_err());
    }

    #[test]
    fn cells_sum_to_n() {
        let docs = vec![vec!["x", "y"], vec!["y"], vec!["z"]];
        let labels = vec![set(&["a"]), set(&["a", "b"]), set(&["b"])];
        let v = Vocabulary::build(&docs);
        let cats = vec!["a".to_string(), "b".to_string()];
        let s = CategoryStats::build(&docs, &labels, &v, &cats).unwrap();
        for t in 0..v.len() {
            for c in 0..2 {
                assert_eq!(s.cells(t, c).iter().sum::<usize>(), 3);
            }
        }
        assert_eq!(s.cells(v.index_of("y").unwrap(), 0), [2, 0, 0, 1]);
    }

    #[test]
    fn vocabulary_round_trip() {
        let v = Vocabulary::build(&[vec!["b", "a"], vec!["a"]]);
        assert_eq!(v.index_of("a"), Some(0));
        assert_eq!(v.doc_freq(0), 2);
        let mut buf = Vec::new();
        v.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# n_docs=2\na\t0\t2\nb\t1\t1\n");
        assert_eq!(Vocabulary::read(buf.as_slice()).unwrap(), v);
        assert!(Vocabulary::read("a\t1\t1\n".as_bytes()).is_err());
    }

    #[test]
    fn featurize_edge_cases() {
        let docs = vec![vec!["x", "y"], vec!["y", "z"]];
        let labels = vec![set(&["a"]), set(&["b"])];
        let v = Vocabulary::build(&docs);
        let cats = vec!["a".to_string(), "b".to_string()];
        let s = CategoryStats::build(&docs, &labels, &v, &cats).unwrap();
        let oov = featurize(&["qq", "rr"], &v, &s, None, FeatureMode::TfidfOnly).unwrap();
        assert!(oov.is_empty());
        assert_eq!(oov.dim(), 3);
        // Only "z" (negative for a) and "y" (zero GSS, zero idf): nothing left.
        let neg = featurize(&["z", "y"], &v, &s, Some("a"), FeatureMode::GeometricMean).unwrap();
        assert!(neg.is_empty());
        assert!(featurize(&["x"], &v, &s, Some("nope"), FeatureMode::GeometricMean).is_err());
        assert!(featurize(&["x"], &v, &s, None, FeatureMode::GeometricMean).is_err());
        let empty: [&str; 0] = [];
        assert!(featurize(&empty, &v, &s, None, FeatureMode::TfidfOnly).unwrap().is_empty());
    }

    #[test]
    fn split_is_seeded_and_complete() {
        let docs = (0..10)
            .map(|i| Document {
                id: format!("d{i}"),
                text: String::new(),
                categories: set(&["a"]),
            })
            .collect();
        let c = Corpus::new(docs).unwrap();
        let [tr, va, te] = c.split([0.6, 0.2, 0.2], 7).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (6, 2, 2));
        let again = c.split([0.6, 0.2, 0.2], 7).unwrap();
        assert_eq!(tr, again[0]);
        assert!(c.split([0.5, 0.5, 0.5], 7).is_err());
    }

    #[test]
    fn corpus_invariants() {
        let d = |id: &str, cats: &[&str]| Document {
            id: id.into(),
            text: String::new(),
            categories: set(cats),
        };
        assert!(Corpus::new(vec![d("a", &["x"]), d("a", &["y"])]).is_err());
        assert!(Corpus::new(vec![d("a", &[])]).is_err());
    }
}
