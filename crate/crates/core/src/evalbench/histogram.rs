use std::collections::BTreeMap;

use crate::textfeat::Corpus;

/// Documents per number of assigned categories and per category.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CategoryHistogram {
    pub by_count: BTreeMap<usize, usize>,
    pub by_category: BTreeMap<String, usize>,
}

impl CategoryHistogram {
    /// `section<TAB>key<TAB>docs` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("section\tkey\tdocs\n");
        for (k, v) in &self.by_count {
            out.push_str(&format!("assignments\t{k}\t{v}\n"));
        }
        for (k, v) in &self.by_category {
            out.push_str(&format!("category\t{k}\t{v}\n"));
        }
        out
    }
}

pub fn category_histogram(corpus: &Corpus) -> CategoryHistogram {
    let mut h = CategoryHistogram::default();
    for d in &corpus.documents {
        *h.by_count.entry(d.categories.len()).or_default() += 1;
        for c in &d.categories {
            *h.by_category.entry(c.clone()).or_default() += 1;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfeat::Document;

    fn corpus(labels: &[&[&str]]) -> Corpus {
        Corpus::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, cats)| Document {
                    id: format!("d{i}"),
                    text: String::new(),
                    categories: cats.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_and_single_label() {
        let h = category_histogram(&Corpus::default());
        assert!(h.by_count.is_empty() && h.by_category.is_empty());
        let h = category_histogram(&corpus(&[&["a"], &["b"], &["a"]]));
        assert_eq!(h.by_count, BTreeMap::from([(1, 3)]));
    }

    #[test]
    fn ten_doc_fixture() {
        let h = category_histogram(&corpus(&[
            &["0"],
            &["0", "3"],
            &["1"],
            &["2", "3", "5"],
            &["5"],
            &["0"],
            &["9", "1"],
            &["3"],
            &["3"],
            &["none"],
        ]));
        assert_eq!(h.by_count, BTreeMap::from([(1, 7), (2, 2), (3, 1)]));
        assert_eq!(h.by_category["0"], 3);
        assert_eq!(h.by_category["3"], 4);
        assert_eq!(h.by_category["1"], 2);
        assert_eq!(h.by_category["none"], 1);
        assert_eq!(h.by_category.values().sum::<usize>(), 14);
        assert!(h.to_tsv().contains("assignments\t2\t2\n"));
    }
}
