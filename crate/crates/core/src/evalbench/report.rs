use super::bench::{BenchRow, BenchTable, BENCH_COLUMNS};
use super::metrics::EvalReport;

/// A titled table rendered either as TSV or as aligned plain text.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Header lines are joined with a space into a single TSV header row.
    pub fn to_tsv(&self) -> String {
        let width = self.rows.first().map_or(0, Vec::len).max(self.headers.first().map_or(0, Vec::len));
        let header: Vec<String> = (0..width)
            .map(|k| {
                self.headers
                    .iter()
                    .filter_map(|h| h.get(k))
                    .filter(|s| !s.is_empty())
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let mut out = header.join("\t");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    }

    /// First column left-aligned, the rest right-aligned.
    pub fn to_text(&self) -> String {
        let lines: Vec<&Vec<String>> = self.headers.iter().chain(&self.rows).collect();
        let ncol = lines.iter().map(|l| l.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..ncol)
            .map(|k| lines.iter().filter_map(|l| l.get(k)).map(|s| s.chars().count()).max().unwrap_or(0))
            .collect();
        let render = |l: &Vec<String>| {
            let cells: Vec<String> = (0..ncol)
                .map(|k| {
                    let s = l.get(k).map_or("", String::as_str);
                    if k == 0 {
                        format!("{s:<w$}", w = widths[k])
                    } else {
                        format!("{s:>w$}", w = widths[k])
                    }
                })
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * ncol.saturating_sub(1));
        let mut out = format!("{}\n{rule}\n", self.title);
        for h in &self.headers {
            out.push_str(&render(h));
            out.push('\n');
        }
        out.push_str(&rule);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&render(r));
            out.push('\n');
        }
        out
    }
}

fn m3(v: f64) -> String {
    format!("{v:.3}")
}

fn category_names<'a>(kernels: &[(&str, &'a EvalReport)]) -> Vec<&'a str> {
    kernels
        .first()
        .map(|(_, r)| r.per_category.iter().map(|m| m.name.as_str()).collect())
        .unwrap_or_default()
}

fn lookup<'a>(r: &'a EvalReport, name: &str) -> Option<&'a super::metrics::CategoryMetrics> {
    r.per_category.iter().find(|m| m.name == name)
}

/// Per-category precision and recall, one column pair per kernel.
pub fn precision_recall_table(kernels: &[(&str, &EvalReport)]) -> Table {
    let mut top = vec![String::new()];
    let mut sub = vec!["Cat.".to_string()];
    for (k, _) in kernels {
        top.extend([k.to_string(), String::new()]);
        sub.extend(["Prec.".to_string(), "Rec.".to_string()]);
    }
    let mut rows = Vec::new();
    for name in category_names(kernels) {
        let mut row = vec![name.to_string()];
        for (_, r) in kernels {
            match lookup(r, name) {
                Some(m) => row.extend([m3(m.precision), m3(m.recall)]),
                None => row.extend(["-".to_string(), "-".to_string()]),
            }
        }
        rows.push(row);
    }
    let mut all = vec!["All".to_string()];
    for (_, r) in kernels {
        all.extend([m3(r.macro_precision), m3(r.macro_recall)]);
    }
    rows.push(all);
    Table {
        title: "Precision / recall of different kernels".into(),
        headers: vec![top, sub],
        rows,
    }
}

/// Per-category F-scores, one column per kernel.
pub fn f_score_table(kernels: &[(&str, &EvalReport)]) -> Table {
    let mut header = vec!["Cat.".to_string()];
    header.extend(kernels.iter().map(|(k, _)| k.to_string()));
    let mut rows = Vec::new();
    for name in category_names(kernels) {
        let mut row = vec![name.to_string()];
        row.extend(kernels.iter().map(|(_, r)| lookup(r, name).map_or("-".into(), |m| m3(m.f1))));
        rows.push(row);
    }
    let mut all = vec!["All".to_string()];
    all.extend(kernels.iter().map(|(_, r)| m3(r.macro_f1)));
    rows.push(all);
    Table {
        title: "F-scores of different kernels".into(),
        headers: vec![header],
        rows,
    }
}

/// Macro-averaged F-score, precision and recall per kernel.
pub fn macro_table(kernels: &[(&str, &EvalReport)]) -> Table {
    Table {
        title: "Mean F-score, precision, and recall (macro-averaging)".into(),
        headers: vec![vec!["Kernel".into(), "F-score".into(), "Precision".into(), "Recall".into()]],
        rows: kernels
            .iter()
            .map(|(k, r)| vec![k.to_string(), m3(r.macro_f1), m3(r.macro_precision), m3(r.macro_recall)])
            .collect(),
    }
}

fn timing_row(r: &BenchRow) -> Vec<String> {
    let mut row = vec![r.name.clone()];
    row.extend(r.ms.iter().map(|v| v.map_or("-".into(), |ms| format!("{ms:.3}"))));
    row.push(r.dual_over_primal().map_or("-".into(), |x| format!("{x:.1}")));
    row.extend(r.build_ms.iter().map(|ms| format!("{ms:.3}")));
    row
}

/// Median prediction time per path in milliseconds, with the NDK
/// dual/primal ratio and the separately measured build times.
pub fn timing_table(t: &BenchTable) -> Table {
    let mut top = vec!["C.".to_string()];
    let mut sub = vec![String::new()];
    for (_, a, b) in BENCH_COLUMNS {
        top.push(a.into());
        sub.push(b.into());
    }
    top.extend(["dual/".into(), "build".into(), "build".into()]);
    sub.extend(["prim.".into(), "prec.".into(), "prim.".into()]);
    let mut rows: Vec<Vec<String>> = t.rows.iter().map(timing_row).collect();
    rows.push(timing_row(&t.all));
    Table {
        title: format!("Time (ms) to classify all probes, median of {} runs", t.reps),
        headers: vec![top, sub],
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::metrics::{CategoryMetrics, Confusion};
    use crate::evalbench::multilabel::PredictPath;

    fn report(per: &[(&str, f64, f64, f64)], macro_: (f64, f64, f64)) -> EvalReport {
        EvalReport {
            per_category: per
                .iter()
                .map(|&(n, p, r, f)| CategoryMetrics {
                    name: n.into(),
                    confusion: Confusion::default(),
                    precision: p,
                    recall: r,
                    f1: f,
                })
                .collect(),
            macro_precision: macro_.0,
            macro_recall: macro_.1,
            macro_f1: macro_.2,
            path: PredictPath::Dual,
            timing_ms: vec![],
        }
    }

    #[test]
    fn precision_recall_schema() {
        let ndk = report(&[("0", 0.845, 0.777, 0.810)], (0.756, 0.706, 0.723));
        let rbf = report(&[("0", 0.867, 0.731, 0.793)], (0.754, 0.659, 0.693));
        let t = precision_recall_table(&[("NDK", &ndk), ("RBF", &rbf)]);
        let tsv = t.to_tsv();
        assert!(tsv.starts_with("Cat.\tNDK Prec.\tRec.\tRBF Prec.\tRec.\n"));
        assert!(tsv.contains("\nAll\t0.756\t0.706\t0.754\t0.659\n"));
        assert!(tsv.contains("\n0\t0.845\t0.777\t0.867\t0.731\n"));
        assert!(t.to_text().contains("0.756"));
    }

    #[test]
    fn f_score_and_macro_schema() {
        let ndk = report(&[("0", 0.0, 0.0, 0.810)], (0.414, 0.419, 0.723));
        let f = f_score_table(&[("NDK", &ndk)]).to_tsv();
        assert_eq!(f, "Cat.\tNDK\n0\t0.810\nAll\t0.723\n");
        let m = macro_table(&[("NDK", &ndk)]).to_tsv();
        assert_eq!(m, "Kernel\tF-score\tPrecision\tRecall\nNDK\t0.723\t0.414\t0.419\n");
    }

    #[test]
    fn timing_schema() {
        let row = |name: &str, prim: f64, dual: f64| BenchRow {
            name: name.into(),
            ms: vec![Some(prim), None, Some(dual), Some(102410.0), Some(120936.0), Some(113587.0), Some(88805.0)],
            build_ms: [0.0, 0.0],
        };
        let t = BenchTable {
            rows: vec![row("0", 16361.0, 99490.0)],
            all: row("all", 16361.0, 99490.0),
            reps: 5,
        };
        let tsv = timing_table(&t).to_tsv();
        let header = tsv.lines().next().unwrap();
        for col in ["NDK prim.", "NDK dual", "Squ. dual", "Cubic dual", "RBF dual", "Lin. dual"] {
            assert!(header.split('\t').any(|h| h == col), "{col}");
        }
        assert!(tsv.contains("all\t16361.000\t-\t99490.000"));
        assert!(tsv.contains("\t6.1\t"));
        let text = timing_table(&t).to_text();
        assert!(text.lines().all(|l| !l.ends_with(' ')));
    }
}
