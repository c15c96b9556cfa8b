use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use laughseg_core::metrics::{mean, sample_std, spearman_rho, wilcoxon_signed_rank, Evaluator, MetricUnit};
use laughseg_core::EvalResult;
use serde::Serialize;

use crate::corpus;
use crate::segment::{read_segmentation, SEG_EXT};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub corpus: PathBuf,
    pub segmentations: PathBuf,
    pub out: PathBuf,
    pub metric_unit: MetricUnit,
    /// Method pairs compared with the signed-rank test on pk.
    pub compare: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversationRow {
    pub id: String,
    pub method: String,
    pub pk: f64,
    pub wd: f64,
    pub k: usize,
    pub n_segments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub method: String,
    pub n: usize,
    pub mean_pk: f64,
    pub std_pk: f64,
    pub mean_wd: f64,
    pub std_wd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotRow {
    pub method: String,
    pub metric: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub test: &'static str,
    pub variable: &'static str,
    pub method_a: String,
    pub method_b: String,
    pub n: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    pub rows: Vec<ConversationRow>,
    pub aggregate: Vec<AggregateRow>,
    pub stats: Vec<StatsRow>,
}

/// `(id, method)` from a file name like `Bmr026.hybrid.seg.json`.
fn split_name(name: &str) -> Option<(&str, &str)> {
    name.strip_suffix(SEG_EXT)?.rsplit_once('.')
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Values of `f` for the conversations both methods cover, in id order.
fn paired(
    by_method: &BTreeMap<String, BTreeMap<String, ConversationRow>>,
    a: &str,
    b: &str,
    f: impl Fn(&ConversationRow) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let (Some(ra), Some(rb)) = (by_method.get(a), by_method.get(b)) else {
        return (Vec::new(), Vec::new());
    };
    ra.iter()
        .filter_map(|(id, x)| rb.get(id).map(|y| (f(x), f(y))))
        .unzip()
}

/// Scores every segmentation in `opts.segmentations` against the corpus
/// references and writes `per_conversation.csv`, `aggregate.csv`,
/// `boxplot.csv` and `stats.csv`.
pub fn cmd_eval(opts: &EvalOptions) -> Result<EvalReport> {
    let mut files: Vec<(String, String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(&opts.segmentations).with_context(|| format!("reading {}", opts.segmentations.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if let Some((id, method)) = split_name(name) {
            files.push((id.to_owned(), method.to_owned(), path.clone()));
        }
    }
    if files.is_empty() {
        bail!("no {SEG_EXT} files in {}", opts.segmentations.display());
    }
    files.sort();

    let mut evaluators: BTreeMap<String, Evaluator> = BTreeMap::new();
    let mut rows = Vec::with_capacity(files.len());
    for (id, method, path) in files {
        if !evaluators.contains_key(&id) {
            let t = corpus::load(&opts.corpus, &id)?;
            let reference = t
                .reference_segmentation()
                .with_context(|| format!("conversation {id} has no reference"))?;
            evaluators.insert(id.clone(), Evaluator::new(reference, opts.metric_unit, t.token_counts())?);
        }
        let seg = read_segmentation(&path)?;
        let EvalResult { pk, wd, k_window, .. } = evaluators[&id]
            .evaluate(&seg)
            .with_context(|| format!("evaluating {}", path.display()))?;
        rows.push(ConversationRow {
            id,
            method,
            pk,
            wd,
            k: k_window,
            n_segments: seg.n_segments(),
        });
    }

    let mut by_method: BTreeMap<String, BTreeMap<String, ConversationRow>> = BTreeMap::new();
    for r in &rows {
        by_method.entry(r.method.clone()).or_default().insert(r.id.clone(), r.clone());
    }

    let aggregate: Vec<AggregateRow> = by_method
        .iter()
        .map(|(method, rs)| {
            let pks: Vec<f64> = rs.values().map(|r| r.pk).collect();
            let wds: Vec<f64> = rs.values().map(|r| r.wd).collect();
            AggregateRow {
                method: method.clone(),
                n: rs.len(),
                mean_pk: mean(&pks),
                std_pk: sample_std(&pks),
                mean_wd: mean(&wds),
                std_wd: sample_std(&wds),
            }
        })
        .collect();

    let boxplot: Vec<BoxplotRow> = rows
        .iter()
        .flat_map(|r| {
            [
                BoxplotRow { method: r.method.clone(), metric: "pk", value: r.pk },
                BoxplotRow { method: r.method.clone(), metric: "wd", value: r.wd },
            ]
        })
        .collect();

    let mut stats = Vec::new();
    let methods: Vec<&String> = by_method.keys().collect();
    for (i, a) in methods.iter().enumerate() {
        for b in &methods[i + 1..] {
            let (xa, xb) = paired(&by_method, a, b, |r| r.n_segments as f64);
            let (statistic, note) = match spearman_rho(&xa, &xb) {
                Ok(rho) => (Some(rho), String::new()),
                Err(e) => (None, e.to_string()),
            };
            stats.push(StatsRow {
                test: "spearman",
                variable: "n_segments",
                method_a: (*a).clone(),
                method_b: (*b).clone(),
                n: xa.len(),
                statistic,
                p_value: None,
                note,
            });
        }
    }
    for (a, b) in &opts.compare {
        let (xa, xb) = paired(&by_method, a, b, |r| r.pk);
        let (statistic, p_value, note) = match wilcoxon_signed_rank(&xa, &xb) {
            Ok(w) => (
                Some(w.statistic),
                Some(w.p_value),
                if w.exact { "exact".to_owned() } else { "normal approximation".to_owned() },
            ),
            Err(e) => (None, None, e.to_string()),
        };
        stats.push(StatsRow {
            test: "wilcoxon",
            variable: "pk",
            method_a: a.clone(),
            method_b: b.clone(),
            n: xa.len(),
            statistic,
            p_value,
            note,
        });
    }

    fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    write_csv(&opts.out.join("per_conversation.csv"), &rows)?;
    write_csv(&opts.out.join("aggregate.csv"), &aggregate)?;
    write_csv(&opts.out.join("boxplot.csv"), &boxplot)?;
    write_csv(&opts.out.join("stats.csv"), &stats)?;
    Ok(EvalReport { rows, aggregate, stats })
}
