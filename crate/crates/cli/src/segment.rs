use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use laughseg_core::hybrid::{optimize_agglo, run_pipeline, MethodChoice, MethodRun, PipelineConfig, SelectorMode};
use laughseg_core::{CandidateLog, PipelineError, SegMethod, Segmentation, Transcript};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::corpus;

pub const SEG_EXT: &str = ".seg.json";
pub const LOG_EXT: &str = ".log.jsonl";

#[derive(Debug, Clone)]
pub struct SegmentOptions {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub config: PipelineConfig,
    pub jobs: Option<usize>,
    pub seed: u64,
}

/// What happened to one method on one conversation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum Outcome {
    Written { file: String },
    /// The method does not apply (no laughter, or it needs the oracle selector).
    Skipped { reason: String },
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConversationReport {
    pub id: String,
    pub outputs: BTreeMap<String, Outcome>,
}

#[derive(Debug, Clone)]
pub struct SegmentReport {
    pub conversations: Vec<ConversationReport>,
}

impl SegmentReport {
    pub fn errors(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for c in &self.conversations {
            for (method, o) in &c.outputs {
                if let Outcome::Failed { error } = o {
                    out.push((c.id.clone(), method.clone(), error.clone()));
                }
            }
        }
        out
    }

    pub fn ok(&self) -> bool {
        self.errors().is_empty()
    }
}

fn is_inapplicable(e: &PipelineError, selector: SelectorMode) -> bool {
    match e {
        PipelineError::NoLaughter { .. } => true,
        PipelineError::MissingReference => selector == SelectorMode::Likelihood,
        _ => false,
    }
}

fn log_lines(log: &CandidateLog) -> String {
    let mut out = String::new();
    for (i, c) in log.entries.iter().enumerate() {
        let line = json!({
            "index": i,
            "selected": i == log.selected,
            "note": c.note,
            "boundaries": c.segmentation.boundaries,
            "pk": c.eval.map(|e| e.pk),
            "wd": c.eval.map(|e| e.wd),
            "combined": c.eval.map(|e| e.combined()),
            "log_likelihood": c.log_likelihood,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Files produced for one conversation, before anything is written.
struct Pending {
    report: ConversationReport,
    files: Vec<(String, String)>,
}

fn outcome_for(
    id: &str,
    method: SegMethod,
    run: Result<MethodRun, PipelineError>,
    selector: SelectorMode,
    files: &mut Vec<(String, String)>,
) -> Outcome {
    match run {
        Ok(run) => {
            let name = format!("{id}.{method}{SEG_EXT}");
            files.push((name.clone(), run.segmentation.to_json() + "\n"));
            if let Some(log) = &run.log {
                files.push((format!("{id}.{method}{LOG_EXT}"), log_lines(log)));
            }
            Outcome::Written { file: name }
        }
        Err(e) if is_inapplicable(&e, selector) => Outcome::Skipped { reason: e.to_string() },
        Err(e) => Outcome::Failed { error: e.to_string() },
    }
}

fn process(t: &Transcript, config: &PipelineConfig) -> Pending {
    let mut files = Vec::new();
    let mut outputs = BTreeMap::new();
    let methods = config.method.methods();
    if config.method == MethodChoice::Only(SegMethod::Agglo) {
        // needs neither a reference nor the lexical tables
        let run = optimize_agglo(t, config).map(|segmentation| MethodRun {
            segmentation,
            eval: None,
            log: None,
            source: None,
        });
        outputs.insert("agglo".into(), outcome_for(&t.id, SegMethod::Agglo, run, config.selector, &mut files));
    } else {
        match run_pipeline(t, config) {
            Ok(result) => {
                for (method, run) in result.runs {
                    if methods.contains(&method) {
                        let o = outcome_for(&t.id, method, run, config.selector, &mut files);
                        outputs.insert(method.to_string(), o);
                    }
                }
            }
            Err(e) => {
                for m in methods {
                    outputs.insert(m.to_string(), Outcome::Failed { error: e.to_string() });
                }
            }
        }
    }
    Pending {
        report: ConversationReport {
            id: t.id.clone(),
            outputs,
        },
        files,
    }
}

/// Segments every conversation of a corpus. Conversations run in parallel;
/// files are written afterwards in id order, so output is byte-identical
/// across runs and job counts.
pub fn cmd_segment(opts: &SegmentOptions) -> Result<SegmentReport> {
    opts.config.validate().map_err(anyhow::Error::msg)?;
    let ids = corpus::list_ids(&opts.corpus)?;
    fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    let pending: Vec<Pending> = pool.install(|| {
        ids.par_iter()
            .map(|id| match corpus::load(&opts.corpus, id) {
                Ok(t) => process(&t, &opts.config),
                Err(e) => Pending {
                    report: ConversationReport {
                        id: id.clone(),
                        outputs: opts
                            .config
                            .method
                            .methods()
                            .into_iter()
                            .map(|m| (m.to_string(), Outcome::Failed { error: format!("{e:#}") }))
                            .collect(),
                    },
                    files: Vec::new(),
                },
            })
            .collect()
    });

    let mut conversations = Vec::with_capacity(pending.len());
    for p in pending {
        for (name, contents) in &p.files {
            corpus::write(&opts.out.join(name), contents)?;
        }
        conversations.push(p.report);
    }
    let report = SegmentReport { conversations };

    let mut errors = String::new();
    for (id, method, error) in report.errors() {
        errors.push_str(&json!({ "id": id, "method": method, "error": error }).to_string());
        errors.push('\n');
    }
    corpus::write(&opts.out.join("errors.jsonl"), errors)?;

    let config: BTreeMap<String, String> = opts
        .config
        .to_text()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "corpus": opts.corpus.display().to_string(),
        "seed": opts.seed,
        "mode": match opts.config.selector {
            SelectorMode::Oracle => "ORACLE",
            SelectorMode::Likelihood => "likelihood",
        },
        "config": config,
        "conversations": report.conversations,
    });
    corpus::write(
        &opts.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(report)
}

/// Reads back a segmentation file written by [`cmd_segment`].
pub fn read_segmentation(path: &Path) -> Result<Segmentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Segmentation::from_json(text.trim()).with_context(|| format!("parsing {}", path.display()))
}
