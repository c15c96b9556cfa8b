use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use laughseg_cli::synth::read_synth_config;
use laughseg_cli::{cmd_eval, cmd_ingest, cmd_segment, cmd_synth, EvalOptions, InputFormat, SegmentOptions};
use laughseg_core::hybrid::{MethodChoice, PipelineConfig, SelectorMode};
use laughseg_core::metrics::MetricUnit;
use laughseg_core::transcript::SynthConfig;

#[derive(Parser)]
#[command(name = "laughseg", version, about = "Topic segmentation of meeting transcripts from laughter cues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize MRT or JSONL transcripts into a corpus directory.
    Ingest {
        /// Transcript files or directories.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Segment every conversation in a corpus directory.
    Segment(SegmentArgs),
    /// Score segmentations against the corpus references.
    Eval {
        corpus: PathBuf,
        segmentations: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_parser = parse_unit, default_value = "turn")]
        metric_unit: MetricUnit,
        /// Method pair for the signed-rank test on pk, as `a:b`. Repeatable.
        #[arg(long = "compare", value_parser = parse_pair)]
        compare: Vec<(String, String)>,
    },
    /// Generate a synthetic corpus with reference segmentations.
    Synth {
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// JSON file with generator settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        turns: Option<usize>,
        #[arg(long)]
        topics: Option<usize>,
        #[arg(long)]
        shared_laugh_prob: Option<f64>,
        #[arg(long)]
        solo_laugh_rate: Option<f64>,
    },
}

#[derive(Args)]
struct SegmentArgs {
    corpus: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// agglo, kmedoids, bestcluster, bayes, hybrid or all.
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodChoice>,
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Choose K and candidates against the reference.
    #[arg(long, conflicts_with = "likelihood")]
    oracle: bool,
    /// Choose by lexical likelihood; no reference needed.
    #[arg(long)]
    likelihood: bool,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    k_init: Option<usize>,
    #[arg(long)]
    inconsistency_depth: Option<usize>,
    #[arg(long, value_parser = parse_unit)]
    metric_unit: Option<MetricUnit>,
    /// on or off.
    #[arg(long)]
    stopwords: Option<String>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_method(s: &str) -> Result<MethodChoice, String> {
    MethodChoice::parse(s).ok_or_else(|| format!("unknown method `{s}`"))
}

fn parse_unit(s: &str) -> Result<MetricUnit, String> {
    MetricUnit::parse(s).ok_or_else(|| format!("unknown metric unit `{s}` (turn or word)"))
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    s.split_once(':')
        .map(|(a, b)| (a.to_owned(), b.to_owned()))
        .ok_or_else(|| format!("expected `a:b`, got `{s}`"))
}

fn segment_config(args: &SegmentArgs) -> Result<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::parse(&std::fs::read_to_string(p)?)?,
        None => PipelineConfig::default(),
    };
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if args.oracle {
        cfg.selector = SelectorMode::Oracle;
    }
    if args.likelihood {
        cfg.selector = SelectorMode::Likelihood;
    }
    let overrides = [
        ("theta0", args.theta0.map(|v| v.to_string())),
        ("k_max", args.k_max.map(|v| v.to_string())),
        ("k_init", args.k_init.map(|v| v.to_string())),
        ("inconsistency_depth", args.inconsistency_depth.map(|v| v.to_string())),
        ("stopwords", args.stopwords.clone()),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| anyhow!(e))?;
        }
    }
    if let Some(u) = args.metric_unit {
        cfg.metric_unit = u;
    }
    cfg.validate().map_err(|e| anyhow!(e))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ingest { inputs, format, out } => {
            let report = cmd_ingest(&inputs, format, &out)?;
            for (path, err) in &report.errors {
                eprintln!("{}: {err}", path.display());
            }
            println!("ingested {} conversation(s) into {}", report.written.len(), out.display());
            Ok(report.ok())
        }
        Command::Segment(args) => {
            let opts = SegmentOptions {
                config: segment_config(&args)?,
                corpus: args.corpus,
                out: args.out,
                jobs: args.jobs,
                seed: args.seed,
            };
            let report = cmd_segment(&opts)?;
            for (id, method, err) in report.errors() {
                eprintln!("{id} [{method}]: {err}");
            }
            println!("segmented {} conversation(s) into {}", report.conversations.len(), opts.out.display());
            Ok(report.ok())
        }
        Command::Eval {
            corpus,
            segmentations,
            out,
            metric_unit,
            compare,
        } => {
            let compare = if compare.is_empty() {
                vec![("bayes".into(), "hybrid".into()), ("bestcluster".into(), "hybrid".into())]
            } else {
                compare
            };
            let report = cmd_eval(&EvalOptions {
                corpus,
                segmentations,
                out: out.clone(),
                metric_unit,
                compare,
            })?;
            for a in &report.aggregate {
                println!("{:<12} n={:<3} pk {:.3} ± {:.3}  wd {:.3} ± {:.3}", a.method, a.n, a.mean_pk, a.std_pk, a.mean_wd, a.std_wd);
            }
            println!("tables written to {}", out.display());
            Ok(true)
        }
        Command::Synth {
            out,
            n,
            seed,
            config,
            turns,
            topics,
            shared_laugh_prob,
            solo_laugh_rate,
        } => {
            let mut cfg = match config {
                Some(p) => read_synth_config(&p)?,
                None => SynthConfig::default(),
            };
            cfg.n_turns = turns.unwrap_or(cfg.n_turns);
            cfg.n_topics = topics.unwrap_or(cfg.n_topics);
            cfg.shared_laugh_prob = shared_laugh_prob.unwrap_or(cfg.shared_laugh_prob);
            cfg.solo_laugh_rate = solo_laugh_rate.unwrap_or(cfg.solo_laugh_rate);
            let ids = cmd_synth(&cfg, n, seed, &out)?;
            println!("wrote {} conversation(s) to {}", ids.len(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
