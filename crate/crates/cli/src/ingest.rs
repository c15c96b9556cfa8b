use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use laughseg_core::transcript::{parse_jsonl, parse_mrt, parse_reference};
use laughseg_core::Transcript;

use crate::corpus::{self, REFERENCE_EXT, TRANSCRIPT_EXT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum InputFormat {
    /// Decide by extension: `.mrt`/`.xml` are markup, `.jsonl` is line-delimited.
    #[default]
    Auto,
    Mrt,
    Jsonl,
}

#[derive(Debug, Default)]
pub struct IngestReport {
    pub written: Vec<String>,
    pub errors: Vec<(PathBuf, String)>,
}

impl IngestReport {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn detect(path: &Path, format: InputFormat) -> Option<InputFormat> {
    let name = path.file_name()?.to_str()?;
    match format {
        InputFormat::Auto if name.ends_with(".mrt") || name.ends_with(".xml") => Some(InputFormat::Mrt),
        InputFormat::Auto if name.ends_with(TRANSCRIPT_EXT) => Some(InputFormat::Jsonl),
        InputFormat::Auto => None,
        f => Some(f),
    }
}

/// Expands directories to their transcript files, sorted.
fn collect_inputs(paths: &[PathBuf], format: InputFormat) -> Result<Vec<(PathBuf, InputFormat)>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            files.sort();
            for f in files {
                let name = f.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if name.ends_with(REFERENCE_EXT) || !f.is_file() {
                    continue;
                }
                // explicit formats still only pick up matching extensions inside directories
                if let Some(fmt) = detect(&f, InputFormat::Auto) {
                    if format == InputFormat::Auto || fmt == format {
                        out.push((f, fmt));
                    }
                }
            }
        } else {
            match detect(p, format) {
                Some(fmt) => out.push((p.clone(), fmt)),
                None => bail!("cannot tell the format of {}; pass --format", p.display()),
            }
        }
    }
    if out.is_empty() {
        bail!("no transcripts found in the given inputs");
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("conversation");
    [".mrt", ".xml", TRANSCRIPT_EXT]
        .iter()
        .find_map(|ext| name.strip_suffix(ext))
        .unwrap_or(name)
        .to_owned()
}

fn ingest_one(path: &Path, format: InputFormat) -> Result<Transcript> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut t = match format {
        InputFormat::Mrt => parse_mrt(&bytes)?,
        _ => parse_jsonl(&bytes)?,
    };
    let stem = stem(path);
    if t.id.is_empty() {
        t.id = stem.clone();
    }
    let ref_path = path.with_file_name(format!("{stem}{REFERENCE_EXT}"));
    if ref_path.exists() {
        let r = parse_reference(&fs::read(&ref_path)?).with_context(|| format!("parsing {}", ref_path.display()))?;
        t = t.with_reference(r)?;
    }
    Ok(t)
}

/// Normalizes every input transcript into `out`. Files that fail to parse
/// are reported and skipped; the rest are still written.
pub fn cmd_ingest(paths: &[PathBuf], format: InputFormat, out: &Path) -> Result<IngestReport> {
    let inputs = collect_inputs(paths, format)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut report = IngestReport::default();
    for (path, fmt) in inputs {
        match ingest_one(&path, fmt).and_then(|t| corpus::write_conversation(out, &t).map(|_| t.id)) {
            Ok(id) => report.written.push(id),
            Err(e) => report.errors.push((path, format!("{e:#}"))),
        }
    }
    Ok(report)
}
