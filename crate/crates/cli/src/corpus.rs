//! Normalized corpus directories.
//!
//! A conversation `<id>` is stored as `<id>.jsonl` (one turn per line), a
//! `<id>.laughter.json` sidecar listing its laughter turns, and optionally
//! `<id>.ref.json` holding the reference boundaries.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use laughseg_core::transcript::{extract_laughter, parse_jsonl, parse_reference, reference_to_json, to_jsonl};
use laughseg_core::Transcript;
use serde::{Deserialize, Serialize};

pub const TRANSCRIPT_EXT: &str = ".jsonl";
pub const REFERENCE_EXT: &str = ".ref.json";
pub const LAUGHTER_EXT: &str = ".laughter.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaughterSidecar {
    pub id: String,
    pub n_turns: usize,
    pub laughter: Vec<usize>,
}

/// Writes a transcript, its laughter sidecar and (if attached) its reference.
pub fn write_conversation(dir: &Path, t: &Transcript) -> Result<()> {
    let stem = dir.join(&t.id);
    write(&with_suffix(&stem, TRANSCRIPT_EXT), to_jsonl(t))?;
    let sidecar = LaughterSidecar {
        id: t.id.clone(),
        n_turns: t.len(),
        laughter: extract_laughter(t),
    };
    write(&with_suffix(&stem, LAUGHTER_EXT), serde_json::to_string(&sidecar)? + "\n")?;
    if let Some(r) = &t.reference {
        write(&with_suffix(&stem, REFERENCE_EXT), reference_to_json(r))?;
    }
    Ok(())
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Conversation ids in a corpus directory, sorted.
pub fn list_ids(dir: &Path) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let name = entry?.file_name();
        if let Some(id) = name.to_str().and_then(|n| n.strip_suffix(TRANSCRIPT_EXT)) {
            ids.push(id.to_owned());
        }
    }
    ids.sort();
    if ids.is_empty() {
        bail!("no {TRANSCRIPT_EXT} transcripts in {}", dir.display());
    }
    Ok(ids)
}

/// Loads one conversation and attaches its reference when present.
pub fn load(dir: &Path, id: &str) -> Result<Transcript> {
    let path = dir.join(format!("{id}{TRANSCRIPT_EXT}"));
    let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut t = parse_jsonl(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    t.id = id.to_owned();
    let ref_path = dir.join(format!("{id}{REFERENCE_EXT}"));
    if ref_path.exists() {
        let bytes = fs::read(&ref_path).with_context(|| format!("reading {}", ref_path.display()))?;
        let r = parse_reference(&bytes).with_context(|| format!("parsing {}", ref_path.display()))?;
        t = t
            .with_reference(r)
            .with_context(|| format!("checking {}", ref_path.display()))?;
    }
    Ok(t)
}
