use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use laughseg_core::transcript::{synthesize, SynthConfig};

use crate::corpus;

/// Writes `n` synthetic conversations `synth_000 ..` with references.
/// Conversation `i` is generated from seed `seed + i`.
pub fn cmd_synth(config: &SynthConfig, n: usize, seed: u64, out: &Path) -> Result<Vec<String>> {
    config.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let width = n.saturating_sub(1).to_string().len().max(3);
    (0..n)
        .map(|i| {
            let (mut t, _) = synthesize(config, seed.wrapping_add(i as u64))?;
            t.id = format!("synth_{i:0width$}");
            corpus::write_conversation(out, &t)?;
            Ok(t.id)
        })
        .collect()
}

/// Reads a synthesis config from JSON; absent fields keep their defaults.
pub fn read_synth_config(path: &Path) -> Result<SynthConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
