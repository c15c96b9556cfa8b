//! Conversation transcripts, their laughter annotations, and readers/writers
//! for the two supported on-disk formats.

mod jsonl;
mod mrt;
mod synth;

pub use jsonl::{parse_jsonl, parse_reference, reference_to_json, to_jsonl};
pub use mrt::{parse_mrt, to_mrt};
pub use synth::{synthesize, SynthConfig};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::segmentation::{SegMethod, Segmentation, SegmentationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranscriptError {
    #[error("line {line}: malformed markup: {message}")]
    Markup { line: usize, message: String },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("transcript has no turns")]
    Empty,
    #[error("turn indices must run 1..M in order: expected {expected}, found {found}")]
    TurnIndex { expected: usize, found: usize },
    #[error("invalid reference segmentation: {0}")]
    Reference(#[from] SegmentationError),
    #[error("invalid synthesis config: {0}")]
    SynthConfig(String),
}

/// Category of a vocal-sound annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VocalSoundKind {
    Laugh,
    BreathLaugh,
    LaughBreath,
    WhileTalkingLaugh,
    Other,
}

impl VocalSoundKind {
    /// Maps a raw annotation to its kind.
    ///
    /// Matching is case-insensitive: exactly `laugh` is [`Laugh`](Self::Laugh);
    /// anything mentioning `breath` is one of the breath variants (ordered by
    /// which word comes first); a `while talking` mention is
    /// [`WhileTalkingLaugh`](Self::WhileTalkingLaugh); the rest is `Other`.
    pub fn from_description(description: &str) -> Self {
        let d = description.trim().to_lowercase();
        if d == "laugh" {
            return Self::Laugh;
        }
        if let Some(breath_at) = d.find("breath") {
            return match d.find("laugh") {
                Some(laugh_at) if laugh_at < breath_at => Self::LaughBreath,
                _ => Self::BreathLaugh,
            };
        }
        if d.contains("while talking") {
            return Self::WhileTalkingLaugh;
        }
        Self::Other
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Laugh => "laugh",
            Self::BreathLaugh => "breath-laugh",
            Self::LaughBreath => "laugh-breath",
            Self::WhileTalkingLaugh => "while-talking-laugh",
            Self::Other => "other",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "laugh" => Self::Laugh,
            "breath-laugh" => Self::BreathLaugh,
            "laugh-breath" => Self::LaughBreath,
            "while-talking-laugh" => Self::WhileTalkingLaugh,
            "other" => Self::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for VocalSoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocalSound {
    pub kind: VocalSoundKind,
    pub raw_description: String,
}

impl VocalSound {
    pub fn from_description(description: impl Into<String>) -> Self {
        let raw_description = description.into();
        Self {
            kind: VocalSoundKind::from_description(&raw_description),
            raw_description,
        }
    }

    /// A vocal sound known only by its kind; the description is the kind name.
    pub fn of_kind(kind: VocalSoundKind) -> Self {
        Self {
            kind,
            raw_description: kind.as_str().to_owned(),
        }
    }
}

/// One speaker contribution. `index` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    pub index: usize,
    pub speaker: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub vocal_sounds: Vec<VocalSound>,
    pub start_time: Option<f64>,
    pub end_time: Option<f64>,
}

impl Turn {
    /// Builds a turn, deriving `tokens` from `text`.
    pub fn new(index: usize, speaker: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            index,
            speaker: speaker.into(),
            tokens: tokenize(&text),
            text,
            vocal_sounds: Vec::new(),
            start_time: None,
            end_time: None,
        }
    }

    pub fn with_vocal_sound(mut self, sound: VocalSound) -> Self {
        self.vocal_sounds.push(sound);
        self
    }

    pub fn has_laugh(&self) -> bool {
        self.vocal_sounds
            .iter()
            .any(|v| v.kind == VocalSoundKind::Laugh)
    }
}

/// Lowercases and splits on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Gold topic boundaries, as after-turn indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSegmentation {
    pub boundaries: Vec<usize>,
}

impl ReferenceSegmentation {
    pub fn new(boundaries: Vec<usize>) -> Self {
        Self { boundaries }
    }

    pub fn to_segmentation(&self, n_units: usize) -> Result<Segmentation, SegmentationError> {
        Segmentation::new(n_units, self.boundaries.clone(), SegMethod::Reference)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub id: String,
    turns: Vec<Turn>,
    pub reference: Option<ReferenceSegmentation>,
}

impl Transcript {
    /// Validates that `turns` is non-empty and indexed 1..M in order.
    pub fn new(id: impl Into<String>, turns: Vec<Turn>) -> Result<Self, TranscriptError> {
        if turns.is_empty() {
            return Err(TranscriptError::Empty);
        }
        for (pos, turn) in turns.iter().enumerate() {
            if turn.index != pos + 1 {
                return Err(TranscriptError::TurnIndex {
                    expected: pos + 1,
                    found: turn.index,
                });
            }
        }
        Ok(Self {
            id: id.into(),
            turns,
            reference: None,
        })
    }

    /// Attaches a reference, checking it against this transcript's length.
    pub fn with_reference(mut self, reference: ReferenceSegmentation) -> Result<Self, TranscriptError> {
        reference.to_segmentation(self.len())?;
        self.reference = Some(reference);
        Ok(self)
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    /// Number of turns, M.
    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn reference_segmentation(&self) -> Option<Segmentation> {
        self.reference
            .as_ref()
            .and_then(|r| r.to_segmentation(self.len()).ok())
    }

    /// Token count per turn, in turn order.
    pub fn token_counts(&self) -> Vec<usize> {
        self.turns.iter().map(|t| t.tokens.len()).collect()
    }
}

/// Turn indices carrying a plain `laugh` annotation, strictly increasing.
pub fn extract_laughter(transcript: &Transcript) -> Vec<usize> {
    transcript
        .turns()
        .iter()
        .filter(|t| t.has_laugh())
        .map(|t| t.index)
        .collect()
}
