//! Seeded generator of synthetic conversations with known topic boundaries.
//!
//! Each topic draws words from its own pool; a `mixing_rate` share of words
//! comes from a pool common to all topics. At each boundary `b` (a cut after
//! turn `b`) shared laughter is planted on turns `b - 1` and `b` with
//! probability `shared_laugh_prob`. Other turns laugh alone at `solo_laugh_rate`.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ReferenceSegmentation, Transcript, TranscriptError, Turn, VocalSound, VocalSoundKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_turns: usize,
    pub n_topics: usize,
    pub shared_laugh_prob: f64,
    pub solo_laugh_rate: f64,
    pub min_words_per_turn: usize,
    pub max_words_per_turn: usize,
    pub topic_vocab_size: usize,
    pub common_vocab_size: usize,
    pub mixing_rate: f64,
    pub n_speakers: usize,
    pub min_segment_len: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_turns: 100,
            n_topics: 4,
            shared_laugh_prob: 0.8,
            solo_laugh_rate: 0.1,
            min_words_per_turn: 3,
            max_words_per_turn: 10,
            topic_vocab_size: 40,
            common_vocab_size: 80,
            mixing_rate: 0.78,
            n_speakers: 4,
            min_segment_len: 8,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), TranscriptError> {
        let bad = |m: &str| Err(TranscriptError::SynthConfig(m.to_owned()));
        if self.n_turns == 0 {
            return bad("n_turns must be positive");
        }
        if self.n_topics == 0 || self.n_topics > self.n_turns {
            return bad("n_topics must be in 1..=n_turns");
        }
        if self.min_segment_len < 2 {
            return bad("min_segment_len must be at least 2");
        }
        if self.n_topics * self.min_segment_len > self.n_turns {
            return bad("n_topics * min_segment_len exceeds n_turns");
        }
        for (name, p) in [
            ("shared_laugh_prob", self.shared_laugh_prob),
            ("solo_laugh_rate", self.solo_laugh_rate),
            ("mixing_rate", self.mixing_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(TranscriptError::SynthConfig(format!("{name} must be in [0, 1]")));
            }
        }
        if self.min_words_per_turn > self.max_words_per_turn {
            return bad("min_words_per_turn exceeds max_words_per_turn");
        }
        if self.topic_vocab_size == 0 || self.n_speakers == 0 {
            return bad("topic_vocab_size and n_speakers must be positive");
        }
        if self.mixing_rate > 0.0 && self.common_vocab_size == 0 {
            return bad("common_vocab_size must be positive when mixing_rate > 0");
        }
        Ok(())
    }
}

fn topic_word(topic: usize, j: usize) -> String {
    format!("t{topic}w{j}")
}

fn common_word(j: usize) -> String {
    format!("c{j}")
}

/// Topic-segment lengths: `min_segment_len` each, plus a uniformly random
/// split of the remainder (stars and bars).
fn segment_lengths(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let spare = cfg.n_turns - cfg.n_topics * cfg.min_segment_len;
    let bars = cfg.n_topics - 1;
    let mut cuts: Vec<usize> = sample(rng, spare + bars, bars).into_vec();
    cuts.sort_unstable();
    let mut lengths = Vec::with_capacity(cfg.n_topics);
    let mut prev = 0usize;
    for (i, &c) in cuts.iter().enumerate() {
        // position c among spare+bars slots; stars before it = c - i
        let stars = c - i;
        lengths.push(cfg.min_segment_len + stars - prev);
        prev = stars;
    }
    lengths.push(cfg.min_segment_len + spare - prev);
    lengths
}

/// Generates one conversation and its reference. Deterministic in `seed`.
pub fn synthesize(
    config: &SynthConfig,
    seed: u64,
) -> Result<(Transcript, ReferenceSegmentation), TranscriptError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = segment_lengths(config, &mut rng);

    let mut boundaries = Vec::with_capacity(lengths.len() - 1);
    let mut topic_of = Vec::with_capacity(config.n_turns);
    let mut acc = 0;
    for (topic, &len) in lengths.iter().enumerate() {
        topic_of.extend(std::iter::repeat_n(topic, len));
        acc += len;
        if acc < config.n_turns {
            boundaries.push(acc);
        }
    }

    let mut laugh = vec![false; config.n_turns + 1];
    for &b in &boundaries {
        if rng.gen_bool(config.shared_laugh_prob) {
            laugh[b - 1] = true;
            laugh[b] = true;
        }
    }
    for flag in laugh.iter_mut().skip(1) {
        if !*flag && rng.gen_bool(config.solo_laugh_rate) {
            *flag = true;
        }
    }

    let mut turns = Vec::with_capacity(config.n_turns);
    for index in 1..=config.n_turns {
        let topic = topic_of[index - 1];
        let n_words = rng.gen_range(config.min_words_per_turn..=config.max_words_per_turn);
        let words: Vec<String> = (0..n_words)
            .map(|_| {
                if rng.gen_bool(config.mixing_rate) {
                    common_word(rng.gen_range(0..config.common_vocab_size))
                } else {
                    topic_word(topic, rng.gen_range(0..config.topic_vocab_size))
                }
            })
            .collect();
        let speaker = format!("spk{}", rng.gen_range(0..config.n_speakers));
        let mut turn = Turn::new(index, speaker, words.join(" "));
        turn.start_time = Some((index - 1) as f64 * 2.0);
        turn.end_time = Some(index as f64 * 2.0);
        if laugh[index] {
            turn = turn.with_vocal_sound(VocalSound::of_kind(VocalSoundKind::Laugh));
        }
        turns.push(turn);
    }

    let reference = ReferenceSegmentation::new(boundaries);
    let transcript = Transcript::new(format!("synth-{seed}"), turns)?.with_reference(reference.clone())?;
    Ok((transcript, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::{extract_laughter, to_jsonl};

    #[test]
    fn lengths_respect_minimum_and_total() {
        let cfg = SynthConfig::default();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = segment_lengths(&cfg, &mut rng);
            assert_eq!(l.len(), cfg.n_topics);
            assert_eq!(l.iter().sum::<usize>(), cfg.n_turns);
            assert!(l.iter().all(|&x| x >= cfg.min_segment_len));
        }
    }

    #[test]
    fn certain_placement_marks_every_boundary() {
        let cfg = SynthConfig {
            n_turns: 100,
            n_topics: 4,
            shared_laugh_prob: 1.0,
            solo_laugh_rate: 0.0,
            ..SynthConfig::default()
        };
        let (t, r) = synthesize(&cfg, 3).unwrap();
        assert_eq!(r.boundaries.len(), 3);
        let laughs = extract_laughter(&t);
        for b in &r.boundaries {
            assert!(laughs.contains(&(b - 1)) && laughs.contains(b));
        }
        assert_eq!(laughs.len(), 6);
    }

    #[test]
    fn no_laughter_when_disabled() {
        let cfg = SynthConfig {
            shared_laugh_prob: 0.0,
            solo_laugh_rate: 0.0,
            ..SynthConfig::default()
        };
        let (t, _) = synthesize(&cfg, 11).unwrap();
        assert!(extract_laughter(&t).is_empty());
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = SynthConfig::default();
        let a = synthesize(&cfg, 7).unwrap();
        let b = synthesize(&cfg, 7).unwrap();
        assert_eq!(to_jsonl(&a.0), to_jsonl(&b.0));
        assert_eq!(a.1, b.1);
        let c = synthesize(&cfg, 8).unwrap();
        assert_ne!(to_jsonl(&a.0), to_jsonl(&c.0));
    }

    #[test]
    fn infeasible_configs() {
        let too_many = SynthConfig {
            n_turns: 3,
            n_topics: 5,
            ..SynthConfig::default()
        };
        assert!(matches!(
            synthesize(&too_many, 0),
            Err(TranscriptError::SynthConfig(_))
        ));
        let bad_p = SynthConfig {
            shared_laugh_prob: 1.5,
            ..SynthConfig::default()
        };
        assert!(synthesize(&bad_p, 0).is_err());
    }
}
