//! Lexical-cohesion segmentation.
//!
//! Each segment's words are modelled as draws from a segment-specific
//! multinomial with a symmetric Dirichlet prior `theta0`. Integrating the
//! multinomial out gives the Dirichlet-compound-multinomial log likelihood
//!
//! ```text
//! lnΓ(Vθ) − lnΓ(N + Vθ) + Σ_{w : n_w > 0} [lnΓ(n_w + θ) − lnΓ(θ)]
//! ```
//!
//! for a span with `N` tokens, `n_w` of word `w`, over a vocabulary of `V`
//! words. Segmentations into `K` segments are scored by the sum over their
//! segments and optimized exactly by dynamic programming.

mod stopwords;

pub use stopwords::is_stopword;

use std::collections::HashMap;
use std::ops::Range;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::metrics::{EvalResult, Evaluator, MetricsError};
use crate::segmentation::{SegMethod, Segmentation};
use crate::transcript::Transcript;

/// Default symmetric Dirichlet concentration.
pub const DEFAULT_THETA0: f64 = 0.1;
/// Default upper bound on the number of segments scanned.
pub const DEFAULT_K_MAX: usize = 20;

/// Scores within this distance of the optimum count as ties.
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BayesError {
    #[error("K = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("prior concentration must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("empty unit sequence")]
    Empty,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Bags of word ids, one per unit (turn).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSequence {
    units: Vec<Vec<u32>>,
    vocab: Vec<String>,
}

impl UnitSequence {
    /// Builds units from token lists; ids are assigned in order of first use.
    pub fn from_tokens<S: AsRef<str>>(bags: &[Vec<S>]) -> Self {
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut vocab = Vec::new();
        let units = bags
            .iter()
            .map(|bag| {
                bag.iter()
                    .map(|w| {
                        let w = w.as_ref();
                        *ids.entry(w.to_owned()).or_insert_with(|| {
                            vocab.push(w.to_owned());
                            (vocab.len() - 1) as u32
                        })
                    })
                    .collect()
            })
            .collect();
        Self { units, vocab }
    }

    /// One unit per turn. With `remove_stopwords`, function words are
    /// dropped; turns left empty stay as empty units.
    pub fn from_transcript(t: &Transcript, remove_stopwords: bool) -> Self {
        let bags: Vec<Vec<&str>> = t
            .turns()
            .iter()
            .map(|turn| {
                turn.tokens
                    .iter()
                    .map(String::as_str)
                    .filter(|w| !(remove_stopwords && is_stopword(w)))
                    .collect()
            })
            .collect();
        Self::from_tokens(&bags)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn units(&self) -> &[Vec<u32>] {
        &self.units
    }
}

fn check_theta(theta0: f64) -> Result<(), BayesError> {
    if theta0 > 0.0 && theta0.is_finite() {
        Ok(())
    } else {
        Err(BayesError::InvalidTheta(theta0))
    }
}

/// Log marginal likelihood of the units in `span` (0-based, half-open).
/// Spans without tokens score 0.
pub fn segment_score(seq: &UnitSequence, span: Range<usize>, theta0: f64) -> f64 {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    let mut total = 0u64;
    for unit in &seq.units[span] {
        for &w in unit {
            *counts.entry(w).or_default() += 1;
            total += 1;
        }
    }
    if total == 0 {
        return 0.0;
    }
    let v_theta = seq.vocab_size() as f64 * theta0;
    let lg_theta = ln_gamma(theta0);
    let words: f64 = counts
        .values()
        .map(|&n| ln_gamma(n as f64 + theta0) - lg_theta)
        .sum();
    ln_gamma(v_theta) - ln_gamma(total as f64 + v_theta) + words
}

/// Segment scores for every span of a sequence, computed once per
/// conversation and shared by every search over it.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    n: usize,
    theta0: f64,
    // row s holds spans s..e for e in s+1..=n
    rows: Vec<Vec<f64>>,
}

impl ScoreTable {
    pub fn new(seq: &UnitSequence, theta0: f64) -> Result<Self, BayesError> {
        check_theta(theta0)?;
        let n = seq.len();
        let total_tokens: usize = seq.units.iter().map(Vec::len).sum();
        let v_theta = seq.vocab_size() as f64 * theta0;
        let lg_word: Vec<f64> = (0..=total_tokens).map(|c| ln_gamma(c as f64 + theta0)).collect();
        let lg_total: Vec<f64> = if seq.vocab_size() > 0 {
            (0..=total_tokens).map(|c| ln_gamma(c as f64 + v_theta)).collect()
        } else {
            vec![0.0; total_tokens + 1]
        };

        let mut counts = vec![0usize; seq.vocab_size()];
        let mut touched: Vec<u32> = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for s in 0..n {
            let mut row = Vec::with_capacity(n - s);
            let mut tokens = 0usize;
            let mut words = 0.0;
            for unit in &seq.units[s..] {
                for &w in unit {
                    let c = &mut counts[w as usize];
                    if *c == 0 {
                        touched.push(w);
                    }
                    words += lg_word[*c + 1] - lg_word[*c];
                    *c += 1;
                    tokens += 1;
                }
                row.push(if tokens == 0 {
                    0.0
                } else {
                    lg_total[0] - lg_total[tokens] + words
                });
            }
            for w in touched.drain(..) {
                counts[w as usize] = 0;
            }
            rows.push(row);
        }
        Ok(Self { n, theta0, rows })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Score of units `start..end` (0-based, half-open, non-empty).
    pub fn score(&self, start: usize, end: usize) -> f64 {
        self.rows[start][end - start - 1]
    }

    /// Total score of the segments of `span` cut at `cuts`, where each cut
    /// is the 0-based start of a new segment.
    pub fn total(&self, span: Range<usize>, cuts: &[usize]) -> f64 {
        let mut start = span.start;
        let mut sum = 0.0;
        for &c in cuts {
            sum += self.score(start, c);
            start = c;
        }
        sum + self.score(start, span.end)
    }
}

/// The optimal cut of a span into a given number of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanCut {
    pub k: usize,
    /// 0-based starts of segments 2..=k. As after-turn indices these are
    /// exactly the boundaries, since unit `c` is turn `c + 1`.
    pub cuts: Vec<usize>,
    pub score: f64,
}

/// Optimal cuts of `span` for every `K` in `1..=k_max` (capped at the span
/// length). Among equally scoring cuts the lexicographically smallest wins.
pub fn optimal_cuts(table: &ScoreTable, span: Range<usize>, k_max: usize) -> Vec<SpanCut> {
    let (lo, hi) = (span.start, span.end);
    let len = hi - lo;
    let k_max = k_max.min(len);
    if k_max == 0 {
        return Vec::new();
    }
    // best[k][s - lo]: best score of units s..hi split into k + 1 segments
    let mut best: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    best.push((lo..hi).map(|s| table.score(s, hi)).collect());
    for k in 1..k_max {
        let prev = &best[k - 1];
        let row = (lo..hi)
            .map(|s| {
                // need k more segments after the first, so c <= hi - k
                if hi - s < k + 1 {
                    return f64::NEG_INFINITY;
                }
                (s + 1..=hi - k)
                    .map(|c| table.score(s, c) + prev[c - lo])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        best.push(row);
    }

    (1..=k_max)
        .map(|k| {
            let mut cuts = Vec::with_capacity(k - 1);
            let mut s = lo;
            for remaining in (1..k).rev() {
                let target = best[remaining][s - lo];
                let c = (s + 1..=hi - remaining)
                    .find(|&c| table.score(s, c) + best[remaining - 1][c - lo] >= target - TIE_EPS)
                    .expect("optimum is attained");
                cuts.push(c);
                s = c;
            }
            SpanCut {
                k,
                score: best[k - 1][0],
                cuts,
            }
        })
        .collect()
}

/// The best `k`-segment segmentation of the whole sequence and its score.
pub fn dp_segment(seq: &UnitSequence, k: usize, theta0: f64) -> Result<(Segmentation, f64), BayesError> {
    if seq.is_empty() {
        return Err(BayesError::Empty);
    }
    if k == 0 || k > seq.len() {
        return Err(BayesError::KOutOfRange { k, max: seq.len() });
    }
    let table = ScoreTable::new(seq, theta0)?;
    let cut = optimal_cuts(&table, 0..seq.len(), k).pop().expect("k is feasible");
    Ok((
        Segmentation::from_unsorted(seq.len(), cut.cuts, SegMethod::Bayes),
        cut.score,
    ))
}

/// How [`scan_k`] picks the number of segments.
#[derive(Debug, Clone, Copy)]
pub enum Selector<'a> {
    /// Smallest `pk + wd` against a reference (ties: smaller pk, then smaller K).
    Oracle(&'a Evaluator),
    /// Largest total log likelihood (ties: smaller K).
    Likelihood,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub k: usize,
    pub segmentation: Segmentation,
    pub score: f64,
    pub eval: Option<EvalResult>,
}

/// Runs the segmenter for `K = 1..=k_max` and keeps the one the selector prefers.
pub fn scan_k(
    seq: &UnitSequence,
    k_max: usize,
    theta0: f64,
    selector: Selector<'_>,
) -> Result<ScanResult, BayesError> {
    if seq.is_empty() {
        return Err(BayesError::Empty);
    }
    if k_max == 0 || k_max > seq.len() {
        return Err(BayesError::KOutOfRange {
            k: k_max,
            max: seq.len(),
        });
    }
    let table = ScoreTable::new(seq, theta0)?;
    scan_table(&table, k_max, selector)
}

/// [`scan_k`] over a precomputed table; `k_max` is capped at the sequence length.
pub fn scan_table(table: &ScoreTable, k_max: usize, selector: Selector<'_>) -> Result<ScanResult, BayesError> {
    let n = table.len();
    let mut best: Option<ScanResult> = None;
    for cut in optimal_cuts(table, 0..n, k_max) {
        let segmentation = Segmentation::from_unsorted(n, cut.cuts, SegMethod::Bayes);
        let eval = match selector {
            Selector::Oracle(ev) => Some(ev.evaluate(&segmentation)?),
            Selector::Likelihood => None,
        };
        let candidate = ScanResult {
            k: cut.k,
            segmentation,
            score: cut.score,
            eval,
        };
        let better = match (&best, selector) {
            (None, _) => true,
            (Some(b), Selector::Oracle(_)) => {
                let (e, be) = (candidate.eval.unwrap(), b.eval.unwrap());
                e.combined() < be.combined() || (e.combined() == be.combined() && e.pk < be.pk)
            }
            (Some(b), Selector::Likelihood) => candidate.score > b.score + TIE_EPS,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(BayesError::Empty)
}
