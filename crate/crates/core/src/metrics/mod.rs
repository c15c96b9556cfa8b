//! Segmentation error metrics (Pk, WindowDiff) and summary statistics.
//!
//! Both metrics slide a window of width `k` over unit positions
//! `i = 1..=M-k` and compare the reference and hypothesis on the pair
//! `(i, i + k)`. A boundary `b` lies inside window `i` when
//! `i <= b < i + k`, i.e. it separates two units of that window.

mod stats;

pub use stats::{
    mean, paired_t_test, sample_std, spearman_rho, wilcoxon_signed_rank, StatsError, TTestResult,
    WilcoxonResult,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segmentation::Segmentation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("reference has {reference} units but hypothesis has {hypothesis}")]
    UnitMismatch { reference: usize, hypothesis: usize },
    #[error("window width {k} is outside 1..={max}")]
    WindowOutOfRange { k: usize, max: usize },
    #[error("need at least 2 units to evaluate, got {0}")]
    TooShort(usize),
    #[error("word-level evaluation needs one token count per turn ({expected}), got {got}")]
    TokenCounts { expected: usize, got: usize },
}

/// Pk and WindowDiff for one hypothesis against one reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub pk: f64,
    pub wd: f64,
    pub k_window: usize,
    pub n_units: usize,
}

impl EvalResult {
    /// The selection objective used across the pipeline: `pk + wd`.
    pub fn combined(&self) -> f64 {
        self.pk + self.wd
    }
}

/// Half the mean reference segment length, rounded half up, at least 1 and
/// at most `M - 1`.
pub fn window_width(reference: &Segmentation) -> usize {
    let m = reference.n_units;
    let n = reference.n_segments();
    // round(m / 2n) with halves rounded up, in integers
    let k = ((m + n) / (2 * n)).max(1);
    if m >= 2 {
        k.min(m - 1)
    } else {
        k
    }
}

fn check(reference: &Segmentation, hyp: &Segmentation, k: usize) -> Result<usize, MetricsError> {
    let m = reference.n_units;
    if hyp.n_units != m {
        return Err(MetricsError::UnitMismatch {
            reference: m,
            hypothesis: hyp.n_units,
        });
    }
    if m < 2 {
        return Err(MetricsError::TooShort(m));
    }
    if k == 0 || k > m - 1 {
        return Err(MetricsError::WindowOutOfRange { k, max: m - 1 });
    }
    Ok(m)
}

/// Boundary counts inside every window `i = 1..=m-k`.
fn window_counts(seg: &Segmentation, k: usize) -> Vec<usize> {
    let m = seg.n_units;
    // prefix[j] = number of boundaries b <= j
    let mut prefix = vec![0usize; m + 1];
    for &b in &seg.boundaries {
        prefix[b] += 1;
    }
    for j in 1..=m {
        prefix[j] += prefix[j - 1];
    }
    (1..=m - k).map(|i| prefix[i + k - 1] - prefix[i - 1]).collect()
}

/// Share of windows where reference and hypothesis disagree on whether the
/// window's end units share a segment.
pub fn pk(reference: &Segmentation, hyp: &Segmentation, k: usize) -> Result<f64, MetricsError> {
    let m = check(reference, hyp, k)?;
    let r = window_counts(reference, k);
    let h = window_counts(hyp, k);
    let misses = r.iter().zip(&h).filter(|(a, b)| (**a == 0) != (**b == 0)).count();
    Ok(misses as f64 / (m - k) as f64)
}

/// Share of windows where reference and hypothesis contain a different
/// number of boundaries.
pub fn window_diff(reference: &Segmentation, hyp: &Segmentation, k: usize) -> Result<f64, MetricsError> {
    let m = check(reference, hyp, k)?;
    let r = window_counts(reference, k);
    let h = window_counts(hyp, k);
    let misses = r.iter().zip(&h).filter(|(a, b)| a != b).count();
    Ok(misses as f64 / (m - k) as f64)
}

/// Evaluates with the window width derived from the reference.
pub fn evaluate(reference: &Segmentation, hyp: &Segmentation) -> Result<EvalResult, MetricsError> {
    let k = window_width(reference);
    Ok(EvalResult {
        pk: pk(reference, hyp, k)?,
        wd: window_diff(reference, hyp, k)?,
        k_window: k,
        n_units: reference.n_units,
    })
}

/// Unit over which windows are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricUnit {
    #[default]
    Turn,
    Word,
}

impl MetricUnit {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "turn" => Some(Self::Turn),
            "word" => Some(Self::Word),
            _ => None,
        }
    }
}

/// A reference paired with the unit conversion needed to score turn-level
/// hypotheses against it.
#[derive(Debug, Clone)]
pub struct Evaluator {
    reference: Segmentation,
    unit: MetricUnit,
    token_counts: Vec<usize>,
}

impl Evaluator {
    pub fn turns(reference: Segmentation) -> Self {
        Self {
            reference,
            unit: MetricUnit::Turn,
            token_counts: Vec::new(),
        }
    }

    /// `token_counts` holds one entry per turn.
    pub fn new(
        reference: Segmentation,
        unit: MetricUnit,
        token_counts: Vec<usize>,
    ) -> Result<Self, MetricsError> {
        if unit == MetricUnit::Word && token_counts.len() != reference.n_units {
            return Err(MetricsError::TokenCounts {
                expected: reference.n_units,
                got: token_counts.len(),
            });
        }
        Ok(Self {
            reference,
            unit,
            token_counts,
        })
    }

    pub fn reference(&self) -> &Segmentation {
        &self.reference
    }

    pub fn evaluate(&self, hyp: &Segmentation) -> Result<EvalResult, MetricsError> {
        match self.unit {
            MetricUnit::Turn => evaluate(&self.reference, hyp),
            MetricUnit::Word => {
                if hyp.n_units != self.reference.n_units {
                    return Err(MetricsError::UnitMismatch {
                        reference: self.reference.n_units,
                        hypothesis: hyp.n_units,
                    });
                }
                evaluate(
                    &self.reference.to_word_units(&self.token_counts),
                    &hyp.to_word_units(&self.token_counts),
                )
            }
        }
    }
}
