//! Linear segmentations over turn units, boundary clumping, and the mapping
//! from laughter clusters to topic boundaries.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::clustering::Clustering;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentationError {
    #[error("{}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unit count {n_units} is below the largest point {max_point}")]
    TooFewUnits { n_units: usize, max_point: usize },
    #[error("clustering labels {labels} points but {points} were given")]
    LabelMismatch { labels: usize, points: usize },
}

/// Which stage produced a segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegMethod {
    Agglo,
    Kmedoids,
    Bestcluster,
    Bayes,
    Hybrid,
    Reference,
}

impl SegMethod {
    pub const PIPELINE: [SegMethod; 5] = [
        SegMethod::Agglo,
        SegMethod::Kmedoids,
        SegMethod::Bestcluster,
        SegMethod::Bayes,
        SegMethod::Hybrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SegMethod::Agglo => "agglo",
            SegMethod::Kmedoids => "kmedoids",
            SegMethod::Bestcluster => "bestcluster",
            SegMethod::Bayes => "bayes",
            SegMethod::Hybrid => "hybrid",
            SegMethod::Reference => "reference",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "agglo" => SegMethod::Agglo,
            "kmedoids" => SegMethod::Kmedoids,
            "bestcluster" => SegMethod::Bestcluster,
            "bayes" => SegMethod::Bayes,
            "hybrid" => SegMethod::Hybrid,
            "reference" => SegMethod::Reference,
            _ => return None,
        })
    }
}

impl fmt::Display for SegMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A partition of turns `1..=n_units` into contiguous segments.
///
/// A boundary `b` cuts between turn `b` and turn `b + 1`, so valid
/// boundaries lie in `1..n_units` and are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub n_units: usize,
    pub boundaries: Vec<usize>,
    pub method: SegMethod,
}

impl Segmentation {
    pub fn new(
        n_units: usize,
        boundaries: Vec<usize>,
        method: SegMethod,
    ) -> Result<Self, SegmentationError> {
        let seg = Self {
            n_units,
            boundaries,
            method,
        };
        validate(&seg)?;
        Ok(seg)
    }

    /// The single-segment segmentation.
    pub fn whole(n_units: usize, method: SegMethod) -> Self {
        Self {
            n_units,
            boundaries: Vec::new(),
            method,
        }
    }

    /// Sorts and deduplicates `boundaries`, dropping any outside `1..n_units`.
    pub fn from_unsorted(n_units: usize, mut boundaries: Vec<usize>, method: SegMethod) -> Self {
        boundaries.retain(|&b| b >= 1 && b < n_units);
        boundaries.sort_unstable();
        boundaries.dedup();
        Self {
            n_units,
            boundaries,
            method,
        }
    }

    pub fn n_segments(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Segments as inclusive 1-based `(first, last)` turn ranges.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_segments());
        let mut first = 1;
        for &b in &self.boundaries {
            out.push((first, b));
            first = b + 1;
        }
        out.push((first, self.n_units));
        out
    }

    /// 0-based segment id of every unit, in unit order.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = Vec::with_capacity(self.n_units);
        for (id, (first, last)) in self.segments().into_iter().enumerate() {
            labels.extend(std::iter::repeat_n(id, last + 1 - first));
        }
        labels
    }

    pub fn with_method(mut self, method: SegMethod) -> Self {
        self.method = method;
        self
    }

    /// Re-expresses a turn segmentation over word units, given the token
    /// count of every turn. Boundaries that fall on empty turns collapse.
    pub fn to_word_units(&self, tokens_per_turn: &[usize]) -> Self {
        assert_eq!(tokens_per_turn.len(), self.n_units, "one token count per turn");
        let mut offsets = Vec::with_capacity(self.n_units + 1);
        let mut acc = 0;
        offsets.push(0);
        for &n in tokens_per_turn {
            acc += n;
            offsets.push(acc);
        }
        let boundaries = self.boundaries.iter().map(|&b| offsets[b]).collect();
        Self::from_unsorted(acc, boundaries, self.method)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("segmentation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SegmentationError> {
        let seg: Self = serde_json::from_str(s)
            .map_err(|e| SegmentationError::Invalid(vec![e.to_string()]))?;
        validate(&seg)?;
        Ok(seg)
    }
}

/// Checks every segmentation invariant, listing all violations.
pub fn validate(seg: &Segmentation) -> Result<(), SegmentationError> {
    let mut problems = Vec::new();
    if seg.n_units == 0 {
        problems.push("n_units must be positive".to_owned());
    }
    for (i, &b) in seg.boundaries.iter().enumerate() {
        if b < 1 || b >= seg.n_units {
            problems.push(format!("boundary {b} outside 1..{}", seg.n_units));
        }
        if i > 0 {
            let prev = seg.boundaries[i - 1];
            if b == prev {
                problems.push(format!("duplicate boundary {b}"));
            } else if b < prev {
                problems.push(format!("boundary {b} follows {prev}"));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(SegmentationError::Invalid(problems))
    }
}

/// Replaces each run of consecutive indices with the run's last index.
pub fn clump(indices: &[usize]) -> Vec<usize> {
    indices
        .iter()
        .enumerate()
        .filter(|&(i, &x)| indices.get(i + 1) != Some(&(x + 1)))
        .map(|(_, &x)| x)
        .collect()
}

/// Emits a boundary after the last turn of every cluster with at least two
/// members. Singleton clusters are solo laughter and emit nothing; a
/// boundary after the final unit is dropped.
pub fn clusters_to_segmentation(
    clustering: &Clustering,
    points: &[usize],
    n_units: usize,
    method: SegMethod,
) -> Result<Segmentation, SegmentationError> {
    if clustering.labels.len() != points.len() {
        return Err(SegmentationError::LabelMismatch {
            labels: clustering.labels.len(),
            points: points.len(),
        });
    }
    if let Some(&max_point) = points.iter().max() {
        if n_units < max_point {
            return Err(SegmentationError::TooFewUnits { n_units, max_point });
        }
    }
    let mut size = vec![0usize; clustering.k];
    let mut last = vec![0usize; clustering.k];
    for (&label, &p) in clustering.labels.iter().zip(points) {
        size[label] += 1;
        last[label] = last[label].max(p);
    }
    let boundaries = (0..clustering.k)
        .filter(|&c| size[c] >= 2)
        .map(|c| last[c])
        .collect();
    Ok(Segmentation::from_unsorted(n_units, boundaries, method))
}
