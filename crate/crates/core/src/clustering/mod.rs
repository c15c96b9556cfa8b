//! One-dimensional clustering of laughter turn indices.
//!
//! Two independent routes: average-linkage agglomerative clustering cut by
//! the inconsistency coefficient ([`linkage_average`], [`cut_by_inconsistency`])
//! and K-medoids seeded with the most central points ([`kmedoids`]).
//! Distances are `|x_i - x_j|`, which in one dimension is both the Euclidean
//! and the L1 distance.

mod kmedoids;
mod linkage;

pub use kmedoids::{kmedoids, park_jun_init, MedoidState};
pub use linkage::{
    cut_at, cut_by_inconsistency, inconsistency, linkage_average, Inconsistency, LinkageTree, Merge,
    DEFAULT_DEPTH,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("no points to cluster")]
    Empty,
    #[error("K = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("inconsistency depth must be positive")]
    ZeroDepth,
    #[error("points contain a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMethod {
    Agglomerative,
    KMedoids,
}

/// Flat cluster labels, one per input point. Labels are `0..k`, numbered by
/// first appearance in input order, and every label is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: ClusterMethod,
}

impl Clustering {
    /// Renumbers arbitrary labels by first appearance.
    pub(crate) fn from_raw_labels(raw: &[usize], method: ClusterMethod) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect();
        Self {
            labels,
            k: map.len(),
            method,
        }
    }

    /// Member positions of each cluster.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (pos, &l) in self.labels.iter().enumerate() {
            groups[l].push(pos);
        }
        groups
    }

    /// The clusters as lists of point values.
    pub fn group_values<T: Copy>(&self, points: &[T]) -> Vec<Vec<T>> {
        self.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|p| points[p]).collect())
            .collect()
    }

    /// True when every cluster occupies a contiguous run of positions.
    pub fn is_contiguous(&self) -> bool {
        let mut seen = vec![false; self.k];
        let mut prev: Option<usize> = None;
        for &l in &self.labels {
            if prev != Some(l) {
                if seen[l] {
                    return false;
                }
                seen[l] = true;
                prev = Some(l);
            }
        }
        true
    }
}

pub(crate) fn check_points(points: &[f64]) -> Result<(), ClusterError> {
    if points.is_empty() {
        return Err(ClusterError::Empty);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    Ok(())
}
