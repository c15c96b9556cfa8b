//! Topic segmentation of multiparty conversations driven by laughter cues.
//!
//! The pipeline has four stages:
//!
//! 1. **Cluster** the turn indices that carry laughter, once with average-linkage
//!    agglomerative clustering and once with K-medoids.
//! 2. **Optimize** each clustering: boundary clumping for the agglomerative path,
//!    a scan over K for the K-medoids path.
//! 3. **Select** the better of the two cluster-derived segmentations.
//! 4. **Hybridize** that segmentation with a lexical-cohesion segmenter
//!    (Dirichlet-multinomial segment likelihood, dynamic programming) that
//!    re-cuts individual segments.
//!
//! Segmentations are scored with Pk and WindowDiff ([`metrics`]).
//!
//! ```
//! use laughseg_core::segmentation::{clump, Segmentation, SegMethod};
//! use laughseg_core::metrics::{pk, window_diff};
//!
//! assert_eq!(clump(&[5, 6, 7, 20, 21, 40]), vec![7, 21, 40]);
//!
//! let reference = Segmentation::new(10, vec![5], SegMethod::Reference).unwrap();
//! let hyp = Segmentation::new(10, vec![3], SegMethod::Hybrid).unwrap();
//! assert_eq!(pk(&reference, &hyp, 2).unwrap(), 0.5);
//! assert_eq!(window_diff(&reference, &hyp, 2).unwrap(), 0.5);
//! ```

pub mod bayesseg;
pub mod clustering;
pub mod hybrid;
pub mod metrics;
pub mod segmentation;
pub mod transcript;

pub use bayesseg::{ScoreTable, UnitSequence};
pub use clustering::{Clustering, LinkageTree, MedoidState};
pub use hybrid::{CandidateLog, PipelineConfig, PipelineError, PipelineResult};
pub use metrics::EvalResult;
pub use segmentation::{SegMethod, Segmentation};
pub use transcript::{ReferenceSegmentation, Transcript, Turn, VocalSound, VocalSoundKind};
