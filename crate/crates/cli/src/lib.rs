//! Library behind the `laughseg` command: corpus ingestion, batch
//! segmentation, evaluation tables and synthetic corpora.

pub mod corpus;
pub mod eval;
pub mod ingest;
pub mod segment;
pub mod synth;

pub use eval::{cmd_eval, EvalOptions, EvalReport};
pub use ingest::{cmd_ingest, IngestReport, InputFormat};
pub use segment::{cmd_segment, SegmentOptions, SegmentReport};
pub use synth::cmd_synth;
