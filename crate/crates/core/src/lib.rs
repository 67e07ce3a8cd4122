//! Real-time atomic action segmentation engine.
//!
//! Frames are classified with overlapping sliding-window clips, each clip's
//! prediction is attributed to its middle frame, and the resulting label
//! stream is cleaned of implausibly short runs before evaluation. The crate
//! also carries the hand-guided feature alignment used by the enhanced
//! backbone and the hand localiser's loss and metric.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod align;
pub mod classify;
pub mod cleaning;
pub mod formats;
pub mod grid;
pub mod hands;
pub mod metrics;
pub mod pipeline;
pub mod reference;
pub mod sampling;
pub mod timeline;

pub use classify::{ClipClassifier, LogitsBackend, NoiseModel, OracleBackend};
pub use cleaning::{ClassStats, CleanerConfig, LabelCleaner};
pub use metrics::{EvalConfig, EvalReport};
pub use pipeline::{run_offline, run_stream, PipelineConfig, Segmentation, StreamSession};
pub use sampling::{ClipSpec, Window};
pub use timeline::{ClassId, Segment, Timeline, NUM_CLASSES};
