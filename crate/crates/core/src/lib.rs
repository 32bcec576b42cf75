//! Full-reference video quality assessment toolkit.
//!
//! The pipeline ingests co-registered reference/test video, extracts a
//! multiscale feature pool (fidelity indices, content statistics, subband
//! artefact energies and a dynamic-texture-aware detail-loss score), fuses
//! selected features through two nu-SVR models combined by a convex weight,
//! and evaluates metrics against subjective scores with rank statistics:
//! Spearman correlation, Fisher-z aggregation, logistic-fit F-tests and
//! pairwise classification accuracy with an exact significance test.
//!
//! Modules follow the pipeline stages: [`video`] (ingestion),
//! [`transforms`] (wavelets, pyramids, optical flow), [`features`] (the
//! candidate pool), [`eadm`] (texture-aware detail loss), [`fusion`]
//! (training and prediction), [`evaluation`] (statistics), [`manifest`]
//! (database descriptions) and [`synth`] (procedural fixtures).

pub mod eadm;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod fusion;
pub mod manifest;
pub mod pipeline;
pub mod plane;
pub mod rng;
pub mod synth;
pub mod transforms;
pub mod video;

pub use error::{Error, Result};
pub use plane::Plane;
pub use video::{FramePair, VideoSpec};
