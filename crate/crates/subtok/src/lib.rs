//! File formats, the external segmenter, the pipeline and the command line
//! on top of `subtok-core`.

pub mod cli;
pub mod merges;
pub mod pipeline;
pub mod schemes;
pub mod segmenter;
pub mod text;

pub use subtok_core as core;
