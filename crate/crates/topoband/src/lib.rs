//! File formats, a thread-pool executor and the `topoband` command line on
//! top of `topoband-core`.

pub mod canonical;
pub mod cli;
pub mod family;
pub mod model_file;
pub mod par;
pub mod report;

pub use model_file::{load_model, model_to_json, parse_model, LoadError};
