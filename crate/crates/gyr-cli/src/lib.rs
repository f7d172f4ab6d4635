//! Scene-file handling for the `gyr` binary: a small line-oriented text
//! format carrying a structure graph, an embedding, the subdivision count,
//! and (optionally) the per-edge displacement tables.

pub mod scene;

pub use scene::{SceneError, SceneFile};
