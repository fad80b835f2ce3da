//! File formats: CSV samples, PFM/PGM/PNG rasters, SEMPROB stacks and run outputs.

pub mod edges;
pub mod output;
pub mod pfm;
pub mod pgm;
pub mod raster;
pub mod samples;
pub mod semprob;

pub use edges::{fallback_edges, fallback_edges_from_file, load_edge_map};
pub use output::write_outputs;
pub use samples::{load_samples, write_samples};
pub use semprob::load_semantic_map;
