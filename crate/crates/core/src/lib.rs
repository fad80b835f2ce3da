//! Sparse-to-dense depth upsampling over geodesic Voronoi cells.
//!
//! Sparse depth samples seed a Voronoi partition under an edge- and
//! label-aware geodesic metric. Each cell carries one plane in
//! `(u', v', 1/z)` space; planes, outlier flags and coplanarity flags are
//! estimated by block-coordinate minimization of a global energy.

pub mod config;
pub mod energy;
pub mod error;
pub mod eval;
pub mod geodesic;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
pub use scene::{
    DenseDepthMap, DepthSample, DepthUnit, EdgeMap, GridDims, NormalizedCoord, PixelCoord,
    ScalarMap, SemanticMap,
};
