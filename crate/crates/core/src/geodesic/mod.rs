//! Edge- and label-aware geodesic Voronoi cells and the graph linking them.

mod field;
mod graph;
mod voronoi;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use field::{step_cost, GeodesicWeights, StepCostField};
pub use graph::{build_cell_graph, CellGraph, CellGraphParams, Neighbor};
pub use voronoi::{voronoi_partition, VoronoiPartition};

use crate::error::{Error, Result};
use crate::io::pgm;

/// Debug dump of the partition: seed id modulo 256 per pixel.
pub fn write_voronoi_pgm(part: &VoronoiPartition, path: &Path) -> Result<()> {
    let dims = part.dims();
    let data: Vec<u8> = part
        .nearest_seed()
        .iter()
        .map(|s| (s % 256) as u8)
        .collect();
    pgm::write(path, dims.width, dims.height, &data)
}

/// Debug dump of the cell graph as `n,m,dist,weight` rows.
pub fn write_celldist_csv(graph: &CellGraph, path: &Path) -> Result<()> {
    let mut text = String::from("n,m,dist,weight\n");
    for (n, _, nb) in graph.pairs() {
        writeln!(text, "{n},{},{:?},{:?}", nb.seed, nb.dist, nb.weight).unwrap();
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
