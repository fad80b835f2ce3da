//! End-to-end upsampling: inputs to partition, graph, solve and dense map.

use std::path::Path;

use crate::config::RunConfig;
use crate::energy::Problem;
use crate::error::{Error, Result};
use crate::geodesic::{
    build_cell_graph, voronoi_partition, write_celldist_csv, write_voronoi_pgm, StepCostField,
    VoronoiPartition,
};
use crate::io::{self, pfm, raster};
use crate::scene::{DenseDepthMap, DepthSample, EdgeMap, GridDims, SemanticMap};
use crate::solver::{initialize, optimize, render, write_energy_trace, Solution, SolverStats};

pub const TRACE_FILE: &str = "energy_trace.csv";
pub const VORONOI_FILE: &str = "voronoi.pgm";
pub const CELLDIST_FILE: &str = "celldist.csv";

#[derive(Debug, Clone)]
pub struct Inputs {
    pub dims: GridDims,
    pub samples: Vec<DepthSample>,
    pub edges: EdgeMap,
    pub semantics: Option<SemanticMap>,
}

#[derive(Debug, Clone)]
pub struct Upsampled {
    pub partition: VoronoiPartition,
    pub problem: Problem,
    pub solution: Solution,
    pub map: DenseDepthMap,
    pub stats: SolverStats,
}

/// Grid size from the config, else from the first raster input that has one.
fn resolve_dims(cfg: &RunConfig, sem: Option<&SemanticMap>) -> Result<GridDims> {
    let found = if let (Some(w), Some(h)) = (cfg.width, cfg.height) {
        Some((w, h))
    } else if let Some(sem) = sem {
        Some((sem.dims().width, sem.dims().height))
    } else if let Some(path) = &cfg.edges {
        match io::pgm::read(path) {
            Ok(img) => Some((img.width, img.height)),
            Err(_) => {
                let img = pfm::read(path)?;
                Some((img.width, img.height))
            }
        }
    } else if let Some(path) = &cfg.image {
        let img = raster::read_gray8(path)?;
        Some((img.width, img.height))
    } else {
        None
    };
    let (w, h) = found
        .ok_or_else(|| Error::config("width", "missing and no raster input to infer it from"))?;
    let dims = GridDims::new(w, h)?;
    if let (Some(cw), Some(ch)) = (cfg.width, cfg.height) {
        dims.check(cw, ch)?;
    }
    Ok(dims)
}

/// Loads samples, edges and semantics named by the config.
///
/// Edges come from `edges` if set, else from gradients of `image`, else zero.
pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    cfg.validate()?;
    cfg.check_inputs()?;
    let samples_path = cfg
        .samples
        .as_ref()
        .ok_or_else(|| Error::config("samples", "missing"))?;
    let semantics = cfg
        .semantics
        .as_deref()
        .map(io::load_semantic_map)
        .transpose()?;
    let dims = resolve_dims(cfg, semantics.as_ref())?;
    if let Some(sem) = &semantics {
        dims.check(sem.dims().width, sem.dims().height)?;
    }
    let edges = match (&cfg.edges, &cfg.image) {
        (Some(path), _) => io::load_edge_map(path, dims)?,
        (None, Some(path)) => io::fallback_edges_from_file(path, dims)?,
        (None, None) => EdgeMap::zeros(dims),
    };
    let samples = io::load_samples(samples_path, cfg.sample_units, dims)?;
    Ok(Inputs {
        dims,
        samples,
        edges,
        semantics,
    })
}

/// Partitions, builds the cell graph, optimizes and renders.
pub fn upsample(inputs: &Inputs, cfg: &RunConfig) -> Result<Upsampled> {
    cfg.validate()?;
    if inputs.samples.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let field =
        StepCostField::from_inputs(&inputs.edges, inputs.semantics.as_ref(), &cfg.geodesic)?;
    let partition = voronoi_partition(&field, &inputs.samples)?;
    let graph = build_cell_graph(&partition, &field, cfg.graph)?;
    let problem = Problem::from_partition(&partition, graph, inputs.samples.clone())?;
    let state = initialize(
        &problem,
        &partition,
        inputs.semantics.as_ref(),
        &cfg.solver,
        &cfg.energy,
    );
    let solution = optimize(&problem, state, &cfg.energy, &cfg.solver);
    let map = render(&solution.state, &partition, &cfg.solver);
    let stats = solution.stats(&problem, &cfg.solver);
    Ok(Upsampled {
        partition,
        problem,
        solution,
        map,
        stats,
    })
}

/// Writes the dense outputs plus the trace and debug dumps the config asks for.
pub fn write_upsampled(result: &Upsampled, cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    io::write_outputs(&result.map, out_dir, &result.stats)?;
    if cfg.trace {
        write_energy_trace(&result.solution.trace, &out_dir.join(TRACE_FILE))?;
    }
    if cfg.debug {
        write_voronoi_pgm(&result.partition, &out_dir.join(VORONOI_FILE))?;
        write_celldist_csv(result.problem.graph(), &out_dir.join(CELLDIST_FILE))?;
    }
    Ok(())
}

/// Loads, solves and writes in one call.
pub fn run(cfg: &RunConfig) -> Result<Upsampled> {
    let inputs = load_inputs(cfg)?;
    let result = upsample(&inputs, cfg)?;
    write_upsampled(&result, cfg, &cfg.out_dir)?;
    Ok(result)
}
