use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::field::StepCostField;
use crate::error::{Error, Result};
use crate::scene::{DepthSample, GridDims};

/// Min-heap entry ordered by `(dist, seed, node)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Frontier {
    pub dist: f64,
    pub seed: usize,
    pub node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.seed.cmp(&self.seed))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Geodesic-nearest seed of every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiPartition {
    dims: GridDims,
    seed_pixels: Vec<usize>,
    nearest_seed: Vec<usize>,
    seed_dist: Vec<f64>,
}

impl VoronoiPartition {
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn num_seeds(&self) -> usize {
        self.seed_pixels.len()
    }

    /// Pixel index of each seed.
    pub fn seed_pixels(&self) -> &[usize] {
        &self.seed_pixels
    }

    pub fn nearest_seed(&self) -> &[usize] {
        &self.nearest_seed
    }

    pub fn seed_dist(&self) -> &[f64] {
        &self.seed_dist
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_seeds()];
        for &s in &self.nearest_seed {
            sizes[s] += 1;
        }
        sizes
    }

    /// Pixel indices of each cell, ascending.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.num_seeds()];
        for (i, &s) in self.nearest_seed.iter().enumerate() {
            cells[s].push(i);
        }
        cells
    }
}

/// Multi-source Dijkstra from all sample pixels at once.
///
/// Seed ids are positions in `seeds`. Each pixel takes the lexicographically
/// smallest `(distance, seed id)`, so equidistant pixels go to the lower id.
pub fn voronoi_partition(field: &StepCostField, seeds: &[DepthSample]) -> Result<VoronoiPartition> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let dims = field.dims();
    let n = dims.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut owner = vec![usize::MAX; n];
    let mut heap = BinaryHeap::with_capacity(seeds.len() * 4);
    let mut seed_pixels = Vec::with_capacity(seeds.len());
    for (id, s) in seeds.iter().enumerate() {
        if !dims.contains(s.pixel.u as i64, s.pixel.v as i64) {
            return Err(Error::OutOfBounds {
                u: s.pixel.u as i64,
                v: s.pixel.v as i64,
                width: dims.width,
                height: dims.height,
            });
        }
        let p = dims.index(s.pixel);
        if owner[p] != usize::MAX {
            return Err(Error::DuplicatePixel {
                u: s.pixel.u,
                v: s.pixel.v,
            });
        }
        dist[p] = 0.0;
        owner[p] = id;
        seed_pixels.push(p);
        heap.push(Frontier {
            dist: 0.0,
            seed: id,
            node: p,
        });
    }
    while let Some(Frontier {
        dist: d,
        seed,
        node,
    }) = heap.pop()
    {
        if d != dist[node] || seed != owner[node] {
            continue;
        }
        for (q, c) in field.neighbors(node) {
            let nd = d + c;
            if nd < dist[q] || (nd == dist[q] && seed < owner[q]) {
                dist[q] = nd;
                owner[q] = seed;
                heap.push(Frontier {
                    dist: nd,
                    seed,
                    node: q,
                });
            }
        }
    }
    Ok(VoronoiPartition {
        dims,
        seed_pixels,
        nearest_seed: owner,
        seed_dist: dist,
    })
}
