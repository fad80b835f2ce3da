use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;

use super::field::StepCostField;
use super::voronoi::{Frontier, VoronoiPartition};
use crate::error::{Error, Result};

/// Pruning and weighting parameters of the cell graph.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellGraphParams {
    /// Neighbors kept per seed.
    pub max_neighbors: usize,
    /// Distances at or beyond this are dropped; also the normalizer of the weights.
    pub d_max: f64,
    pub epsilon: f64,
}

impl Default for CellGraphParams {
    fn default() -> Self {
        Self {
            max_neighbors: 10,
            d_max: 1.0,
            epsilon: 1e-3,
        }
    }
}

impl CellGraphParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_neighbors < 1 {
            return Err(Error::config("n_neighbors", "must be >= 1"));
        }
        if !(self.d_max > 0.0) || !self.d_max.is_finite() {
            return Err(Error::config("d_max", "must be finite and > 0"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `-ln(clamp(dist / d_max, epsilon, 1))`.
    #[inline]
    pub fn weight(&self, dist: f64) -> f64 {
        -(dist / self.d_max).clamp(self.epsilon, 1.0).ln()
    }

    pub fn max_weight(&self) -> f64 {
        -self.epsilon.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub seed: usize,
    pub dist: f64,
    pub weight: f64,
}

/// Seeds linked to their nearest cells under the seed-restricted geodesic distance.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGraph {
    params: CellGraphParams,
    neighbors: Vec<Vec<Neighbor>>,
    // incoming[m] lists (n, slot) with neighbors[n][slot].seed == m
    incoming: Vec<Vec<(usize, usize)>>,
    boundary: Vec<Vec<(usize, f64)>>,
}

impl CellGraph {
    /// Assembles a graph from explicit neighbor lists; lists are sorted by `(dist, seed)`.
    pub fn from_neighbors(params: CellGraphParams, mut neighbors: Vec<Vec<Neighbor>>) -> Self {
        let n = neighbors.len();
        for list in &mut neighbors {
            list.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.seed.cmp(&b.seed)));
        }
        let mut incoming = vec![Vec::new(); n];
        for (src, list) in neighbors.iter().enumerate() {
            for (slot, nb) in list.iter().enumerate() {
                incoming[nb.seed].push((src, slot));
            }
        }
        Self {
            params,
            neighbors,
            incoming,
            boundary: vec![Vec::new(); n],
        }
    }

    pub fn params(&self) -> &CellGraphParams {
        &self.params
    }

    pub fn num_seeds(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, n: usize) -> &[Neighbor] {
        &self.neighbors[n]
    }

    /// Seeds whose neighbor list contains `m`, as `(n, slot)`.
    pub fn incoming(&self, m: usize) -> &[(usize, usize)] {
        &self.incoming[m]
    }

    /// Adjacent cells and the cheapest boundary crossing to each.
    pub fn boundary(&self, n: usize) -> &[(usize, f64)] {
        &self.boundary[n]
    }

    pub fn num_pairs(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// Retained ordered pairs `(n, slot, neighbor)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &Neighbor)> {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(n, l)| l.iter().enumerate().map(move |(k, nb)| (n, k, nb)))
    }

    pub fn find(&self, n: usize, m: usize) -> Option<&Neighbor> {
        self.neighbors[n].iter().find(|nb| nb.seed == m)
    }
}

/// Cheapest crossing between every pair of touching cells.
fn boundary_weights(part: &VoronoiPartition, field: &StepCostField) -> Vec<Vec<(usize, f64)>> {
    let owner = part.nearest_seed();
    let dist = part.seed_dist();
    let mut best: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (p, q, c) in field.pairs() {
        let (a, b) = (owner[p], owner[q]);
        if a == b {
            continue;
        }
        let cross = dist[p] + c + dist[q];
        let key = (a.min(b), a.max(b));
        best.entry(key)
            .and_modify(|v| *v = v.min(cross))
            .or_insert(cross);
    }
    let mut adj = vec![Vec::new(); part.num_seeds()];
    for ((a, b), w) in best {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    for list in &mut adj {
        list.sort_by_key(|e| e.0);
    }
    adj
}

/// Dijkstra over the seed graph from `src`, keeping distances below `d_max`.
fn seed_distances(adj: &[Vec<(usize, f64)>], src: usize, d_max: f64) -> Vec<(usize, f64)> {
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut done = Vec::new();
    let mut heap = BinaryHeap::new();
    dist.insert(src, 0.0);
    heap.push(Frontier {
        dist: 0.0,
        seed: src,
        node: src,
    });
    while let Some(Frontier { dist: d, node, .. }) = heap.pop() {
        if d >= d_max {
            break;
        }
        if dist.get(&node).is_some_and(|best| d > *best) {
            continue;
        }
        if node != src {
            done.push((node, d));
        }
        for &(m, b) in &adj[node] {
            let nd = d + b;
            if nd >= d_max {
                continue;
            }
            if dist.get(&m).is_none_or(|cur| nd < *cur) {
                dist.insert(m, nd);
                heap.push(Frontier {
                    dist: nd,
                    seed: src,
                    node: m,
                });
            }
        }
    }
    done.sort_by_key(|e| e.0);
    done
}

/// Links every seed to its nearest cells along paths forced through the seeds of traversed cells.
///
/// Touching cells `n`, `m` are joined with the cheapest crossing
/// `dist(p) + cost(p, q) + dist(q)` over 8-neighbors `p` in `n`, `q` in `m`;
/// seed-to-seed distances are shortest paths over those crossings, symmetrized
/// by taking the smaller of the two directed Dijkstra sums. Per seed the
/// `max_neighbors` closest seeds below `d_max` are retained.
pub fn build_cell_graph(
    part: &VoronoiPartition,
    field: &StepCostField,
    params: CellGraphParams,
) -> Result<CellGraph> {
    params.validate()?;
    if part.dims() != field.dims() {
        return Err(Error::DimensionMismatch {
            expected: (part.dims().width, part.dims().height),
            found: (field.dims().width, field.dims().height),
        });
    }
    let adj = boundary_weights(part, field);
    let reach: Vec<Vec<(usize, f64)>> = (0..part.num_seeds())
        .into_par_iter()
        .map(|n| seed_distances(&adj, n, params.d_max))
        .collect();
    let lookup = |n: usize, m: usize| -> Option<f64> {
        reach[n]
            .binary_search_by_key(&m, |e| e.0)
            .ok()
            .map(|k| reach[n][k].1)
    };
    let neighbors: Vec<Vec<Neighbor>> = reach
        .iter()
        .enumerate()
        .map(|(n, list)| {
            let mut nbs: Vec<Neighbor> = list
                .iter()
                .map(|&(m, d)| {
                    let dist = lookup(m, n).map_or(d, |back| d.min(back));
                    Neighbor {
                        seed: m,
                        dist,
                        weight: params.weight(dist),
                    }
                })
                .collect();
            nbs.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.seed.cmp(&b.seed)));
            nbs.truncate(params.max_neighbors);
            nbs
        })
        .collect();
    let mut graph = CellGraph::from_neighbors(params, neighbors);
    graph.boundary = adj;
    Ok(graph)
}
