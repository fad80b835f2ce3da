//! Exact pixel-grid geodesic distances, for checking the cell-graph approximation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geodesic::StepCostField;
use crate::scene::DepthSample;

/// Largest grid side the oracle accepts.
pub const ORACLE_LIMIT: usize = 64;

struct Key(f64);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Plain single-source Dijkstra over the full pixel grid.
pub fn single_source(field: &StepCostField, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; field.dims().len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), p))) = heap.pop() {
        if d > dist[p] {
            continue;
        }
        for (q, c) in field.neighbors(p) {
            let nd = d + c;
            if nd < dist[q] {
                dist[q] = nd;
                heap.push(Reverse((Key(nd), q)));
            }
        }
    }
    dist
}

/// Exact distance between every pair of seed pixels; `result[n][m]`.
pub fn oracle_geodesic(field: &StepCostField, seeds: &[DepthSample]) -> Result<Vec<Vec<f64>>> {
    let dims = field.dims();
    if dims.width > ORACLE_LIMIT || dims.height > ORACLE_LIMIT {
        return Err(Error::GridTooLarge {
            width: dims.width,
            height: dims.height,
            limit: ORACLE_LIMIT,
        });
    }
    let pixels: Vec<usize> = seeds.iter().map(|s| dims.index(s.pixel)).collect();
    Ok(pixels
        .iter()
        .map(|&p| {
            let d = single_source(field, p);
            pixels.iter().map(|&q| d[q]).collect()
        })
        .collect())
}
