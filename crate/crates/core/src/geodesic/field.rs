//! Per-step path costs on the 8-connected pixel grid.

use crate::error::{Error, Result};
use crate::scene::{EdgeMap, GridDims, PixelCoord, SemanticMap};

/// Mixing weights for edge, semantic and path-length costs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeodesicWeights {
    pub w_i: f64,
    pub w_s: f64,
    pub w_d: f64,
}

impl Default for GeodesicWeights {
    fn default() -> Self {
        Self {
            w_i: 20.0,
            w_s: 20.0,
            w_d: 1.0,
        }
    }
}

impl GeodesicWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_i >= 0.0) || !self.w_i.is_finite() {
            return Err(Error::config("w_i", "must be finite and >= 0"));
        }
        if !(self.w_s >= 0.0) || !self.w_s.is_finite() {
            return Err(Error::config("w_s", "must be finite and >= 0"));
        }
        if !(self.w_d > 0.0) || !self.w_d.is_finite() {
            return Err(Error::config("w_d", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Forward neighbor offsets; the other four directions are their reverses.
pub(crate) const FORWARD: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (-1, 1)];

/// All eight neighbor offsets.
pub(crate) const NEIGHBORS: [(i64, i64); 8] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (-1, 1),
    (-1, 0),
    (0, -1),
    (-1, -1),
    (1, -1),
];

fn step_length(du: i64, dv: i64) -> f64 {
    if du != 0 && dv != 0 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

fn adjacency(p: PixelCoord, q: PixelCoord) -> Result<(i64, i64)> {
    let du = q.u as i64 - p.u as i64;
    let dv = q.v as i64 - p.v as i64;
    if du.abs() > 1 || dv.abs() > 1 || (du == 0 && dv == 0) {
        return Err(Error::NotAdjacent {
            p: (p.u, p.v),
            q: (q.u, q.v),
        });
    }
    Ok((du, dv))
}

#[inline]
fn raw_cost(
    pi: usize,
    qi: usize,
    len: f64,
    edges: &EdgeMap,
    sem: Option<&SemanticMap>,
    gw: &GeodesicWeights,
) -> f64 {
    let edge = gw.w_i * 0.5 * (edges.score(pi) + edges.score(qi));
    match sem {
        Some(sem) => {
            let agree = sem
                .probs(pi)
                .iter()
                .zip(sem.probs(qi))
                .map(|(a, b)| (a * b).sqrt())
                .fold(0.0f64, f64::max);
            len * (edge + gw.w_s * (1.0 - agree) + gw.w_d) / (gw.w_i + gw.w_s + gw.w_d)
        }
        None => len * (edge + gw.w_d) / (gw.w_i + gw.w_d),
    }
}

/// Cost of stepping between 8-neighbors `p` and `q`.
///
/// Mean endpoint edge score, one minus the best per-label geometric-mean
/// agreement, and a constant length term, mixed by `gw` and scaled by the
/// Euclidean step length. Without semantics the label term and its weight drop out.
pub fn step_cost(
    p: PixelCoord,
    q: PixelCoord,
    edges: &EdgeMap,
    sem: Option<&SemanticMap>,
    gw: &GeodesicWeights,
) -> Result<f64> {
    let (du, dv) = adjacency(p, q)?;
    let dims = edges.dims();
    Ok(raw_cost(
        dims.index(p),
        dims.index(q),
        step_length(du, dv),
        edges,
        sem,
        gw,
    ))
}

/// Symmetric step costs for every 8-connected pixel pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCostField {
    dims: GridDims,
    // forward[i][k] is the cost from pixel i towards FORWARD[k]; infinite off-grid
    forward: Vec<[f64; 4]>,
}

impl StepCostField {
    /// Builds a field by evaluating `cost` once per undirected neighbor pair.
    pub fn from_fn(
        dims: GridDims,
        mut cost: impl FnMut(PixelCoord, PixelCoord) -> f64,
    ) -> Result<Self> {
        let mut forward = vec![[f64::INFINITY; 4]; dims.len()];
        for v in 0..dims.height {
            for u in 0..dims.width {
                let p = PixelCoord::new(u, v);
                for (k, (du, dv)) in FORWARD.iter().enumerate() {
                    let (qu, qv) = (u as i64 + du, v as i64 + dv);
                    if !dims.contains(qu, qv) {
                        continue;
                    }
                    let c = cost(p, PixelCoord::new(qu as usize, qv as usize));
                    if !(c > 0.0) || !c.is_finite() {
                        return Err(Error::Invalid(format!(
                            "step cost {c} at ({u}, {v}) must be positive and finite"
                        )));
                    }
                    forward[dims.index(p)][k] = c;
                }
            }
        }
        Ok(Self { dims, forward })
    }

    pub fn from_inputs(
        edges: &EdgeMap,
        sem: Option<&SemanticMap>,
        gw: &GeodesicWeights,
    ) -> Result<Self> {
        gw.validate()?;
        let dims = edges.dims();
        if let Some(sem) = sem {
            dims.check(sem.dims().width, sem.dims().height)?;
        }
        Self::from_fn(dims, |p, q| {
            let len = step_length(q.u as i64 - p.u as i64, q.v as i64 - p.v as i64);
            raw_cost(dims.index(p), dims.index(q), len, edges, sem, gw)
        })
    }

    /// Axis steps cost `axis`, diagonal steps `axis * sqrt(2)`.
    pub fn uniform(dims: GridDims, axis: f64) -> Result<Self> {
        Self::from_fn(dims, |p, q| {
            axis * step_length(q.u as i64 - p.u as i64, q.v as i64 - p.v as i64)
        })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn cost(&self, p: PixelCoord, q: PixelCoord) -> Result<f64> {
        let (du, dv) = adjacency(p, q)?;
        if !self.dims.contains(q.u as i64, q.v as i64)
            || !self.dims.contains(p.u as i64, p.v as i64)
        {
            return Err(Error::NotAdjacent {
                p: (p.u, p.v),
                q: (q.u, q.v),
            });
        }
        Ok(self.cost_by_offset(self.dims.index(p), du, dv))
    }

    #[inline]
    fn cost_by_offset(&self, pi: usize, du: i64, dv: i64) -> f64 {
        match (du, dv) {
            (1, 0) => self.forward[pi][0],
            (0, 1) => self.forward[pi][1],
            (1, 1) => self.forward[pi][2],
            (-1, 1) => self.forward[pi][3],
            _ => {
                let qi = (pi as i64 + dv * self.dims.width as i64 + du) as usize;
                self.cost_by_offset(qi, -du, -dv)
            }
        }
    }

    /// In-grid neighbors of pixel `index` with the step cost to each.
    #[inline]
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let w = self.dims.width as i64;
        let (u, v) = ((index as i64) % w, (index as i64) / w);
        NEIGHBORS.iter().filter_map(move |&(du, dv)| {
            let (qu, qv) = (u + du, v + dv);
            if !self.dims.contains(qu, qv) {
                return None;
            }
            Some(((qv * w + qu) as usize, self.cost_by_offset(index, du, dv)))
        })
    }

    /// Forward neighbor pairs `(p, q, cost)`, each undirected pair once.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.dims.width as i64;
        (0..self.dims.len()).flat_map(move |pi| {
            let (u, v) = ((pi as i64) % w, (pi as i64) / w);
            FORWARD
                .iter()
                .enumerate()
                .filter_map(move |(k, &(du, dv))| {
                    let (qu, qv) = (u + du, v + dv);
                    if !self.dims.contains(qu, qv) {
                        return None;
                    }
                    Some((pi, (qv * w + qu) as usize, self.forward[pi][k]))
                })
        })
    }
}
