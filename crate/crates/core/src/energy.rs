//! Cell-level energy: per-seed planes, outlier flags and coplanarity flags.
//!
//! The pairwise term of two cells is a plane disagreement summed over the
//! pixels of the first cell. It is evaluated in constant time from the
//! cell's second moments `sum x x^T`, `x = (u', v', 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{CellGraph, VoronoiPartition};
use crate::linalg::{self, Mat3, Vec3};
use crate::scene::{DepthSample, GridDims, NormalizedCoord};

/// Inverse depth `a*u' + b*v' + c` over normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Plane {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub const fn fronto_parallel(inverse_depth: f64) -> Self {
        Self::new(0.0, 0.0, inverse_depth)
    }

    #[inline]
    pub fn eval(&self, x: &NormalizedCoord) -> f64 {
        self.a * x.u + self.b * x.v + self.c
    }

    #[inline]
    pub fn eval_h(&self, x: &Vec3) -> f64 {
        self.a * x[0] + self.b * x[1] + self.c * x[2]
    }

    #[inline]
    pub fn to_vec(self) -> Vec3 {
        [self.a, self.b, self.c]
    }

    #[inline]
    pub fn from_vec(v: Vec3) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }
}

/// Second moments of a cell's homogeneous pixel coordinates.
///
/// Kept in centered form (mean plus scatter) so the quadratic form is a sum
/// of non-negative parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMoments {
    count: usize,
    mean: [f64; 2],
    // centered scatter: (suu, suv, svv)
    scatter: [f64; 3],
    matrix: Mat3,
}

impl CellMoments {
    pub fn from_pixels(dims: GridDims, pixels: &[usize]) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::Invalid(
                "cell moments need at least one pixel".into(),
            ));
        }
        let n = pixels.len() as f64;
        let (mut su, mut sv) = (0.0, 0.0);
        for &i in pixels {
            let x = dims.normalize_index(i);
            su += x.u;
            sv += x.v;
        }
        let mean = [su / n, sv / n];
        let mut scatter = [0.0; 3];
        for &i in pixels {
            let x = dims.normalize_index(i);
            let (du, dv) = (x.u - mean[0], x.v - mean[1]);
            scatter[0] += du * du;
            scatter[1] += du * dv;
            scatter[2] += dv * dv;
        }
        let [mu, mv] = mean;
        let matrix = [
            [n * mu * mu + scatter[0], n * mu * mv + scatter[1], n * mu],
            [n * mu * mv + scatter[1], n * mv * mv + scatter[2], n * mv],
            [n * mu, n * mv, n],
        ];
        Ok(Self {
            count: pixels.len(),
            mean,
            scatter,
            matrix,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `sum_p x_p x_p^T` over the cell.
    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    /// `d^T M d`, the summed squared disagreement of two planes differing by `d`.
    #[inline]
    pub fn quad_form(&self, d: &Vec3) -> f64 {
        let at_mean = d[0] * self.mean[0] + d[1] * self.mean[1] + d[2];
        let [suu, suv, svv] = self.scatter;
        let spread = d[0] * d[0] * suu + 2.0 * d[0] * d[1] * suv + d[1] * d[1] * svv;
        self.count as f64 * at_mean * at_mean + spread.max(0.0)
    }
}

pub fn cell_moments(part: &VoronoiPartition) -> Result<Vec<CellMoments>> {
    part.cells()
        .iter()
        .map(|cell| CellMoments::from_pixels(part.dims(), cell))
        .collect()
}

/// Posterior-logistic outlier model on the deviation `r` of a sample from its connected planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierModel {
    /// Prior probability of a sample being an outlier.
    pub prior: f64,
    /// Deviation (inverse depth) at which the likelihood ratio is neutral.
    pub tau: f64,
    /// Softness of the logistic transition.
    pub scale: f64,
}

impl Default for OutlierModel {
    fn default() -> Self {
        Self {
            prior: 0.1,
            tau: 0.01,
            scale: 0.002,
        }
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl OutlierModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.prior > 0.0 && self.prior < 1.0) {
            return Err(Error::config("outlier_prior", "must lie in (0, 1)"));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::config("outlier_tau", "must be finite and > 0"));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::config("outlier_scale", "must be finite and > 0"));
        }
        Ok(())
    }

    /// `(E(o = 0), E(o = 1))` = `(-ln(1 - p), -ln p)`, evaluated in the log domain.
    pub fn energies(&self, residual: f64) -> (f64, f64) {
        let t = (residual - self.tau) / self.scale;
        // ln sigma(t) = -softplus(-t), ln(1 - sigma(t)) = -softplus(t)
        let log_out = self.prior.ln() - softplus(-t);
        let log_in = (1.0 - self.prior).ln() - softplus(t);
        let hi = log_out.max(log_in);
        let log_z = hi + ((log_out - hi).exp() + (log_in - hi).exp()).ln();
        (log_z - log_in, log_z - log_out)
    }

    /// Posterior probability of being an outlier.
    pub fn probability(&self, residual: f64) -> f64 {
        (-self.energies(residual).1).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub w_una: f64,
    pub w_c: f64,
    pub lambda_c: f64,
    pub outlier: OutlierModel,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            w_una: 1.0,
            w_c: 1e-4,
            lambda_c: 1e-5,
            outlier: OutlierModel::default(),
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_una >= 0.0) || !self.w_una.is_finite() {
            return Err(Error::config("w_una", "must be finite and >= 0"));
        }
        if !(self.w_c >= 0.0) || !self.w_c.is_finite() {
            return Err(Error::config("w_c", "must be finite and >= 0"));
        }
        if !(self.lambda_c > 0.0) || !self.lambda_c.is_finite() {
            return Err(Error::config("lambda_c", "must be finite and > 0"));
        }
        self.outlier.validate()
    }
}

/// Everything the energy needs besides the variables: samples, cell graph and moments.
#[derive(Debug, Clone)]
pub struct Problem {
    dims: GridDims,
    samples: Vec<DepthSample>,
    coords: Vec<Vec3>,
    graph: CellGraph,
    moments: Vec<CellMoments>,
}

impl Problem {
    pub fn new(
        dims: GridDims,
        samples: Vec<DepthSample>,
        graph: CellGraph,
        moments: Vec<CellMoments>,
    ) -> Result<Self> {
        if samples.len() != graph.num_seeds() || samples.len() != moments.len() {
            return Err(Error::Invalid(format!(
                "{} samples, {} graph seeds, {} cells",
                samples.len(),
                graph.num_seeds(),
                moments.len()
            )));
        }
        let coords = samples
            .iter()
            .map(|s| dims.normalize(s.pixel).homogeneous())
            .collect();
        Ok(Self {
            dims,
            samples,
            coords,
            graph,
            moments,
        })
    }

    /// Builds the problem from a partition whose seeds are `samples`.
    pub fn from_partition(
        part: &VoronoiPartition,
        graph: CellGraph,
        samples: Vec<DepthSample>,
    ) -> Result<Self> {
        Self::new(part.dims(), samples, graph, cell_moments(part)?)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn num_seeds(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[DepthSample] {
        &self.samples
    }

    pub fn graph(&self) -> &CellGraph {
        &self.graph
    }

    pub fn moments(&self) -> &[CellMoments] {
        &self.moments
    }

    /// Homogeneous normalized coordinate of seed `n`.
    #[inline]
    pub fn coord(&self, n: usize) -> &Vec3 {
        &self.coords[n]
    }

    #[inline]
    pub fn target(&self, n: usize) -> f64 {
        self.samples[n].inverse_depth()
    }
}

/// All optimization variables plus the energy they attain.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub planes: Vec<Plane>,
    pub outlier: Vec<bool>,
    /// Aligned with the graph's neighbor lists: `coplanar[n][slot]`.
    pub coplanar: Vec<Vec<bool>>,
    /// Deviation each seed's outlier energy is currently evaluated at.
    /// Refreshed from planes and flags by the outlier update.
    pub residual: Vec<f64>,
    pub energy: f64,
}

impl SolverState {
    /// Outliers off, every retained pair coplanar, residuals taken from the given planes.
    pub fn with_planes(problem: &Problem, planes: Vec<Plane>, params: &EnergyParams) -> Self {
        let g = problem.graph();
        let mut state = Self {
            outlier: vec![false; planes.len()],
            coplanar: (0..g.num_seeds())
                .map(|n| vec![true; g.neighbors(n).len()])
                .collect(),
            residual: vec![0.0; planes.len()],
            planes,
            energy: 0.0,
        };
        state.refresh_residuals(problem);
        state.energy = total_energy(problem, &state, params);
        state
    }

    pub fn refresh_residuals(&mut self, problem: &Problem) {
        self.residual = (0..problem.num_seeds())
            .map(|n| outlier_residual(problem, self, n))
            .collect();
    }

    pub fn num_outliers(&self) -> usize {
        self.outlier.iter().filter(|o| **o).count()
    }
}

#[inline]
pub fn unary_energy(
    plane: &Plane,
    x: &Vec3,
    inverse_depth: f64,
    outlier: bool,
    p: &EnergyParams,
) -> f64 {
    if outlier {
        return 0.0;
    }
    let r = plane.eval_h(x) - inverse_depth;
    p.w_una * r * r
}

/// Disagreement of `theta_n` and `theta_m` summed over cell `n`, or the constant break penalty.
#[inline]
pub fn pairwise_energy(
    theta_n: &Plane,
    theta_m: &Plane,
    coplanar: bool,
    cell: &CellMoments,
    p: &EnergyParams,
) -> f64 {
    if coplanar {
        let d = linalg::sub(&theta_n.to_vec(), &theta_m.to_vec());
        p.w_c * cell.quad_form(&d)
    } else {
        cell.count() as f64 * p.lambda_c
    }
}

/// Smallest deviation of sample `n` from a plane it is connected to, or from its own plane if none.
pub fn outlier_residual(problem: &Problem, state: &SolverState, n: usize) -> f64 {
    let x = problem.coord(n);
    let target = problem.target(n);
    let connected = problem
        .graph()
        .neighbors(n)
        .iter()
        .zip(&state.coplanar[n])
        .filter(|(_, c)| **c)
        .map(|(nb, _)| (state.planes[nb.seed].eval_h(x) - target).abs())
        .fold(f64::INFINITY, f64::min);
    if connected.is_finite() {
        connected
    } else {
        (state.planes[n].eval_h(x) - target).abs()
    }
}

/// Outlier probability of sample `n` under the current planes and coplanarity flags.
pub fn outlier_probability(
    problem: &Problem,
    state: &SolverState,
    n: usize,
    p: &EnergyParams,
) -> f64 {
    p.outlier.probability(outlier_residual(problem, state, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyBreakdown {
    pub unary: f64,
    pub pairwise: f64,
    pub outlier: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.unary + self.pairwise + self.outlier
    }
}

/// Energy terms summed in ascending seed and slot order.
pub fn energy_breakdown(
    problem: &Problem,
    state: &SolverState,
    p: &EnergyParams,
) -> EnergyBreakdown {
    let mut e = EnergyBreakdown::default();
    for n in 0..problem.num_seeds() {
        let o = state.outlier[n];
        e.unary += unary_energy(&state.planes[n], problem.coord(n), problem.target(n), o, p);
        let (e0, e1) = p.outlier.energies(state.residual[n]);
        e.outlier += if o { e1 } else { e0 };
        for (nb, &c) in problem.graph().neighbors(n).iter().zip(&state.coplanar[n]) {
            e.pairwise += nb.weight
                * pairwise_energy(
                    &state.planes[n],
                    &state.planes[nb.seed],
                    c,
                    &problem.moments()[n],
                    p,
                );
        }
    }
    e
}

pub fn total_energy(problem: &Problem, state: &SolverState, p: &EnergyParams) -> f64 {
    energy_breakdown(problem, state, p).total()
}
