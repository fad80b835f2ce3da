//! Block-coordinate minimization of the cell energy.
//!
//! Each iteration updates coplanarity flags, then outlier flags, then planes.
//! Flag updates are exact per-flag minimizers. Plane updates solve the 3x3
//! normal equations of every term containing the plane, plus a small
//! proximal anchor `mu * |theta - theta_prev|^2` that keeps isolated cells
//! well-posed.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{
    outlier_residual, total_energy, unary_energy, EnergyParams, Plane, Problem, SolverState,
};
use crate::error::{Error, Result};
use crate::geodesic::VoronoiPartition;
use crate::linalg::{self, Mat3, Vec3, ZERO3};
use crate::scene::{DenseDepthMap, SemanticMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// In-place sweep in ascending seed order.
    #[default]
    GaussSeidel,
    /// Every plane solved against a frozen snapshot, in parallel.
    Jacobi,
}

impl Schedule {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gauss-seidel" | "gauss_seidel" => Some(Self::GaussSeidel),
            "jacobi" => Some(Self::Jacobi),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GaussSeidel => "gauss-seidel",
            Self::Jacobi => "jacobi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol_energy: f64,
    pub schedule: Schedule,
    /// Proximal weight `mu` of every plane solve.
    pub tikhonov: f64,
    /// Label names treated as ground for the upright-plane initialization.
    pub ground_labels: Vec<String>,
    /// Depth cap; rendered inverse depth below `1 / z_max` is clamped and marked invalid.
    pub z_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol_energy: 1e-7,
            schedule: Schedule::GaussSeidel,
            tikhonov: 1e-9,
            ground_labels: Vec::new(),
            z_max: 1e4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_energy > 0.0) || !self.tol_energy.is_finite() {
            return Err(Error::config("tol_energy", "must be finite and > 0"));
        }
        if !(self.tikhonov > 0.0) || !self.tikhonov.is_finite() {
            return Err(Error::config("tikhonov", "must be finite and > 0"));
        }
        if !(self.z_max > 0.0) || !self.z_max.is_finite() {
            return Err(Error::config("z_max", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Init,
    Coplanarity,
    /// Outlier residuals re-evaluated at the current planes and flags.
    Refresh,
    Outliers,
    Planes,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Init => "init",
            Stage::Coplanarity => "coplanarity",
            Stage::Refresh => "refresh",
            Stage::Outliers => "outliers",
            Stage::Planes => "planes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub stage: Stage,
    pub energy: f64,
    /// Energy when the stage started; equal to the previous entry's energy.
    pub energy_before: f64,
    /// `mu * sum |theta - theta_prev|^2` accumulated by a plane sweep.
    pub proximal: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub state: SolverState,
    /// Planes at the start of the last plane sweep, the proximal anchor it used.
    pub anchor: Vec<Plane>,
    pub trace: Vec<TraceEntry>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverStats {
    pub seeds: usize,
    pub pairs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub energy: f64,
    pub outliers: usize,
    pub broken_pairs: usize,
    pub schedule: Schedule,
}

impl Solution {
    pub fn stats(&self, problem: &Problem, cfg: &SolverConfig) -> SolverStats {
        SolverStats {
            seeds: problem.num_seeds(),
            pairs: problem.graph().num_pairs(),
            iterations: self.iterations,
            converged: self.converged,
            energy: self.state.energy,
            outliers: self.state.num_outliers(),
            broken_pairs: self
                .state
                .coplanar
                .iter()
                .flatten()
                .filter(|c| !**c)
                .count(),
            schedule: cfg.schedule,
        }
    }
}

/// Writes the trace as `iter,stage,energy` rows.
pub fn write_energy_trace(trace: &[TraceEntry], path: &Path) -> Result<()> {
    let mut text = String::from("iter,stage,energy\n");
    for t in trace {
        writeln!(text, "{},{},{:?}", t.iter, t.stage, t.energy).unwrap();
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Least-squares line `y = slope * x + offset`; `None` unless at least two distinct `x`.
fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Seeds whose cells have more than half their pixels labeled as ground.
pub fn ground_cells(
    part: &VoronoiPartition,
    sem: &SemanticMap,
    ground_labels: &[String],
) -> Vec<bool> {
    let ground: Vec<bool> = sem
        .labels()
        .iter()
        .map(|l| ground_labels.iter().any(|g| g == l))
        .collect();
    let mut hits = vec![0usize; part.num_seeds()];
    for (i, &s) in part.nearest_seed().iter().enumerate() {
        if ground[sem.argmax(i)] {
            hits[s] += 1;
        }
    }
    hits.iter()
        .zip(part.cell_sizes())
        .map(|(&h, size)| 2 * h > size)
        .collect()
}

/// Fronto-parallel planes through every sample, flags cleared.
///
/// With semantics and ground labels, ground-dominated cells instead get the
/// scene-wide ground slope along `v'` (fitted over their samples) with an
/// offset through their own sample. Skipped when fewer than two ground cells
/// at distinct rows exist.
pub fn initialize(
    problem: &Problem,
    part: &VoronoiPartition,
    sem: Option<&SemanticMap>,
    cfg: &SolverConfig,
    params: &EnergyParams,
) -> SolverState {
    let mut planes: Vec<Plane> = (0..problem.num_seeds())
        .map(|n| Plane::fronto_parallel(problem.target(n)))
        .collect();
    if let Some(sem) = sem.filter(|_| !cfg.ground_labels.is_empty()) {
        let ground = ground_cells(part, sem, &cfg.ground_labels);
        let points: Vec<(f64, f64)> = (0..problem.num_seeds())
            .filter(|&n| ground[n])
            .map(|n| (problem.coord(n)[1], problem.target(n)))
            .collect();
        if let Some((slope, _)) = fit_line(&points) {
            for n in (0..problem.num_seeds()).filter(|&n| ground[n]) {
                let v = problem.coord(n)[1];
                planes[n] = Plane::new(0.0, slope, problem.target(n) - slope * v);
            }
        }
    }
    SolverState::with_planes(problem, planes, params)
}

/// Keeps a pair coplanar iff its disagreement cost does not exceed the break penalty.
pub fn update_coplanarity(problem: &Problem, state: &mut SolverState, p: &EnergyParams) {
    let g = problem.graph();
    for n in 0..problem.num_seeds() {
        let cell = &problem.moments()[n];
        let penalty = cell.count() as f64 * p.lambda_c;
        let theta_n = state.planes[n].to_vec();
        for (slot, nb) in g.neighbors(n).iter().enumerate() {
            let d = linalg::sub(&theta_n, &state.planes[nb.seed].to_vec());
            state.coplanar[n][slot] = p.w_c * cell.quad_form(&d) <= penalty;
        }
    }
}

/// Refreshes every seed's outlier residual, then picks the cheaper outlier flag.
pub fn update_outliers(problem: &Problem, state: &mut SolverState, p: &EnergyParams) {
    state.refresh_residuals(problem);
    choose_outliers(problem, state, p);
}

fn choose_outliers(problem: &Problem, state: &mut SolverState, p: &EnergyParams) {
    for n in 0..problem.num_seeds() {
        let keep = unary_energy(
            &state.planes[n],
            problem.coord(n),
            problem.target(n),
            false,
            p,
        );
        let (e_in, e_out) = p.outlier.energies(state.residual[n]);
        state.outlier[n] = keep + e_in > e_out;
    }
}

/// Normal equations of every term containing plane `n` plus the proximal
/// anchor, written for the step `delta = theta - planes[n]`: `A delta = r`.
fn plane_system(
    problem: &Problem,
    planes: &[Plane],
    state: &SolverState,
    n: usize,
    p: &EnergyParams,
    mu: f64,
) -> (Mat3, Vec3) {
    let mut a = ZERO3;
    let mut r = [0.0; 3];
    let theta = planes[n].to_vec();
    if !state.outlier[n] {
        let x = problem.coord(n);
        linalg::add_scaled(&mut a, &linalg::outer(x), p.w_una);
        let t = p.w_una * (problem.target(n) - linalg::dot(x, &theta));
        for k in 0..3 {
            r[k] += t * x[k];
        }
    }
    let g = problem.graph();
    let mut couple = |m: usize, weight: f64, cell: &Mat3| {
        let s = p.w_c * weight;
        linalg::add_scaled(&mut a, cell, s);
        let pull = linalg::mat_vec(cell, &linalg::sub(&planes[m].to_vec(), &theta));
        for k in 0..3 {
            r[k] += s * pull[k];
        }
    };
    let own = problem.moments()[n].matrix();
    for (slot, nb) in g.neighbors(n).iter().enumerate() {
        if state.coplanar[n][slot] {
            couple(nb.seed, nb.weight, own);
        }
    }
    for &(m, slot) in g.incoming(n) {
        if state.coplanar[m][slot] {
            couple(
                m,
                g.neighbors(m)[slot].weight,
                problem.moments()[m].matrix(),
            );
        }
    }
    for (k, row) in a.iter_mut().enumerate() {
        row[k] += mu;
    }
    (a, r)
}

fn solve_against(
    problem: &Problem,
    planes: &[Plane],
    state: &SolverState,
    n: usize,
    p: &EnergyParams,
    mu: f64,
) -> Plane {
    let (a, r) = plane_system(problem, planes, state, n, p, mu);
    // mu > 0 keeps A positive definite
    match linalg::solve3(a, r) {
        Some(delta) => {
            let t = planes[n];
            Plane::new(t.a + delta[0], t.b + delta[1], t.c + delta[2])
        }
        None => planes[n],
    }
}

/// Exact minimizer over plane `n` of its energy terms plus `mu * |theta - theta_n|^2`,
/// all other variables held at their values in `state`.
pub fn solve_plane(
    problem: &Problem,
    state: &SolverState,
    n: usize,
    p: &EnergyParams,
    cfg: &SolverConfig,
) -> Plane {
    solve_against(problem, &state.planes, state, n, p, cfg.tikhonov)
}

/// The local objective [`solve_plane`] minimizes, evaluated at `theta`.
pub fn local_objective(
    problem: &Problem,
    state: &SolverState,
    n: usize,
    theta: &Plane,
    p: &EnergyParams,
    mu: f64,
) -> f64 {
    let mut planes = state.planes.clone();
    let anchor = planes[n];
    planes[n] = *theta;
    let mut e = unary_energy(
        theta,
        problem.coord(n),
        problem.target(n),
        state.outlier[n],
        p,
    );
    let g = problem.graph();
    let diff = |cell: &crate::energy::CellMoments, x: &Plane, y: &Plane| {
        cell.quad_form(&linalg::sub(&x.to_vec(), &y.to_vec()))
    };
    for (slot, nb) in g.neighbors(n).iter().enumerate() {
        if state.coplanar[n][slot] {
            e += p.w_c * nb.weight * diff(&problem.moments()[n], theta, &planes[nb.seed]);
        }
    }
    for &(m, slot) in g.incoming(n) {
        if state.coplanar[m][slot] {
            e += p.w_c
                * g.neighbors(m)[slot].weight
                * diff(&problem.moments()[m], &planes[m], theta);
        }
    }
    let d = linalg::sub(&theta.to_vec(), &anchor.to_vec());
    e + mu * linalg::dot(&d, &d)
}

fn proximal(before: &[Plane], after: &[Plane], mu: f64) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(a, b)| {
            let d = linalg::sub(&a.to_vec(), &b.to_vec());
            linalg::dot(&d, &d)
        })
        .sum::<f64>()
        * mu
}

/// One plane sweep under the configured schedule.
pub fn update_planes(
    problem: &Problem,
    state: &mut SolverState,
    p: &EnergyParams,
    cfg: &SolverConfig,
) {
    let mu = cfg.tikhonov;
    match cfg.schedule {
        Schedule::GaussSeidel => {
            for n in 0..problem.num_seeds() {
                let next = solve_against(problem, &state.planes, state, n, p, mu);
                state.planes[n] = next;
            }
        }
        Schedule::Jacobi => {
            let snapshot = state.planes.clone();
            let frozen: &SolverState = state;
            let next: Vec<Plane> = (0..problem.num_seeds())
                .into_par_iter()
                .map(|n| solve_against(problem, &snapshot, frozen, n, p, mu))
                .collect();
            state.planes = next;
        }
    }
}

/// Runs up to `max_iters` rounds of coplanarity, outlier and plane updates.
///
/// Each round re-evaluates the outlier residuals right before the outlier
/// flags are chosen. The three block updates never raise the energy they
/// see; the refresh can, since it moves the point the outlier term is
/// evaluated at. The trace records it as its own stage.
///
/// Stops early once the energy changes by less than `tol_energy` relative to
/// the previous round.
pub fn optimize(
    problem: &Problem,
    mut state: SolverState,
    p: &EnergyParams,
    cfg: &SolverConfig,
) -> Solution {
    state.energy = total_energy(problem, &state, p);
    let mut trace = vec![TraceEntry {
        iter: 0,
        stage: Stage::Init,
        energy: state.energy,
        energy_before: state.energy,
        proximal: 0.0,
    }];
    let mut converged = false;
    let mut iterations = 0;
    let mut anchor = state.planes.clone();
    for iter in 1..=cfg.max_iters {
        let start = state.energy;

        let before = state.energy;
        update_coplanarity(problem, &mut state, p);
        state.energy = total_energy(problem, &state, p);
        trace.push(TraceEntry {
            iter,
            stage: Stage::Coplanarity,
            energy: state.energy,
            energy_before: before,
            proximal: 0.0,
        });

        let before = state.energy;
        state.refresh_residuals(problem);
        state.energy = total_energy(problem, &state, p);
        trace.push(TraceEntry {
            iter,
            stage: Stage::Refresh,
            energy: state.energy,
            energy_before: before,
            proximal: 0.0,
        });

        let before = state.energy;
        choose_outliers(problem, &mut state, p);
        state.energy = total_energy(problem, &state, p);
        trace.push(TraceEntry {
            iter,
            stage: Stage::Outliers,
            energy: state.energy,
            energy_before: before,
            proximal: 0.0,
        });

        let before = state.energy;
        let old = state.planes.clone();
        update_planes(problem, &mut state, p, cfg);
        state.energy = total_energy(problem, &state, p);
        trace.push(TraceEntry {
            iter,
            stage: Stage::Planes,
            energy: state.energy,
            energy_before: before,
            proximal: proximal(&old, &state.planes, cfg.tikhonov),
        });
        anchor = old;

        iterations = iter;
        if (start - state.energy).abs() <= cfg.tol_energy * start.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Solution {
        state,
        anchor,
        trace,
        iterations,
        converged,
    }
}

/// Evaluates each pixel's cell plane; values below `1 / z_max` are clamped and marked invalid.
pub fn render(state: &SolverState, part: &VoronoiPartition, cfg: &SolverConfig) -> DenseDepthMap {
    let dims = part.dims();
    let floor = 1.0 / cfg.z_max;
    let (inverse_depth, valid): (Vec<f64>, Vec<bool>) = part
        .nearest_seed()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let d = state.planes[s].eval(&dims.normalize_index(i));
            if d >= floor && d.is_finite() {
                (d, true)
            } else {
                (floor, false)
            }
        })
        .unzip();
    DenseDepthMap {
        dims,
        inverse_depth,
        valid,
    }
}

/// Residual of seed `n` if its outlier energy were refreshed now.
pub fn live_residual(problem: &Problem, state: &SolverState, n: usize) -> f64 {
    outlier_residual(problem, state, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{EnergyParams, OutlierModel};
    use crate::geodesic::{
        build_cell_graph, voronoi_partition, CellGraph, CellGraphParams, Neighbor, StepCostField,
    };
    use crate::scene::{DepthSample, GridDims, PixelCoord};

    fn sample(u: usize, v: usize, z: f64, id: usize) -> DepthSample {
        DepthSample {
            pixel: PixelCoord::new(u, v),
            z,
            id,
        }
    }

    fn setup(dims: GridDims, samples: Vec<DepthSample>, d_max: f64) -> (Problem, VoronoiPartition) {
        let field = StepCostField::uniform(dims, 1.0).unwrap();
        let part = voronoi_partition(&field, &samples).unwrap();
        let params = CellGraphParams {
            max_neighbors: 10,
            d_max,
            epsilon: 1e-3,
        };
        let graph = build_cell_graph(&part, &field, params).unwrap();
        (
            Problem::from_partition(&part, graph, samples).unwrap(),
            part,
        )
    }

    #[test]
    fn fronto_parallel_without_semantics() {
        let dims = GridDims::new(8, 8).unwrap();
        let (problem, part) = setup(
            dims,
            vec![sample(1, 1, 2.0, 0), sample(6, 6, 4.0, 1)],
            100.0,
        );
        let p = EnergyParams::default();
        let s = initialize(&problem, &part, None, &SolverConfig::default(), &p);
        assert_eq!(
            s.planes,
            vec![Plane::fronto_parallel(0.5), Plane::fronto_parallel(0.25)]
        );
        assert!(s.outlier.iter().all(|o| !o));
        assert!(s.coplanar.iter().flatten().all(|c| *c));
    }

    #[test]
    fn coplanarity_rule_and_tie() {
        let dims = GridDims::new(2, 2).unwrap();
        let (problem, _) = setup(
            dims,
            vec![sample(0, 0, 1.0, 0), sample(1, 1, 1.0, 1)],
            100.0,
        );
        let cell = &problem.moments()[0];
        let count = cell.count() as f64;
        let p = EnergyParams {
            w_c: 1.0,
            lambda_c: 1.0,
            ..Default::default()
        };
        let base = Plane::fronto_parallel(1.0);
        let mut state = SolverState::with_planes(&problem, vec![base, base], &p);
        update_coplanarity(&problem, &mut state, &p);
        assert!(state.coplanar[0][0]);

        // offset d chosen so that d^2 * count == count * lambda_c exactly
        let tie = Plane::fronto_parallel(2.0);
        state.planes = vec![base, tie];
        assert_eq!(cell.quad_form(&[0.0, 0.0, -1.0]), count);
        update_coplanarity(&problem, &mut state, &p);
        assert!(state.coplanar[0][0]);

        let p_strict = EnergyParams {
            lambda_c: 0.99,
            ..p
        };
        update_coplanarity(&problem, &mut state, &p_strict);
        assert!(!state.coplanar[0][0]);
    }

    #[test]
    fn outlier_decisions() {
        let dims = GridDims::new(6, 3).unwrap();
        let samples = vec![sample(0, 1, 2.0, 0), sample(5, 1, 2.0, 1)];
        let (problem, _) = setup(dims, samples, 100.0);
        let p = EnergyParams::default();
        let good = Plane::fronto_parallel(0.5);
        let mut state = SolverState::with_planes(&problem, vec![good, good], &p);
        update_outliers(&problem, &mut state, &p);
        assert_eq!(state.outlier, vec![false, false]);
        let (e0, e1) = p.outlier.energies(0.0);
        assert!(e0 < e1);

        // seed 1 deviates by 10 tau from every plane including its own
        let off = Plane::fronto_parallel(0.5 + 10.0 * p.outlier.tau);
        state.planes = vec![off, off];
        update_outliers(&problem, &mut state, &p);
        assert!(state.outlier[0] && state.outlier[1]);

        // w_una = 0: the flag follows p(o = 1) > 0.5 alone
        let p0 = EnergyParams {
            w_una: 0.0,
            outlier: OutlierModel {
                prior: 0.5,
                ..p.outlier
            },
            ..p
        };
        let p0 = EnergyParams {
            outlier: OutlierModel {
                tau: 0.0625,
                ..p0.outlier
            },
            ..p0
        };
        let at_tau = Plane::fronto_parallel(0.5 + 0.0625);
        state.planes = vec![at_tau, at_tau];
        update_outliers(&problem, &mut state, &p0);
        assert_eq!(state.outlier, vec![false, false]);
        let beyond = Plane::fronto_parallel(0.5 + 0.125);
        state.planes = vec![beyond, beyond];
        update_outliers(&problem, &mut state, &p0);
        assert_eq!(state.outlier, vec![true, true]);
    }

    #[test]
    fn isolated_cell_keeps_its_plane() {
        let dims = GridDims::new(5, 5).unwrap();
        let (problem, part) = setup(dims, vec![sample(2, 2, 3.0, 0)], 1.0);
        let p = EnergyParams::default();
        let cfg = SolverConfig::default();
        let mut state = initialize(&problem, &part, None, &cfg, &p);
        assert_eq!(
            solve_plane(&problem, &state, 0, &p, &cfg),
            Plane::fronto_parallel(1.0 / 3.0)
        );
        // outlier with no neighbors: only the anchor remains
        state.outlier[0] = true;
        state.planes[0] = Plane::new(0.1, 0.2, 0.3);
        let got = solve_plane(&problem, &state, 0, &p, &cfg);
        assert!(got.max_abs_diff(&state.planes[0]) < 1e-15);
    }

    #[test]
    fn zero_iterations_returns_initialization() {
        let dims = GridDims::new(8, 8).unwrap();
        let (problem, part) = setup(
            dims,
            vec![sample(1, 1, 2.0, 0), sample(6, 6, 4.0, 1)],
            100.0,
        );
        let p = EnergyParams::default();
        let cfg = SolverConfig {
            max_iters: 0,
            ..Default::default()
        };
        let init = initialize(&problem, &part, None, &cfg, &p);
        let sol = optimize(&problem, init.clone(), &p, &cfg);
        assert_eq!(sol.state, init);
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.trace.len(), 1);
    }

    #[test]
    fn render_clamps_below_floor() {
        let dims = GridDims::new(4, 1).unwrap();
        let (problem, part) = setup(dims, vec![sample(0, 0, 2.0, 0)], 100.0);
        let p = EnergyParams::default();
        let cfg = SolverConfig {
            z_max: 100.0,
            ..Default::default()
        };
        let mut state = SolverState::with_planes(&problem, vec![Plane::fronto_parallel(0.5)], &p);
        let map = render(&state, &part, &cfg);
        assert!(map.inverse_depth.iter().all(|d| *d == 0.5));
        assert!(map.valid.iter().all(|v| *v));

        // u' runs -0.5, -0.25, 0, 0.25: the first pixel evaluates to -0.1
        state.planes[0] = Plane::new(0.8, 0.0, 0.3);
        let map = render(&state, &part, &cfg);
        assert_eq!(map.inverse_depth[0], 0.01);
        assert!(!map.valid[0]);
        assert!(map.valid[1..].iter().all(|v| *v));
    }

    #[test]
    fn hand_built_graph_solve_matches_two_cell_optimum() {
        // two cells coupled both ways with equal planes of samples on one plane
        let dims = GridDims::new(10, 1).unwrap();
        let samples = vec![sample(2, 0, 1.0, 0), sample(7, 0, 1.0, 1)];
        let field = StepCostField::uniform(dims, 1.0).unwrap();
        let part = voronoi_partition(&field, &samples).unwrap();
        let params = CellGraphParams {
            max_neighbors: 1,
            d_max: 10.0,
            epsilon: 1e-3,
        };
        let nb = |seed| Neighbor {
            seed,
            dist: 5.0,
            weight: params.weight(5.0),
        };
        let graph = CellGraph::from_neighbors(params, vec![vec![nb(1)], vec![nb(0)]]);
        let problem = Problem::from_partition(&part, graph, samples).unwrap();
        let p = EnergyParams::default();
        let state = SolverState::with_planes(&problem, vec![Plane::fronto_parallel(1.0); 2], &p);
        let cfg = SolverConfig::default();
        let got = solve_plane(&problem, &state, 0, &p, &cfg);
        assert!(got.max_abs_diff(&Plane::fronto_parallel(1.0)) < 1e-12);
    }
}
