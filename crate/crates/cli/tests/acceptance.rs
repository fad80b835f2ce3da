//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use geoplane::config::RunConfig;
use geoplane::energy::{total_energy, EnergyParams, Plane, Problem, SolverState};
use geoplane::eval::{
    make_scene, oracle_geodesic, presets, stride_sample, SceneSpec, SyntheticScene,
};
use geoplane::geodesic::{
    build_cell_graph, voronoi_partition, CellGraphParams, StepCostField, VoronoiPartition,
};
use geoplane::pipeline::{upsample, Inputs, Upsampled};
use geoplane::solver::{Schedule, Stage};
use geoplane::{DepthSample, GridDims, PixelCoord, ScalarMap};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn inputs(scene: &SyntheticScene) -> Inputs {
    Inputs {
        dims: scene.dims,
        samples: scene.samples.clone(),
        edges: scene.edges.clone(),
        semantics: Some(scene.semantics.clone()),
    }
}

fn timed_solve(spec: &SceneSpec, cfg: &RunConfig) -> (SyntheticScene, Upsampled, Duration) {
    let scene = make_scene(spec).unwrap();
    let inputs = inputs(&scene);
    let start = Instant::now();
    let out = upsample(&inputs, cfg).unwrap();
    (scene, out, start.elapsed())
}

fn render_mae(scene: &SyntheticScene, out: &Upsampled) -> f64 {
    let sum: f64 = out
        .map
        .inverse_depth
        .iter()
        .zip(&scene.gt_inverse_depth.data)
        .map(|(a, b)| (a - b).abs())
        .sum();
    sum / scene.dims.len() as f64
}

fn geodesic_bound() -> Outcome {
    let start = Instant::now();
    let dims = GridDims::new(32, 32).unwrap();
    let params = CellGraphParams {
        d_max: 10.0,
        ..Default::default()
    };
    let (mut pairs, mut worst) = (0usize, f64::INFINITY);
    for seed in 0..20u64 {
        let scene = make_scene(&presets::random_scene(dims, 8, seed)).unwrap();
        let field =
            StepCostField::from_inputs(&scene.edges, Some(&scene.semantics), &Default::default())
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.random_range(5..=10);
        let seeds: Vec<DepthSample> = index::sample(&mut rng, dims.len(), count)
            .into_iter()
            .enumerate()
            .map(|(id, i)| DepthSample {
                pixel: dims.coord(i),
                z: 1.0,
                id,
            })
            .collect();
        let part = voronoi_partition(&field, &seeds).unwrap();
        let graph = build_cell_graph(&part, &field, params).unwrap();
        let exact = oracle_geodesic(&field, &seeds).unwrap();
        for (n, _, nb) in graph.pairs() {
            pairs += 1;
            worst = worst.min(nb.dist / exact[n][nb.seed] - 1.0);
        }
    }
    let strip = GridDims::new(9, 1).unwrap();
    let field = StepCostField::uniform(strip, 0.5).unwrap();
    let seeds: Vec<DepthSample> = [0, 4, 8]
        .iter()
        .enumerate()
        .map(|(id, &u)| DepthSample {
            pixel: PixelCoord::new(u, 0),
            z: 1.0,
            id,
        })
        .collect();
    let part = voronoi_partition(&field, &seeds).unwrap();
    let graph = build_cell_graph(&part, &field, params).unwrap();
    let exact = oracle_geodesic(&field, &seeds).unwrap();
    let strip_equal =
        graph.num_pairs() == 6 && graph.pairs().all(|(n, _, nb)| nb.dist == exact[n][nb.seed]);
    let elapsed = start.elapsed();
    verdict(
        worst >= -1e-12 && strip_equal && elapsed < Duration::from_secs(5),
        format!(
            "{pairs} pairs, min relative slack {worst:.3e}, strip exact {strip_equal}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Every energy term evaluated pixel by pixel.
fn brute_force(
    part: &VoronoiPartition,
    problem: &Problem,
    state: &SolverState,
    p: &EnergyParams,
) -> f64 {
    let dims = problem.dims();
    let cells = part.cells();
    let mut total = 0.0;
    for n in 0..problem.num_seeds() {
        let s = &problem.samples()[n];
        let x = dims.normalize(s.pixel);
        let inv = 1.0 / s.z;
        if !state.outlier[n] {
            total += p.w_una * (state.planes[n].eval(&x) - inv).powi(2);
        }
        let mut r = f64::INFINITY;
        for (nb, &c) in problem.graph().neighbors(n).iter().zip(&state.coplanar[n]) {
            if c {
                r = r.min((state.planes[nb.seed].eval(&x) - inv).abs());
            }
            for &i in &cells[n] {
                let y = dims.normalize_index(i);
                total += nb.weight
                    * if c {
                        p.w_c * (state.planes[n].eval(&y) - state.planes[nb.seed].eval(&y)).powi(2)
                    } else {
                        p.lambda_c
                    };
            }
        }
        if !r.is_finite() {
            r = (state.planes[n].eval(&x) - inv).abs();
        }
        let t = (r - p.outlier.tau) / p.outlier.scale;
        let k = p.outlier.prior / (1.0 - p.outlier.prior);
        total += if state.outlier[n] {
            ((-t).exp() / k).ln_1p()
        } else {
            (k * t.exp()).ln_1p()
        };
    }
    total
}

fn energy_equivalence() -> Outcome {
    let dims = GridDims::new(64, 64).unwrap();
    let scene = make_scene(&presets::random_scene(dims, 8, 3)).unwrap();
    let field =
        StepCostField::from_inputs(&scene.edges, Some(&scene.semantics), &Default::default())
            .unwrap();
    let part = voronoi_partition(&field, &scene.samples).unwrap();
    let graph = build_cell_graph(&part, &field, CellGraphParams::default()).unwrap();
    let problem = Problem::from_partition(&part, graph, scene.samples.clone()).unwrap();
    let mut p = EnergyParams {
        w_una: 1.3,
        w_c: 0.2,
        lambda_c: 0.01,
        ..Default::default()
    };
    p.outlier.tau = 0.05;
    p.outlier.scale = 0.02;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let planes = (0..problem.num_seeds())
            .map(|_| {
                Plane::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(0.2..1.2),
                )
            })
            .collect();
        let mut state = SolverState::with_planes(&problem, planes, &p);
        for o in &mut state.outlier {
            *o = rng.random_bool(0.2);
        }
        for c in state.coplanar.iter_mut().flatten() {
            *c = rng.random_bool(0.7);
        }
        state.refresh_residuals(&problem);
        let fast = total_energy(&problem, &state, &p);
        let slow = brute_force(&part, &problem, &state, &p);
        worst = worst.max((fast - slow).abs() / slow.abs());
    }
    verdict(
        worst <= 1e-12,
        format!(
            "10 states, {} seeds, max relative difference {worst:.3e}",
            problem.num_seeds()
        ),
    )
}

fn monotonicity() -> Outcome {
    let dims = GridDims::new(64, 64).unwrap();
    let (mut worst_block, mut worst_refresh, mut blocks) = (f64::NEG_INFINITY, 0.0f64, 0usize);
    for seed in 0..10 {
        let mut spec = presets::random_scene(dims, 8, seed);
        spec.noise = 0.003;
        spec.outlier_fraction = 0.1;
        spec.outlier_magnitude = 0.05;
        let (_, out, _) = timed_solve(&spec, &RunConfig::default());
        for e in &out.solution.trace[1..] {
            let rel = (e.energy + e.proximal - e.energy_before) / e.energy_before.abs();
            if e.stage == Stage::Refresh {
                worst_refresh = worst_refresh.max(rel);
            } else {
                blocks += 1;
                worst_block = worst_block.max(rel);
            }
        }
    }
    verdict(
        worst_block <= 1e-9,
        format!(
            "{blocks} block updates, max relative change {worst_block:.3e}; \
             residual refreshes between blocks rose by up to {worst_refresh:.3e}"
        ),
    )
}

fn exact_recovery() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.solver.max_iters = 20;
    let (scene, out, t) = timed_solve(&presets::single_plane(), &cfg);
    let truth = scene.regions[0].plane;
    let plane_err = out
        .solution
        .state
        .planes
        .iter()
        .map(|p| p.max_abs_diff(&truth))
        .fold(0.0, f64::max);
    let mae = render_mae(&scene, &out);
    verdict(
        plane_err < 1e-6
            && mae < 1e-6
            && out.solution.iterations <= 20
            && t < Duration::from_secs(1),
        format!(
            "plane error {plane_err:.3e}, MAE {mae:.3e}, {} iterations, {:.3} s",
            out.solution.iterations,
            t.as_secs_f64()
        ),
    )
}

/// Worst cell by mean error against its own region's plane, and how many
/// cells sit closer to another region's plane than to their own.
fn region_check(scene: &SyntheticScene, out: &Upsampled) -> (f64, usize) {
    let dims = scene.dims;
    let (mut worst, mut wrong) = (0.0f64, 0);
    for (n, cell) in out.partition.cells().iter().enumerate() {
        let plane = out.solution.state.planes[n];
        let mean_err = |r: &Plane| {
            cell.iter()
                .map(|&i| {
                    let x = dims.normalize_index(i);
                    (plane.eval(&x) - r.eval(&x)).abs()
                })
                .sum::<f64>()
                / cell.len() as f64
        };
        let own = scene.sample_region(n);
        let own_err = mean_err(&scene.regions[own].plane);
        worst = worst.max(own_err);
        let closer_elsewhere = scene
            .regions
            .iter()
            .enumerate()
            .any(|(r, reg)| r != own && mean_err(&reg.plane) <= own_err);
        if closer_elsewhere {
            wrong += 1;
        }
    }
    (worst, wrong)
}

fn piecewise_recovery() -> (Outcome, f64) {
    let (scene, out, t) = timed_solve(&presets::three_regions(), &RunConfig::default());
    let mae = render_mae(&scene, &out);
    let (worst, wrong) = region_check(&scene, &out);
    let outcome = verdict(
        mae < 1e-3 && wrong == 0 && t < Duration::from_secs(2),
        format!(
            "MAE {mae:.3e}, {wrong} cells nearer a foreign plane, worst cell mean error {worst:.3e}, {:.3} s",
            t.as_secs_f64()
        ),
    );
    (outcome, mae)
}

fn outlier_robustness(reference_mae: f64) -> Outcome {
    let tau = EnergyParams::default().outlier.tau;
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..5 {
        let spec = presets::three_regions_with_outliers(0.1, 10.0 * tau, seed);
        let (scene, out, _) = timed_solve(&spec, &RunConfig::default());
        let flagged = &out.solution.state.outlier;
        let truth = &scene.outlier_ids;
        let hits = truth.iter().filter(|&&k| flagged[k]).count();
        let false_pos = (0..flagged.len())
            .filter(|k| flagged[*k] && !truth.contains(k))
            .count();
        let recall = hits as f64 / truth.len() as f64;
        let fpr = false_pos as f64 / (flagged.len() - truth.len()) as f64;
        let mae = render_mae(&scene, &out);
        ok &= recall >= 0.9 && fpr <= 0.05 && mae <= 2.0 * reference_mae;
        lines.push(format!("recall {recall:.2} fpr {fpr:.3} MAE {mae:.3e}"));
    }
    verdict(
        ok,
        format!(
            "5 scenes, {} outliers each: {}",
            (0.1f64 * 64.0).round(),
            lines.join("; ")
        ),
    )
}

fn stationarity() -> Outcome {
    let cfg = RunConfig::default();
    let mu = cfg.solver.tikhonov;
    let mut worst_ratio = 0.0f64;
    let specs = [
        presets::three_regions(),
        presets::three_regions_with_outliers(0.1, 0.1, 1),
        presets::three_regions_with_outliers(0.1, 0.1, 2),
    ];
    for spec in &specs {
        let (_, out, _) = timed_solve(spec, &cfg);
        let state = &out.solution.state;
        let tol = 1e-6 * (1.0 + state.energy);
        let h = 1e-4;
        for n in 0..out.problem.num_seeds() {
            for k in 0..3 {
                let shifted = |delta: f64| {
                    let mut s = state.clone();
                    let mut v = s.planes[n].to_vec();
                    v[k] += delta;
                    s.planes[n] = Plane::from_vec(v);
                    let a = out.solution.anchor[n].to_vec();
                    total_energy(&out.problem, &s, &cfg.energy) + mu * (v[k] - a[k]).powi(2)
                };
                let g = (shifted(h) - shifted(-h)) / (2.0 * h);
                worst_ratio = worst_ratio.max(g.abs() / tol);
            }
        }
    }
    verdict(
        worst_ratio < 1.0,
        format!("3 scenes, max |gradient| / (1e-6 (1 + E)) = {worst_ratio:.3e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let scene = make_scene(&presets::three_regions_with_outliers(0.1, 0.1, 9)).unwrap();
    geoplane::eval::write_scene(&scene, dir.path()).unwrap();
    let config = dir.path().join("config.toml");
    let bin = env!("CARGO_BIN_EXE_geoplane");
    let run = |schedule: Schedule, name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(bin)
            .arg("upsample")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .arg("--set")
            .arg(format!("schedule={}", schedule.name()))
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).trim().to_string());
        }
        fs::read(out.join("inverse_depth.pfm")).map_err(|e| e.to_string())
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for schedule in [Schedule::GaussSeidel, Schedule::Jacobi] {
        match (run(schedule, "a"), run(schedule, "b")) {
            (Ok(a), Ok(b)) => {
                ok &= a == b;
                parts.push(format!("{} identical {}", schedule.name(), a == b));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                parts.push(format!("{} failed: {e}", schedule.name()));
            }
        }
    }
    verdict(ok, parts.join(", "))
}

/// Reads a Middlebury 2014 scene directory holding `im0.png` and `disp0.pfm`.
fn middlebury() -> Outcome {
    let Some(dir) = std::env::var_os("GEOPLANE_MIDDLEBURY_BACKPACK") else {
        return Outcome::Skip("set GEOPLANE_MIDDLEBURY_BACKPACK to a Backpack directory".into());
    };
    let dir = Path::new(&dir);
    let disp = match geoplane::io::pfm::read(&dir.join("disp0.pfm")) {
        Ok(d) => d,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let dims = GridDims::new(disp.width, disp.height).unwrap();
    let gt: Vec<f64> = disp
        .data
        .iter()
        .map(|&d| {
            if d.is_finite() && d > 0.0 {
                d as f64
            } else {
                f64::NAN
            }
        })
        .collect();
    // disparity plays the role of inverse depth throughout
    let depth = ScalarMap::new(dims, gt.iter().map(|d| 1.0 / d).collect()).unwrap();
    let samples = stride_sample(&depth, 4, 0).unwrap();
    let edges = match geoplane::io::fallback_edges_from_file(&dir.join("im0.png"), dims) {
        Ok(e) => e,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mut cfg = RunConfig::default();
    cfg.apply_overrides(&[
        "outlier_tau=3.0",
        "outlier_scale=0.5",
        "lambda_c=0.04",
        "z_max=1e9",
    ])
    .unwrap();
    let inputs = Inputs {
        dims,
        samples,
        edges,
        semantics: None,
    };
    let out = match upsample(&inputs, &cfg) {
        Ok(o) => o,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mask: Vec<bool> = gt.iter().map(|d| d.is_finite()).collect();
    let gt = ScalarMap::new(dims, gt).unwrap();
    match geoplane::eval::mae(&out.map, &gt, &mask, geoplane::DepthUnit::Disparity) {
        Ok(m) => verdict(
            m.mae <= 0.40,
            format!("disparity MAE {:.3} px over {} pixels", m.mae, m.n_pixels),
        ),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn main() {
    let (piecewise, reference_mae) = piecewise_recovery();
    let results = [
        ("1 geodesic oracle bound", geodesic_bound()),
        ("2 energy equivalence", energy_equivalence()),
        ("3 gauss-seidel monotonicity", monotonicity()),
        ("4 exact recovery", exact_recovery()),
        ("5 piecewise-planar recovery", piecewise),
        ("6 outlier robustness", outlier_robustness(reference_mae)),
        ("7 stationarity", stationarity()),
        ("8 determinism", determinism()),
        ("9 middlebury backpack (optional)", middlebury()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Outcome::Pass(d) => println!("PASS criterion {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
            Outcome::Skip(d) => println!("SKIP criterion {name}: {d}"),
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
