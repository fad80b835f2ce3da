mod common;

use common::{energy_gradient, plane_error, render_mae, rng, solve};
use geoplane::config::RunConfig;
use geoplane::energy::{total_energy, EnergyParams, Plane, SolverState};
use geoplane::eval::{make_scene, presets, Region, SceneSpec};
use geoplane::pipeline::upsample;
use geoplane::solver::{initialize, local_objective, solve_plane, Schedule, Stage};
use geoplane::GridDims;
use rand::Rng;

fn ground_scene() -> SceneSpec {
    SceneSpec {
        regions: vec![
            Region {
                name: "road".into(),
                plane: Plane::new(0.0, 0.4, 0.5),
                polygon: Some(vec![(0.0, 60.0), (96.0, 60.0), (96.0, 96.0), (0.0, 96.0)]),
            },
            Region {
                name: "building".into(),
                plane: Plane::new(0.1, 0.0, 0.3),
                polygon: None,
            },
        ],
        ..presets::random_scene(GridDims::new(96, 96).unwrap(), 8, 0)
    }
}

#[test]
fn ground_cells_start_with_the_ground_slope() {
    let scene = make_scene(&ground_scene()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.solver.ground_labels = vec!["road".into()];
    cfg.solver.max_iters = 0;
    let out = upsample(&common::inputs(&scene), &cfg).unwrap();
    let state = initialize(
        &out.problem,
        &out.partition,
        Some(&scene.semantics),
        &cfg.solver,
        &cfg.energy,
    );
    let mut ground = 0;
    for (n, plane) in state.planes.iter().enumerate() {
        let target = out.problem.target(n);
        if scene.sample_region(n) == 0 {
            ground += 1;
            assert!((plane.b - 0.4).abs() < 1e-9, "seed {n}: {plane:?}");
            assert_eq!(plane.a, 0.0);
            assert!((plane.eval_h(out.problem.coord(n)) - target).abs() < 1e-12);
        } else {
            assert_eq!(*plane, Plane::fronto_parallel(target));
        }
    }
    assert!(ground >= 20);
    // max_iters = 0 returns the initialization untouched
    assert_eq!(out.solution.state.planes, state.planes);
}

#[test]
fn gauss_seidel_blocks_never_raise_the_energy() {
    let dims = GridDims::new(64, 64).unwrap();
    for seed in 0..10 {
        let mut spec = presets::random_scene(dims, 8, seed);
        spec.noise = 0.003;
        spec.outlier_fraction = 0.1;
        spec.outlier_magnitude = 0.05;
        let (_, out) = solve(&spec, &RunConfig::default());
        let trace = &out.solution.trace;
        assert!(trace.len() > 4);
        for (prev, e) in trace.iter().zip(&trace[1..]) {
            assert_eq!(e.energy_before, prev.energy);
            if e.stage == Stage::Refresh {
                continue;
            }
            let after = e.energy + e.proximal;
            assert!(
                after <= e.energy_before * (1.0 + 1e-9),
                "seed {seed} iter {} {}: {} -> {after}",
                e.iter,
                e.stage,
                e.energy_before
            );
        }
    }
}

#[test]
fn single_plane_is_recovered_exactly() {
    let mut cfg = RunConfig::default();
    cfg.solver.max_iters = 20;
    let (scene, out) = solve(&presets::single_plane(), &cfg);
    assert!(plane_error(&scene, &out, &[]) < 1e-6);
    assert!(render_mae(&scene, &out) < 1e-6);
    assert!(out.solution.iterations <= 20);
}

#[test]
fn displaced_sample_is_flagged() {
    let spec = presets::single_plane();
    let mut scene = make_scene(&spec).unwrap();
    let tau = EnergyParams::default().outlier.tau;
    let k = 27;
    scene.samples[k].z = 1.0 / (1.0 / scene.samples[k].z + 12.0 * tau);
    let mut cfg = RunConfig::default();
    cfg.solver.max_iters = 20;
    let out = upsample(&common::inputs(&scene), &cfg).unwrap();
    let flagged: Vec<usize> = (0..out.problem.num_seeds())
        .filter(|&n| out.solution.state.outlier[n])
        .collect();
    assert_eq!(flagged, vec![k]);
    assert!(plane_error(&scene, &out, &[k]) < 1e-4);
}

#[test]
fn returned_planes_are_stationary() {
    for seed in 0..3 {
        let (_, out) = solve(
            &presets::three_regions_with_outliers(0.1, 0.1, seed),
            &RunConfig::default(),
        );
        let state = &out.solution.state;
        let p = EnergyParams::default();
        let tol = 1e-6 * (1.0 + state.energy);
        for n in 0..out.problem.num_seeds() {
            let mu = RunConfig::default().solver.tikhonov;
            let g = energy_gradient(&out.problem, state, &p, n, 1e-4);
            let d = state.planes[n].to_vec();
            let a = out.solution.anchor[n].to_vec();
            let worst = (0..3).fold(0.0f64, |w, k| {
                w.max((g[k] + 2.0 * mu * (d[k] - a[k])).abs())
            });
            assert!(worst < tol, "seed {seed} plane {n}: {g:?}");
        }
    }
}

#[test]
fn runs_are_deterministic_for_both_schedules() {
    for schedule in [Schedule::GaussSeidel, Schedule::Jacobi] {
        let mut cfg = RunConfig::default();
        cfg.solver.schedule = schedule;
        let spec = presets::three_regions_with_outliers(0.1, 0.1, 4);
        let (_, a) = solve(&spec, &cfg);
        let (_, b) = solve(&spec, &cfg);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.map.inverse_depth), bits(&b.map.inverse_depth));
        assert_eq!(a.solution.state, b.solution.state);
    }
}

#[test]
fn plane_solve_minimizes_the_local_objective() {
    let (_, out) = solve(&presets::three_regions(), &RunConfig::default());
    let p = EnergyParams::default();
    let mut r = rng(6);
    let planes = out
        .solution
        .state
        .planes
        .iter()
        .map(|q| {
            Plane::new(
                q.a + r.random_range(-0.1..0.1),
                q.b + r.random_range(-0.1..0.1),
                q.c,
            )
        })
        .collect();
    let mut state = SolverState::with_planes(&out.problem, planes, &p);
    state.outlier[3] = true;
    let mu = 1e-3;
    let cfg = geoplane::solver::SolverConfig {
        tikhonov: mu,
        ..Default::default()
    };
    for n in 0..out.problem.num_seeds() {
        let best = solve_plane(&out.problem, &state, n, &p, &cfg);
        let f = |t: &Plane| local_objective(&out.problem, &state, n, t, &p, mu);
        let at = f(&best);
        for k in 0..3 {
            let h = 1e-5;
            let mut v = best.to_vec();
            v[k] += h;
            let up = f(&Plane::from_vec(v));
            v[k] -= 2.0 * h;
            let down = f(&Plane::from_vec(v));
            assert!(up >= at - 1e-15 && down >= at - 1e-15);
            assert!(
                ((up - down) / (2.0 * h)).abs() < 1e-7 * (1.0 + at),
                "cell {n} axis {k}"
            );
        }
        // swapping the plane in changes the total energy exactly as the local objective says
        let mut moved = state.clone();
        moved.planes[n] = best;
        let delta = total_energy(&out.problem, &moved, &p) - total_energy(&out.problem, &state, &p);
        // the anchor sits at the current plane, so only `best` pays the proximal term
        let d = [
            best.a - state.planes[n].a,
            best.b - state.planes[n].b,
            best.c - state.planes[n].c,
        ];
        let mu_part = mu * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        let local = f(&best) - f(&state.planes[n]);
        assert!((delta - (local - mu_part)).abs() < 1e-10 * (1.0 + state.energy));
    }
}
