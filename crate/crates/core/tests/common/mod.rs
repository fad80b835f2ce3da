#![allow(dead_code)]

use geoplane::config::RunConfig;
use geoplane::energy::{total_energy, Plane, Problem, SolverState};
use geoplane::eval::{make_scene, SceneSpec, SyntheticScene};
use geoplane::geodesic::StepCostField;
use geoplane::pipeline::{upsample, Inputs, Upsampled};
use geoplane::{DepthSample, GridDims, PixelCoord};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent random cost per undirected pixel pair.
pub fn random_field(dims: GridDims, rng: &mut ChaCha8Rng) -> StepCostField {
    StepCostField::from_fn(dims, |_, _| rng.random_range(0.05..1.0)).unwrap()
}

/// `count` distinct random seed pixels with random depths.
pub fn random_seeds(dims: GridDims, count: usize, rng: &mut ChaCha8Rng) -> Vec<DepthSample> {
    index::sample(rng, dims.len(), count)
        .into_iter()
        .enumerate()
        .map(|(id, i)| {
            let p = dims.coord(i);
            DepthSample {
                pixel: PixelCoord::new(p.u, p.v),
                z: rng.random_range(1.0..4.0),
                id,
            }
        })
        .collect()
}

pub fn inputs(scene: &SyntheticScene) -> Inputs {
    Inputs {
        dims: scene.dims,
        samples: scene.samples.clone(),
        edges: scene.edges.clone(),
        semantics: Some(scene.semantics.clone()),
    }
}

pub fn solve(spec: &SceneSpec, cfg: &RunConfig) -> (SyntheticScene, Upsampled) {
    let scene = make_scene(spec).unwrap();
    let out = upsample(&inputs(&scene), cfg).unwrap();
    (scene, out)
}

/// Mean absolute inverse-depth error of the rendered map against ground truth.
pub fn render_mae(scene: &SyntheticScene, out: &Upsampled) -> f64 {
    let sum: f64 = out
        .map
        .inverse_depth
        .iter()
        .zip(&scene.gt_inverse_depth.data)
        .map(|(a, b)| (a - b).abs())
        .sum();
    sum / scene.dims.len() as f64
}

/// Largest coefficient error of any seed's plane against its region's plane,
/// skipping the given seeds.
pub fn plane_error(scene: &SyntheticScene, out: &Upsampled, skip: &[usize]) -> f64 {
    out.solution
        .state
        .planes
        .iter()
        .enumerate()
        .filter(|(n, _)| !skip.contains(n))
        .map(|(n, p)| p.max_abs_diff(&scene.regions[scene.sample_region(n)].plane))
        .fold(0.0, f64::max)
}

/// Central finite-difference gradient of the total energy in plane `n`,
/// with flags and outlier residuals held fixed.
pub fn energy_gradient(
    problem: &Problem,
    state: &SolverState,
    params: &geoplane::energy::EnergyParams,
    n: usize,
    h: f64,
) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (k, gk) in g.iter_mut().enumerate() {
        let at = |delta: f64| {
            let mut s = state.clone();
            let mut v = s.planes[n].to_vec();
            v[k] += delta;
            s.planes[n] = Plane::from_vec(v);
            total_energy(problem, &s, params)
        };
        *gk = (at(h) - at(-h)) / (2.0 * h);
    }
    g
}
