//! Named synthetic scenes shared by tests, benchmarks and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scene::{Region, SceneSpec};
use crate::energy::Plane;
use crate::scene::GridDims;

fn spec(dims: GridDims, regions: Vec<Region>, stride: usize) -> SceneSpec {
    SceneSpec {
        dims,
        regions,
        stride,
        offset: stride / 2,
        noise: 0.0,
        outlier_fraction: 0.0,
        outlier_magnitude: 0.1,
        seed: 0,
    }
}

/// One slanted plane over the whole 128x128 grid, stride 16.
pub fn single_plane() -> SceneSpec {
    let region = Region {
        name: "wall".into(),
        plane: Plane::new(0.3, 0.2, 0.5),
        polygon: None,
    };
    spec(GridDims::new(128, 128).unwrap(), vec![region], 16)
}

/// Sloped ground, a tilted box and a back wall on 128x128, stride 16.
pub fn three_regions() -> SceneSpec {
    let regions = vec![
        Region {
            name: "ground".into(),
            plane: Plane::new(0.0, 0.8, 0.45),
            polygon: Some(vec![
                (0.0, 84.0),
                (128.0, 76.0),
                (128.0, 128.0),
                (0.0, 128.0),
            ]),
        },
        Region {
            name: "box".into(),
            plane: Plane::new(0.15, -0.05, 0.7),
            polygon: Some(vec![
                (66.0, 26.0),
                (110.0, 30.0),
                (108.0, 80.0),
                (70.0, 79.0),
            ]),
        },
        Region {
            name: "wall".into(),
            plane: Plane::new(-0.2, 0.05, 0.3),
            polygon: None,
        },
    ];
    spec(GridDims::new(128, 128).unwrap(), regions, 16)
}

/// [`three_regions`] with a fraction of samples displaced by `[magnitude, 2 magnitude)`.
pub fn three_regions_with_outliers(fraction: f64, magnitude: f64, seed: u64) -> SceneSpec {
    SceneSpec {
        outlier_fraction: fraction,
        outlier_magnitude: magnitude,
        seed,
        ..three_regions()
    }
}

/// A random two- or three-region scene: a ground cut by a random line, an
/// optional random rectangle, and a background. Planes stay positive.
pub fn random_scene(dims: GridDims, stride: usize, seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (dims.width as f64, dims.height as f64);
    let plane = |rng: &mut ChaCha8Rng| {
        Plane::new(
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
            rng.random_range(0.4..1.0),
        )
    };
    let y0 = rng.random_range(0.55..0.85) * h;
    let y1 = rng.random_range(0.55..0.85) * h;
    let mut regions = vec![Region {
        name: "ground".into(),
        plane: plane(&mut rng),
        polygon: Some(vec![(0.0, y0), (w, y1), (w, h), (0.0, h)]),
    }];
    if rng.random_bool(0.7) {
        let x = rng.random_range(0.1..0.5) * w;
        let y = rng.random_range(0.1..0.3) * h;
        let (bw, bh) = (
            rng.random_range(0.25..0.45) * w,
            rng.random_range(0.25..0.4) * h,
        );
        regions.push(Region {
            name: "box".into(),
            plane: plane(&mut rng),
            polygon: Some(vec![(x, y), (x + bw, y), (x + bw, y + bh), (x, y + bh)]),
        });
    }
    regions.push(Region {
        name: "wall".into(),
        plane: plane(&mut rng),
        polygon: None,
    });
    SceneSpec {
        seed,
        ..spec(dims, regions, stride)
    }
}
