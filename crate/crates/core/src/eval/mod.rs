//! Evaluation harness: samplers, error metrics, baselines, synthetic scenes and exact oracles.

pub mod baseline;
pub mod metrics;
pub mod oracle;
pub mod presets;
pub mod sampling;
pub mod scene;

pub use baseline::{baseline_bilinear, baseline_nearest};
pub use metrics::{mae, Metrics};
pub use oracle::{oracle_geodesic, single_source};
pub use sampling::{decimate_scanlines, stride_sample};
pub use scene::{make_scene, parse_scene_spec, write_scene, Region, SceneSpec, SyntheticScene};
