//! `geoplane` command-line front-end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geoplane::config::RunConfig;
use geoplane::eval::{self, oracle_geodesic};
use geoplane::geodesic::{build_cell_graph, voronoi_partition, StepCostField};
use geoplane::io::{pfm, pgm};
use geoplane::pipeline::{load_inputs, run};
use geoplane::{DenseDepthMap, DepthUnit, Error, GridDims, ScalarMap};

#[derive(Parser)]
#[command(
    name = "geoplane",
    version,
    about = "Sparse depth upsampling over geodesic Voronoi cells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Densify sparse samples into an inverse-depth map.
    Upsample {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        inputs: InputFlags,
        /// Extra `key=value` settings, applied last.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Score a predicted inverse-depth PFM against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        /// Ground truth PFM, already in `--unit`.
        #[arg(long)]
        gt: PathBuf,
        /// PGM; nonzero pixels are evaluated.
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, value_enum)]
        unit: UnitArg,
        /// Also write the metrics JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic scene from a plain-text description.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare cell-graph distances with exact grid geodesics.
    OracleGeodesic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Nearest or bilinear interpolation of the samples.
    Baseline {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        inputs: InputFlags,
        /// Lattice period, required for bilinear.
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(clap::Args)]
struct InputFlags {
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    semantics: Option<PathBuf>,
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Depth,
    InverseDepth,
    Disparity,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Nearest,
    Bilinear,
}

impl From<UnitArg> for DepthUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Depth => DepthUnit::Depth,
            UnitArg::InverseDepth => DepthUnit::InverseDepth,
            UnitArg::Disparity => DepthUnit::Disparity,
        }
    }
}

fn load_config(
    path: &Path,
    flags: Option<&InputFlags>,
    set: &[String],
) -> geoplane::Result<RunConfig> {
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(f) = flags {
        let pairs = [
            (&f.samples, &mut cfg.samples),
            (&f.edges, &mut cfg.edges),
            (&f.semantics, &mut cfg.semantics),
            (&f.image, &mut cfg.image),
        ];
        for (flag, slot) in pairs {
            if let Some(p) = flag {
                *slot = Some(p.clone());
            }
        }
        if let Some(out) = &f.out {
            cfg.out_dir = out.clone();
        }
    }
    cfg.apply_overrides(set)?;
    cfg.validate()?;
    Ok(cfg)
}

fn upsample(config: &Path, flags: &InputFlags, set: &[String]) -> geoplane::Result<()> {
    let cfg = load_config(config, Some(flags), set)?;
    let result = run(&cfg)?;
    let s = &result.stats;
    println!(
        "wrote {} ({} seeds, {} iterations, {} outliers, energy {:.6e})",
        cfg.out_dir.display(),
        s.seeds,
        s.iterations,
        s.outliers,
        s.energy
    );
    Ok(())
}

fn evaluate(
    pred: &Path,
    gt: &Path,
    mask: &Path,
    unit: DepthUnit,
    out: Option<&Path>,
) -> geoplane::Result<()> {
    let pred = pfm::read(pred)?;
    let gt = pfm::read(gt)?;
    let mask = pgm::read(mask)?;
    let dims = GridDims::new(gt.width, gt.height)?;
    dims.check(pred.width, pred.height)?;
    dims.check(mask.width, mask.height)?;
    let inverse: Vec<f64> = pred.data.iter().map(|&v| v as f64).collect();
    let valid = inverse.iter().map(|v| v.is_finite() && *v > 0.0).collect();
    let pred = DenseDepthMap::new(dims, inverse, valid)?;
    let gt = ScalarMap::new(dims, gt.data.iter().map(|&v| v as f64).collect())?;
    let mask: Vec<bool> = mask.data.iter().map(|&v| v > 0).collect();
    let metrics = eval::mae(&pred, &gt, &mask, unit)?;
    let json = serde_json::to_string(&metrics).expect("metrics serialize");
    if let Some(path) = out {
        fs::write(path, &json).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    println!("{json}");
    Ok(())
}

fn synth(spec: &Path, out: &Path) -> geoplane::Result<()> {
    let text = fs::read_to_string(spec).map_err(|e| Error::Io {
        path: spec.to_path_buf(),
        source: e,
    })?;
    let spec_parsed = eval::parse_scene_spec(&text).map_err(|e| match e {
        Error::Parse { line, msg, .. } => Error::Parse {
            path: spec.to_path_buf(),
            line,
            msg,
        },
        other => other,
    })?;
    let scene = eval::make_scene(&spec_parsed)?;
    eval::write_scene(&scene, out)?;
    println!(
        "wrote {} ({} samples, {} outliers)",
        out.display(),
        scene.samples.len(),
        scene.outlier_ids.len()
    );
    Ok(())
}

fn oracle(config: &Path, out: &Path, set: &[String]) -> geoplane::Result<()> {
    let cfg = load_config(config, None, set)?;
    let inputs = load_inputs(&cfg)?;
    let field =
        StepCostField::from_inputs(&inputs.edges, inputs.semantics.as_ref(), &cfg.geodesic)?;
    let part = voronoi_partition(&field, &inputs.samples)?;
    let graph = build_cell_graph(&part, &field, cfg.graph)?;
    let exact = oracle_geodesic(&field, &inputs.samples)?;
    let mut csv = String::from("n,m,approx,oracle\n");
    let mut below = 0;
    for (n, _, nb) in graph.pairs() {
        let truth = exact[n][nb.seed];
        if nb.dist < truth * (1.0 - 1e-12) {
            below += 1;
        }
        writeln!(csv, "{n},{},{:?},{:?}", nb.seed, nb.dist, truth).unwrap();
    }
    fs::write(out, csv).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    if below > 0 {
        return Err(Error::Invalid(format!(
            "{below} of {} pairs fall below the exact distance",
            graph.num_pairs()
        )));
    }
    println!("wrote {} ({} pairs)", out.display(), graph.num_pairs());
    Ok(())
}

fn baseline(
    method: Method,
    config: &Path,
    flags: &InputFlags,
    stride: Option<usize>,
    set: &[String],
) -> geoplane::Result<()> {
    let cfg = load_config(config, Some(flags), set)?;
    let inputs = load_inputs(&cfg)?;
    let (map, name) = match method {
        Method::Nearest => (
            eval::baseline_nearest(&inputs.samples, inputs.dims)?,
            "nearest",
        ),
        Method::Bilinear => {
            let stride =
                stride.ok_or_else(|| Error::Invalid("--stride is required for bilinear".into()))?;
            (
                eval::baseline_bilinear(&inputs.samples, inputs.dims, stride)?,
                "bilinear",
            )
        }
    };
    geoplane::io::write_outputs(&map, &cfg.out_dir, &serde_json::json!({ "method": name }))?;
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

/// First line of a message, so every failure is reported on exactly one line.
fn one_line(msg: &str) -> String {
    msg.lines().next().unwrap_or("").trim().to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "error: usage: {}",
                one_line(msg.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Upsample {
            config,
            inputs,
            set,
        } => upsample(config, inputs, set),
        Command::Eval {
            pred,
            gt,
            mask,
            unit,
            out,
        } => evaluate(pred, gt, mask, (*unit).into(), out.as_deref()),
        Command::Synth { spec, out } => synth(spec, out),
        Command::OracleGeodesic { config, out, set } => oracle(config, out, set),
        Command::Baseline {
            method,
            config,
            inputs,
            stride,
            set,
        } => baseline(*method, config, inputs, *stride, set),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
