use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strandctl::hair::FormatError;
use strandctl::io::{
    export_bundle, parse_scenario, psnr, read_png, ssim, verify_bundle, BundleError, MetricError, PngError,
};
use strandctl::physics::{read_hseq, write_hseq, GeometrySequence, SimError};
use strandctl::scenario::{
    default_sweep, render_geometry, run_pipeline, simulate_scenario, ConfigError, Effect, PipelineError, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "strandctl", version, about = "Simulate hair and render per-frame control images")]
struct Cli {
    /// Worker threads; output bytes do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON; built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Replaces the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BundleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write the simulated geometry as geometry.hseq.
    #[arg(long)]
    dump_geometry: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the geometry as HSEQ.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output .hseq file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render control frames from an HSEQ dump.
    Render {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Geometry produced by `simulate`.
        #[arg(long)]
        geometry: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate, render and export a control bundle.
    Pipeline(BundleArgs),
    /// Freeze the hair mid-clip while the camera sweeps.
    BulletTime {
        #[command(flatten)]
        bundle: BundleArgs,
        /// Simulated frame to hold (from 0); defaults to the middle of the clip.
        #[arg(long)]
        freeze_frame: Option<usize>,
        /// Camera keyframes as FRAME:DEGREES, e.g. 0:0,40:0,60:20,80:-20.
        #[arg(long, value_delimiter = ',', value_parser = parse_keyframe)]
        azimuth: Option<Vec<(usize, f64)>>,
    },
    /// Render the clip and loop it forward then backward.
    Cinemagraph(BundleArgs),
    /// Compare two PNG images.
    Metrics {
        #[command(subcommand)]
        metric: Metric,
    },
    /// Check a bundle's frame count and content hashes.
    Verify { bundle: PathBuf },
}

#[derive(Subcommand)]
enum Metric {
    Psnr { a: PathBuf, b: PathBuf },
    Ssim { a: PathBuf, b: PathBuf },
}

fn parse_keyframe(s: &str) -> Result<(usize, f64), String> {
    let (f, d) = s.split_once(':').ok_or_else(|| format!("expected FRAME:DEGREES, got {s:?}"))?;
    let frame = f.trim().parse().map_err(|e| format!("bad frame in {s:?}: {e}"))?;
    let deg = d.trim().parse().map_err(|e| format!("bad angle in {s:?}: {e}"))?;
    Ok((frame, deg))
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Self { code, message: message.to_string() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = if matches!(e, ConfigError::Io { .. }) { EXIT_IO } else { EXIT_VALIDATION };
        Self::new(code, format!("config: {e}"))
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match &e {
            PipelineError::Config(ConfigError::Io { .. }) => EXIT_IO,
            PipelineError::StrandFile(FormatError::Io { .. }) => EXIT_IO,
            PipelineError::Sim(SimError::Divergence { .. }) => EXIT_DIVERGENCE,
            _ => EXIT_VALIDATION,
        };
        Self::new(code, e)
    }
}

impl From<BundleError> for Failure {
    fn from(e: BundleError) -> Self {
        let code = match &e {
            BundleError::Io { .. } | BundleError::Png(PngError::Io { .. }) => EXIT_IO,
            _ => EXIT_VALIDATION,
        };
        Self::new(code, e)
    }
}

impl From<PngError> for Failure {
    fn from(e: PngError) -> Self {
        let code = if matches!(e, PngError::Io { .. }) { EXIT_IO } else { EXIT_VALIDATION };
        Self::new(code, e)
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Self::new(EXIT_VALIDATION, e)
    }
}

fn load(args: &ScenarioArgs) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &args.scenario {
        Some(p) => parse_scenario(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_bundle(
    cfg: &ScenarioConfig,
    args: &BundleArgs,
    geometry: &GeometrySequence<f64>,
    control: &strandctl::raster::ControlSequence,
) -> Result<(), Failure> {
    let geom = args.dump_geometry.then_some(geometry);
    let bundle = export_bundle(control, cfg, geom, &args.out)?;
    println!(
        "wrote {} frames ({}x{}) to {}",
        bundle.manifest.frame_count,
        bundle.manifest.width,
        bundle.manifest.height,
        args.out.display()
    );
    Ok(())
}

fn run_bundle(cfg: ScenarioConfig, args: &BundleArgs) -> Result<(), Failure> {
    cfg.validate()?;
    let (geometry, control) = run_pipeline(&cfg)?;
    write_bundle(&cfg, args, &geometry, &control)
}

fn read_geometry(path: &Path) -> Result<GeometrySequence<f64>, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    read_hseq(&bytes).map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::new(EXIT_VALIDATION, "--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    }
    match cli.command {
        Command::Simulate { scenario, out } => {
            let cfg = load(&scenario)?;
            let seq = simulate_scenario(&cfg)?;
            let mut buf = Vec::new();
            write_hseq(&seq, &mut buf).map_err(|e| Failure::new(EXIT_IO, e))?;
            std::fs::write(&out, buf).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", out.display())))?;
            println!("wrote {} frames of {} strands to {}", seq.len(), seq.strand_count(), out.display());
        }
        Command::Render { scenario, geometry, out } => {
            let cfg = load(&scenario)?;
            let seq = read_geometry(&geometry)?.with_motion(&cfg.motion, cfg.physics.fps);
            let control = render_geometry(&cfg, &seq)?;
            let args = BundleArgs { scenario, out, dump_geometry: false };
            write_bundle(&cfg, &args, &seq, &control)?;
        }
        Command::Pipeline(args) => {
            let cfg = load(&args.scenario)?;
            run_bundle(cfg, &args)?;
        }
        Command::BulletTime { bundle, freeze_frame, azimuth } => {
            let mut cfg = load(&bundle.scenario)?;
            let (default_freeze, default_keys) = match &cfg.effect {
                Effect::BulletTime { freeze_frame, azimuth_keyframes } => (*freeze_frame, azimuth_keyframes.clone()),
                _ => default_sweep(cfg.frames),
            };
            cfg.effect = Effect::BulletTime {
                freeze_frame: freeze_frame.unwrap_or(default_freeze),
                azimuth_keyframes: azimuth.unwrap_or(default_keys),
            };
            run_bundle(cfg, &bundle)?;
        }
        Command::Cinemagraph(args) => {
            let mut cfg = load(&args.scenario)?;
            cfg.effect = Effect::Cinemagraph;
            run_bundle(cfg, &args)?;
        }
        Command::Metrics { metric } => match metric {
            Metric::Psnr { a, b } => println!("{:.6}", psnr(&read_png(a)?, &read_png(b)?)?),
            Metric::Ssim { a, b } => println!("{:.6}", ssim(&read_png(a)?, &read_png(b)?)?),
        },
        Command::Verify { bundle } => {
            let m = verify_bundle(&bundle)?;
            println!("ok: {} frames, scenario {}", m.frame_count, m.scenario_hash.as_deref().unwrap_or("-"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
