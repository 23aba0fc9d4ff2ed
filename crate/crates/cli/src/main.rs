//! `srt4d`: synthesize, convert, sweep, bench and inspect 4D radar tensors.

mod scene;

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use srt4d::bench::{
    run_sweep, run_throughput, srt_name_for, write_sweep_csv, write_throughput_csv,
    DEFAULT_DENSITIES, REFERENCE_SPEEDUP,
};
use srt4d::{
    atomic_write, convert_frame_with_plan, read_raw_dense, read_srt, write_raw_dense, write_srt,
    CartesianRoi, Interp, ResamplePlan,
};

#[derive(Parser)]
#[command(name = "srt4d", version, about = "4D radar tensor toolkit", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a dense .rt4 frame from a scene description file.
    Synth(SynthArgs),
    /// Convert dense .rt4 frames to sparse .srt files at one density.
    Convert(ConvertArgs),
    /// Convert a frame set at a list of densities and report footprint trends.
    Sweep(SweepArgs),
    /// Compare offline sparse loading against online dense processing.
    Bench(BenchArgs),
    /// Print header fields and power statistics of a .rt4 or .srt file.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct RoiArgs {
    /// RoI minimum corner as x,y,z in meters.
    #[arg(long, value_parser = parse_triple, default_value = "0,-16,-2")]
    roi_min: [f64; 3],
    /// RoI maximum corner as x,y,z in meters.
    #[arg(long, value_parser = parse_triple, default_value = "72,16,7.6")]
    roi_max: [f64; 3],
    /// Cubic voxel edge length in meters.
    #[arg(long, default_value_t = 0.4)]
    voxel: f64,
}

impl RoiArgs {
    fn build(&self) -> Result<CartesianRoi, srt4d::Error> {
        CartesianRoi::new(self.roi_min, self.roi_max, self.voxel)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpArg {
    Trilinear,
    Nearest,
}

impl From<InterpArg> for Interp {
    fn from(value: InterpArg) -> Self {
        match value {
            InterpArg::Trilinear => Interp::Trilinear,
            InterpArg::Nearest => Interp::Nearest,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Scene description file (TOML; see `synth --help-schema`).
    #[arg(long, required_unless_present = "help_schema")]
    scene: Option<PathBuf>,
    /// Output .rt4 path.
    #[arg(long, required_unless_present = "help_schema")]
    out: Option<PathBuf>,
    /// Noise seed; overrides the scene file's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the scene file schema and exit.
    #[arg(long)]
    help_schema: bool,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input .rt4 frames.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output .srt path (single input only).
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Output directory for `<stem>.srt` files (default: next to each input).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Pooling density in percent of valid voxels.
    #[arg(long, default_value_t = 5.0)]
    density: f64,
    /// Worker threads for frame-level parallelism.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = InterpArg::Trilinear)]
    interp: InterpArg,
    #[command(flatten)]
    roi: RoiArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Input .rt4 frames.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory receiving the .srt files and sweep.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated density list in percent, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    densities: Option<Vec<f64>>,
    /// Worker threads for frame-level parallelism.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = InterpArg::Trilinear)]
    interp: InterpArg,
    #[command(flatten)]
    roi: RoiArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Input .rt4 frames.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory holding the pre-converted `<stem>_d<density>.srt` files.
    #[arg(long)]
    srt_dir: PathBuf,
    /// Density the sparse files were converted at.
    #[arg(long, default_value_t = 5.0)]
    density: f64,
    /// Timed repetitions per mode (median reported; first pass is warm-up).
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = InterpArg::Trilinear)]
    interp: InterpArg,
    #[command(flatten)]
    roi: RoiArgs,
}

#[derive(Args)]
struct InspectArgs {
    /// A .rt4 or .srt file (detected by magic bytes).
    file: PathBuf,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got {} values", parts.len()));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad number {part:?}"))?;
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap already formats help/version to stdout and usage errors
            // to stderr with exit code 2.
            return err.exit_with_usage_code();
        }
    };
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

trait ExitWithUsageCode {
    fn exit_with_usage_code(self) -> ExitCode;
}

impl ExitWithUsageCode for clap::Error {
    fn exit_with_usage_code(self) -> ExitCode {
        match self.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{self}");
                ExitCode::SUCCESS
            }
            _ => {
                eprint!("{self}");
                ExitCode::from(2)
            }
        }
    }
}

enum CliError {
    /// Bad flag combination or unusable arguments: exit 2.
    Usage(String),
    /// Work started and failed: exit 1.
    Runtime(String),
}

impl From<srt4d::Error> for CliError {
    fn from(err: srt4d::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn with_path<T>(path: &Path, result: Result<T, srt4d::Error>) -> Result<T, CliError> {
    result.map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    if args.help_schema {
        print!("{}", scene::SCHEMA_HELP);
        return Ok(());
    }
    let scene_path = args.scene.expect("clap enforces --scene");
    let out = args.out.expect("clap enforces --out");
    let text = std::fs::read_to_string(&scene_path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", scene_path.display())))?;
    let mut spec = scene::parse_scene(&text)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", scene_path.display())))?;
    if let Some(seed) = args.seed {
        spec.scene.seed = seed;
    }
    let grid = srt4d::fmcw::synth_grid(&spec.chirp, &spec.array, spec.azimuth_fov, spec.elevation_fov)?;
    let tensor = srt4d::fmcw::synthesize_frame(&spec.scene, &spec.chirp, &spec.array, &grid)?;
    let bytes = atomic_write(&out, |w| write_raw_dense(&tensor, &grid, w))?;
    eprintln!(
        "wrote {} ({bytes} bytes, shape {:?})",
        out.display(),
        grid.shape()
    );
    Ok(())
}

fn convert_out_path(input: &Path, out_dir: Option<&Path>) -> PathBuf {
    let mut name = input
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| "frame".into());
    name.push(".srt");
    match out_dir {
        Some(dir) => dir.join(name),
        None => input.with_file_name(name),
    }
}

fn cmd_convert(args: ConvertArgs) -> Result<(), CliError> {
    if args.out.is_some() && args.inputs.len() != 1 {
        return Err(usage("--out requires exactly one input; use --out-dir for batches"));
    }
    if !(args.density > 0.0 && args.density <= 100.0) {
        return Err(usage(format!(
            "--density must be in (0, 100], got {}",
            args.density
        )));
    }
    let roi = args.roi.build().map_err(|e| usage(e.to_string()))?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let outputs: Vec<PathBuf> = match &args.out {
        Some(out) => vec![out.clone()],
        None => args
            .inputs
            .iter()
            .map(|input| convert_out_path(input, args.out_dir.as_deref()))
            .collect(),
    };

    let interp: Interp = args.interp.into();
    let plan_slot: std::sync::Mutex<Option<(srt4d::PolarGrid4D, std::sync::Arc<ResamplePlan>)>> =
        std::sync::Mutex::new(None);
    let convert_one = |input: &Path, out: &Path| -> Result<(), CliError> {
        let mut reader = BufReader::new(File::open(input).map_err(|e| {
            CliError::Runtime(format!("{}: {e}", input.display()))
        })?);
        let (grid, tensor) = with_path(input, read_raw_dense(&mut reader))?;
        let plan = {
            let mut slot = plan_slot.lock().expect("plan lock");
            match slot.as_ref().filter(|(g, _)| *g == grid) {
                Some((_, plan)) => plan.clone(),
                None => {
                    let plan = std::sync::Arc::new(ResamplePlan::build(&grid, &roi, interp));
                    *slot = Some((grid, plan.clone()));
                    plan
                }
            }
        };
        let sparse = convert_frame_with_plan(&tensor, &grid, &plan, args.density)?;
        let bytes = atomic_write(out, |w| write_srt(&sparse, w))?;
        eprintln!(
            "wrote {} ({bytes} bytes, {} elements)",
            out.display(),
            sparse.elements().len()
        );
        Ok(())
    };

    let threads = args.threads.max(1).min(args.inputs.len());
    if threads <= 1 {
        for (input, out) in args.inputs.iter().zip(&outputs) {
            convert_one(input, out)?;
        }
        Ok(())
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let failures = std::sync::Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= args.inputs.len() {
                        break;
                    }
                    if let Err(err) = convert_one(&args.inputs[i], &outputs[i]) {
                        let message = match err {
                            CliError::Usage(m) | CliError::Runtime(m) => m,
                        };
                        failures.lock().expect("failure lock").push(message);
                    }
                });
            }
        });
        let failures = failures.into_inner().expect("failure lock");
        if let Some(first) = failures.first() {
            return Err(CliError::Runtime(format!(
                "{} of {} frames failed; first: {first}",
                failures.len(),
                args.inputs.len()
            )));
        }
        Ok(())
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let densities = args
        .densities
        .unwrap_or_else(|| DEFAULT_DENSITIES.to_vec());
    let roi = args.roi.build().map_err(|e| usage(e.to_string()))?;
    let machine = std::env::var("HOSTNAME").unwrap_or_else(|_| "unknown".into());
    let report = run_sweep(
        &args.inputs,
        &densities,
        &roi,
        &args.out_dir,
        args.interp.into(),
        args.threads,
        &machine,
    )
    .map_err(|e| match e {
        srt4d::Error::InvalidDensity(_) => usage(e.to_string()),
        srt4d::Error::Invalid { what: "density list", .. } => usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    for (path, why) in &report.failures {
        eprintln!("warning: skipped {}: {why}", path.display());
    }
    let mut csv = Vec::new();
    write_sweep_csv(&report, &mut csv)?;
    let csv_path = args.out_dir.join("sweep.csv");
    atomic_write(&csv_path, |w| {
        w.write_all(&csv)?;
        Ok(csv.len() as u64)
    })?;
    std::io::stdout().write_all(&csv)?;
    eprintln!("wrote {}", csv_path.display());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let roi = args.roi.build().map_err(|e| usage(e.to_string()))?;
    let sparse: Vec<PathBuf> = args
        .inputs
        .iter()
        .map(|input| args.srt_dir.join(srt_name_for(input, args.density)))
        .collect();
    let (online, offline) = run_throughput(
        &args.inputs,
        &sparse,
        &roi,
        args.density,
        args.interp.into(),
        args.reps,
    )?;
    let mut csv = Vec::new();
    write_throughput_csv(&[online.clone(), offline.clone()], &mut csv)?;
    std::io::stdout().write_all(&csv)?;
    eprintln!(
        "online {:.3} frames/s, offline {:.3} frames/s, speedup {:.2}x \
         (reference study ratio {:.2}x, includes training cost; not comparable directly)",
        online.frames_per_second, offline.frames_per_second, offline.speedup_ratio,
        REFERENCE_SPEEDUP
    );
    Ok(())
}

fn json_string(s: &str) -> serde_json::Value {
    serde_json::Value::String(s.to_string())
}

fn cmd_inspect(args: InspectArgs) -> Result<(), CliError> {
    let mut file = File::open(&args.file)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.file.display())))?;
    let mut magic = [0u8; 6];
    file.read_exact(&mut magic)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.file.display())))?;
    drop(file);
    let mut reader = BufReader::new(File::open(&args.file)?);

    let report = if magic == *srt4d::io::SRT_MAGIC {
        let sparse = with_path(&args.file, read_srt(&mut reader).map_err(Into::into))?;
        let powers: Vec<f64> = sparse.elements().iter().map(|e| e.power as f64).collect();
        let mut out = serde_json::Map::new();
        out.insert("format".into(), json_string("srt"));
        out.insert("roi_min".into(), serde_json::json!(sparse.roi().min()));
        out.insert("roi_max".into(), serde_json::json!(sparse.roi().max()));
        out.insert("voxel".into(), serde_json::json!(sparse.roi().voxel()));
        out.insert(
            "density_percent".into(),
            serde_json::json!(sparse.density_percent()),
        );
        out.insert(
            "source_valid_count".into(),
            serde_json::json!(sparse.source_valid_count()),
        );
        out.insert(
            "element_count".into(),
            serde_json::json!(sparse.elements().len()),
        );
        append_power_stats(&mut out, &powers);
        out
    } else if magic == *srt4d::io::RT4_MAGIC {
        let (grid, tensor) = with_path(&args.file, read_raw_dense(&mut reader).map_err(Into::into))?;
        let powers: Vec<f64> = tensor.values().iter().map(|&v| v as f64).collect();
        let mut out = serde_json::Map::new();
        out.insert("format".into(), json_string("rt4"));
        out.insert("shape".into(), serde_json::json!(grid.shape()));
        for (name, axis) in [
            ("doppler", grid.doppler),
            ("range", grid.range),
            ("azimuth", grid.azimuth),
            ("elevation", grid.elevation),
        ] {
            out.insert(
                name.into(),
                serde_json::json!({
                    "count": axis.count(),
                    "start": axis.start(),
                    "step": axis.step(),
                }),
            );
        }
        append_power_stats(&mut out, &powers);
        out
    } else {
        return Err(CliError::Runtime(format!(
            "{}: unrecognized magic bytes {magic:?}",
            args.file.display()
        )));
    };

    if args.json {
        println!("{}", serde_json::Value::Object(report));
    } else {
        for (key, value) in &report {
            println!("{key}: {value}");
        }
    }
    Ok(())
}

fn append_power_stats(out: &mut serde_json::Map<String, serde_json::Value>, powers: &[f64]) {
    let (min, max, sum) = powers.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0),
        |(min, max, sum), &p| (min.min(p), max.max(p), sum + p),
    );
    if powers.is_empty() {
        out.insert("power_min".into(), serde_json::json!(null));
        out.insert("power_max".into(), serde_json::json!(null));
        out.insert("power_mean".into(), serde_json::json!(null));
    } else {
        out.insert("power_min".into(), serde_json::json!(min));
        out.insert("power_max".into(), serde_json::json!(max));
        out.insert(
            "power_mean".into(),
            serde_json::json!(sum / powers.len() as f64),
        );
    }
}
