//! Desk-scale benchmark harnesses: storage footprint vs. density, and
//! offline sparse loading vs. online dense processing throughput.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{CartesianRoi, PolarGrid4D};
use crate::io::{read_raw_dense, read_srt, srt_file_size, write_srt};
use crate::pipeline::{atomic_write, convert_frame_with_plan};
use crate::pool::top_percent_pool;
use crate::resample::{Interp, ResamplePlan};

/// Density sweep grid used throughout: the study's ten density levels.
pub const DEFAULT_DENSITIES: [f64; 10] =
    [0.01, 0.1, 1.0, 3.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0];

/// Training-speed reference from the original study (8.04 / 0.47 it/s).
/// Reported next to measured ratios as metadata, never asserted: the
/// original numbers include network training cost.
pub const REFERENCE_SPEEDUP: f64 = 8.04 / 0.47;

/// One density level of a sweep, averaged over the input frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub density_percent: f64,
    pub element_count: f64,
    pub file_bytes: f64,
    pub convert_seconds: f64,
}

/// Footprint-vs-density sweep result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub machine: String,
    pub timestamp_unix: u64,
    pub rows: Vec<SweepRow>,
    /// Per-file failures; the sweep keeps going past bad inputs.
    pub failures: Vec<(PathBuf, String)>,
}

/// Throughput measurement for one loading mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub mode: Mode,
    pub frames_processed: u64,
    pub wall_seconds: f64,
    pub frames_per_second: f64,
    /// offline fps / online fps; identical on both reports of a pair.
    pub speedup_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Read the dense frame, then Doppler-reduce, resample and pool it.
    Online,
    /// Read the pre-converted sparse file and materialize its elements.
    Offline,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Online => "online",
            Mode::Offline => "offline",
        }
    }
}

fn check_densities(densities: &[f64]) -> Result<()> {
    if densities.is_empty() {
        return Err(Error::Invalid {
            what: "density list",
            why: "must not be empty".into(),
        });
    }
    for pair in densities.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::Invalid {
                what: "density list",
                why: format!("must be strictly increasing, got {pair:?}"),
            });
        }
    }
    for &d in densities {
        if !(d > 0.0 && d <= 100.0) {
            return Err(Error::InvalidDensity(d));
        }
    }
    Ok(())
}

/// Output file name for one (frame, density) pair.
pub fn srt_name_for(frame: &Path, density: f64) -> String {
    let stem = frame
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "frame".into());
    format!("{stem}_d{density}.srt")
}

/// Plans keyed by grid; frames from the same sensor share one plan.
struct PlanCache {
    interp: Interp,
    roi: CartesianRoi,
    plans: Mutex<Vec<(PolarGrid4D, std::sync::Arc<ResamplePlan>)>>,
}

impl PlanCache {
    fn new(roi: CartesianRoi, interp: Interp) -> Self {
        Self {
            interp,
            roi,
            plans: Mutex::new(Vec::new()),
        }
    }

    fn get(&self, grid: &PolarGrid4D) -> std::sync::Arc<ResamplePlan> {
        let mut plans = self.plans.lock().expect("plan cache poisoned");
        if let Some((_, plan)) = plans.iter().find(|(g, _)| g == grid) {
            return plan.clone();
        }
        let plan = std::sync::Arc::new(ResamplePlan::build(grid, &self.roi, self.interp));
        plans.push((*grid, plan.clone()));
        plan
    }
}

struct FrameSweep {
    rows: Vec<(u64, u64, f64)>, // per density: (elements, bytes, seconds)
}

fn sweep_one_frame(
    frame: &Path,
    densities: &[f64],
    cache: &PlanCache,
    out_dir: &Path,
) -> Result<FrameSweep> {
    let mut reader = BufReader::new(File::open(frame)?);
    let (grid, tensor) = read_raw_dense(&mut reader)?;
    let plan = cache.get(&grid);
    let reduced = crate::grid::reduce_doppler(&tensor, &grid)?;
    let field = plan.apply(&reduced)?;
    let mut rows = Vec::with_capacity(densities.len());
    for &density in densities {
        let started = Instant::now();
        let sparse = top_percent_pool(&field, density)?;
        let out_path = out_dir.join(srt_name_for(frame, density));
        let bytes = atomic_write(&out_path, |w| write_srt(&sparse, w))?;
        let seconds = started.elapsed().as_secs_f64();
        rows.push((sparse.elements().len() as u64, bytes, seconds));
    }
    Ok(FrameSweep { rows })
}

/// Convert every frame at every density, writing `.srt` files and
/// reporting per-density mean element count, file bytes and convert time.
pub fn run_sweep(
    frames: &[PathBuf],
    densities: &[f64],
    roi: &CartesianRoi,
    out_dir: &Path,
    interp: Interp,
    threads: usize,
    machine: &str,
) -> Result<SweepReport> {
    check_densities(densities)?;
    if frames.is_empty() {
        return Err(Error::Invalid {
            what: "frame list",
            why: "must not be empty".into(),
        });
    }
    std::fs::create_dir_all(out_dir)?;
    let cache = PlanCache::new(*roi, interp);
    let threads = threads.max(1).min(frames.len());

    // Frame-level parallelism; results land in frame order so the report is
    // identical for any thread count.
    let results: Vec<std::result::Result<FrameSweep, String>> = if threads <= 1 {
        frames
            .iter()
            .map(|f| sweep_one_frame(f, densities, &cache, out_dir).map_err(|e| e.to_string()))
            .collect()
    } else {
        let mut results: Vec<Option<std::result::Result<FrameSweep, String>>> =
            (0..frames.len()).map(|_| None).collect();
        let slots = Mutex::new(results.iter_mut().enumerate().collect::<Vec<_>>());
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= frames.len() {
                        break;
                    }
                    let out = sweep_one_frame(&frames[i], densities, &cache, out_dir)
                        .map_err(|e| e.to_string());
                    let mut slots = slots.lock().expect("slot lock");
                    let pos = slots.iter().position(|(n, _)| *n == i).expect("slot");
                    let (_, slot) = slots.remove(pos);
                    *slot = Some(out);
                });
            }
        });
        drop(slots);
        results.into_iter().map(|r| r.expect("all slots filled")).collect()
    };

    let mut failures = Vec::new();
    let mut ok = Vec::new();
    for (frame, result) in frames.iter().zip(results) {
        match result {
            Ok(sweep) => ok.push(sweep),
            Err(why) => failures.push((frame.clone(), why)),
        }
    }
    if ok.is_empty() {
        let (path, why) = failures
            .first()
            .cloned()
            .unwrap_or_else(|| (PathBuf::new(), "no frames".into()));
        return Err(Error::Invalid {
            what: "sweep",
            why: format!("every frame failed; first: {}: {why}", path.display()),
        });
    }

    let rows = (0..densities.len())
        .map(|slot| {
            let n = ok.len() as f64;
            SweepRow {
                density_percent: densities[slot],
                element_count: ok.iter().map(|f| f.rows[slot].0 as f64).sum::<f64>() / n,
                file_bytes: ok.iter().map(|f| f.rows[slot].1 as f64).sum::<f64>() / n,
                convert_seconds: ok.iter().map(|f| f.rows[slot].2).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(SweepReport {
        machine: machine.to_string(),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        rows,
        failures,
    })
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Measure per-frame throughput of the online dense pipeline against
/// offline sparse loading.
///
/// Each repetition walks every frame once; the first (warm-up) pass per
/// mode is excluded from timing, so measured passes run with a warm file
/// cache and a built resampling plan. Returns (online, offline).
pub fn run_throughput(
    dense_frames: &[PathBuf],
    sparse_frames: &[PathBuf],
    roi: &CartesianRoi,
    density: f64,
    interp: Interp,
    repetitions: usize,
) -> Result<(ThroughputReport, ThroughputReport)> {
    if dense_frames.is_empty() || repetitions == 0 {
        return Err(Error::Invalid {
            what: "throughput run",
            why: "need at least one frame and one repetition".into(),
        });
    }
    if sparse_frames.len() != dense_frames.len() {
        return Err(Error::Invalid {
            what: "throughput run",
            why: format!(
                "have {} dense frames but {} sparse files; run `convert` on every frame first",
                dense_frames.len(),
                sparse_frames.len()
            ),
        });
    }
    for path in sparse_frames {
        if !path.exists() {
            return Err(Error::Invalid {
                what: "throughput run",
                why: format!(
                    "missing pre-converted file {}; run `convert` first",
                    path.display()
                ),
            });
        }
    }

    let cache = PlanCache::new(*roi, interp);
    let online_pass = || -> Result<()> {
        for frame in dense_frames {
            let mut reader = BufReader::new(File::open(frame)?);
            let (grid, tensor) = read_raw_dense(&mut reader)?;
            let plan = cache.get(&grid);
            let sparse = convert_frame_with_plan(&tensor, &grid, &plan, density)?;
            std::hint::black_box(sparse.elements().len());
        }
        Ok(())
    };
    let offline_pass = || -> Result<()> {
        for path in sparse_frames {
            let mut reader = BufReader::new(File::open(path)?);
            let sparse = read_srt(&mut reader)?;
            std::hint::black_box(sparse.elements().len());
        }
        Ok(())
    };

    // Modes never interleave inside a timing section.
    online_pass()?; // warm-up: builds the plan, warms the cache
    let mut online_times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let started = Instant::now();
        online_pass()?;
        online_times.push(started.elapsed().as_secs_f64());
    }
    offline_pass()?;
    let mut offline_times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let started = Instant::now();
        offline_pass()?;
        offline_times.push(started.elapsed().as_secs_f64());
    }

    let frames = dense_frames.len() as u64;
    let online_wall = median(&mut online_times);
    let offline_wall = median(&mut offline_times);
    let online_fps = frames as f64 / online_wall;
    let offline_fps = frames as f64 / offline_wall;
    let ratio = offline_fps / online_fps;
    Ok((
        ThroughputReport {
            mode: Mode::Online,
            frames_processed: frames,
            wall_seconds: online_wall,
            frames_per_second: online_fps,
            speedup_ratio: ratio,
        },
        ThroughputReport {
            mode: Mode::Offline,
            frames_processed: frames,
            wall_seconds: offline_wall,
            frames_per_second: offline_fps,
            speedup_ratio: ratio,
        },
    ))
}

/// Expected bytes the offline mode touches per frame.
pub fn offline_bytes_per_frame(element_count: u64) -> u64 {
    srt_file_size(element_count)
}

/// `sweep.csv`: density_percent, element_count, file_bytes, convert_seconds.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, sink: &mut W) -> Result<()> {
    writeln!(sink, "density_percent,element_count,file_bytes,convert_seconds")?;
    for row in &report.rows {
        writeln!(
            sink,
            "{},{},{},{}",
            row.density_percent, row.element_count, row.file_bytes, row.convert_seconds
        )?;
    }
    Ok(())
}

/// Parse a `sweep.csv` back into rows (numeric fields round-trip exactly).
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Invalid {
                what: "sweep csv",
                why: format!("line {} has {} fields, expected 4", i + 1, fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Invalid {
                what: "sweep csv",
                why: format!("bad number {s:?} on line {}", i + 1),
            })
        };
        rows.push(SweepRow {
            density_percent: parse(fields[0])?,
            element_count: parse(fields[1])?,
            file_bytes: parse(fields[2])?,
            convert_seconds: parse(fields[3])?,
        });
    }
    Ok(rows)
}

/// `throughput.csv`: mode, frames_per_second, speedup_ratio.
pub fn write_throughput_csv<W: Write>(reports: &[ThroughputReport], sink: &mut W) -> Result<()> {
    writeln!(sink, "mode,frames_per_second,speedup_ratio")?;
    for report in reports {
        writeln!(
            sink,
            "{},{},{}",
            report.mode.as_str(),
            report.frames_per_second,
            report.speedup_ratio
        )?;
    }
    Ok(())
}

/// Read all bytes of a file (used by tests checking exact file sizes).
pub fn file_len(path: &Path) -> Result<u64> {
    let mut file = File::open(path)?;
    let mut count = 0u64;
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            return Ok(count);
        }
        count += n as u64;
    }
}
