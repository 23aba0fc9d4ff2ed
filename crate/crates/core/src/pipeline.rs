//! Whole-frame conversion: dense 4D tensor -> sparse radar tensor.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::grid::{CartesianRoi, DenseTensor, PolarGrid4D, reduce_doppler};
use crate::pool::{top_percent_pool, SparseRadarTensor};
use crate::resample::{Interp, ResamplePlan};

/// Doppler-reduce, resample and pool one frame.
pub fn convert_frame(
    tensor: &DenseTensor,
    grid: &PolarGrid4D,
    roi: &CartesianRoi,
    density_percent: f64,
    interp: Interp,
) -> Result<SparseRadarTensor> {
    let plan = ResamplePlan::build(grid, roi, interp);
    convert_frame_with_plan(tensor, grid, &plan, density_percent)
}

/// Same as [`convert_frame`] but with a pre-built resampling plan, so
/// repeated frames over the same (grid, RoI) pay only the gather cost.
pub fn convert_frame_with_plan(
    tensor: &DenseTensor,
    grid: &PolarGrid4D,
    plan: &ResamplePlan,
    density_percent: f64,
) -> Result<SparseRadarTensor> {
    let reduced = reduce_doppler(tensor, grid)?;
    let field = plan.apply(&reduced)?;
    top_percent_pool(&field, density_percent)
}

/// Write a file atomically: the content lands under a temporary name in the
/// same directory and is renamed into place only on success, so partial
/// files are never mistaken for results.
pub fn atomic_write<F>(path: &Path, write_fn: F) -> Result<u64>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> Result<u64>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    let bytes = {
        let mut writer = BufWriter::new(tmp.as_file_mut());
        let bytes = write_fn(&mut writer)?;
        writer.flush()?;
        bytes
    };
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(bytes)
}
