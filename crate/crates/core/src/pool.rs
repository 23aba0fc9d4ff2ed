//! Exact top-N% power pooling over the valid voxels of a Cartesian field.
//!
//! Selection runs in expected O(n) via `select_nth_unstable_by`; the full
//! sort exists only as a test oracle. Ties at the selection boundary are
//! broken by smaller linear voxel index, so output is bit-deterministic.

use crate::error::{Error, Result};
use crate::grid::CartesianRoi;
use crate::resample::CartesianField;

/// One retained voxel of a sparse radar tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrtElement {
    pub ix: u32,
    pub iy: u32,
    pub iz: u32,
    pub power: f32,
}

/// Sparse representation of a processed radar frame: the top-N% highest-power
/// valid voxels, sorted ascending by linear voxel index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRadarTensor {
    roi: CartesianRoi,
    density_percent: f64,
    source_valid_count: u64,
    elements: Vec<SrtElement>,
}

impl SparseRadarTensor {
    /// Validating constructor; enforces every invariant of the type.
    pub fn new(
        roi: CartesianRoi,
        density_percent: f64,
        source_valid_count: u64,
        elements: Vec<SrtElement>,
    ) -> Result<Self> {
        if !(density_percent.is_finite() && density_percent > 0.0 && density_percent <= 100.0) {
            return Err(Error::InvalidDensity(density_percent));
        }
        if source_valid_count == 0 {
            return Err(Error::NoValidVoxels);
        }
        let expected = element_count_for(density_percent, source_valid_count);
        if elements.len() as u64 != expected {
            return Err(Error::Invalid {
                what: "sparse tensor",
                why: format!(
                    "element count {} != ceil({density_percent}/100 * {source_valid_count}) = {expected}",
                    elements.len()
                ),
            });
        }
        let counts = roi.voxel_count();
        let mut prev: Option<usize> = None;
        for el in &elements {
            let idx = [el.ix as usize, el.iy as usize, el.iz as usize];
            if idx.iter().zip(&counts).any(|(i, c)| i >= c) {
                return Err(Error::IndexOutOfRange { index: idx, counts });
            }
            if !(el.power.is_finite() && el.power >= 0.0) {
                return Err(Error::Invalid {
                    what: "sparse tensor",
                    why: format!("element power {} not finite and non-negative", el.power),
                });
            }
            let linear = roi.linear_index(idx);
            if let Some(p) = prev {
                if linear <= p {
                    return Err(Error::Invalid {
                        what: "sparse tensor",
                        why: "elements not sorted ascending by unique linear voxel index".into(),
                    });
                }
            }
            prev = Some(linear);
        }
        Ok(Self {
            roi,
            density_percent,
            source_valid_count,
            elements,
        })
    }

    pub fn roi(&self) -> &CartesianRoi {
        &self.roi
    }

    pub fn density_percent(&self) -> f64 {
        self.density_percent
    }

    pub fn source_valid_count(&self) -> u64 {
        self.source_valid_count
    }

    pub fn elements(&self) -> &[SrtElement] {
        &self.elements
    }
}

/// Retained element count: `min(ceil(N/100 * valid), valid)`.
pub fn element_count_for(density_percent: f64, valid_count: u64) -> u64 {
    let k = (density_percent * valid_count as f64 / 100.0).ceil() as u64;
    k.min(valid_count)
}

fn collect_candidates(field: &CartesianField, density_percent: f64) -> Result<Vec<(u32, f32)>> {
    if !(density_percent.is_finite() && density_percent > 0.0 && density_percent <= 100.0) {
        return Err(Error::InvalidDensity(density_percent));
    }
    let values = field.values().values();
    let candidates: Vec<(u32, f32)> = field
        .valid()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v)
        .map(|(i, _)| (i as u32, values[i]))
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoValidVoxels);
    }
    Ok(candidates)
}

/// Ranking used for selection: higher power first, ties by smaller linear
/// voxel index.
fn rank(a: &(u32, f32), b: &(u32, f32)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Keep the top-N% highest-power valid voxels of `field`.
pub fn top_percent_pool(field: &CartesianField, density_percent: f64) -> Result<SparseRadarTensor> {
    let mut candidates = collect_candidates(field, density_percent)?;
    let valid_count = candidates.len() as u64;
    let k = element_count_for(density_percent, valid_count) as usize;
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, rank);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by_key(|(i, _)| *i);

    let roi = *field.roi();
    let elements = candidates
        .into_iter()
        .map(|(linear, power)| {
            let [ix, iy, iz] = roi.voxel_index(linear as usize);
            SrtElement {
                ix: ix as u32,
                iy: iy as u32,
                iz: iz as u32,
                power,
            }
        })
        .collect();
    SparseRadarTensor::new(roi, density_percent, valid_count, elements)
}

/// The K-th largest valid power: the minimum power retained at density N.
pub fn selection_threshold(field: &CartesianField, density_percent: f64) -> Result<f32> {
    let mut candidates = collect_candidates(field, density_percent)?;
    let k = element_count_for(density_percent, candidates.len() as u64) as usize;
    let (_, kth, _) = candidates.select_nth_unstable_by(k - 1, rank);
    Ok(kth.1)
}
