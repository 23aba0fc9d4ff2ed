//! Grid and tensor types shared by the whole pipeline, plus the Doppler mean
//! reduction that turns a 4D radar tensor into a 3D polar tensor.
//!
//! Conventions:
//! - Polar bins and Cartesian voxels are anchored by their centers:
//!   `center(i) = start + (i + 0.5) * step`.
//! - Dense tensors are row-major with the last axis fastest.
//! - Power is stored in linear scale; dB is a display-only concern.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// One uniformly binned axis. Units are meters for range, radians for angles
/// and meters/second for Doppler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    count: usize,
    start: f64,
    step: f64,
}

impl AxisSpec {
    pub fn new(count: usize, start: f64, step: f64) -> Result<Self> {
        if count < 1 {
            return Err(Error::Invalid {
                what: "axis",
                why: "bin count must be >= 1".into(),
            });
        }
        if !(step.is_finite() && step > 0.0) || !start.is_finite() {
            return Err(Error::Invalid {
                what: "axis",
                why: format!("start {start} / step {step} must be finite with step > 0"),
            });
        }
        Ok(Self { count, start, step })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Physical coordinate of the center of bin `i`.
    pub fn center(&self, i: usize) -> f64 {
        self.start + (i as f64 + 0.5) * self.step
    }

    /// Continuous bin coordinate of `x`: bin centers sit at integer values,
    /// the physical axis extent maps to `[-0.5, count - 0.5]`.
    pub fn bin_coord(&self, x: f64) -> f64 {
        (x - self.start) / self.step - 0.5
    }

    /// Physical end of the axis (`start + count * step`).
    pub fn end(&self) -> f64 {
        self.start + self.count as f64 * self.step
    }
}

/// Bin definitions for the four axes of a dense 4D radar tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid4D {
    pub doppler: AxisSpec,
    pub range: AxisSpec,
    pub azimuth: AxisSpec,
    pub elevation: AxisSpec,
}

impl PolarGrid4D {
    pub fn new(
        doppler: AxisSpec,
        range: AxisSpec,
        azimuth: AxisSpec,
        elevation: AxisSpec,
    ) -> Result<Self> {
        const TOL: f64 = 1e-9;
        if range.start() < 0.0 {
            return Err(Error::Invalid {
                what: "range axis",
                why: format!("start must be >= 0, got {}", range.start()),
            });
        }
        if azimuth.start() < -PI - TOL || azimuth.end() > PI + TOL {
            return Err(Error::Invalid {
                what: "azimuth axis",
                why: format!(
                    "span [{}, {}] not contained in (-pi, pi]",
                    azimuth.start(),
                    azimuth.end()
                ),
            });
        }
        if elevation.start() < -FRAC_PI_2 - TOL || elevation.end() > FRAC_PI_2 + TOL {
            return Err(Error::Invalid {
                what: "elevation axis",
                why: format!(
                    "span [{}, {}] not contained in (-pi/2, pi/2)",
                    elevation.start(),
                    elevation.end()
                ),
            });
        }
        Ok(Self {
            doppler,
            range,
            azimuth,
            elevation,
        })
    }

    /// Axis counts in tensor order (doppler, range, azimuth, elevation).
    pub fn shape(&self) -> [usize; 4] {
        [
            self.doppler.count(),
            self.range.count(),
            self.azimuth.count(),
            self.elevation.count(),
        ]
    }

    /// Axis counts of the Doppler-reduced tensor (range, azimuth, elevation).
    pub fn reduced_shape(&self) -> [usize; 3] {
        [
            self.range.count(),
            self.azimuth.count(),
            self.elevation.count(),
        ]
    }
}

/// Contiguous non-negative power tensor, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    values: Vec<f32>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, values: Vec<f32>) -> Result<Self> {
        let total: usize = shape.iter().product();
        if shape.is_empty() || shape.iter().any(|&c| c == 0) {
            return Err(Error::Invalid {
                what: "tensor shape",
                why: format!("all axis counts must be >= 1, got {shape:?}"),
            });
        }
        if values.len() != total {
            return Err(Error::Invalid {
                what: "tensor values",
                why: format!("length {} does not match shape product {}", values.len(), total),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Invalid {
                what: "tensor values",
                why: format!("power must be finite and non-negative, got {v}"),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let total: usize = shape.iter().product();
        Self::new(shape, vec![0.0; total])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat offset of a multi-index (row-major, last axis fastest).
    pub fn flat_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0usize;
        for (&i, &c) in index.iter().zip(&self.shape) {
            if i >= c {
                return None;
            }
            flat = flat * c + i;
        }
        Some(flat)
    }

    /// Multi-index of a flat offset.
    pub fn multi_index(&self, mut flat: usize) -> Option<Vec<usize>> {
        if flat >= self.values.len() {
            return None;
        }
        let mut index = vec![0usize; self.shape.len()];
        for (slot, &c) in index.iter_mut().zip(&self.shape).rev() {
            *slot = flat % c;
            flat /= c;
        }
        Some(index)
    }

    pub fn get(&self, index: &[usize]) -> Option<f32> {
        self.flat_index(index).map(|f| self.values[f])
    }
}

/// Axis-aligned Cartesian region of interest with cubic voxels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianRoi {
    min: [f64; 3],
    max: [f64; 3],
    voxel: f64,
}

impl CartesianRoi {
    pub fn new(min: [f64; 3], max: [f64; 3], voxel: f64) -> Result<Self> {
        if !(voxel.is_finite() && voxel > 0.0) {
            return Err(Error::Invalid {
                what: "RoI voxel size",
                why: format!("must be finite and > 0, got {voxel}"),
            });
        }
        for axis in 0..3 {
            if !min[axis].is_finite() || !max[axis].is_finite() || min[axis] >= max[axis] {
                return Err(Error::Invalid {
                    what: "RoI bounds",
                    why: format!("min {min:?} must be componentwise below max {max:?}"),
                });
            }
        }
        let roi = Self { min, max, voxel };
        for (axis, &count) in ['x', 'y', 'z'].iter().zip(&roi.voxel_count()) {
            if count == 0 {
                return Err(Error::DegenerateRoi { axis: *axis });
            }
        }
        Ok(roi)
    }

    /// Default detection region: x 0-72 m forward, y +-16 m, z -2-7.6 m,
    /// 0.4 m voxels (180 x 80 x 24).
    pub fn default_roi() -> Self {
        Self::new([0.0, -16.0, -2.0], [72.0, 16.0, 7.6], 0.4).expect("default RoI is valid")
    }

    pub fn min(&self) -> [f64; 3] {
        self.min
    }

    pub fn max(&self) -> [f64; 3] {
        self.max
    }

    pub fn voxel(&self) -> f64 {
        self.voxel
    }

    /// Per-axis voxel counts: `floor((max - min) / voxel)`.
    ///
    /// A 1e-9 absolute slack keeps bounds that divide evenly in real
    /// arithmetic from losing a voxel to rounding (e.g. 9.6 / 0.4 evaluates
    /// to 23.999...96 in binary floating point but must count 24).
    pub fn voxel_count(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for axis in 0..3 {
            counts[axis] = ((self.max[axis] - self.min[axis]) / self.voxel + 1e-9).floor() as usize;
        }
        counts
    }

    pub fn total_voxels(&self) -> usize {
        let [nx, ny, nz] = self.voxel_count();
        nx * ny * nz
    }

    /// Center of voxel `(ix, iy, iz)` in meters.
    pub fn voxel_center(&self, index: [usize; 3]) -> Result<[f64; 3]> {
        let counts = self.voxel_count();
        for axis in 0..3 {
            if index[axis] >= counts[axis] {
                return Err(Error::IndexOutOfRange { index, counts });
            }
        }
        let mut center = [0.0; 3];
        for axis in 0..3 {
            center[axis] = self.min[axis] + (index[axis] as f64 + 0.5) * self.voxel;
        }
        Ok(center)
    }

    /// Flat voxel offset, row-major with z fastest.
    pub fn linear_index(&self, index: [usize; 3]) -> usize {
        let [_, ny, nz] = self.voxel_count();
        (index[0] * ny + index[1]) * nz + index[2]
    }

    /// Inverse of [`linear_index`](Self::linear_index).
    pub fn voxel_index(&self, linear: usize) -> [usize; 3] {
        let [_, ny, nz] = self.voxel_count();
        let iz = linear % nz;
        let iy = (linear / nz) % ny;
        let ix = linear / (nz * ny);
        [ix, iy, iz]
    }

    /// Voxel index containing a point, if inside the RoI voxel lattice.
    pub fn voxel_of(&self, point: [f64; 3]) -> Option<[usize; 3]> {
        let counts = self.voxel_count();
        let mut index = [0usize; 3];
        for axis in 0..3 {
            let f = (point[axis] - self.min[axis]) / self.voxel;
            if f < 0.0 {
                return None;
            }
            let i = f.floor() as usize;
            if i >= counts[axis] {
                return None;
            }
            index[axis] = i;
        }
        Some(index)
    }
}

/// Mean over the Doppler axis of a 4D tensor shaped like `grid`, producing
/// a 3D (range, azimuth, elevation) tensor.
pub fn reduce_doppler(t: &DenseTensor, grid: &PolarGrid4D) -> Result<DenseTensor> {
    let expected = grid.shape();
    let shape = t.shape();
    if shape.len() != 4 {
        return Err(Error::Invalid {
            what: "tensor shape",
            why: format!("expected a 4D tensor, got {} axes", shape.len()),
        });
    }
    for (name, (&got, &want)) in ["doppler", "range", "azimuth", "elevation"]
        .iter()
        .zip(shape.iter().zip(&expected))
    {
        if got != want {
            return Err(Error::AxisMismatch {
                axis: name,
                expected: want,
                actual: got,
            });
        }
    }

    let d = expected[0];
    let cell_count = expected[1] * expected[2] * expected[3];
    let mut acc = vec![0.0f64; cell_count];
    for slice in t.values().chunks_exact(cell_count) {
        for (a, &v) in acc.iter_mut().zip(slice) {
            *a += v as f64;
        }
    }
    let inv = 1.0 / d as f64;
    let values: Vec<f32> = acc.into_iter().map(|a| (a * inv) as f32).collect();
    DenseTensor::new(grid.reduced_shape().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_4d(d: usize, r: usize, a: usize, e: usize) -> PolarGrid4D {
        PolarGrid4D::new(
            AxisSpec::new(d, -10.0, 0.5).unwrap(),
            AxisSpec::new(r, 0.0, 0.5).unwrap(),
            AxisSpec::new(a, -0.9, 1.8 / a as f64).unwrap(),
            AxisSpec::new(e, -0.3, 0.6 / e as f64).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn axis_centers_follow_convention() {
        let axis = AxisSpec::new(4, 1.0, 0.5).unwrap();
        assert_eq!(axis.center(0), 1.25);
        assert_eq!(axis.center(3), 2.75);
        assert_eq!(axis.end(), 3.0);
        assert!((axis.bin_coord(axis.center(2)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn axis_rejects_bad_args() {
        assert!(AxisSpec::new(0, 0.0, 1.0).is_err());
        assert!(AxisSpec::new(4, 0.0, 0.0).is_err());
        assert!(AxisSpec::new(4, 0.0, -1.0).is_err());
        assert!(AxisSpec::new(4, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn grid_rejects_bad_spans() {
        let ok = AxisSpec::new(4, 0.0, 0.1).unwrap();
        // Range starting below zero.
        assert!(PolarGrid4D::new(ok, AxisSpec::new(4, -1.0, 0.1).unwrap(), ok, ok).is_err());
        // Azimuth spilling past pi.
        let wide = AxisSpec::new(8, 0.0, 1.0).unwrap();
        assert!(PolarGrid4D::new(ok, ok, wide, ok).is_err());
        // Elevation spilling past pi/2.
        assert!(PolarGrid4D::new(ok, ok, ok, AxisSpec::new(4, 0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn reduce_doppler_of_identical_slices_is_identity() {
        let grid = grid_4d(4, 2, 3, 2);
        let slice: Vec<f32> = (0..12).map(|v| v as f32).collect();
        let mut values = Vec::new();
        for _ in 0..4 {
            values.extend_from_slice(&slice);
        }
        let t = DenseTensor::new(vec![4, 2, 3, 2], values).unwrap();
        let out = reduce_doppler(&t, &grid).unwrap();
        assert_eq!(out.shape(), &[2, 3, 2]);
        assert_eq!(out.values(), slice.as_slice());
    }

    #[test]
    fn reduce_doppler_means_single_cell() {
        let grid = grid_4d(4, 1, 1, 1);
        let t = DenseTensor::new(vec![4, 1, 1, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = reduce_doppler(&t, &grid).unwrap();
        assert_eq!(out.values(), &[2.5]);
    }

    #[test]
    fn reduce_doppler_matches_naive_loop_oracle() {
        let (d, r, a, e) = (8, 16, 8, 4);
        let grid = grid_4d(d, r, a, e);
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f32) / (1u64 << 31) as f32
        };
        let values: Vec<f32> = (0..d * r * a * e).map(|_| next()).collect();
        let t = DenseTensor::new(vec![d, r, a, e], values).unwrap();
        let out = reduce_doppler(&t, &grid).unwrap();

        // Independent naive-loop mean.
        for ir in 0..r {
            for ia in 0..a {
                for ie in 0..e {
                    let mut sum = 0.0f64;
                    for id in 0..d {
                        sum += t.get(&[id, ir, ia, ie]).unwrap() as f64;
                    }
                    let expected = sum / d as f64;
                    let got = out.get(&[ir, ia, ie]).unwrap() as f64;
                    let rel = (got - expected).abs() / expected.abs().max(1e-30);
                    assert!(rel < 1e-6, "cell ({ir},{ia},{ie}): {got} vs {expected}");
                }
            }
        }
    }

    #[test]
    fn reduce_doppler_reports_mismatched_axis() {
        let grid = grid_4d(4, 2, 3, 2);
        let t = DenseTensor::zeros(vec![4, 2, 5, 2]).unwrap();
        match reduce_doppler(&t, &grid) {
            Err(Error::AxisMismatch { axis, expected, actual }) => {
                assert_eq!(axis, "azimuth");
                assert_eq!((expected, actual), (3, 5));
            }
            other => panic!("expected axis mismatch, got {other:?}"),
        }
    }

    #[test]
    fn voxel_count_matches_paper_style_roi() {
        let roi = CartesianRoi::default_roi();
        assert_eq!(roi.voxel_count(), [180, 80, 24]);
    }

    #[test]
    fn voxel_larger_than_extent_is_degenerate() {
        let err = CartesianRoi::new([0.0, 0.0, 0.0], [10.0, 10.0, 0.3], 0.4);
        assert!(matches!(err, Err(Error::DegenerateRoi { axis: 'z' })));
    }

    #[test]
    fn voxel_center_first_cell() {
        let roi = CartesianRoi::new([0.0, 0.0, 0.0], [4.0, 4.0, 4.0], 0.4).unwrap();
        let c = roi.voxel_center([0, 0, 0]).unwrap();
        assert!((c[0] - 0.2).abs() < 1e-12);
        assert!((c[1] - 0.2).abs() < 1e-12);
        assert!((c[2] - 0.2).abs() < 1e-12);
        assert!(roi.voxel_center([10, 0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn random_roi_counts_match_floor_formula(
            min in prop::array::uniform3(-50.0f64..50.0),
            extent in prop::array::uniform3(0.5f64..40.0),
            voxel in 0.05f64..2.0,
        ) {
            let max = [min[0] + extent[0], min[1] + extent[1], min[2] + extent[2]];
            if let Ok(roi) = CartesianRoi::new(min, max, voxel) {
                let counts = roi.voxel_count();
                for axis in 0..3 {
                    let direct = ((max[axis] - min[axis]) / voxel).floor() as usize;
                    prop_assert_eq!(counts[axis], direct);
                }
            }
        }

        #[test]
        fn random_voxel_centers_match_formula(
            voxel in 0.1f64..1.0,
            idx in prop::array::uniform3(0usize..20),
        ) {
            let roi = CartesianRoi::new([-3.0, -3.0, -3.0], [18.0, 18.0, 18.0], voxel).unwrap();
            let counts = roi.voxel_count();
            if idx.iter().zip(&counts).all(|(i, c)| i < c) {
                let c = roi.voxel_center(idx).unwrap();
                for axis in 0..3 {
                    let direct = -3.0 + (idx[axis] as f64 + 0.5) * voxel;
                    prop_assert!((c[axis] - direct).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn last_voxel_center_stays_inside_roi(
            extent in prop::array::uniform3(1.0f64..30.0),
            voxel in 0.1f64..1.5,
        ) {
            if let Ok(roi) = CartesianRoi::new([0.0, 0.0, 0.0], extent, voxel) {
                let counts = roi.voxel_count();
                let last = [counts[0] - 1, counts[1] - 1, counts[2] - 1];
                let c = roi.voxel_center(last).unwrap();
                for axis in 0..3 {
                    prop_assert!(c[axis] + voxel / 2.0 <= roi.max()[axis] + 1e-9);
                }
            }
        }

        #[test]
        fn flat_index_roundtrip(shape in prop::collection::vec(1usize..6, 1..5), seed in any::<u64>()) {
            let total: usize = shape.iter().product();
            let t = DenseTensor::zeros(shape).unwrap();
            let flat = (seed as usize) % total;
            let multi = t.multi_index(flat).unwrap();
            prop_assert_eq!(t.flat_index(&multi), Some(flat));
        }

        #[test]
        fn reduce_doppler_stays_within_cell_bounds(values in prop::collection::vec(0.0f32..100.0, 24)) {
            let grid = grid_4d(4, 2, 3, 1);
            let t = DenseTensor::new(vec![4, 2, 3, 1], values).unwrap();
            let out = reduce_doppler(&t, &grid).unwrap();
            for cell in 0..6 {
                let column: Vec<f32> = (0..4).map(|d| t.values()[d * 6 + cell]).collect();
                let lo = column.iter().cloned().fold(f32::INFINITY, f32::min);
                let hi = column.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
                let v = out.values()[cell];
                prop_assert!(v >= lo - 1e-4 && v <= hi + 1e-4);
            }
        }

        #[test]
        fn reduce_doppler_is_linear(
            a in prop::collection::vec(0.0f32..50.0, 48),
            b in prop::collection::vec(0.0f32..50.0, 48),
        ) {
            let grid = grid_4d(4, 2, 3, 2);
            let shape = vec![4, 2, 3, 2];
            let (alpha, beta) = (2.0f32, 3.0f32);
            let mix: Vec<f32> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
            let ra = reduce_doppler(&DenseTensor::new(shape.clone(), a).unwrap(), &grid).unwrap();
            let rb = reduce_doppler(&DenseTensor::new(shape.clone(), b).unwrap(), &grid).unwrap();
            let rm = reduce_doppler(&DenseTensor::new(shape, mix).unwrap(), &grid).unwrap();
            for i in 0..rm.len() {
                let expect = alpha * ra.values()[i] + beta * rb.values()[i];
                let rel = (rm.values()[i] - expect).abs() / expect.abs().max(1e-6);
                prop_assert!(rel < 1e-6);
            }
        }
    }
}
