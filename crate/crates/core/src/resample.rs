//! Polar-to-Cartesian resampling of the Doppler-reduced 3D polar tensor onto
//! the RoI voxel grid, with explicit coverage masking.
//!
//! The expensive part (per-voxel polar lookup indices and interpolation
//! weights) is precomputed once per (grid, RoI) pair into a [`ResamplePlan`];
//! applying the plan to a frame is just a gather.
//!
//! Coordinate convention: x forward, y left, z up; azimuth in the xy-plane
//! measured from +x; elevation from the xy-plane.

use crate::error::{Error, Result};
use crate::grid::{CartesianRoi, DenseTensor, PolarGrid4D};

/// Doppler-reduced tensor resampled onto the RoI voxel lattice, with a
/// validity mask marking voxels inside the polar coverage.
#[derive(Debug, Clone)]
pub struct CartesianField {
    roi: CartesianRoi,
    values: DenseTensor,
    valid: Vec<bool>,
}

impl CartesianField {
    pub fn new(roi: CartesianRoi, values: DenseTensor, valid: Vec<bool>) -> Result<Self> {
        let [nx, ny, nz] = roi.voxel_count();
        if values.shape() != [nx, ny, nz] {
            return Err(Error::Invalid {
                what: "cartesian field",
                why: format!("tensor shape {:?} != RoI voxel counts {:?}", values.shape(), [nx, ny, nz]),
            });
        }
        if valid.len() != values.len() {
            return Err(Error::Invalid {
                what: "cartesian field",
                why: format!("mask length {} != voxel count {}", valid.len(), values.len()),
            });
        }
        Ok(Self { roi, values, valid })
    }

    pub fn roi(&self) -> &CartesianRoi {
        &self.roi
    }

    pub fn values(&self) -> &DenseTensor {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

/// Interpolation kernel used when sampling the polar tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Trilinear over the 8 surrounding bin centers. Exact for fields that
    /// are multilinear in bin coordinates.
    Trilinear,
    /// Nearest bin center. Faster, blockier.
    Nearest,
}

/// Spherical coordinates of a Cartesian point: (range m, azimuth rad,
/// elevation rad). Total function; the origin maps to (0, 0, 0).
pub fn cart_to_polar(p: [f64; 3]) -> (f64, f64, f64) {
    let [x, y, z] = p;
    let r = (x * x + y * y + z * z).sqrt();
    let az = y.atan2(x);
    let el = if r > 0.0 { (z / r).asin() } else { 0.0 };
    (r, az, el)
}

/// Inverse of [`cart_to_polar`].
pub fn polar_to_cart(r: f64, az: f64, el: f64) -> [f64; 3] {
    [
        r * el.cos() * az.cos(),
        r * el.cos() * az.sin(),
        r * el.sin(),
    ]
}

/// Per-voxel gather sources and weights. The weight layout is always 8-wide;
/// nearest-neighbor entries put all weight on the first source.
#[derive(Debug, Clone)]
struct GatherEntry {
    voxel: u32,
    sources: [u32; 8],
    weights: [f64; 8],
}

/// Precomputed resampling for one (grid, RoI, interpolation) combination.
/// Immutable and shareable; applying it to a tensor is a pure function.
#[derive(Debug, Clone)]
pub struct ResamplePlan {
    roi: CartesianRoi,
    polar_shape: [usize; 3],
    interp: Interp,
    entries: Vec<GatherEntry>,
    valid: Vec<bool>,
}

impl ResamplePlan {
    pub fn build(grid: &PolarGrid4D, roi: &CartesianRoi, interp: Interp) -> Self {
        let polar_shape = grid.reduced_shape();
        let [nr, na, ne] = polar_shape;
        let counts = roi.voxel_count();
        let total = roi.total_voxels();
        let mut entries = Vec::new();
        let mut valid = vec![false; total];

        let axes = [&grid.range, &grid.azimuth, &grid.elevation];
        for ix in 0..counts[0] {
            for iy in 0..counts[1] {
                for iz in 0..counts[2] {
                    let center = roi.voxel_center([ix, iy, iz]).expect("index in range");
                    let (r, az, el) = cart_to_polar(center);
                    let coords = [r, az, el];

                    // Inside the physical grid extent on all three axes?
                    let mut bin = [0.0f64; 3];
                    let mut inside = true;
                    for axis in 0..3 {
                        let c = axes[axis].bin_coord(coords[axis]);
                        let hi = axes[axis].count() as f64 - 0.5;
                        if c < -0.5 || c > hi {
                            inside = false;
                            break;
                        }
                        // Clamp the margin between the outermost bin center
                        // and the physical edge to the nearest bin.
                        bin[axis] = c.clamp(0.0, axes[axis].count() as f64 - 1.0);
                    }
                    if !inside {
                        continue;
                    }

                    let linear = roi.linear_index([ix, iy, iz]) as u32;
                    valid[linear as usize] = true;

                    let flat = |ir: usize, ia: usize, ie: usize| ((ir * na + ia) * ne + ie) as u32;
                    match interp {
                        Interp::Nearest => {
                            let ir = bin[0].round() as usize;
                            let ia = bin[1].round() as usize;
                            let ie = bin[2].round() as usize;
                            let sources = [flat(ir, ia, ie); 8];
                            let mut weights = [0.0; 8];
                            weights[0] = 1.0;
                            entries.push(GatherEntry { voxel: linear, sources, weights });
                        }
                        Interp::Trilinear => {
                            let mut base = [0usize; 3];
                            let mut frac = [0.0f64; 3];
                            for axis in 0..3 {
                                let count = axes[axis].count();
                                if count == 1 {
                                    base[axis] = 0;
                                    frac[axis] = 0.0;
                                } else {
                                    let i0 = (bin[axis].floor() as usize).min(count - 2);
                                    base[axis] = i0;
                                    frac[axis] = bin[axis] - i0 as f64;
                                }
                            }
                            let [fr, fa, fe] = frac;
                            let r1 = (base[0] + 1).min(nr - 1);
                            let a1 = (base[1] + 1).min(na - 1);
                            let e1 = (base[2] + 1).min(ne - 1);
                            let sources = [
                                flat(base[0], base[1], base[2]),
                                flat(base[0], base[1], e1),
                                flat(base[0], a1, base[2]),
                                flat(base[0], a1, e1),
                                flat(r1, base[1], base[2]),
                                flat(r1, base[1], e1),
                                flat(r1, a1, base[2]),
                                flat(r1, a1, e1),
                            ];
                            let weights = [
                                (1.0 - fr) * (1.0 - fa) * (1.0 - fe),
                                (1.0 - fr) * (1.0 - fa) * fe,
                                (1.0 - fr) * fa * (1.0 - fe),
                                (1.0 - fr) * fa * fe,
                                fr * (1.0 - fa) * (1.0 - fe),
                                fr * (1.0 - fa) * fe,
                                fr * fa * (1.0 - fe),
                                fr * fa * fe,
                            ];
                            entries.push(GatherEntry { voxel: linear, sources, weights });
                        }
                    }
                }
            }
        }

        Self {
            roi: *roi,
            polar_shape,
            interp,
            entries,
            valid,
        }
    }

    pub fn roi(&self) -> &CartesianRoi {
        &self.roi
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    /// Number of RoI voxels covered by the polar grid.
    pub fn valid_count(&self) -> usize {
        self.entries.len()
    }

    /// Validity mask (depends only on grid and RoI, never on tensor values).
    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    /// Gather a Doppler-reduced polar tensor through the plan.
    pub fn apply(&self, polar: &DenseTensor) -> Result<CartesianField> {
        let [nr, na, ne] = self.polar_shape;
        let shape = polar.shape();
        if shape != [nr, na, ne] {
            let names = ["range", "azimuth", "elevation"];
            for axis in 0..3 {
                if shape.get(axis) != Some(&self.polar_shape[axis]) {
                    return Err(Error::AxisMismatch {
                        axis: names[axis],
                        expected: self.polar_shape[axis],
                        actual: shape.get(axis).copied().unwrap_or(0),
                    });
                }
            }
        }
        let src = polar.values();
        let counts = self.roi.voxel_count();
        let mut out = vec![0.0f32; self.roi.total_voxels()];
        for entry in &self.entries {
            let mut acc = 0.0f64;
            for (s, w) in entry.sources.iter().zip(&entry.weights) {
                acc += src[*s as usize] as f64 * w;
            }
            // Convex weights of non-negative samples; clamp away any -0.0.
            out[entry.voxel as usize] = (acc as f32).max(0.0);
        }
        let values = DenseTensor::new(counts.to_vec(), out)?;
        CartesianField::new(self.roi, values, self.valid.clone())
    }
}

/// Build a plan and apply it in one step.
pub fn resample(
    polar: &DenseTensor,
    grid: &PolarGrid4D,
    roi: &CartesianRoi,
    interp: Interp,
) -> Result<CartesianField> {
    let expected = grid.reduced_shape();
    let names = ["range", "azimuth", "elevation"];
    if polar.shape().len() != 3 {
        return Err(Error::Invalid {
            what: "polar tensor",
            why: format!("expected 3 axes, got {}", polar.shape().len()),
        });
    }
    for axis in 0..3 {
        if polar.shape()[axis] != expected[axis] {
            return Err(Error::AxisMismatch {
                axis: names[axis],
                expected: expected[axis],
                actual: polar.shape()[axis],
            });
        }
    }
    ResamplePlan::build(grid, roi, interp).apply(polar)
}

/// Fraction of RoI voxels covered by the polar grid.
pub fn coverage_fraction(grid: &PolarGrid4D, roi: &CartesianRoi) -> f64 {
    let plan = ResamplePlan::build(grid, roi, Interp::Nearest);
    plan.valid_count() as f64 / roi.total_voxels() as f64
}
