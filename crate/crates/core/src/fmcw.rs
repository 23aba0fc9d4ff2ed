//! Synthetic FMCW radar tensor generator.
//!
//! Implements the classic signal chain (chirp -> beat signal -> FFTs ->
//! power tensor) for point-target scenes, so the rest of the pipeline can be
//! tested against analytically known peak positions without a real dataset.
//!
//! Conventions:
//! - Range axis is one-sided (first half of the fast-time FFT), anchored so
//!   FFT bins coincide with the grid's bin centers via a half-bin offset on
//!   the beat frequency.
//! - Doppler, azimuth and elevation axes are fftshifted (zero at the center
//!   bin).
//! - Angle axes use a uniform beamspace model: the per-element spatial
//!   frequency is proportional to the angle itself, so FFT beam bins
//!   coincide with the grid's uniform angle bins across the whole field of
//!   view.
//! - Noise is complex circular Gaussian added to the time-domain signal,
//!   drawn from a counter-based generator keyed per array element.

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::FftF32;
use crate::grid::{AxisSpec, DenseTensor, PolarGrid4D};
use crate::resample::cart_to_polar;
use crate::rng::CounterRng;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW chirp and sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpConfig {
    /// Carrier wavelength in meters (mm-wave automotive radar: ~0.004).
    pub carrier_wavelength: f64,
    /// Chirp slope in Hz/s.
    pub slope: f64,
    /// ADC sample rate in Hz.
    pub sample_rate: f64,
    /// Fast-time samples per chirp (FFT size; power of two).
    pub samples_per_chirp: usize,
    /// Chirps per frame (Doppler FFT size; power of two).
    pub chirps_per_frame: usize,
    /// Chirp-to-chirp interval in seconds.
    pub chirp_interval: f64,
}

impl ChirpConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_wavelength", self.carrier_wavelength),
            ("slope", self.slope),
            ("sample_rate", self.sample_rate),
            ("chirp_interval", self.chirp_interval),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid {
                    what: "chirp config",
                    why: format!("{name} must be finite and > 0, got {v}"),
                });
            }
        }
        for (name, v) in [
            ("samples_per_chirp", self.samples_per_chirp),
            ("chirps_per_frame", self.chirps_per_frame),
        ] {
            if v < 2 || !v.is_power_of_two() {
                return Err(Error::Invalid {
                    what: "chirp config",
                    why: format!("{name} must be a power of two >= 2, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Number of one-sided range bins (`samples_per_chirp / 2`).
    pub fn range_bins(&self) -> usize {
        self.samples_per_chirp / 2
    }

    /// Range covered by one fast-time FFT bin.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT * self.sample_rate / (2.0 * self.slope * self.samples_per_chirp as f64)
    }

    /// Largest unambiguous range (the one-sided spectrum extent).
    pub fn max_range(&self) -> f64 {
        self.range_bins() as f64 * self.range_resolution()
    }

    /// Radial velocity covered by one Doppler bin.
    pub fn velocity_resolution(&self) -> f64 {
        self.carrier_wavelength / (2.0 * self.chirps_per_frame as f64 * self.chirp_interval)
    }

    /// Largest unambiguous radial speed.
    pub fn max_speed(&self) -> f64 {
        self.chirps_per_frame as f64 / 2.0 * self.velocity_resolution()
    }
}

/// Effective antenna counts along the two angle axes (FFT beamforming
/// sizes; powers of two).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualArray {
    pub azimuth_elements: usize,
    pub elevation_elements: usize,
}

impl VirtualArray {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("azimuth_elements", self.azimuth_elements),
            ("elevation_elements", self.elevation_elements),
        ] {
            if v < 1 || !v.is_power_of_two() {
                return Err(Error::Invalid {
                    what: "virtual array",
                    why: format!("{name} must be a power of two >= 1, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// One point reflector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Cartesian position in meters (x forward, y left, z up).
    pub position: [f64; 3],
    /// Radial velocity in m/s (positive = receding).
    pub radial_velocity: f64,
    /// Linear signal amplitude (>= 0).
    pub amplitude: f64,
}

/// Point-target scene driving one synthesized frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub targets: Vec<Target>,
    /// Per-sample noise power (linear; 0 disables noise).
    pub noise_floor: f64,
    pub seed: u64,
}

/// Grid whose bins line up with the synthesizer's FFT outputs:
/// one-sided range axis starting at 0, fftshifted Doppler and angle axes
/// centered on zero, and the given total fields of view in radians.
pub fn synth_grid(
    cfg: &ChirpConfig,
    array: &VirtualArray,
    azimuth_fov: f64,
    elevation_fov: f64,
) -> Result<PolarGrid4D> {
    cfg.validate()?;
    array.validate()?;
    let nc = cfg.chirps_per_frame;
    let na = array.azimuth_elements;
    let ne = array.elevation_elements;
    let dv = cfg.velocity_resolution();
    let daz = azimuth_fov / na as f64;
    let del = elevation_fov / ne as f64;
    PolarGrid4D::new(
        AxisSpec::new(nc, -(nc as f64 / 2.0 + 0.5) * dv, dv)?,
        AxisSpec::new(cfg.range_bins(), 0.0, cfg.range_resolution())?,
        AxisSpec::new(na, -(na as f64 / 2.0 + 0.5) * daz, daz)?,
        AxisSpec::new(ne, -(ne as f64 / 2.0 + 0.5) * del, del)?,
    )
}

/// Beat frequency of a target at `range_m`: `f_b = 2 * slope * range / c`.
pub fn beat_frequency(range_m: f64, cfg: &ChirpConfig) -> Result<f64> {
    cfg.validate()?;
    if !(range_m.is_finite() && range_m >= 0.0 && range_m < cfg.max_range()) {
        return Err(Error::TargetOutOfBounds {
            index: 0,
            why: format!(
                "range {range_m} m outside unambiguous range [0, {}) m",
                cfg.max_range()
            ),
        });
    }
    Ok(2.0 * cfg.slope * range_m / SPEED_OF_LIGHT)
}

fn check_grid(cfg: &ChirpConfig, array: &VirtualArray, grid: &PolarGrid4D) -> Result<()> {
    cfg.validate()?;
    array.validate()?;
    let expected = [
        ("doppler", cfg.chirps_per_frame, grid.doppler.count()),
        ("range", cfg.range_bins(), grid.range.count()),
        ("azimuth", array.azimuth_elements, grid.azimuth.count()),
        ("elevation", array.elevation_elements, grid.elevation.count()),
    ];
    for (axis, want, got) in expected {
        if want != got {
            return Err(Error::AxisMismatch {
                axis,
                expected: want,
                actual: got,
            });
        }
    }
    // The grid must use the physical bin widths or the beat/Doppler
    // frequencies will not land on its bin centers.
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    if rel(grid.range.step(), cfg.range_resolution()) > 1e-9 {
        return Err(Error::Invalid {
            what: "grid",
            why: format!(
                "range step {} != chirp range resolution {}",
                grid.range.step(),
                cfg.range_resolution()
            ),
        });
    }
    if rel(grid.doppler.step(), cfg.velocity_resolution()) > 1e-9 {
        return Err(Error::Invalid {
            what: "grid",
            why: format!(
                "doppler step {} != chirp velocity resolution {}",
                grid.doppler.step(),
                cfg.velocity_resolution()
            ),
        });
    }
    Ok(())
}

/// Continuous (doppler, range, azimuth, elevation) bin coordinates of a
/// target, shared by the synthesizer and the peak oracle.
fn target_bin_coords(
    target: &Target,
    target_index: usize,
    grid: &PolarGrid4D,
) -> Result<[f64; 4]> {
    let (r, az, el) = cart_to_polar(target.position);
    let coords = [
        ("doppler", grid.doppler.bin_coord(target.radial_velocity), grid.doppler.count()),
        ("range", grid.range.bin_coord(r), grid.range.count()),
        ("azimuth", grid.azimuth.bin_coord(az), grid.azimuth.count()),
        ("elevation", grid.elevation.bin_coord(el), grid.elevation.count()),
    ];
    let mut bins = [0.0; 4];
    for (slot, (axis, bin, count)) in coords.into_iter().enumerate() {
        if !(bin >= 0.0 && bin <= count as f64 - 1.0) {
            return Err(Error::TargetOutOfBounds {
                index: target_index,
                why: format!("{axis} bin coordinate {bin:.3} outside [0, {}]", count - 1),
            });
        }
        bins[slot] = bin;
    }
    Ok(bins)
}

/// Analytic forward mapping of each target to its expected tensor peak bin
/// (doppler, range, azimuth, elevation).
pub fn expected_bins(
    scene: &SceneSpec,
    cfg: &ChirpConfig,
    array: &VirtualArray,
    grid: &PolarGrid4D,
) -> Result<Vec<[usize; 4]>> {
    check_grid(cfg, array, grid)?;
    scene
        .targets
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let bins = target_bin_coords(t, i, grid)?;
            Ok([
                bins[0].round() as usize,
                bins[1].round() as usize,
                bins[2].round() as usize,
                bins[3].round() as usize,
            ])
        })
        .collect()
}

/// Per-target normalized frequencies (cycles per sample / chirp / element)
/// that place the FFT peak on the target's bin coordinates.
struct ToneParams {
    amplitude: f64,
    freq_fast: f64,
    freq_chirp: f64,
    freq_az: f64,
    freq_el: f64,
}

/// Synthesize one 4D power tensor for a point-target scene.
///
/// For each (chirp, array element) the complex beat signal is a sum of
/// target sinusoids plus circular Gaussian noise; window-free FFTs run along
/// fast time (range, one-sided), slow time (Doppler), and the two array
/// axes; the output is squared magnitude in linear power.
pub fn synthesize_frame(
    scene: &SceneSpec,
    cfg: &ChirpConfig,
    array: &VirtualArray,
    grid: &PolarGrid4D,
) -> Result<DenseTensor> {
    check_grid(cfg, array, grid)?;
    if !(scene.noise_floor.is_finite() && scene.noise_floor >= 0.0) {
        return Err(Error::Invalid {
            what: "scene",
            why: format!("noise floor must be finite and >= 0, got {}", scene.noise_floor),
        });
    }
    let ns = cfg.samples_per_chirp;
    let nc = cfg.chirps_per_frame;
    let nr = cfg.range_bins();
    let na = array.azimuth_elements;
    let ne = array.elevation_elements;

    let mut tones = Vec::with_capacity(scene.targets.len());
    for (i, t) in scene.targets.iter().enumerate() {
        if !(t.amplitude.is_finite() && t.amplitude >= 0.0) {
            return Err(Error::Invalid {
                what: "scene",
                why: format!("target {i} amplitude must be finite and >= 0"),
            });
        }
        let bins = target_bin_coords(t, i, grid)?;
        tones.push(ToneParams {
            amplitude: t.amplitude,
            // One-sided spectrum: peak at fast-time FFT bin `bins[1]`.
            freq_fast: bins[1] / ns as f64,
            // fftshifted axes: peak at shifted bin `bins[k]`.
            freq_chirp: (bins[0] - nc as f64 / 2.0) / nc as f64,
            freq_az: (bins[2] - na as f64 / 2.0) / na as f64,
            freq_el: (bins[3] - ne as f64 / 2.0) / ne as f64,
        });
    }

    // Complex range profiles, laid out (chirp, range, azimuth, elevation),
    // elevation fastest -- the same order as the output tensor.
    let mut cube = vec![Complex::<f32>::default(); nc * nr * na * ne];
    let mut fft_fast = FftF32::new(ns);
    let mut time = vec![Complex::<f32>::default(); ns];
    let block = nr * na * ne;

    for m in 0..nc {
        let chirp_slice = &mut cube[m * block..(m + 1) * block];
        for a in 0..na {
            for e in 0..ne {
                time.fill(Complex::default());
                for tone in &tones {
                    // Phase in cycles; keep it wrapped for f64 accuracy.
                    let base = (tone.freq_chirp * m as f64
                        + tone.freq_az * a as f64
                        + tone.freq_el * e as f64)
                        .rem_euclid(1.0);
                    let mut cur = Complex::from_polar(tone.amplitude, std::f64::consts::TAU * base);
                    let rot = Complex::from_polar(1.0, std::f64::consts::TAU * tone.freq_fast);
                    for sample in time.iter_mut() {
                        *sample += Complex::new(cur.re as f32, cur.im as f32);
                        cur *= rot;
                    }
                }
                if scene.noise_floor > 0.0 {
                    let rng = CounterRng::new(scene.seed, (a * ne + e) as u64);
                    let power = scene.noise_floor as f32;
                    let base_ctr = (m * ns) as u64;
                    for (n, sample) in time.iter_mut().enumerate() {
                        let (re, im) = rng.complex_gaussian_at(base_ctr + n as u64, power);
                        sample.re += re;
                        sample.im += im;
                    }
                }
                fft_fast.process(&mut time);
                for r in 0..nr {
                    chirp_slice[(r * na + a) * ne + e] = time[r];
                }
            }
        }
    }

    // Doppler FFT: lines along the chirp axis, tiled per range bin so the
    // working set stays cache-sized.
    let mut fft_chirp = FftF32::new(nc);
    let plane = na * ne;
    let mut tile = vec![Complex::<f32>::default(); nc * plane];
    let mut line = vec![Complex::<f32>::default(); nc];
    for r in 0..nr {
        for m in 0..nc {
            let src = &cube[(m * nr + r) * plane..(m * nr + r + 1) * plane];
            tile[m * plane..(m + 1) * plane].copy_from_slice(src);
        }
        for j in 0..plane {
            for m in 0..nc {
                line[m] = tile[m * plane + j];
            }
            fft_chirp.process(&mut line);
            for m in 0..nc {
                tile[m * plane + j] = line[m];
            }
        }
        for m in 0..nc {
            let dst = &mut cube[(m * nr + r) * plane..(m * nr + r + 1) * plane];
            dst.copy_from_slice(&tile[m * plane..(m + 1) * plane]);
        }
    }

    // Azimuth FFT: stride-ne lines inside each (chirp, range) plane.
    let mut fft_az = FftF32::new(na);
    let mut line_a = vec![Complex::<f32>::default(); na];
    for mr in 0..nc * nr {
        let plane_slice = &mut cube[mr * plane..(mr + 1) * plane];
        for e in 0..ne {
            for a in 0..na {
                line_a[a] = plane_slice[a * ne + e];
            }
            fft_az.process(&mut line_a);
            for a in 0..na {
                plane_slice[a * ne + e] = line_a[a];
            }
        }
    }

    // Elevation FFT: contiguous lines.
    let mut fft_el = FftF32::new(ne);
    for chunk in cube.chunks_exact_mut(ne) {
        fft_el.process(chunk);
    }

    // Squared magnitude with fftshift on Doppler/azimuth/elevation.
    let mut out = vec![0.0f32; nc * nr * na * ne];
    for d in 0..nc {
        let m = (d + nc / 2) % nc;
        for r in 0..nr {
            for a_out in 0..na {
                let a = (a_out + na / 2) % na;
                let row = ((m * nr + r) * na + a) * ne;
                let out_row = ((d * nr + r) * na + a_out) * ne;
                for e_out in 0..ne {
                    let e = (e_out + ne / 2) % ne;
                    out[out_row + e_out] = cube[row + e].norm_sqr();
                }
            }
        }
    }
    DenseTensor::new(vec![nc, nr, na, ne], out)
}
