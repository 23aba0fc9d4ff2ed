//! 4D radar tensor processing: dense Doppler-range-azimuth-elevation
//! power tensors reduced, resampled onto a Cartesian region of interest,
//! and pooled down to sparse radar tensors with a compact binary format.
//!
//! Pipeline stages, each usable on its own:
//!
//! 1. [`grid::reduce_doppler`] — mean over the Doppler axis, in linear power.
//! 2. [`resample::ResamplePlan`] — trilinear polar-to-Cartesian gather.
//! 3. [`pool::top_percent_pool`] — keep the top N% of valid voxels by power.
//! 4. [`io`] — bit-exact `.srt` sparse and `.rt4` raw dense formats.
//!
//! [`fmcw`] provides an FMCW frame synthesizer used as a physics oracle,
//! and [`bench`] holds the density-sweep and throughput harnesses.

pub mod bench;
pub mod error;
pub mod fft;
pub mod fmcw;
pub mod grid;
pub mod io;
pub mod pipeline;
pub mod pool;
pub mod rng;
pub mod resample;

pub use error::{Error, FormatError, Result};
pub use grid::{reduce_doppler, AxisSpec, CartesianRoi, DenseTensor, PolarGrid4D};
pub use io::{read_raw_dense, read_srt, srt_file_size, write_raw_dense, write_srt};
pub use pipeline::{atomic_write, convert_frame, convert_frame_with_plan};
pub use pool::{element_count_for, top_percent_pool, SparseRadarTensor, SrtElement};
pub use resample::{CartesianField, Interp, ResamplePlan};
