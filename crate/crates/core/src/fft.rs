//! Thin FFT wrappers used by the synthesizer.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Cached forward FFT of one size, single precision.
pub struct FftF32 {
    fft: Arc<dyn Fft<f32>>,
    scratch: Vec<Complex<f32>>,
}

impl FftF32 {
    pub fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self { fft, scratch }
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    pub fn process(&mut self, data: &mut [Complex<f32>]) {
        self.fft.process_with_scratch(data, &mut self.scratch);
    }
}

/// One-shot unnormalized forward FFT, double precision. Used by tests and
/// diagnostics where accumulation error must stay near machine epsilon.
pub fn fft_forward_f64(data: &mut [Complex<f64>]) {
    let fft = FftPlanner::new().plan_fft_forward(data.len());
    fft.process(data);
}
