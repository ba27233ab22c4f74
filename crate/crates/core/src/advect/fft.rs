use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Square 2-D FFT on an `n × n` buffer.
///
/// Spectral buffers use the layout `[k1 * n + k2]`; physical buffers produced
/// by [`Fft2::inverse_transposed`] use `[x2 * n + x1]`. Skipping the second
/// transpose is harmless because the solver only multiplies pointwise in
/// physical space.
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Fft2 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            tmp: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    fn transpose(&mut self, buf: &mut Vec<Complex64>) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                self.tmp[j * n + i] = buf[i * n + j];
            }
        }
        std::mem::swap(buf, &mut self.tmp);
    }

    /// Unnormalized inverse transform: `Σ_k c_k e^{+2πi k·x}`.
    pub(crate) fn inverse_transposed(&mut self, buf: &mut Vec<Complex64>) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        self.transpose(buf);
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalized forward transform from the transposed physical layout.
    pub(crate) fn forward_from_transposed(&mut self, buf: &mut Vec<Complex64>) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        self.transpose(buf);
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }
}
