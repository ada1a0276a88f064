//! Thin wrappers over `rustfft` with the crate's unnormalized forward
//! convention `X(m) = Σ x(n)·exp(−i2πmn/N)`.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

pub fn forward<T: Real>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = input.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

pub fn inverse_unnormalized<T: Real>(buf: &mut [Complex<T>]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

pub fn forward_in_place<T: Real>(buf: &mut [Complex<T>]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}
