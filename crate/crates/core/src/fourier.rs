//! Continuum Fourier sums on arbitrary uniform lattices.
//!
//! A plain FFT ties the output spacing to `2π/(N·Δ)`. Quadrature grids here
//! use the same lattice for `x` and `P`, so the sums are evaluated with a
//! Bluestein (chirp-z) convolution instead.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

/// Precomputed evaluation of
/// `out_j = scale · Σ_k f_k · exp(sign·i·u_k·v_j)` with `u_k = u0 + k·du`,
/// `v_j = v0 + j·dv`.
pub struct ChirpTransform {
    n_in: usize,
    n_out: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct Lattice {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Lattice {
    pub fn of(grid: &GridSpec) -> Self {
        Self {
            start: grid.x_min(),
            step: grid.spacing(),
            len: grid.len(),
        }
    }
}

impl ChirpTransform {
    pub fn new(input: Lattice, output: Lattice, sign: f64, scale: f64) -> Self {
        let (n_in, n_out) = (input.len, output.len);
        let (u0, du, v0, dv) = (input.start, input.step, output.start, output.step);
        let a = sign * du * dv;
        let len = (n_in + n_out - 1).next_power_of_two();

        let pre = (0..n_in)
            .map(|k| {
                let k = k as f64;
                Complex64::from_polar(1.0, sign * du * v0 * k + 0.5 * a * k * k)
            })
            .collect();
        let post = (0..n_out)
            .map(|j| {
                let j = j as f64;
                Complex64::from_polar(
                    scale / len as f64,
                    sign * (u0 * v0 + u0 * dv * j) + 0.5 * a * j * j,
                )
            })
            .collect();

        let mut kernel = vec![Complex64::new(0.0, 0.0); len];
        for (m, slot) in kernel.iter_mut().enumerate().take(n_out) {
            let m = m as f64;
            *slot = Complex64::from_polar(1.0, -0.5 * a * m * m);
        }
        for m in 1..n_in {
            let mf = m as f64;
            kernel[len - m] = Complex64::from_polar(1.0, -0.5 * a * mf * mf);
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        forward.process(&mut kernel);

        Self {
            n_in,
            n_out,
            pre,
            post,
            kernel_hat: kernel,
            forward,
            inverse,
        }
    }

    /// Continuum transform between a grid and itself:
    /// `(2π)^{-1/2} Σ_k f_k e^{sign·i·x_j·x_k} Δ`.
    pub fn quadrature(grid: &GridSpec, sign: f64) -> Self {
        let lattice = Lattice::of(grid);
        let scale = grid.spacing() / (2.0 * std::f64::consts::PI).sqrt();
        Self::new(lattice, lattice, sign, scale)
    }

    pub fn input_len(&self) -> usize {
        self.n_in
    }

    pub fn output_len(&self) -> usize {
        self.n_out
    }

    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.n_in, "chirp transform input length");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.kernel_hat.len()];
        for ((b, f), p) in buf.iter_mut().zip(input).zip(&self.pre) {
            *b = f * p;
        }
        self.forward.process(&mut buf);
        for (b, h) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= h;
        }
        self.inverse.process(&mut buf);
        buf.truncate(self.n_out);
        for (b, p) in buf.iter_mut().zip(&self.post) {
            *b *= p;
        }
        buf
    }
}
