//! Centered 2D Fourier transforms on periodic lateral grids.
//!
//! Conventions, matching the centered grids of [`crate::grid::LateralGrid`]:
//!
//!   forward:  F(κ_j) = d1·d2 · Σ_i f(y_i) e^{-i κ_j·y_i}
//!   inverse:  f(y_i) = 1/(n1 d1 n2 d2) · Σ_j F(κ_j) e^{+i κ_j·y_i}
//!
//! With y_i = (i - n/2)d and κ_j = 2π j̃/(nd) these reduce to plain DFTs times a
//! (-1)^{j1+j2} checkerboard on the spectral side, applied after the forward DFT
//! and before the inverse one. Storage order of spectra is DFT order (index j
//! maps to signed wavenumber j̃ via `LateralGrid::signed_index`).

use crate::grid::LateralGrid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Planned 2D FFT for one grid shape, with scratch buffers.
pub struct Fft2 {
    n: [usize; 2],
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
    scratch: Vec<Complex64>,
    transpose_buf: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: [usize; 2]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = [
            planner.plan_fft_forward(n[0]),
            planner.plan_fft_forward(n[1]),
        ];
        let inv = [
            planner.plan_fft_inverse(n[0]),
            planner.plan_fft_inverse(n[1]),
        ];
        let scratch_len = fwd
            .iter()
            .chain(inv.iter())
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Fft2 {
            n,
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
            transpose_buf: vec![Complex64::default(); n[0] * n[1]],
        }
    }

    pub fn shape(&self) -> [usize; 2] {
        self.n
    }

    fn transform_axis1(&mut self, data: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.fwd[1] } else { &self.inv[1] };
        for row in data.chunks_exact_mut(self.n[1]) {
            plan.process_with_scratch(row, &mut self.scratch);
        }
    }

    fn transform_axis0(&mut self, data: &mut [Complex64], forward: bool) {
        let (n1, n2) = (self.n[0], self.n[1]);
        transpose(data, &mut self.transpose_buf, n1, n2);
        {
            let plan = if forward { &self.fwd[0] } else { &self.inv[0] };
            for row in self.transpose_buf.chunks_exact_mut(n1) {
                plan.process_with_scratch(row, &mut self.scratch);
            }
        }
        transpose(&self.transpose_buf, data, n2, n1);
    }

    /// Unnormalized forward DFT along both axes.
    pub fn dft2(&mut self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n[0] * self.n[1]);
        self.transform_axis1(data, true);
        self.transform_axis0(data, true);
    }

    /// Unnormalized inverse DFT along both axes.
    pub fn idft2(&mut self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n[0] * self.n[1]);
        self.transform_axis1(data, false);
        self.transform_axis0(data, false);
    }

    /// Centered forward transform (physical samples -> spectrum).
    pub fn forward(&mut self, grid: &LateralGrid, data: &mut [Complex64]) {
        debug_assert_eq!(grid.n(), self.n);
        self.dft2(data);
        let scale = grid.cell_area();
        apply_checkerboard_scaled(data, self.n, scale);
    }

    /// Centered inverse transform (spectrum -> physical samples).
    pub fn inverse(&mut self, grid: &LateralGrid, data: &mut [Complex64]) {
        debug_assert_eq!(grid.n(), self.n);
        let scale = 1.0 / (grid.period(0) * grid.period(1));
        apply_checkerboard_scaled(data, self.n, scale);
        self.idft2(data);
    }
}

fn apply_checkerboard_scaled(data: &mut [Complex64], n: [usize; 2], scale: f64) {
    for i1 in 0..n[0] {
        let row = &mut data[i1 * n[1]..(i1 + 1) * n[1]];
        let row_sign = if i1 % 2 == 0 { scale } else { -scale };
        for (i2, v) in row.iter_mut().enumerate() {
            let s = if i2 % 2 == 0 { row_sign } else { -row_sign };
            *v *= s;
        }
    }
}

/// Blocked out-of-place transpose: src is rows×cols, dst becomes cols×rows.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            let r1 = (r0 + B).min(rows);
            let c1 = (c0 + B).min(cols);
            for r in r0..r1 {
                for c in c0..c1 {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Discrete L² norm squared of physical samples: Σ|f|²·d1·d2.
pub fn physical_norm_sq(grid: &LateralGrid, data: &[Complex64]) -> f64 {
    data.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_area()
}

/// Discrete L² norm squared computed from the centered spectrum:
/// Σ|F|²/(L1·L2); equals `physical_norm_sq` of the samples (Parseval).
pub fn spectral_norm_sq(grid: &LateralGrid, data: &[Complex64]) -> f64 {
    data.iter().map(|v| v.norm_sqr()).sum::<f64>() / (grid.period(0) * grid.period(1))
}
