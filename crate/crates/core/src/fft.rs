//! Axis-wise FFTs on `(ny, nx)` row-major fields. Inverse transforms are
//! normalized by `1/n`.

use std::f64::consts::TAU;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    fn rows(plan: &Arc<dyn Fft<f64>>, data: &mut Array2<C64>, scale: Option<f64>) {
        let n = data.ncols();
        let slice = data.as_slice_mut().expect("standard layout");
        slice.par_chunks_mut(n).for_each(|row| {
            plan.process(row);
            if let Some(s) = scale {
                row.iter_mut().for_each(|z| *z *= s);
            }
        });
    }

    fn columns(plan: &Arc<dyn Fft<f64>>, data: &mut Array2<C64>, scale: Option<f64>) {
        let mut t = data.t().as_standard_layout().into_owned();
        Self::rows(plan, &mut t, scale);
        data.assign(&t.t());
    }

    pub fn forward_x(&self, data: &mut Array2<C64>) {
        debug_assert_eq!(data.dim(), (self.ny, self.nx));
        Self::rows(&self.fwd_x, data, None);
    }

    pub fn inverse_x(&self, data: &mut Array2<C64>) {
        Self::rows(&self.inv_x, data, Some(1.0 / self.nx as f64));
    }

    pub fn forward_y(&self, data: &mut Array2<C64>) {
        debug_assert_eq!(data.dim(), (self.ny, self.nx));
        Self::columns(&self.fwd_y, data, None);
    }

    pub fn inverse_y(&self, data: &mut Array2<C64>) {
        Self::columns(&self.inv_y, data, Some(1.0 / self.ny as f64));
    }

    pub fn forward(&self, data: &mut Array2<C64>) {
        self.forward_x(data);
        self.forward_y(data);
    }

    pub fn inverse(&self, data: &mut Array2<C64>) {
        self.inverse_y(data);
        self.inverse_x(data);
    }
}

/// Angular wavenumbers in FFT order for `n` points of spacing `d`.
pub fn wavenumbers(n: usize, d: f64) -> Vec<f64> {
    let dk = TAU / (n as f64 * d);
    (0..n)
        .map(|j| {
            if j < n.div_ceil(2) {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}

/// Wavenumbers for spectral differentiation: the unpaired Nyquist mode is zeroed.
pub fn derivative_wavenumbers(n: usize, d: f64) -> Vec<f64> {
    let mut k = wavenumbers(n, d);
    if n.is_multiple_of(2) {
        k[n / 2] = 0.0;
    }
    k
}
