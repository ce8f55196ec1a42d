//! 2D DFT helpers on square grids, shared by the optics and spectral paths.

use ndarray::Array2;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Unnormalized forward 2D DFT, in place.
pub(crate) fn fft2(grid: &mut Array2<Complex64>) {
    transform(grid, false);
}

/// Inverse 2D DFT with 1/N^2 normalization, in place.
pub(crate) fn ifft2(grid: &mut Array2<Complex64>) {
    transform(grid, true);
    let scale = 1.0 / grid.len() as f64;
    grid.mapv_inplace(|v| v * scale);
}

fn transform(grid: &mut Array2<Complex64>, inverse: bool) {
    let (rows, cols) = grid.dim();
    assert_eq!(rows, cols, "2D DFT helpers expect square grids");
    let n = rows;
    if n == 0 {
        return;
    }
    let fft = plan(n, inverse);
    for mut row in grid.rows_mut() {
        let slice = row.as_slice_mut().expect("rows of a standard-layout array");
        fft.process(slice);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = grid[(i, j)];
        }
        fft.process(&mut column);
        for i in 0..n {
            grid[(i, j)] = column[i];
        }
    }
}

/// Swap quadrants so the zero-frequency / zero-shift sample moves from index
/// (0, 0) to (n/2, n/2). Exact inverse of itself on even-sized grids.
pub(crate) fn fftshift<T: Copy>(grid: &Array2<T>) -> Array2<T> {
    let (rows, cols) = grid.dim();
    let (hr, hc) = (rows / 2, cols / 2);
    Array2::from_shape_fn((rows, cols), |(i, j)| {
        grid[((i + rows - hr) % rows, (j + cols - hc) % cols)]
    })
}
