//! Diffractive-lens geometry and point spread function synthesis.
//!
//! A photon sieve (or any Fresnel-zone-type diffractive lens) of diameter D
//! and smallest zone width w focuses wavelength lambda at
//! `f(lambda) = D * w / lambda`, so each spectral component of a
//! polychromatic source comes to focus at its own distance. Away from focus
//! the blur is modeled with the first-order defocused-pupil picture: the PSF
//! is the squared magnitude of the 2D DFT of the generalized pupil
//!
//! ```text
//! P(r) * exp(i * (pi / lambda) * (1/d - 1/f(lambda)) * r^2)
//! ```
//!
//! where P is the circular indicator of radius D/2 and d is the detector
//! distance. The pupil sample pitch is chosen as `lambda * d / (Q * pitch)`
//! (Q pupil samples per side) so that the DFT output is sampled exactly at
//! the requested detector pixel pitch.
//!
//! All operations here are pure: identical inputs give bit-identical grids.

use crate::error::{Error, Result};
use crate::fft;
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Fraction of total PSF energy that must land inside the crop before the
/// result is flagged as truncated.
const CROP_ENERGY_FRACTION: f64 = 0.95;

/// Tolerance on the unit-sum normalization of a PSF grid.
pub const PSF_SUM_TOLERANCE: f64 = 1e-9;

/// Geometry of the diffractive element and its pupil sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveParams {
    diameter: f64,
    smallest_zone_width: f64,
    pupil_samples: usize,
}

impl SieveParams {
    pub fn new(diameter: f64, smallest_zone_width: f64, pupil_samples: usize) -> Result<Self> {
        if !(diameter > 0.0) {
            return Err(Error::invalid_arg("lens diameter must be positive"));
        }
        if !(smallest_zone_width > 0.0) {
            return Err(Error::invalid_arg("smallest zone width must be positive"));
        }
        if smallest_zone_width >= diameter / 10.0 {
            return Err(Error::invalid_arg(
                "smallest zone width must be below diameter / 10",
            ));
        }
        if pupil_samples < 64 || pupil_samples % 2 != 0 {
            return Err(Error::invalid_arg(
                "pupil_samples must be an even integer of at least 64",
            ));
        }
        Ok(SieveParams {
            diameter,
            smallest_zone_width,
            pupil_samples,
        })
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn smallest_zone_width(&self) -> f64 {
        self.smallest_zone_width
    }

    pub fn pupil_samples(&self) -> usize {
        self.pupil_samples
    }
}

/// The source wavelengths, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSetup {
    wavelengths: Vec<f64>,
}

impl SpectralSetup {
    pub fn new(wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.is_empty() {
            return Err(Error::invalid_arg("at least one wavelength is required"));
        }
        for pair in wavelengths.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::invalid_arg("wavelengths must be strictly increasing"));
            }
        }
        if !(wavelengths[0] > 0.0) {
            return Err(Error::invalid_arg("wavelengths must be positive"));
        }
        Ok(SpectralSetup { wavelengths })
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn num_sources(&self) -> usize {
        self.wavelengths.len()
    }
}

/// First-order focal length `f(lambda) = D * w / lambda`; strictly
/// decreasing in wavelength.
pub fn focal_length(sieve: &SieveParams, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid_arg("wavelength must be positive"));
    }
    Ok(sieve.diameter * sieve.smallest_zone_width / wavelength)
}

/// Depth of focus `2 * w^2 / lambda` (full width). One DOF of defocus puts a
/// quarter wave of path error at the pupil edge.
pub fn depth_of_focus(sieve: &SieveParams, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid_arg("wavelength must be positive"));
    }
    Ok(2.0 * sieve.smallest_zone_width * sieve.smallest_zone_width / wavelength)
}

/// A sampled blur kernel for one (wavelength, detector distance) pair.
///
/// The grid is odd-sided with the peak-bearing center pixel at
/// `(P-1)/2, (P-1)/2`, nonnegative, and normalized to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    grid: Array2<f64>,
    pixel_pitch: f64,
    plane_distance: f64,
    wavelength: f64,
    truncated: bool,
}

impl Psf {
    /// Wrap a raw kernel, validating the grid invariants. Mostly useful for
    /// synthetic kernels in tests and tools; simulation goes through
    /// [`generate_psf`].
    pub fn new(
        grid: Array2<f64>,
        pixel_pitch: f64,
        plane_distance: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let (rows, cols) = grid.dim();
        if rows != cols || rows % 2 == 0 {
            return Err(Error::invalid_arg("PSF grid must be square with odd side"));
        }
        if grid.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid_arg("PSF entries must be finite and nonnegative"));
        }
        let sum: f64 = grid.sum();
        if (sum - 1.0).abs() > PSF_SUM_TOLERANCE {
            return Err(Error::invalid_arg(format!(
                "PSF must sum to 1 within {PSF_SUM_TOLERANCE:e}, got {sum}"
            )));
        }
        if !(pixel_pitch > 0.0) || !(plane_distance > 0.0) || !(wavelength > 0.0) {
            return Err(Error::invalid_arg(
                "pixel pitch, plane distance and wavelength must be positive",
            ));
        }
        Ok(Psf {
            grid,
            pixel_pitch,
            plane_distance,
            wavelength,
            truncated: false,
        })
    }

    pub fn grid(&self) -> &Array2<f64> {
        &self.grid
    }

    pub fn kernel_size(&self) -> usize {
        self.grid.nrows()
    }

    pub fn pixel_pitch(&self) -> f64 {
        self.pixel_pitch
    }

    pub fn plane_distance(&self) -> f64 {
        self.plane_distance
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// True when more than 5% of the synthesized energy fell outside the
    /// requested crop (heavily defocused plane for this kernel size).
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn peak(&self) -> f64 {
        self.grid.iter().cloned().fold(0.0, f64::max)
    }
}

/// Synthesize the incoherent PSF for one wavelength and detector distance.
///
/// The result is sampled at `pixel_pitch`, center-cropped to
/// `kernel_size x kernel_size` and normalized to unit sum. A crop that loses
/// more than 5% of the diffracted energy sets the `truncated` flag on the
/// returned [`Psf`] rather than failing.
pub fn generate_psf(
    sieve: &SieveParams,
    wavelength: f64,
    plane_distance: f64,
    kernel_size: usize,
    pixel_pitch: f64,
) -> Result<Psf> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid_arg("wavelength must be positive"));
    }
    if !(plane_distance > 0.0) {
        return Err(Error::invalid_arg("plane distance must be positive"));
    }
    if !(pixel_pitch > 0.0) {
        return Err(Error::invalid_arg("pixel pitch must be positive"));
    }
    if kernel_size % 2 == 0 || kernel_size == 0 {
        return Err(Error::invalid_arg("kernel size must be odd"));
    }
    let q = sieve.pupil_samples;
    if kernel_size > q {
        return Err(Error::invalid_arg(format!(
            "kernel size {kernel_size} exceeds pupil grid of {q} samples"
        )));
    }

    let focal = focal_length(sieve, wavelength)?;
    let defocus = 1.0 / plane_distance - 1.0 / focal;
    // Pupil pitch that makes the DFT land exactly on the detector pixels.
    let pupil_pitch = wavelength * plane_distance / (q as f64 * pixel_pitch);
    let radius = sieve.diameter / 2.0;
    if sieve.diameter > (q - 2) as f64 * pupil_pitch {
        return Err(Error::invalid_arg(format!(
            "pupil (diameter {:.3e} m) does not fit the {q}-sample grid at pitch {:.3e} m; \
             increase pupil_samples or the detector pixel pitch",
            sieve.diameter, pupil_pitch
        )));
    }

    let phase_coef = PI / wavelength * defocus;
    let r2_max = radius * radius;
    let half = (q / 2) as isize;
    let mut field = Array2::from_elem((q, q), Complex64::new(0.0, 0.0));
    for i in 0..q {
        let u = (i as isize - half) as f64 * pupil_pitch;
        for j in 0..q {
            let v = (j as isize - half) as f64 * pupil_pitch;
            let r2 = u * u + v * v;
            if r2 <= r2_max {
                let phase = phase_coef * r2;
                field[(i, j)] = Complex64::new(phase.cos(), phase.sin());
            }
        }
    }

    fft::fft2(&mut field);
    let intensity = fft::fftshift(&field.mapv(|c| c.norm_sqr()));
    let total: f64 = intensity.sum();

    let center = q / 2;
    let half_kernel = (kernel_size - 1) / 2;
    let mut grid = Array2::zeros((kernel_size, kernel_size));
    for i in 0..kernel_size {
        for j in 0..kernel_size {
            grid[(i, j)] = intensity[(center - half_kernel + i, center - half_kernel + j)];
        }
    }
    let inside: f64 = grid.sum();
    if !(inside > 0.0) {
        return Err(Error::InvalidState(
            "synthesized PSF has no energy inside the crop".into(),
        ));
    }
    let truncated = inside < CROP_ENERGY_FRACTION * total;
    grid.mapv_inplace(|v| v / inside);

    let mut psf = Psf::new(grid, pixel_pitch, plane_distance, wavelength)?;
    psf.truncated = truncated;
    Ok(psf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn desk_sieve() -> SieveParams {
        SieveParams::new(0.01, 5e-6, 256).unwrap()
    }

    #[test]
    fn focal_length_evaluates_directly() {
        let sieve = desk_sieve();
        // f = D * w / lambda
        assert_relative_eq!(
            focal_length(&sieve, 33.4e-9).unwrap(),
            0.01 * 5e-6 / 33.4e-9,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            focal_length(&sieve, 33.5e-9).unwrap(),
            1.4925373134328358,
            max_relative = 1e-12
        );
    }

    #[test]
    fn focal_length_halves_when_wavelength_doubles() {
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let f1 = focal_length(&sieve, lambda).unwrap();
        let f2 = focal_length(&sieve, 2.0 * lambda).unwrap();
        assert_relative_eq!(f2, f1 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn focal_length_rejects_nonpositive_wavelength() {
        let sieve = desk_sieve();
        assert!(focal_length(&sieve, 0.0).is_err());
        assert!(focal_length(&sieve, -1e-9).is_err());
    }

    #[test]
    fn depth_of_focus_evaluates_directly() {
        let sieve = desk_sieve();
        assert_relative_eq!(
            depth_of_focus(&sieve, 33.4e-9).unwrap(),
            2.0 * 5e-6 * 5e-6 / 33.4e-9,
            max_relative = 1e-15
        );
        // ~1.497e-3 m at 33.4 nm
        assert_abs_diff_eq!(
            depth_of_focus(&sieve, 33.4e-9).unwrap(),
            1.497e-3,
            epsilon = 1e-6
        );
        let dof1 = depth_of_focus(&sieve, 33.4e-9).unwrap();
        let dof2 = depth_of_focus(&sieve, 2.0 * 33.4e-9).unwrap();
        assert_relative_eq!(dof2, dof1 / 2.0, max_relative = 1e-15);
        assert!(depth_of_focus(&sieve, 0.0).is_err());
    }

    #[test]
    fn two_line_setup_separation_in_dof() {
        // The 33.4 / 33.5 nm pair sits close to 3 DOF apart.
        let sieve = desk_sieve();
        let f1 = focal_length(&sieve, 33.4e-9).unwrap();
        let f2 = focal_length(&sieve, 33.5e-9).unwrap();
        let dof = depth_of_focus(&sieve, 33.4e-9).unwrap();
        let separation = (f1 - f2).abs();
        assert_abs_diff_eq!(separation, 4.47e-3, epsilon = 2e-5);
        assert_abs_diff_eq!(separation / dof, 2.99, epsilon = 0.01);
    }

    #[test]
    fn sieve_params_validation() {
        assert!(SieveParams::new(0.0, 5e-6, 256).is_err());
        assert!(SieveParams::new(0.01, 0.0, 256).is_err());
        // zone width must stay below diameter / 10
        assert!(SieveParams::new(0.01, 2e-3, 256).is_err());
        assert!(SieveParams::new(0.01, 5e-6, 62).is_err());
        assert!(SieveParams::new(0.01, 5e-6, 255).is_err());
    }

    #[test]
    fn spectral_setup_requires_ascending_wavelengths() {
        assert!(SpectralSetup::new(vec![]).is_err());
        assert!(SpectralSetup::new(vec![2e-9, 1e-9]).is_err());
        assert!(SpectralSetup::new(vec![1e-9, 1e-9]).is_err());
        assert!(SpectralSetup::new(vec![-1e-9, 1e-9]).is_err());
        let setup = SpectralSetup::new(vec![33.4e-9, 33.5e-9]).unwrap();
        assert_eq!(setup.num_sources(), 2);
    }

    #[test]
    fn generated_psf_is_normalized_and_centered() {
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let f = focal_length(&sieve, lambda).unwrap();
        let psf = generate_psf(&sieve, lambda, f, 11, 2e-6).unwrap();
        assert_abs_diff_eq!(psf.grid().sum(), 1.0, epsilon = PSF_SUM_TOLERANCE);
        assert!(!psf.truncated());
        // In focus the peak sits on the center pixel.
        let center = psf.grid()[(5, 5)];
        assert_abs_diff_eq!(psf.peak(), center, epsilon = 0.0);
    }

    #[test]
    fn psf_symmetry_under_rotation_and_transpose() {
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let f = focal_length(&sieve, lambda).unwrap();
        let dof = depth_of_focus(&sieve, lambda).unwrap();
        for d in [f, f + 2.0 * dof] {
            let psf = generate_psf(&sieve, lambda, d, 11, 2e-6).unwrap();
            let g = psf.grid();
            let p = psf.kernel_size();
            for i in 0..p {
                for j in 0..p {
                    let v = g[(i, j)];
                    assert_abs_diff_eq!(v, g[(j, i)], epsilon = 1e-9);
                    // 90 degree rotation about the center pixel
                    assert_abs_diff_eq!(v, g[(j, p - 1 - i)], epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn in_focus_peak_dominates_defocused_peaks() {
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let f = focal_length(&sieve, lambda).unwrap();
        let dof = depth_of_focus(&sieve, lambda).unwrap();
        let peak_at = |d: f64| generate_psf(&sieve, lambda, d, 15, 2e-6).unwrap().peak();
        let focus_peak = peak_at(f);
        for k in [-3.0, -1.0, 1.0, 3.0] {
            assert!(peak_at(f + k * dof) < focus_peak);
        }
    }

    #[test]
    fn equal_generalized_pupils_give_identical_grids() {
        // lambda -> 2 lambda with d -> d/2 leaves the sampled pupil (pitch
        // and phase per sample) unchanged, so the grids match bit for bit.
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let d = focal_length(&sieve, lambda).unwrap() + 1.1e-3;
        let a = generate_psf(&sieve, lambda, d, 11, 2e-6).unwrap();
        let b = generate_psf(&sieve, 2.0 * lambda, d / 2.0, 11, 2e-6).unwrap();
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn determinism_bit_identical() {
        let sieve = desk_sieve();
        let lambda = 33.5e-9;
        let d = 1.49;
        let a = generate_psf(&sieve, lambda, d, 13, 2e-6).unwrap();
        let b = generate_psf(&sieve, lambda, d, 13, 2e-6).unwrap();
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn kernel_larger_than_pupil_grid_is_rejected() {
        let sieve = desk_sieve();
        assert!(generate_psf(&sieve, 33.4e-9, 1.5, 257, 2e-6).is_err());
        assert!(generate_psf(&sieve, 33.4e-9, 1.5, 10, 2e-6).is_err());
        assert!(generate_psf(&sieve, 33.4e-9, 0.0, 11, 2e-6).is_err());
    }

    #[test]
    fn far_defocus_sets_truncation_flag() {
        let sieve = desk_sieve();
        let lambda = 33.4e-9;
        let f = focal_length(&sieve, lambda).unwrap();
        let dof = depth_of_focus(&sieve, lambda).unwrap();
        // Tiny crop at heavy defocus cannot hold 95% of the energy.
        let psf = generate_psf(&sieve, lambda, f + 30.0 * dof, 5, 2e-6).unwrap();
        assert!(psf.truncated());
        assert_abs_diff_eq!(psf.grid().sum(), 1.0, epsilon = PSF_SUM_TOLERANCE);
    }

    #[test]
    fn psf_constructor_validates_grids() {
        let mut grid = Array2::zeros((3, 3));
        grid[(1, 1)] = 1.0;
        assert!(Psf::new(grid.clone(), 1e-6, 1.0, 1e-8).is_ok());
        assert!(Psf::new(Array2::zeros((4, 4)), 1e-6, 1.0, 1e-8).is_err());
        let mut bad = grid.clone();
        bad[(0, 0)] = -0.1;
        bad[(1, 1)] = 1.1;
        assert!(Psf::new(bad, 1e-6, 1.0, 1e-8).is_err());
        let mut unnormalized = grid;
        unnormalized[(1, 1)] = 0.9;
        assert!(Psf::new(unnormalized, 1e-6, 1.0, 1e-8).is_err());
    }
}
