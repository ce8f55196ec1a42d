//! Measurement-plane selection for diffractive-lens multispectral imaging.
//!
//! A diffractive lens focuses each wavelength at a different distance, so a
//! moving detector sees every spectral component of a polychromatic source
//! blurred by a plane- and wavelength-dependent point spread function. This
//! crate simulates that system, reconstructs the spectral components by MAP
//! estimation, and searches for the measurement configuration (a multiset of
//! detector distances) that minimizes the expected reconstruction error.
//!
//! The pieces fit together like this:
//!
//! * [`optics`] synthesizes defocused-pupil PSFs and the focal geometry.
//! * [`spectral`] holds the DFT-diagonalized forward operator and the
//!   per-frequency Gram blocks it induces, with O(1)-per-plane updates.
//! * [`inverse`] evaluates the expected-SSE cost and performs MAP
//!   reconstruction, each with a fast per-frequency path and a dense
//!   reference path used as an oracle.
//! * [`selector`] runs clustered sequential backward selection (CSBS) over a
//!   candidate set of planes, plus an exhaustive-search oracle and the
//!   focal-plane baseline.
//! * [`metrics`] scores reconstructions (SSIM, SSE, PSNR) and searches the
//!   regularization weight.

pub mod error;
mod fft;
pub mod inverse;
mod linalg;
pub mod metrics;
pub mod optics;
pub mod selector;
pub mod spectral;

pub use error::{Error, Result};
