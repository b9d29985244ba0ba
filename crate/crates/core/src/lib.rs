//! Type-I parametric down-conversion in nonlinear waveguide arrays.
//!
//! The crate builds the joint spatio-spectral two-photon amplitude of a pair
//! source made of evanescently coupled χ⁽²⁾ waveguides, applies pump shaping
//! and spectral filtering, and reduces the amplitude to k-space and
//! channel-space correlation maps, spatio-spectral intensity maps and
//! phase-matching curves.
//!
//! Module map:
//!
//! * [`material`]: Sellmeier dispersion, propagation constants, quasi-phase
//!   matching and the wavelength-dependent coupling model.
//! * [`grid`], [`pump`], [`jsa`]: the amplitude tensor and everything that
//!   goes into it.
//! * [`correlations`]: correlation maps, marginals and detector smoothing.
//! * [`oracle`], [`verify`]: slow reference implementations and the checks
//!   that compare them with the fast paths.
//! * [`config`], [`scenarios`], [`io`]: the scenario runner behind the
//!   `wga-pdc` binary.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod correlations;
pub mod error;
pub mod grid;
pub mod io;
pub mod jsa;
pub mod material;
pub mod oracle;
pub mod pipeline;
pub mod pump;
pub mod scenarios;
pub mod transform;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
