//! Phase-shift design for a cylindrical reconfigurable intelligent surface
//! (RIS) serving two single-antenna users from a multi-antenna base station.
//!
//! The surface is a uniform cylindrical array (UCA). Each transceiver only
//! illuminates the half of the cylinder that faces it, so the RIS elements
//! split into elements shared by both users, elements specific to one user,
//! and inactive elements. Specific elements have a closed-form optimal phase;
//! shared elements are tuned by gradient ascent on a statistical-CSI bound of
//! the sum spectral efficiency. A planar array (UPA) baseline optimizes every
//! element by gradient ascent.
//!
//! Module map:
//!
//! * [`geometry`]: steering vectors and visible-region masks.
//! * [`channel`]: per-link statistics, closed-form second moments, and
//!   Rician channel sampling.
//! * [`performance`]: MRT, Monte Carlo ergodic SE, and the Jensen bounds.
//! * [`optimizer`]: the hybrid closed-form/gradient optimizer and the UPA
//!   baseline.
//! * [`scenario`]: a fully converted two-user deployment.
//! * [`harness`]: config files, sweeps, validation reports, and CSV output.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod optimizer;
pub mod performance;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;
