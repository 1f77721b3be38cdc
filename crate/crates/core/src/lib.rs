//! `tieddown`: a numerical laboratory for tied-down occupation times of
//! infinite ergodic transformations.
//!
//! The crate has four computational layers:
//!
//! - [`stable`]: one-sided alpha-stable numerics (characteristic function,
//!   density by Fourier inversion, exact sampling, Mittag-Leffler moments).
//! - [`bpy`]: the Barlow-Pitman-Yor generalized uniform distribution via
//!   importance-weighted sampling, plus its alpha = 1/2 closed forms.
//! - [`renewal`]: the scalar operator-renewal engine (return tables, the
//!   scaling sequences `b_t` / `a_k`, tied-down coefficients by convolution
//!   powers, local limit / local large deviation checks, bridge Monte Carlo).
//! - [`maps`]: intermittent interval maps (the Boole-conjugate map), orbit
//!   occupation statistics, empirical return tables and the tied-down
//!   conditional experiment.
//!
//! [`stats`] holds weighted empirical distributions, Kolmogorov-Smirnov
//! distances, tail-exponent fits and CSV/SVG emission; [`suite`] packages the
//! full validation battery used by the CLI and by the acceptance tests.
//!
//! Monte Carlo loops run over a fixed number of independent random strata and
//! are merged in stratum order, so results are byte-reproducible for a given
//! seed regardless of worker count. The `parallel` feature (on by default)
//! executes strata on a rayon pool; without it the same strata run serially.

pub mod bpy;
pub mod error;
pub mod exec;
pub mod maps;
pub mod quad;
pub mod renewal;
pub mod special;
pub mod stable;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
