//! Simulation and inference for event-controlled random fields of maxima.
//!
//! A field of maxima is built from a Poisson stream of event magnitudes `m`
//! (intensity `exp(-m) dm`); every event adds `m + Y_m(x)` and the field keeps
//! the pointwise maximum. When the law of `Y_m` depends on `m`, the resulting
//! dependence is not max-stable and changes with the block size `k`.
//!
//! Modules follow the pipeline:
//!
//! * [`geometry`], [`rng`]: sites, distances and reproducible random streams.
//! * [`events`]: the Poisson magnitude streams and the truncation rule.
//! * [`gauss`], [`shape`]: the per-event random process / random function.
//! * [`construction`]: the three constructions and block maxima.
//! * [`gumbel`]: margins, fits and Anderson-Darling tests.
//! * [`dependence`]: Kendall's tau and tau-versus-distance curves.
//! * [`inference`], [`optim`]: pairwise composite likelihood and its maximization.
//! * [`config`]: run configuration shared with the command line frontend.

pub mod config;
pub mod construction;
pub mod dependence;
pub mod error;
pub mod events;
pub mod gauss;
pub mod geometry;
pub mod gumbel;
pub mod inference;
pub mod margins;
pub mod optim;
pub mod rng;
pub mod shape;

pub use error::{Error, Result};
