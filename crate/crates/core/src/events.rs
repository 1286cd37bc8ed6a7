//! Poisson event streams with intensity `exp(-m) dm` (magnitudes only) or
//! `dy exp(-m) dm` (positions and magnitudes), generated in decreasing
//! magnitude order, plus the rule that truncates the infinite stream.
//!
//! With arrival times `G_i` of a unit-rate Poisson process on (0, inf), the
//! magnitudes `m_i = log|W| - log G_i` have exactly the required intensity:
//! the number of events above `u` is Poisson with mean `|W| exp(-u)`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const DEFAULT_MAX_EVENTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeEvent {
    pub m: f64,
    /// Zero-based position in the stream.
    pub index: u64,
}

#[derive(Debug, Clone)]
pub struct MagnitudeStream {
    arrival: f64,
    log_volume: f64,
    next_index: u64,
}

impl Default for MagnitudeStream {
    fn default() -> Self {
        Self::new()
    }
}

impl MagnitudeStream {
    /// Stream with intensity `exp(-m) dm`.
    pub fn new() -> Self {
        Self {
            arrival: 0.0,
            log_volume: 0.0,
            next_index: 0,
        }
    }

    /// Stream whose intensity is scaled by a window volume.
    pub fn with_volume(volume: f64) -> Result<Self> {
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::invalid(format!("window volume {volume} must be positive")));
        }
        Ok(Self {
            log_volume: volume.ln(),
            ..Self::new()
        })
    }

    /// Advances the arrival time by an explicit increment.
    pub fn advance(&mut self, increment: f64) -> MagnitudeEvent {
        self.arrival += increment;
        let ev = MagnitudeEvent {
            m: self.log_volume - self.arrival.ln(),
            index: self.next_index,
        };
        self.next_index += 1;
        ev
    }

    pub fn next_event(&mut self, rng: &mut RngStream) -> MagnitudeEvent {
        let e = rng.exponential();
        self.advance(e)
    }

    pub fn emitted(&self) -> u64 {
        self.next_index
    }
}

pub fn next_magnitude(stream: &mut MagnitudeStream, rng: &mut RngStream) -> MagnitudeEvent {
    stream.next_event(rng)
}

/// Axis-aligned box in which event centres are placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("window corners must have equal, positive dimension"));
        }
        let w = Self { lower, upper };
        let vol = w.volume();
        if !(vol > 0.0 && vol.is_finite()) {
            return Err(Error::invalid(format!("window volume {vol} must be positive")));
        }
        Ok(w)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    fn sample_into(&self, rng: &mut RngStream, out: &mut Vec<f64>) {
        out.clear();
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            out.push(lo + (hi - lo) * rng.uniform());
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialEvent {
    pub y: Vec<f64>,
    pub m: f64,
    pub index: u64,
}

#[derive(Debug, Clone)]
pub struct SpatialStream {
    window: Window,
    magnitudes: MagnitudeStream,
}

impl SpatialStream {
    pub fn new(window: Window) -> Result<Self> {
        let magnitudes = MagnitudeStream::with_volume(window.volume())?;
        Ok(Self { window, magnitudes })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Draws the next event, reusing `ev.y` as the coordinate buffer.
    pub fn next_into(&mut self, rng: &mut RngStream, ev: &mut SpatialEvent) {
        let mag = self.magnitudes.next_event(rng);
        self.window.sample_into(rng, &mut ev.y);
        ev.m = mag.m;
        ev.index = mag.index;
    }

    pub fn next_event(&mut self, rng: &mut RngStream) -> SpatialEvent {
        let mut ev = SpatialEvent {
            y: Vec::with_capacity(self.window.lower.len()),
            m: 0.0,
            index: 0,
        };
        self.next_into(rng, &mut ev);
        ev
    }
}

pub fn next_spatial_event(stream: &mut SpatialStream, rng: &mut RngStream) -> SpatialEvent {
    stream.next_event(rng)
}

/// Truncation of an event stream.
///
/// `bound` is a ceiling on one event's additive term `Y`; once `m + bound`
/// falls below the smallest running maximum, later events can only matter
/// where `Y` exceeds the ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub bound: f64,
    pub max_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Bound,
    EventCap,
}

impl StopRule {
    pub fn new(bound: f64, max_events: u64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::invalid(format!("contribution bound {bound} must be >= 0")));
        }
        if max_events < 1 {
            return Err(Error::invalid("max_events must be at least 1"));
        }
        Ok(Self { bound, max_events })
    }

    /// Ceiling for `Y ~ Normal(-v/2, v)`.
    ///
    /// `bound = v/2 + sqrt(v) q` with `q` the standard normal `1 - eps`
    /// quantile. Because `E exp(Y) = 1`, the expected number of skipped events
    /// that would still have raised the maximum `z` at a site is at most
    /// `eps * exp(-z)`.
    pub fn gaussian(variance: f64, eps: f64, max_events: u64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid(format!("variance {variance} must be positive")));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::invalid(format!("tail level {eps} must lie in (0, 0.5)")));
        }
        let q = std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps);
        Self::new((0.5 * variance + variance.sqrt() * q).max(0.0), max_events)
    }

    /// Why the stream should stop at an event of magnitude `m`, if at all.
    /// `applied` counts the events already folded into the field.
    pub fn check(&self, m: f64, z_min: f64, applied: u64) -> Option<StopReason> {
        if m + self.bound < z_min {
            Some(StopReason::Bound)
        } else if applied >= self.max_events {
            Some(StopReason::EventCap)
        } else {
            None
        }
    }
}

pub fn should_stop(m: f64, z_min: f64, applied: u64, rule: &StopRule) -> bool {
    rule.check(m, z_min, applied).is_some()
}
