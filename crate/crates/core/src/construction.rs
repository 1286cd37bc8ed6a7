//! Fields of maxima `Z(x) = max over events (m + Y_m(x))` and their block
//! maxima.
//!
//! Three constructions are supported:
//!
//! * max-stable: a Gaussian `Y` whose law ignores the magnitude (`d = 0`);
//! * magnitude-dependent Gaussian: the correlation length of `Y_m` is
//!   `exp(d (m - c))`; margins stay unit Gumbel;
//! * shape functions: `Y_{y,m}(x) = log f(x - y; s(m))` for events scattered
//!   in space, with `s(m) = exp(d (m - c))`. Margins are Gumbel with scale 1
//!   and location `-log(1 - d)`.
//!
//! A block maximum of size `k` is the componentwise maximum of `k`
//! independent copies drawn one after another from the same random stream, so
//! the block maxima for different `k` of one replicate are nested.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{
    MagnitudeStream, SpatialEvent, SpatialStream, StopReason, StopRule, Window, DEFAULT_MAX_EVENTS,
};
use crate::gauss::{GaussConfig, GaussField, MagnitudeLink};
use crate::geometry::SiteSet;
use crate::rng::{spawn_stream, RngStream};
use crate::shape::{log_density, peak_log_density, ShapeFamily};

/// Buffer around the site hull, in units of the largest simulated scale.
pub const BUFFER_SCALES: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstructionKind {
    /// Gaussian process whose law does not depend on the magnitude.
    #[serde(rename = "theorem1")]
    MaxStable,
    /// Gaussian process with magnitude-dependent correlation length.
    #[serde(rename = "theorem2")]
    MagnitudeGauss,
    /// Shifted log-densities with magnitude-dependent scale.
    #[serde(rename = "theorem3")]
    ShapeFunction,
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstructionKind::MaxStable => "theorem1",
            ConstructionKind::MagnitudeGauss => "theorem2",
            ConstructionKind::ShapeFunction => "theorem3",
        })
    }
}

impl FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theorem1" | "max-stable" => Ok(ConstructionKind::MaxStable),
            "theorem2" | "gauss" | "gauss-process" => Ok(ConstructionKind::MagnitudeGauss),
            "theorem3" | "shape" | "shape-function" => Ok(ConstructionKind::ShapeFunction),
            other => Err(Error::Config(format!("unknown construction `{other}`"))),
        }
    }
}

/// Parameters of the per-event random process or function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Model {
    Gauss { variance: f64, link: MagnitudeLink },
    Shape { family: ShapeFamily, link: MagnitudeLink },
}

impl Model {
    pub fn link(&self) -> MagnitudeLink {
        match *self {
            Model::Gauss { link, .. } | Model::Shape { link, .. } => link,
        }
    }

    pub fn with_link(self, link: MagnitudeLink) -> Self {
        match self {
            Model::Gauss { variance, .. } => Model::Gauss { variance, link },
            Model::Shape { family, .. } => Model::Shape { family, link },
        }
    }
}

/// Truncation and performance settings shared by all constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Truncation {
    /// Gaussian constructions: bound on the expected number of skipped events
    /// that would have raised a site with maximum 0.
    pub eps: f64,
    pub max_events: u64,
    /// Magnitude bin width of the factorization cache (0 disables it).
    pub cache_step: f64,
    /// Overrides the Gaussian contribution bound.
    pub bound: Option<f64>,
    /// Shape constructions: half-width added on both sides of the site hull.
    pub buffer: Option<f64>,
    /// Events above this magnitude are dropped. Required for shape functions
    /// whose scale grows with magnitude.
    pub magnitude_ceiling: Option<f64>,
    /// Shape constructions: margin tail probability below which a site value
    /// is treated as unreachable when sizing the window.
    pub floor_eps: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            max_events: DEFAULT_MAX_EVENTS,
            cache_step: 0.01,
            bound: None,
            buffer: None,
            magnitude_ceiling: None,
            floor_eps: 1e-9,
        }
    }
}

/// Counters describing how the infinite event stream was cut.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub copies: u64,
    pub events: u64,
    pub cap_hits: u64,
    pub skipped_above_ceiling: u64,
    pub below_floor: u64,
    pub max_cache_perturbation: f64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.copies += other.copies;
        self.events += other.events;
        self.cap_hits += other.cap_hits;
        self.skipped_above_ceiling += other.skipped_above_ceiling;
        self.below_floor += other.below_floor;
        self.max_cache_perturbation = self.max_cache_perturbation.max(other.max_cache_perturbation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationMeta {
    pub construction: ConstructionKind,
    /// Contribution bound of the Gaussian stop rule (shape functions use the
    /// exact per-event peak instead).
    pub bound: Option<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub z: Vec<f64>,
    pub k: usize,
    pub meta: RealizationMeta,
}

#[derive(Debug)]
enum Kernel {
    Gauss {
        field: GaussField,
        rule: StopRule,
    },
    Shape {
        family: ShapeFamily,
        link: MagnitudeLink,
        coords: Vec<f64>,
        window: Window,
        floor_magnitude: f64,
        ceiling: Option<f64>,
        max_events: u64,
    },
}

/// A prepared construction on a fixed site set.
#[derive(Debug)]
pub struct Simulator {
    sites: SiteSet,
    site_map: Vec<usize>,
    n_distinct: usize,
    kind: ConstructionKind,
    model: Model,
    truncation: Truncation,
    kernel: Kernel,
}

/// Window metadata of a shape construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub lower: f64,
    pub upper: f64,
    pub buffer: f64,
    pub max_scale: f64,
    pub floor_magnitude: f64,
}

impl Simulator {
    /// Max-stable Gaussian construction (link ignored).
    pub fn max_stable(sites: SiteSet, variance: f64, truncation: Truncation) -> Result<Self> {
        let cfg = GaussConfig::new(variance, MagnitudeLink::inactive())?;
        let mut sim = Self::gauss(sites, cfg, truncation)?;
        sim.kind = ConstructionKind::MaxStable;
        Ok(sim)
    }

    pub fn gauss(sites: SiteSet, cfg: GaussConfig, truncation: Truncation) -> Result<Self> {
        let (distinct, site_map) = sites.dedup();
        let rule = match truncation.bound {
            Some(b) => StopRule::new(b, truncation.max_events)?,
            None => StopRule::gaussian(cfg.variance(), truncation.eps, truncation.max_events)?,
        };
        let n_distinct = distinct.len();
        let field = GaussField::new(distinct, cfg, truncation.cache_step)?;
        Ok(Self {
            sites,
            site_map,
            n_distinct,
            kind: ConstructionKind::MagnitudeGauss,
            model: Model::Gauss {
                variance: cfg.variance(),
                link: cfg.link,
            },
            truncation,
            kernel: Kernel::Gauss { field, rule },
        })
    }

    /// Shape-function construction on one-dimensional sites.
    ///
    /// Refuses `d >= 1`, and `d > 0` without a magnitude ceiling, because the
    /// scale then grows without bound with the magnitude. A user buffer below
    /// six times the largest simulated scale is refused as well.
    pub fn shape(
        sites: SiteSet,
        family: ShapeFamily,
        link: MagnitudeLink,
        truncation: Truncation,
    ) -> Result<Self> {
        if sites.dim() != 1 {
            return Err(Error::invalid(
                "shape-function construction supports one-dimensional sites only",
            ));
        }
        let d = link.d;
        if d >= 1.0 {
            return Err(Error::Refused(format!(
                "shape scale exponent d={d} >= 1: maxima are not finite"
            )));
        }
        let ceiling = truncation.magnitude_ceiling;
        if d > 0.0 && ceiling.is_none() {
            return Err(Error::Refused(format!(
                "shape scale increases with magnitude (d={d} > 0); the simulation window would \
                 have to be unbounded. Supply an explicit magnitude ceiling"
            )));
        }
        if !(truncation.floor_eps > 0.0 && truncation.floor_eps < 1.0) {
            return Err(Error::invalid("floor_eps must lie in (0, 1)"));
        }
        // analytic margin location -log(1 - d) sets the lowest relevant level
        let z_floor = -(1.0 - d).ln() - (1.0 / truncation.floor_eps).ln().ln();
        let kappa = family.peak_offset();
        let floor_magnitude = (z_floor - d * link.c + kappa) / (1.0 - d);
        let max_scale = if d < 0.0 {
            link.scale(floor_magnitude)
        } else if d > 0.0 {
            link.scale(ceiling.expect("checked above"))
        } else {
            1.0
        };
        let needed = BUFFER_SCALES * max_scale;
        let buffer = match truncation.buffer {
            Some(b) if b < needed => {
                return Err(Error::Refused(format!(
                    "window buffer {b} is smaller than {BUFFER_SCALES} x the largest scale {max_scale}"
                )))
            }
            Some(b) => b,
            None => needed,
        };
        let (lo, hi) = sites.bounding_box();
        let window = Window::new(vec![lo[0] - buffer], vec![hi[0] + buffer])?;
        let (distinct, site_map) = sites.dedup();
        let coords = distinct.sites().iter().map(|s| s.coords()[0]).collect();
        Ok(Self {
            n_distinct: distinct.len(),
            sites,
            site_map,
            kind: ConstructionKind::ShapeFunction,
            model: Model::Shape { family, link },
            truncation: Truncation {
                buffer: Some(buffer),
                ..truncation
            },
            kernel: Kernel::Shape {
                family,
                link,
                coords,
                window,
                floor_magnitude,
                ceiling,
                max_events: truncation.max_events,
            },
        })
    }

    pub fn from_model(sites: SiteSet, model: Model, truncation: Truncation) -> Result<Self> {
        match model {
            Model::Gauss { variance, link } => {
                Self::gauss(sites, GaussConfig::new(variance, link)?, truncation)
            }
            Model::Shape { family, link } => Self::shape(sites, family, link, truncation),
        }
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn kind(&self) -> ConstructionKind {
        self.kind
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn stop_bound(&self) -> Option<f64> {
        match &self.kernel {
            Kernel::Gauss { rule, .. } => Some(rule.bound),
            Kernel::Shape { .. } => None,
        }
    }

    pub fn window_info(&self) -> Option<WindowInfo> {
        match &self.kernel {
            Kernel::Shape {
                window,
                floor_magnitude,
                link,
                ceiling,
                ..
            } => {
                let d = link.d;
                let max_scale = if d < 0.0 {
                    link.scale(*floor_magnitude)
                } else if d > 0.0 {
                    link.scale(ceiling.unwrap_or(f64::INFINITY))
                } else {
                    1.0
                };
                Some(WindowInfo {
                    lower: window.lower()[0],
                    upper: window.upper()[0],
                    buffer: self.truncation.buffer.unwrap_or(0.0),
                    max_scale,
                    floor_magnitude: *floor_magnitude,
                })
            }
            Kernel::Gauss { .. } => None,
        }
    }

    fn meta(&self, diagnostics: Diagnostics) -> RealizationMeta {
        RealizationMeta {
            construction: self.kind,
            bound: self.stop_bound(),
            diagnostics,
        }
    }

    /// Folds one independent copy of the field into `z` (indexed by distinct
    /// site). Events that cannot raise `z` anywhere are cut off.
    fn add_copy(&self, z: &mut [f64], rng: &mut RngStream, diag: &mut Diagnostics) -> Result<()> {
        diag.copies += 1;
        let mut z_min = z.iter().copied().fold(f64::INFINITY, f64::min);
        match &self.kernel {
            Kernel::Gauss { field, rule } => {
                let mut stream = MagnitudeStream::new();
                let mut eps = Vec::with_capacity(z.len());
                let mut y = vec![0.0; z.len()];
                let mut applied = 0u64;
                let (mut m_first, mut m_last) = (f64::NAN, f64::NAN);
                loop {
                    let ev = stream.next_event(rng);
                    let stop = if z_min.is_finite() {
                        rule.check(ev.m, z_min, applied)
                    } else if applied >= rule.max_events {
                        Some(StopReason::EventCap)
                    } else {
                        None
                    };
                    match stop {
                        Some(StopReason::Bound) => break,
                        Some(StopReason::EventCap) => {
                            diag.cap_hits += 1;
                            break;
                        }
                        None => {}
                    }
                    field.simulate_into(ev.m, rng, &mut eps, &mut y)?;
                    z_min = f64::INFINITY;
                    for (zi, yi) in z.iter_mut().zip(&y) {
                        *zi = zi.max(ev.m + yi);
                        z_min = z_min.min(*zi);
                    }
                    if applied == 0 {
                        m_first = ev.m;
                    }
                    m_last = ev.m;
                    applied += 1;
                }
                diag.events += applied;
                if applied > 0 {
                    let p = field
                        .cache_perturbation_bound(m_first)
                        .max(field.cache_perturbation_bound(m_last));
                    diag.max_cache_perturbation = diag.max_cache_perturbation.max(p);
                }
            }
            Kernel::Shape {
                family,
                link,
                coords,
                window,
                floor_magnitude,
                ceiling,
                max_events,
            } => {
                let mut stream = SpatialStream::new(window.clone())?;
                let mut ev = SpatialEvent {
                    y: Vec::with_capacity(1),
                    m: 0.0,
                    index: 0,
                };
                let mut applied = 0u64;
                loop {
                    stream.next_into(rng, &mut ev);
                    if ceiling.is_some_and(|c| ev.m > c) {
                        diag.skipped_above_ceiling += 1;
                        continue;
                    }
                    let s = link.scale(ev.m);
                    // for d < 1 the peak contribution m + sup log f decreases
                    // along the stream, so this cut is exact
                    if z_min.is_finite() && ev.m + peak_log_density(*family, s) < z_min {
                        break;
                    }
                    if applied >= *max_events {
                        diag.cap_hits += 1;
                        break;
                    }
                    if ev.m < *floor_magnitude {
                        diag.below_floor += 1;
                    }
                    let centre = ev.y[0];
                    z_min = f64::INFINITY;
                    for (zi, &x) in z.iter_mut().zip(coords) {
                        *zi = zi.max(ev.m + log_density(*family, x - centre, s));
                        z_min = z_min.min(*zi);
                    }
                    applied += 1;
                }
                diag.events += applied;
            }
        }
        Ok(())
    }

    /// Block maxima of the distinct sites for every block size in `ks`
    /// (ascending), sharing the copies: entry `j` is the maximum of the first
    /// `ks[j]` copies.
    fn nested_distinct(
        &self,
        ks: &[usize],
        rng: &mut RngStream,
        diag: &mut Diagnostics,
    ) -> Result<Vec<Vec<f64>>> {
        let mut z = vec![f64::NEG_INFINITY; self.n_distinct];
        let mut out = Vec::with_capacity(ks.len());
        let mut done = 0;
        for &k in ks {
            while done < k {
                self.add_copy(&mut z, rng, diag)?;
                done += 1;
            }
            out.push(z.clone());
        }
        Ok(out)
    }

    fn expand(&self, z: &[f64]) -> Vec<f64> {
        self.site_map.iter().map(|&i| z[i]).collect()
    }

    /// One realization (block size 1).
    pub fn realize(&self, rng: &mut RngStream) -> Result<FieldRealization> {
        self.block_maxima(1, rng)
    }

    /// Componentwise maximum of `k` independent realizations.
    pub fn block_maxima(&self, k: usize, rng: &mut RngStream) -> Result<FieldRealization> {
        check_block_sizes(&[k])?;
        let mut diag = Diagnostics::default();
        let z = self.nested_distinct(&[k], rng, &mut diag)?.remove(0);
        Ok(FieldRealization {
            z: self.expand(&z),
            k,
            meta: self.meta(diag),
        })
    }

    /// Nested block maxima for ascending block sizes from one stream.
    pub fn nested_block_maxima(
        &self,
        ks: &[usize],
        rng: &mut RngStream,
    ) -> Result<Vec<FieldRealization>> {
        check_block_sizes(ks)?;
        let mut diag = Diagnostics::default();
        let zs = self.nested_distinct(ks, rng, &mut diag)?;
        Ok(zs
            .iter()
            .zip(ks)
            .map(|(z, &k)| FieldRealization {
                z: self.expand(z),
                k,
                meta: self.meta(diag),
            })
            .collect())
    }
}

fn check_block_sizes(ks: &[usize]) -> Result<()> {
    if ks.is_empty() || ks[0] < 1 || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "block sizes must be >= 1 and strictly ascending, got {ks:?}"
        )));
    }
    Ok(())
}

/// Configuration snapshot stored with every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub construction: ConstructionKind,
    pub model: Model,
    pub truncation: Truncation,
    pub bound: Option<f64>,
    pub window: Option<WindowInfo>,
    pub seed: u64,
    pub first_stream: u64,
    pub diagnostics: Diagnostics,
}

/// `n` replicates of the block maxima at every site.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximaSample {
    pub k: usize,
    n_sites: usize,
    values: Vec<f64>,
    pub meta: Option<SampleMeta>,
}

impl MaximaSample {
    pub fn from_rows(k: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_sites = rows.first().map_or(0, Vec::len);
        if n_sites == 0 || rows.iter().any(|r| r.len() != n_sites) {
            return Err(Error::invalid("sample rows must be non-empty and of equal length"));
        }
        Ok(Self {
            k,
            n_sites,
            values: rows.concat(),
            meta: None,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.n_sites
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn row(&self, rep: usize) -> &[f64] {
        &self.values[rep * self.n_sites..(rep + 1) * self.n_sites]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_sites)
    }

    pub fn column(&self, site: usize) -> Vec<f64> {
        self.rows().map(|r| r[site]).collect()
    }

    /// Appends the replicates of `other`.
    pub fn extend(&mut self, other: &MaximaSample) -> Result<()> {
        if other.k != self.k || other.n_sites != self.n_sites {
            return Err(Error::invalid("samples differ in block size or site count"));
        }
        self.values.extend_from_slice(&other.values);
        Ok(())
    }

    fn first_stream(&self) -> u64 {
        self.meta.as_ref().map_or(0, |m| m.first_stream)
    }

    /// CSV with header `rep,k,site_0,...`; `rep` is the stream index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rep,k");
        for j in 0..self.n_sites {
            out.push_str(&format!(",site_{j}"));
        }
        out.push('\n');
        let first = self.first_stream();
        for (i, row) in self.rows().enumerate() {
            out.push_str(&format!("{},{}", first + i as u64, self.k));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("metadata serializes")
    }
}

/// Reads a sample written by [`MaximaSample::to_csv`].
pub fn parse_sample_csv(text: &str) -> Result<MaximaSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let n_sites = header.len().saturating_sub(2);
    let header_ok = header.get(0) == Some("rep")
        && header.get(1) == Some("k")
        && n_sites > 0
        && (0..n_sites).all(|j| header.get(j + 2) == Some(format!("site_{j}").as_str()));
    if !header_ok {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `rep,k,site_0,...`".into(),
        });
    }
    let mut k = None;
    let mut first = None;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != n_sites + 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", n_sites + 2, record.len()),
            });
        }
        let rep: u64 = record[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad replicate index `{}`", &record[0]),
        })?;
        let row_k: usize = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad block size `{}`", &record[1]),
        })?;
        if row_k == 0 || *k.get_or_insert(row_k) != row_k {
            return Err(Error::Parse {
                line,
                message: "block size must be positive and constant".into(),
            });
        }
        first.get_or_insert(rep);
        let values = (2..record.len())
            .map(|j| crate::geometry::parse_finite(&record[j], line))
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    let k = k.ok_or(Error::Parse {
        line: 2,
        message: "sample has no rows".into(),
    })?;
    MaximaSample::from_rows(k, rows)
}

fn sample_meta(sim: &Simulator, seed: u64, first_stream: u64, diagnostics: Diagnostics) -> SampleMeta {
    SampleMeta {
        construction: sim.kind,
        model: sim.model,
        truncation: sim.truncation,
        bound: sim.stop_bound(),
        window: sim.window_info(),
        seed,
        first_stream,
        diagnostics,
    }
}

/// Nested block-maxima samples for ascending `ks` over streams `streams` of
/// `seed`. Replicates run in parallel; results do not depend on the thread
/// count.
pub fn simulate_nested_range(
    sim: &Simulator,
    ks: &[usize],
    streams: Range<u64>,
    seed: u64,
) -> Result<Vec<MaximaSample>> {
    check_block_sizes(ks)?;
    if streams.is_empty() {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let reps: Vec<(Vec<Vec<f64>>, Diagnostics)> = streams
        .clone()
        .into_par_iter()
        .map(|id| {
            let mut rng = spawn_stream(seed, id);
            let mut diag = Diagnostics::default();
            let zs = sim.nested_distinct(ks, &mut rng, &mut diag)?;
            Ok((zs.iter().map(|z| sim.expand(z)).collect(), diag))
        })
        .collect::<Result<_>>()?;
    let mut diagnostics = Diagnostics::default();
    for (_, d) in &reps {
        diagnostics.merge(d);
    }
    let p = sim.sites.len();
    Ok(ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mut values = Vec::with_capacity(reps.len() * p);
            for (zs, _) in &reps {
                values.extend_from_slice(&zs[j]);
            }
            MaximaSample {
                k,
                n_sites: p,
                values,
                meta: Some(sample_meta(sim, seed, streams.start, diagnostics)),
            }
        })
        .collect())
}

pub fn simulate_nested(sim: &Simulator, ks: &[usize], n: usize, seed: u64) -> Result<Vec<MaximaSample>> {
    simulate_nested_range(sim, ks, 0..n as u64, seed)
}

/// `n` independent block-maxima replicates using streams `0..n` of `seed`.
pub fn simulate_sample(sim: &Simulator, k: usize, n: usize, seed: u64) -> Result<MaximaSample> {
    Ok(simulate_nested(sim, &[k], n, seed)?.remove(0))
}

pub fn simulate_sample_range(
    sim: &Simulator,
    k: usize,
    streams: Range<u64>,
    seed: u64,
) -> Result<MaximaSample> {
    Ok(simulate_nested_range(sim, &[k], streams, seed)?.remove(0))
}
