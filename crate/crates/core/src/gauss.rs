//! The per-event stationary Gaussian process `Y_m`.
//!
//! `Y_m` has variance `v`, mean `-v/2` (so that `E exp(Y) = 1`) and the
//! exponential correlation `exp(-h / exp(d (m - c)))`, whose correlation
//! length is controlled by the event magnitude through the link `(c, d)`.

use std::sync::Arc;

use dashmap::DashMap;
use nalgebra::DMatrix;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SiteSet;
use crate::rng::RngStream;

/// Maps an event magnitude to a length scale `exp(d (m - c))`.
/// With `d = 0` the magnitude has no influence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeLink {
    pub c: f64,
    pub d: f64,
}

impl MagnitudeLink {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !c.is_finite() || !d.is_finite() {
            return Err(Error::invalid(format!("link parameters must be finite (c={c}, d={d})")));
        }
        Ok(Self { c, d })
    }

    /// The link that ignores magnitude.
    pub fn inactive() -> Self {
        Self { c: 0.0, d: 0.0 }
    }

    #[inline]
    pub fn scale(&self, m: f64) -> f64 {
        (self.d * (m - self.c)).exp()
    }
}

/// Exponential correlation at distance `h` for an event of magnitude `m`.
#[inline]
pub fn correlation(h: f64, m: f64, link: &MagnitudeLink) -> f64 {
    if h == 0.0 {
        return 1.0;
    }
    (-h / link.scale(m)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussConfig {
    variance: f64,
    pub link: MagnitudeLink,
}

impl GaussConfig {
    pub fn new(variance: f64, link: MagnitudeLink) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid(format!("variance {variance} must be positive")));
        }
        Ok(Self { variance, link })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Always `-variance / 2`.
    pub fn mean(&self) -> f64 {
        -0.5 * self.variance
    }
}

pub fn build_covariance(sites: &SiteSet, m: f64, cfg: &GaussConfig) -> DMatrix<f64> {
    let p = sites.len();
    DMatrix::from_fn(p, p, |i, j| {
        cfg.variance * correlation(sites.distance(i, j), m, &cfg.link)
    })
}

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-6;
const PIVOT_TOL: f64 = 1e-14;

/// Lower-triangular root `L` of a covariance matrix, `L L^T = S + jitter I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    dim: usize,
    /// Row-major packed lower triangle.
    lower: Vec<f64>,
    /// Relative diagonal jitter that was needed (0 if none).
    pub jitter: f64,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.lower[i * (i + 1) / 2 + j]
        }
    }

    /// `out = mean + L eps`.
    #[inline]
    pub fn apply(&self, mean: f64, eps: &[f64], out: &mut [f64]) {
        let mut offset = 0;
        for i in 0..self.dim {
            let row = &self.lower[offset..offset + i + 1];
            let mut acc = mean;
            for (l, e) in row.iter().zip(eps) {
                acc += l * e;
            }
            out[i] = acc;
            offset += i + 1;
        }
    }
}

fn try_cholesky(s: &DMatrix<f64>, jitter: f64, tol: f64) -> Option<Vec<f64>> {
    let p = s.nrows();
    let mut l = vec![0.0; p * (p + 1) / 2];
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
    for i in 0..p {
        for j in 0..=i {
            let mut sum = s[(i, j)];
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[idx(i, k)] * l[idx(j, k)];
            }
            if i == j {
                if sum <= tol {
                    return None;
                }
                l[idx(i, i)] = sum.sqrt();
            } else {
                l[idx(i, j)] = sum / l[idx(j, j)];
            }
        }
    }
    Some(l)
}

/// Cholesky factorization with escalating diagonal jitter.
///
/// Jitter starts at `1e-12` times the largest variance and grows tenfold up
/// to `1e-6`; beyond that the matrix is rejected.
pub fn factorize(s: &DMatrix<f64>) -> Result<Factor> {
    let p = s.nrows();
    if p == 0 || s.ncols() != p {
        return Err(Error::Factorization("matrix must be square and non-empty".into()));
    }
    let scale = (0..p).map(|i| s[(i, i)]).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Factorization(format!("invalid diagonal scale {scale}")));
    }
    let tol = PIVOT_TOL * scale;
    if let Some(lower) = try_cholesky(s, 0.0, tol) {
        return Ok(Factor {
            dim: p,
            lower,
            jitter: 0.0,
        });
    }
    let mut rel = JITTER_START;
    while rel <= JITTER_MAX * (1.0 + 1e-9) {
        if let Some(lower) = try_cholesky(s, rel * scale, tol) {
            return Ok(Factor {
                dim: p,
                lower,
                jitter: rel,
            });
        }
        rel *= 10.0;
    }
    Err(Error::Factorization(format!(
        "matrix not positive definite even with relative jitter {JITTER_MAX}"
    )))
}

/// Shares factorizations between events with nearby magnitudes.
///
/// Magnitudes are rounded to the grid `step * i`; the factor for bin `i` is
/// always built at the bin centre, so cache contents never depend on which
/// event (or thread) filled the bin first. `step = 0` disables caching.
#[derive(Debug)]
pub struct FactorCache {
    step: f64,
    entries: DashMap<i64, Arc<Factor>, FxBuildHasher>,
}

impl FactorCache {
    pub fn new(step: f64) -> Result<Self> {
        if !(step >= 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("cache step {step} must be >= 0")));
        }
        Ok(Self {
            step,
            entries: DashMap::with_hasher(FxBuildHasher),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns the factor serving magnitude `m`. `build` receives the
    /// magnitude the factor must be computed at.
    pub fn get_or_build(
        &self,
        m: f64,
        link_active: bool,
        build: impl FnOnce(f64) -> Result<Factor>,
    ) -> Result<Arc<Factor>> {
        if !link_active {
            // all events share one covariance
            return self.lookup(0, 0.0, build);
        }
        if self.step == 0.0 {
            return build(m).map(Arc::new);
        }
        let key = (m / self.step).round();
        if !key.is_finite() || key.abs() > i64::MAX as f64 / 2.0 {
            return build(m).map(Arc::new);
        }
        self.lookup(key as i64, key * self.step, build)
    }

    fn lookup(
        &self,
        key: i64,
        at: f64,
        build: impl FnOnce(f64) -> Result<Factor>,
    ) -> Result<Arc<Factor>> {
        if let Some(f) = self.entries.get(&key) {
            return Ok(Arc::clone(&f));
        }
        let built = Arc::new(build(at)?);
        // insert-if-absent: concurrent builders produce identical factors
        let entry = self.entries.entry(key).or_insert(built);
        Ok(Arc::clone(&entry))
    }
}

/// `Y_m` on a fixed site set.
#[derive(Debug)]
pub struct GaussField {
    sites: SiteSet,
    cfg: GaussConfig,
    cache: FactorCache,
}

impl GaussField {
    pub fn new(sites: SiteSet, cfg: GaussConfig, cache_step: f64) -> Result<Self> {
        Ok(Self {
            sites,
            cfg,
            cache: FactorCache::new(cache_step)?,
        })
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn config(&self) -> &GaussConfig {
        &self.cfg
    }

    pub fn cache(&self) -> &FactorCache {
        &self.cache
    }

    pub fn factor(&self, m: f64) -> Result<Arc<Factor>> {
        self.cache
            .get_or_build(m, self.cfg.link.d != 0.0, |at| {
                factorize(&build_covariance(&self.sites, at, &self.cfg))
            })
    }

    /// Draws `Y_m` at every site into `out`; `eps` is scratch space.
    pub fn simulate_into(
        &self,
        m: f64,
        rng: &mut RngStream,
        eps: &mut Vec<f64>,
        out: &mut [f64],
    ) -> Result<()> {
        let factor = self.factor(m)?;
        eps.clear();
        eps.extend((0..factor.dim()).map(|_| rng.normal()));
        factor.apply(self.cfg.mean(), eps, out);
        Ok(())
    }

    pub fn simulate(&self, m: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.sites.len()];
        let mut eps = Vec::with_capacity(self.sites.len());
        self.simulate_into(m, rng, &mut eps, &mut out)?;
        Ok(out)
    }

    /// Bound on the correlation error caused by evaluating the covariance at
    /// the cached bin centre instead of `m`: `h_max |d| step exp(|d| |m - c|)`.
    pub fn cache_perturbation_bound(&self, m: f64) -> f64 {
        let d = self.cfg.link.d;
        if d == 0.0 || self.cache.step == 0.0 {
            return 0.0;
        }
        self.sites.distances().diameter() * d.abs() * self.cache.step
            * (d.abs() * (m - self.cfg.link.c).abs()).exp()
    }
}
