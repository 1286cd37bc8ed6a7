//! Site geometry: points in R^d and their Euclidean distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point at which the field is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    coords: Vec<f64>,
}

impl Site {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a site needs at least one coordinate"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("site coordinate {bad} is not finite")));
        }
        Ok(Self { coords })
    }

    /// Shorthand for a site on the real line.
    pub fn line(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn distance(&self, other: &Site) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Symmetric matrix of pairwise Euclidean distances, stored in full.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Computes all pairwise distances, checking that dimensions agree.
pub fn pairwise_distances(sites: &[Site]) -> Result<DistanceMatrix> {
    let first = sites
        .first()
        .ok_or_else(|| Error::invalid("site set is empty"))?;
    let dim = first.dim();
    for (index, s) in sites.iter().enumerate() {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                index,
                expected: dim,
                found: s.dim(),
            });
        }
    }
    let n = sites.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let h = sites[i].distance(&sites[j]);
            values[i * n + j] = h;
            values[j * n + i] = h;
        }
    }
    Ok(DistanceMatrix { n, values })
}

/// Ordered sites of a common dimension with their distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSet {
    sites: Vec<Site>,
    distances: DistanceMatrix,
}

impl SiteSet {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        let distances = pairwise_distances(&sites)?;
        Ok(Self { sites, distances })
    }

    /// Sites on the real line.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Site::line(x)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances.get(i, j)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    /// Axis-aligned bounding box as (lower, upper) corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for s in &self.sites {
            for (axis, &c) in s.coords().iter().enumerate() {
                lo[axis] = lo[axis].min(c);
                hi[axis] = hi[axis].max(c);
            }
        }
        (lo, hi)
    }

    /// Collapses exactly repeated sites.
    ///
    /// Returns the distinct sites (first occurrence order) and, for every
    /// original site, the index of its distinct representative.
    pub fn dedup(&self) -> (SiteSet, Vec<usize>) {
        let mut distinct: Vec<usize> = Vec::new();
        let mut map = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            match distinct.iter().position(|&j| self.distance(i, j) == 0.0) {
                Some(pos) => map.push(pos),
                None => {
                    map.push(distinct.len());
                    distinct.push(i);
                }
            }
        }
        let sites = distinct.iter().map(|&i| self.sites[i].clone()).collect();
        let set = SiteSet::new(sites).expect("subset of a valid site set is valid");
        (set, map)
    }
}

/// Reads sites from CSV text: a header row, then one row per site with
/// columns `x1,...,xd`.
pub fn parse_sites_csv(text: &str) -> Result<SiteSet> {
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
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let mut sites = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", header.len(), record.len()),
            });
        }
        let coords = record
            .iter()
            .map(|field| parse_finite(field, line))
            .collect::<Result<Vec<_>>>()?;
        sites.push(Site::new(coords).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?);
    }
    if sites.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no sites".into(),
        });
    }
    SiteSet::new(sites)
}

pub(crate) fn parse_finite(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("`{field}` is not finite"),
        });
    }
    Ok(v)
}
