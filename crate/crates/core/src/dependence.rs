//! Kendall's tau between site pairs and its dependence on distance and block
//! size.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::MaximaSample;
use crate::error::{Error, Result};
use crate::geometry::SiteSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub tau: f64,
    pub n: usize,
    pub variance: f64,
    /// Tied pairs in either argument, resolved by index order.
    pub ties: u64,
}

/// Null variance of the tau estimate, `2 (2n + 5) / (9 n (n - 1))`.
pub fn tau_variance(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("tau variance needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)))
}

fn key_cmp(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Sorts `keys` and returns the number of inversions.
fn sort_count_inversions(keys: &mut Vec<(f64, usize)>) -> u64 {
    let n = keys.len();
    let mut buf = keys.clone();
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut o) = (start, mid, start);
            while i < mid && j < end {
                if key_cmp(&keys[j], &keys[i]) == Ordering::Less {
                    inversions += (mid - i) as u64;
                    buf[o] = keys[j];
                    j += 1;
                } else {
                    buf[o] = keys[i];
                    i += 1;
                }
                o += 1;
            }
            buf[o..o + mid - i].copy_from_slice(&keys[i..mid]);
            o += mid - i;
            buf[o..o + end - j].copy_from_slice(&keys[j..end]);
            start = end;
        }
        std::mem::swap(keys, &mut buf);
        width *= 2;
    }
    inversions
}

fn tied_pairs(sorted: impl Iterator<Item = f64>) -> u64 {
    let mut ties = 0u64;
    let mut run = 0u64;
    let mut prev = f64::NAN;
    for x in sorted {
        if x == prev {
            run += 1;
        } else {
            ties += run * (run + 1) / 2;
            run = 0;
        }
        prev = x;
    }
    ties + run * (run + 1) / 2
}

/// Kendall's tau-a in `O(n log n)`.
///
/// Ties are broken by position, so every pair counts as concordant or
/// discordant; the number of tied pairs is reported.
pub fn kendall_tau(u: &[f64], v: &[f64]) -> Result<TauEstimate> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::invalid(format!("length mismatch: {n} vs {}", v.len())));
    }
    if n < 2 {
        return Err(Error::invalid("kendall's tau needs at least two observations"));
    }
    if u.iter().chain(v).any(|x| x.is_nan()) {
        return Err(Error::invalid("kendall's tau input contains NaN"));
    }
    for (name, x) in [("first", u), ("second", v)] {
        if x.iter().all(|&a| a == x[0]) {
            return Err(Error::UndefinedTau(format!("{name} argument is constant")));
        }
    }
    let mut by_u: Vec<(f64, usize)> = u.iter().copied().zip(0..).collect();
    by_u.sort_unstable_by(key_cmp);
    let mut ties = tied_pairs(by_u.iter().map(|p| p.0));
    let mut keys: Vec<(f64, usize)> = by_u.iter().map(|&(_, i)| (v[i], i)).collect();
    let discordant = sort_count_inversions(&mut keys);
    ties += tied_pairs(keys.iter().map(|p| p.0));
    let total = (n as u64) * (n as u64 - 1) / 2;
    let tau = (total as f64 - 2.0 * discordant as f64) / total as f64;
    Ok(TauEstimate {
        tau,
        n,
        variance: tau_variance(n)?,
        ties,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauCurveEntry {
    pub h: f64,
    pub k: usize,
    pub estimate: TauEstimate,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TauCurve {
    pub entries: Vec<TauCurveEntry>,
}

impl TauCurve {
    pub fn extend(&mut self, other: TauCurve) {
        self.entries.extend(other.entries);
    }

    /// CSV with header `h,k,tau,var,n,pair`; pairs are written as `i-j`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,k,tau,var,n,pair\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}-{}\n",
                e.h, e.k, e.estimate.tau, e.estimate.variance, e.estimate.n, e.pair.0, e.pair.1
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairSelection {
    All,
    /// Pairs of the first site with every other site.
    FromFirst,
    List(Vec<(usize, usize)>),
}

impl PairSelection {
    pub fn pairs(&self, p: usize) -> Result<Vec<(usize, usize)>> {
        let pairs: Vec<_> = match self {
            PairSelection::All => (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect(),
            PairSelection::FromFirst => (1..p).map(|j| (0, j)).collect(),
            PairSelection::List(list) => list.clone(),
        };
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= p || j >= p || i == j) {
            return Err(Error::invalid(format!("invalid site pair ({i}, {j}) for {p} sites")));
        }
        Ok(pairs)
    }
}

/// Tau for every selected pair of a sample, keyed by pair distance.
pub fn tau_curve(sample: &MaximaSample, sites: &SiteSet, selection: &PairSelection) -> Result<TauCurve> {
    let p = sample.n_sites();
    if p < 2 {
        return Err(Error::invalid("a tau curve needs at least two sites"));
    }
    if sites.len() != p {
        return Err(Error::invalid(format!(
            "sample has {p} sites but {} coordinates were given",
            sites.len()
        )));
    }
    let columns: Vec<Vec<f64>> = (0..p).map(|j| sample.column(j)).collect();
    let entries = selection
        .pairs(p)?
        .into_par_iter()
        .map(|(i, j)| {
            let estimate = if sites.distance(i, j) == 0.0 && columns[i] == columns[j] {
                // identical columns; a constant one would otherwise be an error
                TauEstimate {
                    tau: 1.0,
                    n: sample.n(),
                    variance: tau_variance(sample.n())?,
                    ties: 0,
                }
            } else {
                kendall_tau(&columns[i], &columns[j])?
            };
            Ok(TauCurveEntry {
                h: sites.distance(i, j),
                k: sample.k,
                estimate,
                pair: (i, j),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TauCurve { entries })
}

/// Piecewise-linear tau as a function of distance, clamped outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TauInterpolator {
    h: Vec<f64>,
    tau: Vec<f64>,
}

impl TauInterpolator {
    /// `grid` must have strictly increasing distances. A single point gives a
    /// constant function.
    pub fn new(grid: &[(f64, f64)]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::invalid("interpolation grid is empty"));
        }
        if grid.iter().any(|&(h, t)| !h.is_finite() || !t.is_finite()) {
            return Err(Error::invalid("interpolation grid has non-finite values"));
        }
        if grid.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid(
                "interpolation grid must have strictly increasing distances",
            ));
        }
        Ok(Self {
            h: grid.iter().map(|g| g.0).collect(),
            tau: grid.iter().map(|g| g.1).collect(),
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.h[0], self.h[self.h.len() - 1])
    }

    pub fn eval(&self, h: f64) -> f64 {
        let n = self.h.len();
        if h <= self.h[0] {
            return self.tau[0];
        }
        if h >= self.h[n - 1] {
            return self.tau[n - 1];
        }
        let j = self.h.partition_point(|&x| x <= h);
        let (h0, h1) = (self.h[j - 1], self.h[j]);
        if h == h0 {
            return self.tau[j - 1];
        }
        let w = (h - h0) / (h1 - h0);
        self.tau[j - 1] + w * (self.tau[j] - self.tau[j - 1])
    }
}
