//! Per-site Gumbel margin fits and Anderson-Darling tests, and the
//! shape-function location table.

use serde::{Deserialize, Serialize};

use crate::construction::{simulate_sample, MaximaSample, Simulator, Truncation};
use crate::error::{Error, Result};
use crate::gauss::MagnitudeLink;
use crate::geometry::SiteSet;
use crate::gumbel::{
    ad_decide, anderson_darling, fit_gumbel_ml, fit_location_known_scale, AdCase, AdResult, GumbelFit,
    GumbelParams, LocationFit,
};
use crate::shape::ShapeFamily;

/// Null hypothesis for the margin of every site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MarginNull {
    /// Gumbel with both parameters given.
    Fixed { location: f64, scale: f64 },
    /// Gumbel with the given scale and estimated location.
    KnownScale { scale: f64 },
}

impl MarginNull {
    /// The law of a block maximum of `k` unit Gumbel variables.
    pub fn block_maximum(k: usize) -> Self {
        MarginNull::Fixed {
            location: (k as f64).ln(),
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteMargin {
    pub site: usize,
    pub n: usize,
    /// Two-parameter fit, reported for every null.
    pub ml: GumbelFit,
    /// Location fit at the known scale, for the known-scale null.
    pub known_scale: Option<LocationFit>,
    pub tests: Vec<AdResult>,
}

/// Fits and tests the margin of every site in `sample`.
pub fn margin_report(sample: &MaximaSample, null: MarginNull) -> Result<Vec<SiteMargin>> {
    (0..sample.n_sites())
        .map(|site| {
            let x = sample.column(site);
            let ml = fit_gumbel_ml(&x)?;
            let (params, case, known_scale) = match null {
                MarginNull::Fixed { location, scale } => {
                    (GumbelParams::new(location, scale)?, AdCase::FullySpecified, None)
                }
                MarginNull::KnownScale { scale } => {
                    let fit = fit_location_known_scale(&x, scale)?;
                    (GumbelParams::new(fit.location, scale)?, AdCase::KnownScale, Some(fit))
                }
            };
            let a2 = anderson_darling(&x, |v| params.cdf(v))?;
            let tests = [0.05, 0.10]
                .iter()
                .map(|&alpha| ad_decide(a2, case, alpha))
                .collect::<Result<Vec<_>>>()?;
            Ok(SiteMargin {
                site,
                n: x.len(),
                ml,
                known_scale,
                tests,
            })
        })
        .collect()
}

/// The two links of the location table, as `(c, d)`.
pub const TABLE_LINKS: [(f64, f64); 2] = [(2.0, -0.3), (3.0, -0.2)];

/// Published location estimates, indexed by `[family][link]` in the order of
/// [`ShapeFamily::ALL`] and [`TABLE_LINKS`].
pub const REFERENCE_LOCATIONS: [[f64; 2]; 3] = [[-0.1884, -0.2678], [-0.1900, -0.2530], [-0.1912, -0.2655]];

/// Published Anderson-Darling statistics, same layout.
pub const REFERENCE_AD: [[f64; 2]; 3] = [[0.8646, 0.5099], [0.5622, 0.9319], [0.3818, 0.7810]];

/// Exact margin location of the shape-function construction, `-log(1 - d)`.
pub fn shape_margin_location(d: f64) -> f64 {
    -(1.0 - d).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub family: ShapeFamily,
    pub c: f64,
    pub d: f64,
    pub n: usize,
    pub location: f64,
    pub std_error: f64,
    pub ad_statistic: f64,
    pub ad_reject_5pct: bool,
    pub reference_location: f64,
    pub reference_ad: f64,
    pub exact_location: f64,
    pub events_per_replicate: f64,
}

/// Simulates one site `n` times for every family and table link, fits the
/// location at unit scale and tests the fit.
pub fn location_table(n: usize, seed: u64, truncation: Truncation) -> Result<Vec<TableCell>> {
    if n < 10 {
        return Err(Error::invalid("location table needs n >= 10"));
    }
    let site = SiteSet::from_line(&[0.0])?;
    let mut cells = Vec::new();
    for (fi, &family) in ShapeFamily::ALL.iter().enumerate() {
        for (li, &(c, d)) in TABLE_LINKS.iter().enumerate() {
            let sim = Simulator::shape(site.clone(), family, MagnitudeLink::new(c, d)?, truncation)?;
            let sample = simulate_sample(&sim, 1, n, seed)?;
            let report = margin_report(&sample, MarginNull::KnownScale { scale: 1.0 })?;
            let fit = report[0].known_scale.expect("known-scale fit");
            let test = report[0].tests[0];
            let diag = sample.meta.as_ref().map(|m| m.diagnostics).unwrap_or_default();
            cells.push(TableCell {
                family,
                c,
                d,
                n,
                location: fit.location,
                std_error: fit.std_error,
                ad_statistic: test.statistic,
                ad_reject_5pct: test.reject,
                reference_location: REFERENCE_LOCATIONS[fi][li],
                reference_ad: REFERENCE_AD[fi][li],
                exact_location: shape_margin_location(d),
                events_per_replicate: diag.events as f64 / n as f64,
            });
        }
    }
    Ok(cells)
}

pub fn table_to_csv(cells: &[TableCell]) -> String {
    let mut out = String::from(
        "family,c,d,n,location,std_error,ad_statistic,ad_reject_5pct,reference_location,reference_ad,exact_location\n",
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.family,
            c.c,
            c.d,
            c.n,
            c.location,
            c.std_error,
            c.ad_statistic,
            c.ad_reject_5pct,
            c.reference_location,
            c.reference_ad,
            c.exact_location
        ));
    }
    out
}
