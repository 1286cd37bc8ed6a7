//! Run configuration read from TOML. Every field has a default, so an empty
//! file is a valid configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionKind, Model, Simulator, Truncation};
use crate::dependence::PairSelection;
use crate::error::{Error, Result};
use crate::gauss::MagnitudeLink;
use crate::geometry::{parse_sites_csv, SiteSet};
use crate::inference::{FitOptions, Param, ParamRange};
use crate::optim::NelderMeadOptions;
use crate::shape::ShapeFamily;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SitesConfig {
    /// CSV file with a header row and one coordinate column per dimension.
    pub file: Option<PathBuf>,
    /// Sites on a line, used when no file is given.
    pub line: Vec<f64>,
}

impl Default for SitesConfig {
    fn default() -> Self {
        Self {
            file: None,
            line: (0..10).map(|i| i as f64 * 0.5).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub variance: f64,
    pub family: ShapeFamily,
    pub c: f64,
    pub d: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            variance: 1.0,
            family: ShapeFamily::Gauss,
            c: 2.0,
            d: -0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairsConfig {
    All,
    FromFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauConfig {
    pub pairs: PairsConfig,
}

impl Default for TauConfig {
    fn default() -> Self {
        Self {
            pairs: PairsConfig::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginNullConfig {
    /// `Gumbel(log k, 1)` with nothing estimated.
    BlockMaximum,
    /// Known scale, estimated location.
    KnownScale,
    /// Known scale for shape functions, block-maximum law otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarginsConfig {
    /// Existing sample CSV; simulated from the configuration when absent.
    pub sample: Option<PathBuf>,
    pub null: MarginNullConfig,
    pub scale: f64,
}

impl Default for MarginsConfig {
    fn default() -> Self {
        Self {
            sample: None,
            null: MarginNullConfig::Auto,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    pub n: usize,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self { n: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// CSV `block_index,site,value`.
    pub observations: Option<PathBuf>,
    pub ks: Vec<usize>,
    pub n_sim: usize,
    pub free: Vec<ParamRange>,
    pub starts: usize,
    pub tol: f64,
    pub max_evals: usize,
    /// Use the distance-grid shortcut.
    pub isotropic: bool,
    /// Explicit grid; otherwise `grid_points` evenly spaced distances over
    /// the observed range.
    pub grid: Option<Vec<f64>>,
    pub grid_points: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            observations: None,
            ks: vec![1, 2, 4],
            n_sim: 2000,
            free: vec![
                ParamRange {
                    param: Param::C,
                    lower: 0.0,
                    upper: 4.0,
                },
                ParamRange {
                    param: Param::D,
                    lower: -1.5,
                    upper: 1.0,
                },
            ],
            starts: 5,
            tol: 1e-3,
            max_evals: 200,
            isotropic: false,
            grid: None,
            grid_points: 8,
        }
    }
}

impl EstimateConfig {
    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            starts: self.starts,
            simplex: NelderMeadOptions {
                tol: self.tol,
                max_evals: self.max_evals,
                ..NelderMeadOptions::default()
            },
            ..FitOptions::default()
        }
    }

    /// Distance grid for the isotropic shortcut over `[lo, hi]`.
    pub fn grid_for(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if let Some(g) = &self.grid {
            return Ok(g.clone());
        }
        if self.grid_points == 0 {
            return Err(Error::Config("grid_points must be positive".into()));
        }
        if self.grid_points == 1 || hi <= lo {
            return Ok(vec![lo]);
        }
        let m = self.grid_points - 1;
        Ok((0..=m)
            .map(|i| if i == m { hi } else { lo + (hi - lo) * i as f64 / m as f64 })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub construction: ConstructionKind,
    pub seed: u64,
    pub n: usize,
    pub k: Vec<usize>,
    pub out: PathBuf,
    pub sites: SitesConfig,
    pub model: ModelConfig,
    pub truncation: Truncation,
    pub tau: TauConfig,
    pub margins: MarginsConfig,
    pub table1: TableConfig,
    pub estimate: EstimateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            construction: ConstructionKind::MagnitudeGauss,
            seed: 1,
            n: 10_000,
            k: vec![1],
            out: PathBuf::from("."),
            sites: SitesConfig::default(),
            model: ModelConfig::default(),
            truncation: Truncation::default(),
            tau: TauConfig::default(),
            margins: MarginsConfig::default(),
            table1: TableConfig::default(),
            estimate: EstimateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks value ranges that do not need file access.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return Err(Error::Config("k must list block sizes >= 1".into()));
        }
        if self.construction != ConstructionKind::ShapeFunction && !(self.model.variance > 0.0) {
            return Err(Error::Config("variance must be positive".into()));
        }
        if !(self.model.c.is_finite() && self.model.d.is_finite()) {
            return Err(Error::Config("c and d must be finite".into()));
        }
        Ok(())
    }

    /// Ascending, deduplicated block sizes.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut k = self.k.clone();
        k.sort_unstable();
        k.dedup();
        k
    }

    pub fn model(&self) -> Model {
        let link = MagnitudeLink {
            c: self.model.c,
            d: self.model.d,
        };
        match self.construction {
            ConstructionKind::MaxStable => Model::Gauss {
                variance: self.model.variance,
                link: MagnitudeLink::inactive(),
            },
            ConstructionKind::MagnitudeGauss => Model::Gauss {
                variance: self.model.variance,
                link,
            },
            ConstructionKind::ShapeFunction => Model::Shape {
                family: self.model.family,
                link,
            },
        }
    }

    /// Sites from the configured file (relative to `base`) or line.
    pub fn site_set(&self, base: &Path) -> Result<SiteSet> {
        match &self.sites.file {
            Some(file) => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("cannot read sites file {}: {e}", path.display())))?;
                parse_sites_csv(&text)
            }
            None => SiteSet::from_line(&self.sites.line),
        }
    }

    pub fn simulator(&self, sites: SiteSet) -> Result<Simulator> {
        match self.construction {
            ConstructionKind::MaxStable => Simulator::max_stable(sites, self.model.variance, self.truncation),
            _ => Simulator::from_model(sites, self.model(), self.truncation),
        }
    }

    pub fn pair_selection(&self) -> PairSelection {
        match self.tau.pairs {
            PairsConfig::All => PairSelection::All,
            PairsConfig::FromFirst => PairSelection::FromFirst,
        }
    }
}
