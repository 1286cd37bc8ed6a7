//! Estimation of the process and magnitude-link parameters by maximizing a
//! pairwise composite log-likelihood that compares observed and simulated
//! Kendall's tau for every site pair and block size.
//!
//! Simulated tau uses the same seed for every pair and every parameter value
//! (common random numbers), so the objective is a deterministic function of
//! the parameters.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::construction::{simulate_nested, MaximaSample, Model, Simulator, Truncation};
use crate::dependence::{kendall_tau, tau_variance, TauEstimate, TauInterpolator};
use crate::error::{Error, Result};
use crate::gauss::MagnitudeLink;
use crate::geometry::{parse_finite, SiteSet};
use crate::optim::{halton, nelder_mead, IterationRecord, NelderMeadOptions};
use crate::shape::ShapeFamily;

/// `-log(2 pi) / 2`, the largest possible term.
pub const LOG_PHI_ZERO: f64 = -0.918_938_533_204_672_8;

/// Smallest block count for which a pair enters the likelihood.
pub const MIN_PAIR_OBSERVATIONS: usize = 10;

pub const MIN_SIMULATIONS: usize = 100;

/// Per-block observations at every site, ordered by block index.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    n_sites: usize,
    block_ids: Vec<i64>,
    values: Vec<f64>,
}

impl Observations {
    /// Treats every replicate of a block-size-one sample as one block.
    pub fn from_sample(sample: &MaximaSample) -> Self {
        Self {
            n_sites: sample.n_sites(),
            block_ids: (0..sample.n() as i64).collect(),
            values: sample.rows().flatten().copied().collect(),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.block_ids.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Site columns of the maxima over consecutive groups of `k` blocks.
    /// An incomplete trailing group is dropped.
    pub fn block_maxima(&self, k: usize) -> Result<Vec<Vec<f64>>> {
        if k == 0 {
            return Err(Error::invalid("block size must be at least 1"));
        }
        let groups = self.n_blocks() / k;
        let p = self.n_sites;
        let mut cols = vec![Vec::with_capacity(groups); p];
        for g in 0..groups {
            for (s, col) in cols.iter_mut().enumerate() {
                let m = (g * k..(g + 1) * k)
                    .map(|b| self.values[b * p + s])
                    .fold(f64::NEG_INFINITY, f64::max);
                col.push(m);
            }
        }
        Ok(cols)
    }

    /// CSV `block_index,site,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_index,site,value\n");
        for (b, id) in self.block_ids.iter().enumerate() {
            for s in 0..self.n_sites {
                out.push_str(&format!("{id},{s},{}\n", self.values[b * self.n_sites + s]));
            }
        }
        out
    }
}

/// Reads `block_index,site,value` rows. Every block must have exactly one
/// value for each site `0..p`.
pub fn parse_observations_csv(text: &str) -> Result<Observations> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["block_index", "site", "value"] {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `block_index,site,value`".into(),
        });
    }
    let mut blocks: BTreeMap<i64, BTreeMap<usize, f64>> = BTreeMap::new();
    let mut max_site = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let block: i64 = record[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad block index `{}`", &record[0]),
        })?;
        let site: usize = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad site index `{}`", &record[1]),
        })?;
        let value = parse_finite(&record[2], line)?;
        if blocks.entry(block).or_default().insert(site, value).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate value for block {block}, site {site}"),
            });
        }
        max_site = max_site.max(site);
    }
    if blocks.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no observations".into(),
        });
    }
    let p = max_site + 1;
    let mut values = Vec::with_capacity(blocks.len() * p);
    for (block, row) in &blocks {
        if row.len() != p {
            let missing = (0..p).find(|s| !row.contains_key(s)).unwrap_or(0);
            return Err(Error::invalid(format!("block {block} has no value for site {missing}")));
        }
        values.extend(row.values());
    }
    Ok(Observations {
        n_sites: p,
        block_ids: blocks.keys().copied().collect(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedTau {
    pub i: usize,
    pub j: usize,
    pub h: f64,
    pub k: usize,
    pub tau: f64,
    pub variance: f64,
    pub n: usize,
}

/// Observed tau for every site pair and block size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedTauSet {
    pub entries: Vec<ObservedTau>,
    pub ks: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ObservedTauSet {
    pub fn from_observations(obs: &Observations, sites: &SiteSet, ks: &[usize]) -> Result<Self> {
        if sites.len() != obs.n_sites() {
            return Err(Error::invalid(format!(
                "observations cover {} sites but {} site coordinates were given",
                obs.n_sites(),
                sites.len()
            )));
        }
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        ks.dedup();
        if ks.is_empty() || ks[0] == 0 {
            return Err(Error::invalid("block sizes must be positive"));
        }
        let p = obs.n_sites();
        let mut entries = Vec::new();
        let mut warnings = Vec::new();
        for &k in &ks {
            let cols = obs.block_maxima(k)?;
            let n = cols[0].len();
            if n < MIN_PAIR_OBSERVATIONS {
                warnings.push(format!(
                    "block size {k}: only {n} blocks; all pairs excluded (need {MIN_PAIR_OBSERVATIONS})"
                ));
                continue;
            }
            for (s, col) in cols.iter().enumerate() {
                if col.iter().all(|&x| x == col[0]) {
                    return Err(Error::UndefinedTau(format!(
                        "site {s} is constant at block size {k}"
                    )));
                }
            }
            for i in 0..p {
                for j in i + 1..p {
                    let t = kendall_tau(&cols[i], &cols[j])?;
                    entries.push(ObservedTau {
                        i,
                        j,
                        h: sites.distance(i, j),
                        k,
                        tau: t.tau,
                        variance: t.variance,
                        n,
                    });
                }
            }
        }
        if entries.is_empty() {
            return Err(Error::invalid("no site pair has enough blocks"));
        }
        let ks = ks
            .into_iter()
            .filter(|k| entries.iter().any(|e| e.k == *k))
            .collect();
        Ok(Self {
            entries,
            ks,
            warnings,
        })
    }

    pub fn distance_range(&self) -> (f64, f64) {
        self.entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.h), hi.max(e.h)))
    }
}

/// Parameters of the per-event process or function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaY {
    Gauss { variance: f64 },
    Shape { family: ShapeFamily },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaVector {
    pub theta_y: ThetaY,
    pub theta_m: MagnitudeLink,
}

impl From<Model> for ThetaVector {
    fn from(model: Model) -> Self {
        match model {
            Model::Gauss { variance, link } => Self {
                theta_y: ThetaY::Gauss { variance },
                theta_m: link,
            },
            Model::Shape { family, link } => Self {
                theta_y: ThetaY::Shape { family },
                theta_m: link,
            },
        }
    }
}

impl From<ThetaVector> for Model {
    fn from(t: ThetaVector) -> Self {
        match t.theta_y {
            ThetaY::Gauss { variance } => Model::Gauss {
                variance,
                link: t.theta_m,
            },
            ThetaY::Shape { family } => Model::Shape {
                family,
                link: t.theta_m,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    /// Variance of the Gaussian process.
    V,
    C,
    D,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::V => "v",
            Param::C => "c",
            Param::D => "d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
}

/// Free parameters with box bounds around a base model; the remaining
/// parameters stay at their base values.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpace {
    base: Model,
    free: Vec<ParamRange>,
}

impl ThetaSpace {
    pub fn new(base: Model, free: Vec<ParamRange>) -> Result<Self> {
        if free.is_empty() {
            return Err(Error::Config("no free parameters to estimate".into()));
        }
        for (n, r) in free.iter().enumerate() {
            if !(r.lower.is_finite() && r.upper.is_finite() && r.lower < r.upper) {
                return Err(Error::Config(format!("invalid bounds for {}: [{}, {}]", r.param, r.lower, r.upper)));
            }
            if free[..n].iter().any(|q| q.param == r.param) {
                return Err(Error::Config(format!("parameter {} listed twice", r.param)));
            }
            if r.param == Param::V {
                if !matches!(base, Model::Gauss { .. }) {
                    return Err(Error::Config("variance is only a parameter of the Gaussian process".into()));
                }
                if r.lower <= 0.0 {
                    return Err(Error::Config("variance bounds must be positive".into()));
                }
            }
        }
        Ok(Self { base, free })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn free(&self) -> &[ParamRange] {
        &self.free
    }

    /// Model at unit-cube coordinates `u`.
    pub fn model_at(&self, u: &[f64]) -> Model {
        let mut model = self.base;
        for (r, &x) in self.free.iter().zip(u) {
            let value = r.lower + x.clamp(0.0, 1.0) * (r.upper - r.lower);
            model = set_param(model, r.param, value);
        }
        model
    }

    pub fn unit_coords(&self, model: &Model) -> Vec<f64> {
        self.free
            .iter()
            .map(|r| (get_param(model, r.param) - r.lower) / (r.upper - r.lower))
            .collect()
    }
}

pub fn get_param(model: &Model, param: Param) -> f64 {
    match (param, model) {
        (Param::V, Model::Gauss { variance, .. }) => *variance,
        (Param::V, Model::Shape { .. }) => f64::NAN,
        (Param::C, m) => m.link().c,
        (Param::D, m) => m.link().d,
    }
}

fn set_param(model: Model, param: Param, value: f64) -> Model {
    let link = model.link();
    match (param, model) {
        (Param::V, Model::Gauss { link, .. }) => Model::Gauss { variance: value, link },
        (Param::V, m) => m,
        (Param::C, m) => m.with_link(MagnitudeLink { c: value, d: link.d }),
        (Param::D, m) => m.with_link(MagnitudeLink { c: link.c, d: value }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub n_sim: usize,
    pub seed: u64,
    pub truncation: Truncation,
    /// Distance grid for the isotropic shortcut; `None` simulates every
    /// distinct pair distance.
    pub grid: Option<Vec<f64>>,
}

impl SimSettings {
    pub fn new(n_sim: usize, seed: u64) -> Self {
        Self {
            n_sim,
            seed,
            truncation: Truncation::default(),
            grid: None,
        }
    }
}

/// Simulated tau between sites `0` and `h` for ascending block sizes `ks`,
/// from `n_sim` replicates on streams `0..n_sim` of `seed`.
pub fn simulate_tau(
    model: Model,
    h: f64,
    ks: &[usize],
    n_sim: usize,
    seed: u64,
    truncation: Truncation,
) -> Result<Vec<TauEstimate>> {
    Ok(simulate_tau_distances(model, &[h], ks, n_sim, seed, truncation)?.remove(0))
}

/// Distances simulated together in one field. The per-event cost grows with
/// the square of the field size, so long distance lists are split.
const DISTANCES_PER_FIELD: usize = 8;

/// Simulated tau between site `0` and each distance in `hs`, for ascending
/// block sizes `ks`. Consecutive runs of up to eight distances share one
/// field on the points `0, h_1, h_2, ...`; each pair `(0, h)` has the same
/// law as a separate two-site run, at a fraction of the event-stream cost.
pub fn simulate_tau_distances(
    model: Model,
    hs: &[f64],
    ks: &[usize],
    n_sim: usize,
    seed: u64,
    truncation: Truncation,
) -> Result<Vec<Vec<TauEstimate>>> {
    if n_sim < MIN_SIMULATIONS {
        return Err(Error::invalid(format!("n_sim must be at least {MIN_SIMULATIONS}")));
    }
    if let Some(h) = hs.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
        return Err(Error::invalid(format!("invalid distance {h}")));
    }
    let mut out = Vec::with_capacity(hs.len());
    for chunk in hs.chunks(DISTANCES_PER_FIELD) {
        let mut points = Vec::with_capacity(chunk.len() + 1);
        points.push(0.0);
        points.extend_from_slice(chunk);
        let sim = Simulator::from_model(SiteSet::from_line(&points)?, model, truncation)?;
        let samples = simulate_nested(&sim, ks, n_sim, seed)?;
        let origins: Vec<Vec<f64>> = samples.iter().map(|s| s.column(0)).collect();
        for j in 1..points.len() {
            let taus = samples
                .iter()
                .zip(&origins)
                .map(|(s, o)| kendall_tau(o, &s.column(j)))
                .collect::<Result<Vec<_>>>()?;
            out.push(taus);
        }
    }
    Ok(out)
}

/// Tau-versus-distance interpolators (one per block size) from simulations at
/// the grid distances.
pub fn simulate_tau_isotropic(
    model: Model,
    grid: &[f64],
    ks: &[usize],
    n_sim: usize,
    seed: u64,
    truncation: Truncation,
) -> Result<Vec<TauInterpolator>> {
    let per_h = simulate_tau_distances(model, grid, ks, n_sim, seed, truncation)?;
    (0..ks.len())
        .map(|j| {
            let points: Vec<(f64, f64)> = grid.iter().zip(&per_h).map(|(&h, t)| (h, t[j].tau)).collect();
            TauInterpolator::new(&points)
        })
        .collect()
}

/// `log phi(z)` for the standardized discrepancy between observed and
/// simulated tau.
pub fn loglik_term(tau_obs: f64, var_obs: f64, tau_sim: f64, var_sim: f64) -> f64 {
    let z = (tau_obs - tau_sim) / (var_obs + var_sim).sqrt();
    LOG_PHI_ZERO - 0.5 * z * z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoglikEvaluation {
    /// Sum over unordered pairs and block sizes; `-inf` when infeasible.
    pub loglik: f64,
    pub terms: usize,
    pub feasible: bool,
    pub refusal: Option<String>,
}

/// Composite log-likelihood of `model` for the observed tau table.
pub fn composite_loglik(model: Model, obs: &ObservedTauSet, settings: &SimSettings) -> Result<LoglikEvaluation> {
    let ks = &obs.ks;
    let n_sim = settings.n_sim;
    let var_sim = tau_variance(n_sim)?;
    let simulated: Result<Box<dyn Fn(f64, usize) -> f64>> = match &settings.grid {
        Some(grid) => {
            let (lo, hi) = obs.distance_range();
            let (glo, ghi) = (grid.first().copied(), grid.last().copied());
            if !(glo.is_some_and(|g| g <= lo) && ghi.is_some_and(|g| g >= hi)) {
                return Err(Error::invalid(format!(
                    "distance grid does not cover the observed pair distances [{lo}, {hi}]"
                )));
            }
            simulate_tau_isotropic(model, grid, ks, n_sim, settings.seed, settings.truncation).map(|f| {
                Box::new(move |h: f64, kj: usize| f[kj].eval(h)) as Box<dyn Fn(f64, usize) -> f64>
            })
        }
        None => {
            let mut hs: Vec<f64> = obs.entries.iter().map(|e| e.h).collect();
            hs.sort_by(f64::total_cmp);
            hs.dedup();
            simulate_tau_distances(model, &hs, ks, n_sim, settings.seed, settings.truncation)
                .map(|taus| {
                    Box::new(move |h: f64, kj: usize| {
                        let i = hs.partition_point(|&x| x < h);
                        taus[i][kj].tau
                    }) as Box<dyn Fn(f64, usize) -> f64>
                })
        }
    };
    let simulated = match simulated {
        Ok(f) => f,
        Err(e @ (Error::Refused(_) | Error::Factorization(_))) => {
            return Ok(LoglikEvaluation {
                loglik: f64::NEG_INFINITY,
                terms: obs.entries.len(),
                feasible: false,
                refusal: Some(e.to_string()),
            })
        }
        Err(e) => return Err(e),
    };
    let loglik = obs
        .entries
        .iter()
        .map(|e| {
            let kj = ks.binary_search(&e.k).expect("block size listed");
            loglik_term(e.tau, e.variance, simulated(e.h, kj), var_sim)
        })
        .sum();
    Ok(LoglikEvaluation {
        loglik,
        terms: obs.entries.len(),
        feasible: true,
        refusal: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub starts: usize,
    pub simplex: NelderMeadOptions,
    /// Finite-difference step for the curvature, in unit-cube coordinates.
    pub curvature_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 5,
            simplex: NelderMeadOptions::default(),
            curvature_step: 0.05,
        }
    }
}

/// Condition-number threshold above which the fit is flagged as weakly
/// identified.
pub const CONDITION_WARNING: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    /// Eigenvalues of the negated log-likelihood Hessian in unit-cube
    /// coordinates.
    pub eigenvalues: Vec<f64>,
    pub condition_number: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: usize,
    #[serde(flatten)]
    pub record: IterationRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub curvature: Curvature,
    pub terms: usize,
    /// Pairs are summed once each; a sum over ordered pairs is twice this.
    pub ordered_pair_loglik: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta_hat: ThetaVector,
    pub estimates: BTreeMap<Param, f64>,
    pub loglik: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

fn curvature(f: &mut dyn FnMut(&[f64]) -> f64, at: &[f64], step: f64) -> Curvature {
    let n = at.len();
    let centre: Vec<f64> = at.iter().map(|&x| x.clamp(step, 1.0 - step)).collect();
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = centre.clone();
        for &(i, s) in moves {
            p[i] += s;
        }
        p
    };
    let f0 = f(&centre);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = f(&shifted(&[(i, step)]));
        let fm = f(&shifted(&[(i, -step)]));
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (step * step);
        for j in 0..i {
            let fpp = f(&shifted(&[(i, step), (j, step)]));
            let fpm = f(&shifted(&[(i, step), (j, -step)]));
            let fmp = f(&shifted(&[(i, -step), (j, step)]));
            let fmm = f(&shifted(&[(i, -step), (j, -step)]));
            let v = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if hess.iter().any(|v: &f64| !v.is_finite()) {
        return Curvature {
            eigenvalues: vec![f64::NAN; n],
            condition_number: f64::INFINITY,
            warning: Some("curvature undefined: infeasible points next to the estimate".into()),
        };
    }
    let eig = SymmetricEigen::new(hess).eigenvalues;
    let abs: Vec<f64> = eig.iter().map(|v| v.abs()).collect();
    let max = abs.iter().copied().fold(0.0, f64::max);
    let min = abs.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
    let warning = (condition_number > CONDITION_WARNING || !condition_number.is_finite()).then(|| {
        format!("curvature condition number {condition_number:e}: parameters are weakly identified")
    });
    Curvature {
        eigenvalues: eig.iter().copied().collect(),
        condition_number,
        warning,
    }
}

/// Maximizes the composite log-likelihood over the free parameters by
/// multistart Nelder-Mead from Halton points of the parameter box.
pub fn maximize(
    obs: &ObservedTauSet,
    space: &ThetaSpace,
    settings: &SimSettings,
    options: &FitOptions,
) -> Result<FitResult> {
    if options.starts == 0 {
        return Err(Error::Config("at least one start is required".into()));
    }
    let mut evaluations = 0usize;
    let mut failure: Option<Error> = None;
    let best: RefCell<Option<(Vec<f64>, f64)>> = RefCell::new(None);
    let mut objective = |u: &[f64]| -> f64 {
        if failure.is_some() {
            return f64::INFINITY;
        }
        evaluations += 1;
        match composite_loglik(space.model_at(u), obs, settings) {
            Ok(e) if e.feasible => {
                let mut best = best.borrow_mut();
                if best.as_ref().is_none_or(|b| e.loglik > b.1) {
                    *best = Some((u.to_vec(), e.loglik));
                }
                -e.loglik
            }
            Ok(_) => f64::INFINITY,
            Err(e) => {
                failure = Some(e);
                f64::INFINITY
            }
        }
    };

    let mut trace = Vec::new();
    let mut runs = Vec::new();
    for start in 0..options.starts {
        let x0 = halton(start as u64 + 1, space.dim());
        let run = nelder_mead(&mut objective, &x0, &options.simplex);
        trace.extend(run.trace.iter().map(|&record| TraceRecord { start, record }));
        runs.push(run);
    }
    let converged = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .is_some_and(|r| r.converged);
    let curvature_at = best.borrow().as_ref().map(|b| b.0.clone());
    let curv = curvature_at.as_ref().map(|u| curvature(&mut objective, u, options.curvature_step));
    drop(objective);
    if let Some(e) = failure {
        return Err(e);
    }
    let (u_hat, loglik) = best.into_inner().ok_or_else(|| Error::Refused("every evaluated parameter point was infeasible".into()))?;
    let model = space.model_at(&u_hat);
    let estimates = space
        .free()
        .iter()
        .map(|r| (r.param, get_param(&model, r.param)))
        .collect();
    Ok(FitResult {
        theta_hat: model.into(),
        estimates,
        loglik,
        evaluations,
        converged,
        trace,
        diagnostics: FitDiagnostics {
            curvature: curv.expect("a feasible point exists"),
            terms: obs.entries.len(),
            ordered_pair_loglik: 2.0 * loglik,
            warnings: obs.warnings.clone(),
        },
    })
}
