//! Gumbel margins `G(x) = exp(-exp(-(x - a)/b))`: evaluation, maximum
//! likelihood fits and Anderson-Darling goodness of fit.
//!
//! `a` is always the location and `b` the scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Lower clamp for cdf-transformed values in the Anderson-Darling sum.
pub const AD_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelParams {
    pub location: f64,
    pub scale: f64,
}

impl GumbelParams {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "gumbel parameters need finite location and positive scale, got a={location}, b={scale}"
            )));
        }
        Ok(Self { location, scale })
    }

    /// Location 0, scale 1.
    pub fn unit() -> Self {
        Self {
            location: 0.0,
            scale: 1.0,
        }
    }

    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        (-(-(x - self.location) / self.scale).exp()).exp()
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::invalid(format!("quantile level {u} outside (0, 1)")));
        }
        Ok(self.location - self.scale * (-u.ln()).ln())
    }
}

/// Gumbel distribution function; rejects non-finite arguments.
pub fn gumbel_cdf(x: f64, p: &GumbelParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("gumbel cdf argument {x} is not finite")));
    }
    Ok(p.cdf(x))
}

pub fn gumbel_quantile(u: f64, p: &GumbelParams) -> Result<f64> {
    p.quantile(u)
}

/// Location estimate for a known scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationFit {
    pub location: f64,
    /// Standard error from the Fisher information, `b / sqrt(n)`.
    pub std_error: f64,
}

/// Maximum-likelihood location for known scale `b`:
/// `a = -b log(mean(exp(-x/b)))`, evaluated with a shifted log-sum-exp.
pub fn fit_location_known_scale(sample: &[f64], scale: f64) -> Result<LocationFit> {
    if sample.len() < 2 {
        return Err(Error::invalid("location fit needs at least 2 observations"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("scale {scale} must be positive")));
    }
    check_finite(sample)?;
    let n = sample.len() as f64;
    Ok(LocationFit {
        location: location_given_scale(sample, scale),
        std_error: scale / n.sqrt(),
    })
}

fn location_given_scale(sample: &[f64], scale: f64) -> f64 {
    let x_min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let n = sample.len() as f64;
    let mean_w = sample
        .iter()
        .map(|&x| (-(x - x_min) / scale).exp())
        .sum::<f64>()
        / n;
    x_min - scale * mean_w.ln()
}

/// Full two-parameter maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelFit {
    pub params: GumbelParams,
    pub se_location: f64,
    pub se_scale: f64,
    pub iterations: usize,
}

const ML_MAX_ITER: usize = 200;

/// Maximum-likelihood fit of location and scale.
///
/// The scale solves `b = mean(x) - sum(x w)/sum(w)` with `w = exp(-x/b)`; the
/// left minus right side is strictly increasing in `b`, so a bracketed Newton
/// iteration finds the unique root. The location then follows in closed form.
/// Data are standardized first, which makes the fit affine-equivariant.
pub fn fit_gumbel_ml(sample: &[f64]) -> Result<GumbelFit> {
    if sample.len() < 10 {
        return Err(Error::invalid("gumbel fit needs at least 10 observations"));
    }
    check_finite(sample)?;
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let sd = (sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::invalid("gumbel fit of a constant sample"));
    }
    let y: Vec<f64> = sample.iter().map(|x| (x - mean) / sd).collect();
    let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);

    // h(beta) = beta + weighted mean of y, h' = 1 + var_w(y) / beta^2.
    let eval = |beta: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &v in &y {
            let w = (-(v - y_min) / beta).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        let m = s1 / s0;
        let var = (s2 / s0 - m * m).max(0.0);
        (beta + m, 1.0 + var / (beta * beta))
    };

    let mut lo = 1e-9_f64;
    let mut hi = -y_min;
    let mut beta = (6.0f64).sqrt() / std::f64::consts::PI; // moment estimate on the standardized scale
    if !(beta > lo && beta < hi) {
        beta = 0.5 * (lo + hi);
    }
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=ML_MAX_ITER {
        iterations = it;
        let (h, dh) = eval(beta);
        if h == 0.0 {
            converged = true;
            break;
        }
        if h > 0.0 {
            hi = beta;
        } else {
            lo = beta;
        }
        let mut next = beta - h / dh;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - beta).abs() <= 1e-14 * beta.max(1.0) {
            beta = next;
            converged = true;
            break;
        }
        beta = next;
    }
    let alpha = location_given_scale(&y, beta);
    let params = GumbelParams {
        location: mean + sd * alpha,
        scale: sd * beta,
    };
    if !converged {
        return Err(Error::FitNonConvergence {
            iterations,
            last: params,
        });
    }
    let b = params.scale;
    let pi2 = std::f64::consts::PI.powi(2);
    Ok(GumbelFit {
        params,
        se_location: b * ((1.0 + 6.0 * (1.0 - EULER_GAMMA).powi(2) / pi2) / n).sqrt(),
        se_scale: b * (6.0 / (pi2 * n)).sqrt(),
        iterations,
    })
}

fn check_finite(sample: &[f64]) -> Result<()> {
    match sample.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(Error::invalid(format!("sample contains non-finite value {x}"))),
        None => Ok(()),
    }
}

/// Anderson-Darling statistic of values already mapped through the
/// hypothesized cdf. Values are sorted and clamped to `[AD_CLAMP, 1 - AD_CLAMP]`.
pub fn anderson_darling_statistic(u: &[f64]) -> f64 {
    let mut u: Vec<f64> = u
        .iter()
        .map(|&v| v.clamp(AD_CLAMP, 1.0 - AD_CLAMP))
        .collect();
    u.sort_by(f64::total_cmp);
    let n = u.len();
    let nf = n as f64;
    let s: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (u[i].ln() + (1.0 - u[n - 1 - i]).ln()))
        .sum();
    -nf - s / nf
}

/// Anderson-Darling statistic of `sample` against `cdf`.
pub fn anderson_darling<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.len() < 8 {
        return Err(Error::invalid("anderson-darling needs at least 8 observations"));
    }
    check_finite(sample)?;
    let first = sample[0];
    if sample.iter().all(|&x| x == first) {
        return Err(Error::invalid("anderson-darling of a degenerate sample"));
    }
    let u: Vec<f64> = sample.iter().map(|&x| cdf(x)).collect();
    Ok(anderson_darling_statistic(&u))
}

/// Which parameters of the null distribution were estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdCase {
    /// Nothing estimated.
    FullySpecified,
    /// Location estimated, scale known (Gumbel).
    KnownScale,
}

/// (case, alpha, critical value)
const CRITICAL_VALUES: [(AdCase, f64, f64); 4] = [
    (AdCase::FullySpecified, 0.05, 2.492),
    (AdCase::FullySpecified, 0.10, 1.933),
    (AdCase::KnownScale, 0.05, 1.321),
    (AdCase::KnownScale, 0.10, 1.062),
];

pub fn critical_value(case: AdCase, alpha: f64) -> Result<f64> {
    CRITICAL_VALUES
        .iter()
        .find(|(c, a, _)| *c == case && (a - alpha).abs() < 1e-9)
        .map(|&(_, _, v)| v)
        .ok_or_else(|| {
            Error::invalid(format!(
                "no anderson-darling critical value for {case:?} at alpha={alpha}"
            ))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdResult {
    pub statistic: f64,
    pub case: AdCase,
    pub alpha: f64,
    pub critical_value: f64,
    pub reject: bool,
}

pub fn ad_decide(statistic: f64, case: AdCase, alpha: f64) -> Result<AdResult> {
    let critical_value = critical_value(case, alpha)?;
    Ok(AdResult {
        statistic,
        case,
        alpha,
        critical_value,
        reject: statistic > critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::spawn_stream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gumbel_sample(p: GumbelParams, n: usize, seed: u64) -> Vec<f64> {
        let mut s = spawn_stream(seed, 0);
        (0..n).map(|_| p.quantile(s.uniform()).unwrap()).collect()
    }

    #[test]
    fn cdf_values() {
        let p = GumbelParams::new(1.5, 1.0).unwrap();
        assert_relative_eq!(p.cdf(1.5), (-1.0f64).exp(), epsilon = 1e-15);
        let q = GumbelParams::new(0.3, 2.0).unwrap();
        let median = 0.3 - 2.0 * 2f64.ln().ln();
        assert_relative_eq!(q.cdf(median), 0.5, epsilon = 1e-14);
        assert_eq!(q.cdf(1e6), 1.0);
        assert!(gumbel_cdf(f64::NAN, &q).is_err());
        assert!(gumbel_cdf(f64::INFINITY, &q).is_err());
        assert!(GumbelParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn quantile_values() {
        let p = GumbelParams::unit();
        assert!(p.quantile((-1.0f64).exp()).unwrap().abs() < 1e-15);
        assert_relative_eq!(p.quantile(0.5).unwrap(), -(2f64.ln().ln()), epsilon = 1e-15);
        assert_relative_eq!(p.quantile(0.5).unwrap(), 0.366_512_920_581_664_3, epsilon = 1e-12);
        assert!(p.quantile(0.0).is_err());
        assert!(p.quantile(1.0).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        let p = GumbelParams::new(-0.4, 1.7).unwrap();
        let mut s = spawn_stream(5, 0);
        for _ in 0..100 {
            let u = s.uniform();
            assert!((p.cdf(p.quantile(u).unwrap()) - u).abs() < 1e-10);
        }
    }

    #[test]
    fn known_scale_location() {
        let fit = fit_location_known_scale(&[2.0; 7], 1.0).unwrap();
        assert_relative_eq!(fit.location, 2.0, epsilon = 1e-14);

        // -log((1 + 1/2) / 2) = log(4/3)
        let fit = fit_location_known_scale(&[0.0, 2f64.ln()], 1.0).unwrap();
        assert_relative_eq!(fit.location, (4.0f64 / 3.0).ln(), epsilon = 1e-14);
        assert_relative_eq!(fit.std_error, 1.0 / 2f64.sqrt(), epsilon = 1e-15);

        // no overflow far from the origin
        let fit = fit_location_known_scale(&[-2000.0, -2000.0 + 2f64.ln()], 1.0).unwrap();
        assert_relative_eq!(fit.location, -2000.0 + (4.0f64 / 3.0).ln(), epsilon = 1e-10);

        assert!(fit_location_known_scale(&[1.0], 1.0).is_err());
        assert!(fit_location_known_scale(&[1.0, 2.0], -1.0).is_err());
    }

    #[test]
    fn known_scale_recovers_location() {
        let p = GumbelParams::new(0.7, 1.0).unwrap();
        let sample = gumbel_sample(p, 100_000, 11);
        let fit = fit_location_known_scale(&sample, 1.0).unwrap();
        assert!((fit.location - 0.7).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn ml_recovers_unit_gumbel() {
        let sample = gumbel_sample(GumbelParams::unit(), 100_000, 12);
        let fit = fit_gumbel_ml(&sample).unwrap();
        assert!(fit.params.location.abs() < 0.02, "{fit:?}");
        assert!((fit.params.scale - 1.0).abs() < 0.02, "{fit:?}");
        // n = 1e5: se_a = sqrt(1.10866e-5), se_b = sqrt(0.60793e-5)
        assert_relative_eq!(fit.se_location, (1.108_665e-5f64).sqrt(), max_relative = 0.05);
        assert_relative_eq!(fit.se_scale, (0.607_927e-5f64).sqrt(), max_relative = 0.05);
    }

    #[test]
    fn ml_is_affine_equivariant() {
        let sample = gumbel_sample(GumbelParams::new(0.2, 1.3).unwrap(), 2_000, 13);
        let base = fit_gumbel_ml(&sample).unwrap().params;

        let shifted: Vec<f64> = sample.iter().map(|x| x + 5.0).collect();
        let s = fit_gumbel_ml(&shifted).unwrap().params;
        assert_relative_eq!(s.location, base.location + 5.0, epsilon = 1e-9);
        assert_relative_eq!(s.scale, base.scale, epsilon = 1e-9);

        let scaled: Vec<f64> = sample.iter().map(|x| 2.0 * x).collect();
        let s = fit_gumbel_ml(&scaled).unwrap().params;
        assert_relative_eq!(s.location, 2.0 * base.location, epsilon = 1e-9);
        assert_relative_eq!(s.scale, 2.0 * base.scale, epsilon = 1e-9);
    }

    #[test]
    fn ml_rejects_bad_samples() {
        assert!(fit_gumbel_ml(&[1.0; 5]).is_err());
        assert!(fit_gumbel_ml(&[1.0; 20]).is_err());
    }

    #[test]
    fn ad_three_term_expansion() {
        // n = 3, u = (0.1, 0.5, 0.9):
        // A^2 = -3 - (1/3)[1(ln .1 + ln .1) + 3(ln .5 + ln .5) + 5(ln .9 + ln .9)]
        let expected =
            -3.0 - (2.0 * 0.1f64.ln() + 6.0 * 0.5f64.ln() + 10.0 * 0.9f64.ln()) / 3.0;
        let got = anderson_darling_statistic(&[0.9, 0.1, 0.5]);
        assert_relative_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn ad_near_perfect_fit() {
        let n = 100;
        let u: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let a2 = anderson_darling(&u, |x| x).unwrap();
        assert!(a2 >= 0.0 && a2 < 0.2, "A2 = {a2}");
    }

    #[test]
    fn ad_guards() {
        assert!(anderson_darling(&[0.5; 3], |x| x).is_err());
        assert!(anderson_darling(&[0.5; 10], |x| x).is_err());
        // extreme cdf values are clamped rather than producing infinities
        let mut u = vec![0.0, 1.0];
        u.extend((1..=8).map(|i| i as f64 / 9.0));
        assert!(anderson_darling(&u, |x| x).unwrap().is_finite());
    }

    #[test]
    fn decisions() {
        let r = ad_decide(0.8646, AdCase::KnownScale, 0.05).unwrap();
        assert!(!r.reject);
        assert_eq!(r.critical_value, 1.321);
        assert!(ad_decide(1.5, AdCase::KnownScale, 0.05).unwrap().reject);
        assert!(!ad_decide(2.0, AdCase::FullySpecified, 0.05).unwrap().reject);
        assert_eq!(critical_value(AdCase::KnownScale, 0.10).unwrap(), 1.062);
        assert!(ad_decide(1.0, AdCase::FullySpecified, 0.01).is_err());
    }

    fn null_quantiles(case: AdCase, reps: usize, n: usize) -> (f64, f64) {
        let mut s = spawn_stream(2024, case as u64);
        let unit = GumbelParams::unit();
        let mut stats: Vec<f64> = (0..reps)
            .map(|_| {
                let x: Vec<f64> = (0..n).map(|_| unit.quantile(s.uniform()).unwrap()).collect();
                match case {
                    AdCase::FullySpecified => anderson_darling(&x, |v| unit.cdf(v)).unwrap(),
                    AdCase::KnownScale => {
                        let a = fit_location_known_scale(&x, 1.0).unwrap().location;
                        let p = GumbelParams::new(a, 1.0).unwrap();
                        anderson_darling(&x, |v| p.cdf(v)).unwrap()
                    }
                }
            })
            .collect();
        stats.sort_by(f64::total_cmp);
        let q = |p: f64| stats[(p * reps as f64) as usize];
        (q(0.90), q(0.95))
    }

    // The tabulated critical values are checked against the simulated null
    // distribution of the statistic.
    #[test]
    fn critical_values_match_simulated_null() {
        let (q90, q95) = null_quantiles(AdCase::FullySpecified, 40_000, 40);
        assert!((q95 - 2.492).abs() < 0.1, "q95 = {q95}");
        assert!((q90 - 1.933).abs() < 0.07, "q90 = {q90}");

        let (q90, q95) = null_quantiles(AdCase::KnownScale, 40_000, 40);
        assert!((q95 - 1.321).abs() < 0.06, "q95 = {q95}");
        assert!((q90 - 1.062).abs() < 0.05, "q90 = {q90}");
    }

    #[test]
    fn null_rejection_rate() {
        let unit = GumbelParams::unit();
        let rejections = (0..200u64)
            .filter(|&rep| {
                let x = gumbel_sample(unit, 500, 10_000 + rep);
                let a2 = anderson_darling(&x, |v| unit.cdf(v)).unwrap();
                ad_decide(a2, AdCase::FullySpecified, 0.05).unwrap().reject
            })
            .count();
        assert!((2..=18).contains(&rejections), "{rejections} rejections");
    }

    proptest! {
        #[test]
        fn cdf_is_monotone(a in -5.0f64..5.0, b in 0.1f64..5.0, x in -20.0f64..20.0, dx in 1e-3f64..5.0) {
            let p = GumbelParams::new(a, b).unwrap();
            prop_assert!(p.cdf(x) <= p.cdf(x + dx));
        }

        #[test]
        fn location_fit_is_equivariant(shift in -50.0f64..50.0, factor in 0.1f64..10.0) {
            let sample = [0.3, -0.2, 1.1, 2.5, 0.0, -1.0];
            let base = fit_location_known_scale(&sample, 1.0).unwrap().location;
            let mapped: Vec<f64> = sample.iter().map(|x| factor * x + shift).collect();
            let fit = fit_location_known_scale(&mapped, factor).unwrap().location;
            prop_assert!((fit - (factor * base + shift)).abs() < 1e-9 * (1.0 + shift.abs() + factor));
        }

        #[test]
        fn ml_fit_maximizes_the_likelihood(seed in 0u64..1000, n in 10usize..400, a in -3.0f64..3.0, b in 0.2f64..4.0) {
            let x = gumbel_sample(GumbelParams::new(a, b).unwrap(), n, seed);
            let loglik = |a: f64, b: f64| {
                x.iter().map(|&v| {
                    let z = (v - a) / b;
                    -b.ln() - z - (-z).exp()
                }).sum::<f64>()
            };
            let fit = fit_gumbel_ml(&x).unwrap().params;
            let best = loglik(fit.location, fit.scale);
            for (da, db) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3), (1e-3, 1e-3), (-1e-3, -1e-3)] {
                let s = fit.scale;
                prop_assert!(best >= loglik(fit.location + da * s, s * (1.0 + db)) - 1e-9 * best.abs());
            }
        }
    }
}
