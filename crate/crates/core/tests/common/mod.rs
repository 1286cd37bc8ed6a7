//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use maxfield::shape::{log_density, ShapeFamily};
use rand::rngs::StdRng;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

/// Kendall's tau-a by comparing every pair, ties ordered by position.
pub fn brute_force_tau(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            // with i < j a tie counts as "first below second"
            let su = u[i] <= u[j];
            let sv = v[i] <= v[j];
            if su == sv {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    (concordant - discordant) as f64 / total
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `(integral of f, integral of x^2 f)` for one shape density.
pub fn shape_moments(family: ShapeFamily, s: f64) -> (f64, f64) {
    let f = |x: f64| log_density(family, x, s).exp();
    let g = |x: f64| x * x * log_density(family, x, s).exp();
    let pieces: Vec<(f64, f64)> = match family {
        ShapeFamily::Gauss => vec![(-40.0 * s, 40.0 * s)],
        // kink at the origin
        ShapeFamily::Laplace => vec![(-60.0 * s, 0.0), (0.0, 60.0 * s)],
        ShapeFamily::Uniform => {
            let w = s * 3f64.sqrt();
            vec![(-w, w)]
        }
    };
    let n = 200_000;
    pieces.iter().fold((0.0, 0.0), |(m0, m2), &(a, b)| {
        (m0 + simpson(f, a, b, n), m2 + simpson(g, a, b, n))
    })
}

/// Standard deviations past the `exp(y)`-tilted mean `v/2` at which the
/// direct oracle stops; the skipped mass is below `1 - Phi(5) = 2.9e-7`.
pub const ORACLE_TAIL_SDS: f64 = 5.0;

/// One copy of the single-site magnitude construction, simulated directly:
/// the maximum of `m_i + Y_i` over `m_i = -log(Gamma_i)` with
/// `Y_i ~ Normal(-v/2, v)`.
pub fn oracle_copy(variance: f64, rng: &mut StdRng) -> f64 {
    let sd = variance.sqrt();
    let mut z = f64::NEG_INFINITY;
    let mut gamma = 0.0;
    loop {
        gamma += rng.sample::<f64, _>(Exp1);
        let m = -gamma.ln();
        if m + 0.5 * variance + ORACLE_TAIL_SDS * sd < z {
            return z;
        }
        let y = -0.5 * variance + sd * rng.sample::<f64, _>(StandardNormal);
        z = z.max(m + y);
    }
}

pub fn oracle_block_maximum(variance: f64, k: usize, rng: &mut StdRng) -> f64 {
    (0..k).map(|_| oracle_copy(variance, rng)).fold(f64::NEG_INFINITY, f64::max)
}

/// Sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0)
}

pub fn random_vector(rng: &mut StdRng, n: usize, levels: Option<u32>) -> Vec<f64> {
    (0..n)
        .map(|_| match levels {
            Some(l) => rng.random_range(0..l) as f64,
            None => rng.random::<f64>(),
        })
        .collect()
}
