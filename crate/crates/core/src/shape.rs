//! Random functions `Y(x) = log f(x)` built from centred one-dimensional
//! densities whose standard deviation `s` follows the event magnitude,
//! `s = exp(d (m - c))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gauss::MagnitudeLink;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeFamily {
    Gauss,
    Laplace,
    Uniform,
}

impl ShapeFamily {
    pub const ALL: [ShapeFamily; 3] = [ShapeFamily::Gauss, ShapeFamily::Laplace, ShapeFamily::Uniform];

    /// `kappa` in `sup_x log f(x; s) = -log(s) - kappa`.
    pub fn peak_offset(self) -> f64 {
        match self {
            // log sqrt(2 pi)
            ShapeFamily::Gauss => 0.918_938_533_204_672_8,
            // log(2 / sqrt 2) = log sqrt 2
            ShapeFamily::Laplace => 0.346_573_590_279_972_65,
            // log(2 sqrt 3)
            ShapeFamily::Uniform => 1.242_453_324_894_000_3,
        }
    }

    /// Radius outside which the density vanishes, if any.
    pub fn support_radius(self, s: f64) -> Option<f64> {
        match self {
            ShapeFamily::Uniform => Some(s * 3f64.sqrt()),
            _ => None,
        }
    }
}

impl fmt::Display for ShapeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeFamily::Gauss => "gauss",
            ShapeFamily::Laplace => "laplace",
            ShapeFamily::Uniform => "uniform",
        })
    }
}

impl FromStr for ShapeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gauss" | "gaussian" | "normal" => Ok(ShapeFamily::Gauss),
            "laplace" => Ok(ShapeFamily::Laplace),
            "uniform" => Ok(ShapeFamily::Uniform),
            other => Err(Error::Config(format!("unknown shape family `{other}`"))),
        }
    }
}

pub fn scale_from_magnitude(m: f64, link: &MagnitudeLink) -> f64 {
    link.scale(m)
}

/// `log f(x; s)` for the centred density with standard deviation `s`.
///
/// Laplace uses rate scale `s / sqrt 2`, uniform the half-width `s sqrt 3`.
/// Outside the uniform support the result is `-inf`.
#[inline]
pub fn log_density(family: ShapeFamily, x: f64, s: f64) -> f64 {
    match family {
        ShapeFamily::Gauss => -s.ln() - family.peak_offset() - 0.5 * (x / s) * (x / s),
        ShapeFamily::Laplace => {
            let beta = s * std::f64::consts::FRAC_1_SQRT_2;
            -(2.0 * beta).ln() - x.abs() / beta
        }
        ShapeFamily::Uniform => {
            let w = s * 3f64.sqrt();
            if x.abs() <= w {
                -(2.0 * w).ln()
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// `sup_x log f(x; s)`, attained at `x = 0`.
#[inline]
pub fn peak_log_density(family: ShapeFamily, s: f64) -> f64 {
    -s.ln() - family.peak_offset()
}
