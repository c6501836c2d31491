//! Builtin test functions with known fractional derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::riesz::{Domain, RationalOrder, TriDomainFunction, TriDomainGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `1/(1+x²)`
    Lorentz,
    /// `e^{-x²}`
    Gauss,
    /// `(1+x²)^{-(1+α)/2}`, which decays exactly like `|x|^{-1-α}`.
    Powerlaw,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Lorentz, Builtin::Gauss, Builtin::Powerlaw];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Lorentz => "lorentz",
            Builtin::Gauss => "gauss",
            Builtin::Powerlaw => "powerlaw",
        }
    }

    pub fn value(&self, alpha: f64, x: f64) -> f64 {
        match self {
            Builtin::Lorentz => 1.0 / (1.0 + x * x),
            Builtin::Gauss => (-x * x).exp(),
            Builtin::Powerlaw => (1.0 + x * x).powf(-0.5 * (1.0 + alpha)),
        }
    }

    /// `u(x)|x|^{1+α}` at `|x| = ξ^{-q}`, including the limit at `ξ = 0`.
    pub fn trace(&self, order: RationalOrder, xi: f64) -> f64 {
        let (p, q) = (order.p() as i32, order.q() as i32);
        match self {
            Builtin::Lorentz => {
                let s = xi.powi(q);
                xi.powi(q - p) / (s * s + 1.0)
            }
            Builtin::Gauss => {
                if xi == 0.0 {
                    return 0.0;
                }
                let inv = xi.powi(-2 * q);
                if inv > 700.0 {
                    0.0
                } else {
                    (-inv).exp() * xi.powi(-q - p)
                }
            }
            Builtin::Powerlaw => (1.0 + xi.powi(2 * q)).powf(-0.5 * (1.0 + order.alpha())),
        }
    }

    /// Samples the function on every node of `grid`.
    pub fn sample(&self, grid: Arc<TriDomainGrid>) -> TriDomainFunction {
        let order = grid.order();
        let alpha = order.alpha();
        TriDomainFunction::from_traces(
            grid,
            |xi| self.trace(order, xi),
            |x| self.value(alpha, x),
            |xi| self.trace(order, xi),
        )
    }

    /// Exact `D^α u(x)` where a closed form is available.
    pub fn exact_derivative(&self, alpha: f64, x: f64) -> Option<f64> {
        match self {
            Builtin::Lorentz => Some(lorentz_derivative(alpha, x)),
            Builtin::Gauss if x == 0.0 => Some(gauss_derivative_at_zero(alpha)),
            _ => None,
        }
    }

    /// Exact `|x|^{1+α} D^α u` at a local coordinate of `domain`, or the
    /// plain derivative in the middle domain.
    pub fn exact_scaled_derivative(&self, order: RationalOrder, domain: Domain, coord: f64) -> Option<f64> {
        let alpha = order.alpha();
        match (self, domain) {
            (_, Domain::Middle) => self.exact_derivative(alpha, coord),
            (Builtin::Lorentz, _) => {
                let sign = if domain == Domain::Right { 1.0 } else { -1.0 };
                let z = Complex64::new(coord.powi(order.q() as i32), -sign);
                Some(gamma(1.0 + alpha) * z.powf(-1.0 - alpha).re)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Input(format!("unknown function '{s}' (lorentz, gauss, powerlaw)")))
    }
}

/// `D^α (1+x²)^{-1} = Re Γ(1+α)(1-ix)^{-1-α}`.
pub fn lorentz_derivative(alpha: f64, x: f64) -> f64 {
    let z = Complex64::new(1.0, -x);
    gamma(1.0 + alpha) * z.powf(-1.0 - alpha).re
}

/// `D^α e^{-x²}` at `x = 0`: `2^α Γ((1+α)/2)/√π`.
pub fn gauss_derivative_at_zero(alpha: f64) -> f64 {
    2f64.powf(alpha) * gamma(0.5 * (1.0 + alpha)) / PI.sqrt()
}
