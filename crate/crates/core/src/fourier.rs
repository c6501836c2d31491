//! Fractional derivatives on the torus `x ∈ L[-π, π]` via the DFT.
//!
//! This is the classical approach the multi-domain method is measured
//! against: `D^α` acts as the symbol `|k|^α` on the discrete Fourier modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::functions::lorentz_derivative;
use crate::riesz::{fractional_derivative, TriDomainFunction};

/// Sizes above this are refused to keep memory bounded.
pub const MAX_FFT_LEN: usize = 1 << 22;

/// Equidistant samples `x_n = -πL + n h`, `n = 1..N`, `h = 2πL/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    half_period: f64,
    len: usize,
}

impl TorusGrid {
    pub fn new(half_period: f64, len: usize) -> Result<Self> {
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {half_period}")));
        }
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N_FFT must be a power of two >= 2, got {len}")));
        }
        if len > MAX_FFT_LEN {
            return Err(Error::InvalidGrid(format!(
                "N_FFT={len} exceeds the limit {MAX_FFT_LEN}"
            )));
        }
        Ok(Self { half_period, len })
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.half_period / self.len as f64
    }

    pub fn sample(&self, n: usize) -> f64 {
        -PI * self.half_period + (n + 1) as f64 * self.spacing()
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.len).map(|n| self.sample(n)).collect()
    }

    /// Wavenumber of DFT bin `j` in wrap-around order.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let j = j as f64;
        let n = self.len as f64;
        if j <= n / 2.0 {
            j / self.half_period
        } else {
            (j - n) / self.half_period
        }
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.wavenumber(j)).collect()
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.len as f64 / (2.0 * self.half_period)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len).map(|n| f(self.sample(n))).collect()
    }
}

/// In-place transform. The forward direction is unnormalised
/// (`Σ v_n e^{-2πi jn/N}`); the inverse divides by `N`.
pub fn fft(data: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("transform length {n} is not a power of two")));
    }
    let direction = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
    FftPlanner::new().plan_fft(n, direction).process(data);
    if inverse {
        let scale = 1.0 / n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
    Ok(())
}

fn to_complex(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Applies an even real Fourier multiplier to real samples.
pub fn apply_symbol(values: &[f64], grid: &TorusGrid, symbol: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    check_len(grid.len(), values.len())?;
    let mut data = to_complex(values);
    fft(&mut data, false)?;
    for (j, v) in data.iter_mut().enumerate() {
        *v *= symbol(grid.wavenumber(j));
    }
    fft(&mut data, true)?;
    let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residue = data.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    let limit = 1e-10 * norm.max(f64::MIN_POSITIVE);
    if residue > limit {
        return Err(Error::ImaginaryResidue { residue, limit });
    }
    Ok(data.into_iter().map(|v| v.re).collect())
}

/// `D^α` as the symbol `|k|^α`; the Nyquist mode is kept as is.
pub fn fft_fractional_derivative(values: &[f64], alpha: f64, grid: &TorusGrid) -> Result<Vec<f64>> {
    apply_symbol(values, grid, |k| if k == 0.0 { 0.0 } else { k.abs().powf(alpha) })
}

/// Max error of the DFT derivative of `1/(1+x²)` against the closed form.
pub fn lorentz_error(alpha: f64, grid: &TorusGrid) -> Result<f64> {
    let u = grid.map(|x| 1.0 / (1.0 + x * x));
    let d = fft_fractional_derivative(&u, alpha, grid)?;
    Ok(grid
        .samples()
        .iter()
        .zip(&d)
        .fold(0.0f64, |m, (&x, &v)| m.max((v - lorentz_derivative(alpha, x)).abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub half_period: f64,
    pub n_fft: usize,
    pub error: f64,
}

/// Grids of the two sweeps: resolutions at a fixed torus, and torus sizes
/// at a fixed resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub fixed_half_period: f64,
    pub resolutions: Vec<usize>,
    pub fixed_resolution: usize,
    pub half_periods: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            fixed_half_period: 1e3,
            resolutions: vec![1 << 12, 1 << 13, 1 << 14, 1 << 15],
            fixed_resolution: 1 << 19,
            half_periods: vec![1e2, 1e3, 1e4, 1e5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub by_resolution: Vec<SweepRow>,
    pub by_half_period: Vec<SweepRow>,
}

/// Lorentz errors of the DFT derivative over both sweeps.
pub fn table1_sweep(alpha: f64, config: &SweepConfig) -> Result<SweepTable> {
    let row = |l: f64, n: usize| -> Result<SweepRow> {
        let grid = TorusGrid::new(l, n)?;
        Ok(SweepRow {
            half_period: l,
            n_fft: n,
            error: lorentz_error(alpha, &grid)?,
        })
    };
    Ok(SweepTable {
        by_resolution: config
            .resolutions
            .iter()
            .map(|&n| row(config.fixed_half_period, n))
            .collect::<Result<_>>()?,
        by_half_period: config
            .half_periods
            .iter()
            .map(|&l| row(l, config.fixed_resolution))
            .collect::<Result<_>>()?,
    })
}

/// DFT and multi-domain derivatives of the same function on torus samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Max `|D_dft - D_multi|` over the compared samples.
    pub max_difference: f64,
    /// Sample at which the max is attained.
    pub worst_x: f64,
    pub points_compared: usize,
    /// `|x|` cutoff of the compared samples.
    pub cutoff: f64,
    /// `|DFT(u)_k|/N` for `k = 0..N/2`.
    pub input_spectrum: Vec<f64>,
    /// `|DFT(D^α u)_k|/N` for `k = 0..N/2`.
    pub derivative_spectrum: Vec<f64>,
}

impl Comparison {
    /// Largest magnitude among the highest `1/64` of the modes, relative to the largest.
    pub fn spectral_tail(spectrum: &[f64]) -> f64 {
        let max = spectrum.iter().fold(0.0f64, |m, &v| m.max(v));
        if max == 0.0 {
            return 0.0;
        }
        let start = spectrum.len() - (spectrum.len() / 64).max(1);
        spectrum[start..].iter().fold(0.0f64, |m, &v| m.max(v)) / max
    }
}

fn half_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    let mut data = to_complex(values);
    fft(&mut data, false)?;
    Ok(data[..=n / 2].iter().map(|v| v.norm() / n as f64).collect())
}

/// Compares the DFT derivative of `u` (sampled on `grid`) with the
/// multi-domain derivative on the samples with `|x| ≤ cutoff`.
pub fn compare_methods(u: &TriDomainFunction, grid: &TorusGrid, cutoff: f64) -> Result<Comparison> {
    let alpha = u.order().alpha();
    let values = grid.map(|x| u.value_at(x));
    let dft = fft_fractional_derivative(&values, alpha, grid)?;
    let multi = fractional_derivative(u)?;
    let mut max_difference = 0.0f64;
    let mut worst_x = 0.0;
    let mut points_compared = 0;
    for (x, d) in grid.samples().into_iter().zip(&dft) {
        if x.abs() > cutoff {
            continue;
        }
        let diff = (d - multi.value_at(x)).abs();
        if diff > max_difference {
            max_difference = diff;
            worst_x = x;
        }
        points_compared += 1;
    }
    Ok(Comparison {
        max_difference,
        worst_x,
        points_compared,
        cutoff,
        input_spectrum: half_spectrum(&values)?,
        derivative_spectrum: half_spectrum(&dft)?,
    })
}

/// Outcome of [`dft_soliton`].
#[derive(Debug, Clone, PartialEq)]
pub struct DftSoliton {
    pub profile: Vec<f64>,
    pub iterations: usize,
    /// `‖cQ + D^αQ - κQⁿ‖∞` of the final iterate.
    pub residual: f64,
}

/// Coefficients of `cQ + D^αQ = κQⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEquation {
    pub alpha: f64,
    pub c: f64,
    pub kappa: f64,
    pub n_power: u32,
}

/// Solitary wave on the torus by Petviashvili iteration from `initial`.
pub fn dft_soliton(
    eq: &WaveEquation,
    grid: &TorusGrid,
    initial: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<DftSoliton> {
    check_len(grid.len(), initial.len())?;
    let WaveEquation {
        alpha,
        c,
        kappa,
        n_power,
    } = *eq;
    if n_power < 2 {
        return Err(Error::InvalidProblem(format!("nonlinearity power {n_power} < 2")));
    }
    let n = grid.len();
    let symbol: Vec<f64> = (0..n)
        .map(|j| c + grid.wavenumber(j).abs().powf(alpha))
        .collect();
    let gamma = n_power as f64 / (n_power as f64 - 1.0);
    let mut q_hat = to_complex(initial);
    fft(&mut q_hat, false)?;
    let mut profile = initial.to_vec();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut nl = to_complex(&profile.iter().map(|&q| kappa * q.powi(n_power as i32)).collect::<Vec<_>>());
        fft(&mut nl, false)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            num += symbol[j] * q_hat[j].norm_sqr();
            den += (q_hat[j].conj() * nl[j]).re;
        }
        if den == 0.0 {
            return Err(Error::Solver("stabilising factor is undefined (zero iterate)".into()));
        }
        let s = (num / den).powf(gamma);
        for j in 0..n {
            q_hat[j] = s * nl[j] / symbol[j];
        }
        let mut q = q_hat.clone();
        fft(&mut q, true)?;
        profile = q.iter().map(|v| v.re).collect();

        // residual in physical space
        let dq = fft_fractional_derivative(&profile, alpha, grid)?;
        residual = profile
            .iter()
            .zip(&dq)
            .fold(0.0f64, |m, (&q, &d)| m.max((c * q + d - kappa * q.powi(n_power as i32)).abs()));
        if !residual.is_finite() {
            return Err(Error::Solver(format!("iteration {it} produced a non-finite iterate")));
        }
        if residual <= tol {
            return Ok(DftSoliton {
                profile,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::Solver(format!(
        "torus iteration did not reach {tol:e} in {max_iter} steps (residual {residual:e})"
    )))
}
