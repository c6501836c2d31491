//! Browser bindings for the demo page in `www/`. Each export is a thin
//! wrapper over a plain function so the numerics can be tested natively.

use std::sync::Arc;

use fraclap::fourier::{compare_methods, fft_fractional_derivative, lorentz_error, TorusGrid};
use fraclap::functions::Builtin;
use fraclap::riesz::{fractional_derivative, DomainPartition, RationalOrder, TriDomainGrid};
use fraclap::soliton::{
    default_schedule, mass, trace_alpha, ContinuationStep, NewtonOptions, SolitonProblem,
};
use wasm_bindgen::prelude::*;

/// Orders below this need narrower middle domains than the demo offers.
const LOWEST_SOLITON_ORDER: f64 = 0.6;

fn order(text: &str) -> Result<RationalOrder, String> {
    RationalOrder::parse(text).map(|(o, _)| o).map_err(|e| e.to_string())
}

fn grid(alpha: &str, b: f64, n: usize) -> Result<Arc<TriDomainGrid>, String> {
    let delta = 1e-2f64.min(0.5 * b.min(1.0));
    let part = DomainPartition::uniform(-b, b, delta, n).map_err(|e| e.to_string())?;
    TriDomainGrid::new(order(alpha)?, part).map(Arc::new).map_err(|e| e.to_string())
}

fn linspace(half_width: f64, samples: usize) -> Vec<f64> {
    let m = samples.max(2) - 1;
    (0..=m).map(|i| -half_width + 2.0 * half_width * i as f64 / m as f64).collect()
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Curve {
    x: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    exact: Vec<f64>,
    error: f64,
    order: String,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn du(&self) -> Vec<f64> {
        self.du.clone()
    }

    /// Closed form where one exists, otherwise NaN.
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    /// Largest deviation from the closed form on the plotted points, or NaN.
    #[wasm_bindgen(getter)]
    pub fn error(&self) -> f64 {
        self.error
    }

    #[wasm_bindgen(getter)]
    pub fn order(&self) -> String {
        self.order.clone()
    }
}

pub fn derivative_curve_impl(
    alpha: &str,
    func: &str,
    b: f64,
    n: usize,
    half_width: f64,
    samples: usize,
) -> Result<Curve, String> {
    let f: Builtin = func.parse().map_err(|e: fraclap::Error| e.to_string())?;
    let g = grid(alpha, b, n)?;
    let a = g.order().alpha();
    let u = f.sample(g.clone());
    let du = fractional_derivative(&u).map_err(|e| e.to_string())?;
    let x = linspace(half_width, samples);
    let exact: Vec<f64> = x
        .iter()
        .map(|&x| f.exact_derivative(a, x).unwrap_or(f64::NAN))
        .collect();
    let dv: Vec<f64> = x.iter().map(|&x| du.value_at(x)).collect();
    let error = dv
        .iter()
        .zip(&exact)
        .filter(|(_, e)| e.is_finite())
        .map(|(d, e)| (d - e).abs())
        .fold(f64::NAN, f64::max);
    Ok(Curve {
        u: x.iter().map(|&x| u.value_at(x)).collect(),
        du: dv,
        exact,
        error,
        order: g.order().to_string(),
        x,
    })
}

/// `D^α` of a builtin function (`lorentz`, `gauss`, `powerlaw`) on
/// `samples` points of `[-half_width, half_width]`.
#[wasm_bindgen]
pub fn derivative_curve(
    alpha: &str,
    func: &str,
    b: f64,
    n: usize,
    half_width: f64,
    samples: usize,
) -> Result<Curve, JsError> {
    derivative_curve_impl(alpha, func, b, n, half_width, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct FftComparison {
    x: Vec<f64>,
    spectral: Vec<f64>,
    dft: Vec<f64>,
    max_difference: f64,
    dft_error: f64,
}

#[wasm_bindgen]
impl FftComparison {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn spectral(&self) -> Vec<f64> {
        self.spectral.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn dft(&self) -> Vec<f64> {
        self.dft.clone()
    }

    /// Largest gap between the two methods inside the cutoff.
    #[wasm_bindgen(getter)]
    pub fn max_difference(&self) -> f64 {
        self.max_difference
    }

    /// Largest error of the DFT result against the closed form.
    #[wasm_bindgen(getter)]
    pub fn dft_error(&self) -> f64 {
        self.dft_error
    }
}

pub fn compare_fft_impl(alpha: &str, half_period: f64, log2_len: u32, half_width: f64) -> Result<FftComparison, String> {
    if !(1..=20).contains(&log2_len) {
        return Err(format!("log2 of the sample count must lie in 1..=20, got {log2_len}"));
    }
    let g = grid(alpha, 1.0, 120)?;
    let a = g.order().alpha();
    let u = Builtin::Lorentz.sample(g);
    let torus = TorusGrid::new(half_period, 1 << log2_len).map_err(|e| e.to_string())?;
    let cutoff = 100f64.min(0.5 * std::f64::consts::PI * half_period);
    let summary = compare_methods(&u, &torus, cutoff).map_err(|e| e.to_string())?;
    let dft_error = lorentz_error(a, &torus).map_err(|e| e.to_string())?;

    let values = torus.map(|x| 1.0 / (1.0 + x * x));
    let d = fft_fractional_derivative(&values, a, &torus).map_err(|e| e.to_string())?;
    let du = fractional_derivative(&u).map_err(|e| e.to_string())?;
    let half_width = half_width.min(cutoff);
    let picked: Vec<usize> = (0..torus.len()).filter(|&i| torus.sample(i).abs() <= half_width).collect();
    // at most 400 plotted points
    let stride = picked.len().div_ceil(400).max(1);
    let picked: Vec<usize> = picked.into_iter().step_by(stride).collect();
    Ok(FftComparison {
        x: picked.iter().map(|&i| torus.sample(i)).collect(),
        spectral: picked.iter().map(|&i| du.value_at(torus.sample(i))).collect(),
        dft: picked.iter().map(|&i| d[i]).collect(),
        max_difference: summary.max_difference,
        dft_error,
    })
}

/// The Lorentzian differentiated both ways, the DFT on the torus
/// `[-πL, πL)` with `2^log2_len` samples.
#[wasm_bindgen]
pub fn compare_fft(alpha: &str, half_period: f64, log2_len: u32, half_width: f64) -> Result<FftComparison, JsError> {
    compare_fft_impl(alpha, half_period, log2_len, half_width).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Soliton {
    x: Vec<f64>,
    profile: Vec<f64>,
    residuals: Vec<f64>,
    orders: Vec<String>,
    converged: bool,
    peak: f64,
    mass: f64,
}

#[wasm_bindgen]
impl Soliton {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn profile(&self) -> Vec<f64> {
        self.profile.clone()
    }

    /// Newton residual history of the final stage.
    #[wasm_bindgen(getter)]
    pub fn residuals(&self) -> Vec<f64> {
        self.residuals.clone()
    }

    /// Orders passed through, the target last.
    #[wasm_bindgen(getter)]
    pub fn orders(&self) -> Vec<String> {
        self.orders.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    #[wasm_bindgen(getter)]
    pub fn peak(&self) -> f64 {
        self.peak
    }

    #[wasm_bindgen(getter)]
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

pub fn solve_soliton_impl(alpha: &str, n: usize, half_width: f64, samples: usize) -> Result<Soliton, String> {
    let target = order(alpha)?;
    if target.alpha() < LOWEST_SOLITON_ORDER || target.alpha() >= 1.0 {
        return Err(format!("the demo solves orders in [{LOWEST_SOLITON_ORDER}, 1), got {target}"));
    }
    let part = DomainPartition::uniform(-1.0, 1.0, 1e-2, n).map_err(|e| e.to_string())?;
    let mut steps: Vec<ContinuationStep> = default_schedule()
        .into_iter()
        .filter(|s| s.order.alpha() > target.alpha())
        .map(|s| ContinuationStep { partition: part, ..s })
        .collect();
    steps.push(ContinuationStep { order: target, partition: part });
    let template = SolitonProblem::new(steps[0].order, part, 1.0, 0.5, 2).map_err(|e| e.to_string())?;
    let outcome = trace_alpha(&template, &steps, None, &NewtonOptions::default()).map_err(|e| e.to_string())?;
    if let Some(msg) = &outcome.halted {
        return Err(msg.clone());
    }
    let last = outcome.branch.last().ok_or("no stage was solved")?;
    let q = &last.solution;
    let x = linspace(half_width, samples);
    Ok(Soliton {
        profile: x.iter().map(|&x| q.value_at(x)).collect(),
        x,
        residuals: last.record.residual_norms.clone(),
        orders: outcome.branch.iter().map(|s| s.problem.order().to_string()).collect(),
        converged: last.record.converged,
        peak: q.value_at(0.0),
        mass: mass(q).map_err(|e| e.to_string())?,
    })
}

/// Solitary wave `Q + D^αQ = Q²/2` of speed one, continued from the α = 1
/// profile with degree `n` in every domain.
#[wasm_bindgen]
pub fn solve_soliton(alpha: &str, n: usize, half_width: f64, samples: usize) -> Result<Soliton, JsError> {
    solve_soliton_impl(alpha, n, half_width, samples).map_err(|e| JsError::new(&e))
}
