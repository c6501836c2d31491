//! Solitary waves `cQ + D^αQ = κQⁿ` on the three-domain grid.

mod gmres;
mod invariants;
mod newton;

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

pub use gmres::{gmres, gmres_preconditioned, GmresOptions, GmresOutcome};
pub use invariants::{hamiltonian, mass, parity_defect, power_integral, rescale_soliton};
pub use newton::{
    default_schedule, newton_solve, reseed, trace_alpha, ContinuationStep, ConvergenceRecord, NewtonOptions, Preconditioner,
    Status, TraceOutcome, TracedSolution, TAIL_COEFFICIENTS,
};

use crate::error::{check_len, Error, Result};
use crate::fourier::{fft, TorusGrid};
use crate::riesz::{
    apply_operator, assemble_operator, Domain, DomainPartition, RationalOrder, TriDomainFunction,
    TriDomainGrid,
};
use num_complex::Complex64;

/// `4/(1+x²)`, the α = 1 solitary wave.
pub fn benjamin_ono_profile(x: f64) -> f64 {
    4.0 / (1.0 + x * x)
}

/// `4/(1+x²)` with outer traces for `order`.
pub fn benjamin_ono(grid: Arc<TriDomainGrid>) -> TriDomainFunction {
    let (p, q) = (grid.order().p() as i32, grid.order().q() as i32);
    let trace = move |xi: f64| {
        let s = xi.powi(q);
        4.0 * xi.powi(q - p) / (1.0 + s * s)
    };
    TriDomainFunction::from_traces(grid, trace, benjamin_ono_profile, trace)
}

/// Profile equation `cQ + D^αQ - κQⁿ = 0` on a fixed partition.
#[derive(Debug, Clone)]
pub struct SolitonProblem {
    pub c: f64,
    pub kappa: f64,
    pub n_power: u32,
    grid: Arc<TriDomainGrid>,
    // ξ^{p+q} in the outer blocks, 1 in the middle
    unscale: Vec<f64>,
    operator: Arc<OnceLock<DMatrix<f64>>>,
}

impl SolitonProblem {
    pub fn new(order: RationalOrder, partition: DomainPartition, c: f64, kappa: f64, n_power: u32) -> Result<Self> {
        if 3 * order.p() <= order.q() {
            return Err(Error::InvalidProblem(format!(
                "α = {order} ≤ 1/3: no solitary waves of finite energy"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidProblem(format!("speed c = {c} must be positive")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidProblem(format!("κ = {kappa} must be positive")));
        }
        if n_power < 2 {
            return Err(Error::InvalidProblem(format!("nonlinearity power {n_power} < 2")));
        }
        let grid = Arc::new(TriDomainGrid::new(order, partition)?);
        let mut unscale = Vec::with_capacity(grid.total_len());
        for d in Domain::ALL {
            for &t in grid.nodes(d) {
                unscale.push(if d == Domain::Middle { 1.0 } else { grid.unscale_factor(t) });
            }
        }
        Ok(Self {
            c,
            kappa,
            n_power,
            grid,
            unscale,
            operator: Arc::default(),
        })
    }

    /// Fractional KdV: `κ = 1/2`, `n = 2`.
    pub fn fkdv(order: RationalOrder, partition: DomainPartition, c: f64) -> Result<Self> {
        Self::new(order, partition, c, 0.5, 2)
    }

    pub fn order(&self) -> RationalOrder {
        self.grid.order()
    }

    pub fn partition(&self) -> &DomainPartition {
        self.grid.partition()
    }

    pub fn grid(&self) -> &Arc<TriDomainGrid> {
        &self.grid
    }

    /// Same equation on a different order and partition.
    pub fn with_grid(&self, order: RationalOrder, partition: DomainPartition) -> Result<Self> {
        Self::new(order, partition, self.c, self.kappa, self.n_power)
    }

    /// Same equation at another speed.
    pub fn with_speed(&self, c: f64, partition: DomainPartition) -> Result<Self> {
        Self::new(self.order(), partition, c, self.kappa, self.n_power)
    }

    fn check_grid(&self, q: &TriDomainFunction) -> Result<()> {
        if q.order() != self.order() || q.grid().partition() != self.partition() {
            return Err(Error::InvalidProblem(
                "iterate lives on a different order or partition than the problem".into(),
            ));
        }
        Ok(())
    }

    /// `κ Qⁿ⁻¹` per stacked node, in the physical (unscaled) sense.
    fn nonlinear_weight(&self, stacked: &[f64]) -> Vec<f64> {
        let k = self.n_power as i32 - 1;
        stacked
            .iter()
            .zip(&self.unscale)
            .map(|(u, f)| self.kappa * (u * f).powi(k))
            .collect()
    }

    fn combine(&self, stacked: &[f64], derivative: &[f64]) -> Vec<f64> {
        let w = self.nonlinear_weight(stacked);
        stacked
            .iter()
            .zip(derivative)
            .zip(&w)
            .map(|((u, d), w)| self.c * u + d - u * w)
            .collect()
    }

    /// Stacked residual; the outer blocks are multiplied by `|x|^{1+α}`,
    /// which keeps them finite at `ξ = 0`. The derivative is applied through
    /// the cached operator, so the residual is linear in `D^α` up to a
    /// single rounding per entry and agrees exactly with the Jacobian.
    pub fn residual(&self, q: &TriDomainFunction) -> Result<Vec<f64>> {
        self.check_grid(q)?;
        self.residual_with(self.operator()?, &q.stacked())
    }

    /// Same as [`residual`](Self::residual) with a given operator.
    pub fn residual_with(&self, operator: &DMatrix<f64>, stacked: &[f64]) -> Result<Vec<f64>> {
        check_len(self.grid.total_len(), stacked.len())?;
        let d = apply_operator(operator, stacked)?;
        Ok(self.combine(stacked, &d))
    }

    /// `c v + D^α v - nκQⁿ⁻¹ v`, scaled like the residual.
    pub fn jacobian_apply(&self, q: &TriDomainFunction, v: &[f64]) -> Result<Vec<f64>> {
        self.check_grid(q)?;
        check_len(self.grid.total_len(), v.len())?;
        let dv = apply_operator(self.operator()?, v)?;
        let w = self.nonlinear_weight(&q.stacked());
        let n = self.n_power as f64;
        Ok(v.iter()
            .zip(&dv)
            .zip(&w)
            .map(|((v, d), w)| self.c * v + d - n * w * v)
            .collect())
    }

    /// Dense Jacobian `cI + M - diag(nκQⁿ⁻¹)`.
    pub fn jacobian_matrix(&self, operator: &DMatrix<f64>, stacked: &[f64]) -> Result<DMatrix<f64>> {
        check_len(self.grid.total_len(), stacked.len())?;
        let w = self.nonlinear_weight(stacked);
        let n = self.n_power as f64;
        let mut j = operator.clone();
        for (i, w) in w.iter().enumerate() {
            j[(i, i)] += self.c - n * w;
        }
        Ok(j)
    }

    /// Dense fractional-derivative operator on the problem grid, assembled
    /// on first use and shared by clones.
    pub fn operator(&self) -> Result<&DMatrix<f64>> {
        if let Some(m) = self.operator.get() {
            return Ok(m);
        }
        let m = assemble_operator(&self.grid)?;
        Ok(self.operator.get_or_init(|| m))
    }

    /// Interpolates a torus profile onto the problem grid. Inside the torus
    /// the trigonometric interpolant is used; beyond `±πL` the trace is
    /// frozen at its value on the torus edge.
    pub fn from_torus(&self, profile: &[f64], torus: &TorusGrid) -> Result<TriDomainFunction> {
        let interp = TrigInterpolant::new(profile, torus)?;
        let alpha = self.order().alpha();
        let edge = torus.half_period() * std::f64::consts::PI;
        let trace = |x: f64| {
            let r = x.abs().min(edge);
            interp.eval(r.copysign(x)) * r.powf(1.0 + alpha)
        };
        let grid = self.grid.clone();
        let g = grid.clone();
        Ok(TriDomainFunction::from_traces(
            grid,
            |xi| trace(g.physical(Domain::Left, xi)),
            |x| interp.eval(x),
            |xi| trace(g.physical(Domain::Right, xi)),
        ))
    }
}

/// Exact trigonometric interpolant of equispaced torus samples.
struct TrigInterpolant {
    coeffs: Vec<Complex64>,
    origin: f64,
    inv_l: f64,
}

impl TrigInterpolant {
    fn new(profile: &[f64], torus: &TorusGrid) -> Result<Self> {
        check_len(torus.len(), profile.len())?;
        let mut coeffs: Vec<Complex64> = profile.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut coeffs, false)?;
        let n = coeffs.len() as f64;
        for c in coeffs.iter_mut() {
            *c /= n;
        }
        Ok(Self {
            coeffs,
            origin: torus.sample(0),
            inv_l: 1.0 / torus.half_period(),
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        let t = x - self.origin;
        let step = Complex64::from_polar(1.0, t * self.inv_l);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut sum = self.coeffs[0].re;
        for c in &self.coeffs[1..n / 2] {
            phase *= step;
            sum += 2.0 * (c * phase).re;
        }
        // Nyquist bin as a cosine so that the interpolant stays real
        sum + self.coeffs[n / 2].re * (0.5 * n as f64 * t * self.inv_l).cos()
    }
}

/// Largest `|Q(x) - P(x)|` over torus samples with `|x| ≤ cutoff`.
pub fn torus_difference(q: &TriDomainFunction, profile: &[f64], torus: &TorusGrid, cutoff: f64) -> Result<f64> {
    check_len(torus.len(), profile.len())?;
    Ok(torus
        .samples()
        .iter()
        .zip(profile)
        .filter(|(x, _)| x.abs() <= cutoff)
        .fold(0.0f64, |m, (&x, &p)| m.max((q.value_at(x) - p).abs())))
}
