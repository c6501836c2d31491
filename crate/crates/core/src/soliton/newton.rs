use std::sync::Arc;

use log::{info, warn};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::gmres::{gmres_preconditioned, GmresOptions};
use super::{benjamin_ono, SolitonProblem};
use crate::error::{Error, Result};
use crate::riesz::{Domain, DomainPartition, RationalOrder, TriDomainFunction, TriDomainGrid};

/// Number of trailing Chebyshev coefficients inspected for resolution.
pub const TAIL_COEFFICIENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// LU factors of the dense Jacobian, refreshed every Newton step.
    Lu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Target for the largest residual entry.
    pub tol: f64,
    pub max_newton: usize,
    pub gmres: GmresOptions,
    pub preconditioner: Preconditioner,
    /// Border each linear solve with `⟨Q', δ⟩ = 0`. The translates of a
    /// solitary wave are solutions too, so without this the Jacobian has a
    /// near-null mode and accurate solves let the profile drift sideways.
    pub phase_condition: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_newton: 20,
            gmres: GmresOptions::default(),
            preconditioner: Preconditioner::Lu,
            phase_condition: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    /// The residual grew in three consecutive steps.
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    /// `‖F‖∞` of the initial iterate and after each Newton step.
    pub residual_norms: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub gmres_converged: Vec<bool>,
    pub converged: bool,
    pub status: Status,
    /// Relative size of the last Chebyshev coefficients in I, II, III.
    pub final_tail: [f64; 3],
}

impl ConvergenceRecord {
    pub fn newton_steps(&self) -> usize {
        self.residual_norms.len() - 1
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("record holds the initial residual")
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Unit vector along `Q'` on the middle block, zero elsewhere; `None` when
/// the middle block is flat.
fn translation_mode(q: &TriDomainFunction) -> Result<Option<Vec<f64>>> {
    let grid = q.grid();
    let part = grid.partition();
    let d = grid
        .workspace(Domain::Middle)
        .differentiate(q.values(Domain::Middle), part.a, part.b)?;
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Ok(None);
    }
    let mut phi = vec![0.0; grid.total_len()];
    let off = grid.offset(Domain::Middle);
    for (slot, v) in phi[off..].iter_mut().zip(&d) {
        *slot = v / norm;
    }
    Ok(Some(phi))
}

/// `[[J, φ], [φᵀ, 0]]`.
fn border(jac: &DMatrix<f64>, phi: &[f64]) -> DMatrix<f64> {
    let m = jac.nrows();
    let mut out = DMatrix::zeros(m + 1, m + 1);
    out.view_mut((0, 0), (m, m)).copy_from(jac);
    for (i, &v) in phi.iter().enumerate() {
        out[(i, m)] = v;
        out[(m, i)] = v;
    }
    out
}

/// Plain Newton iteration for `problem` from `q0`. Each correction solves
/// `J δ = -F` by GMRES; residual and Jacobian share the problem's cached
/// fractional operator.
pub fn newton_solve(
    problem: &SolitonProblem,
    q0: &TriDomainFunction,
    options: &NewtonOptions,
) -> Result<(TriDomainFunction, ConvergenceRecord)> {
    let grid = problem.grid().clone();
    let mut q = TriDomainFunction::from_stacked(grid.clone(), &q0.stacked())?;
    let mut f = problem.residual(&q0)?;
    let mut norms = vec![max_abs(&f)];
    let mut gmres_iterations = Vec::new();
    let mut gmres_converged = Vec::new();
    let mut status = Status::MaxIterations;
    let mut increases = 0;

    for step in 0..=options.max_newton {
        let current = *norms.last().unwrap();
        if !current.is_finite() {
            return Err(Error::Solver(format!("non-finite residual after {step} Newton steps")));
        }
        if current <= options.tol {
            status = Status::Converged;
            break;
        }
        if step == options.max_newton {
            break;
        }
        let m = problem.operator()?;
        let u = q.stacked();
        let jac = problem.jacobian_matrix(m, &u)?;
        let phase = if options.phase_condition { translation_mode(&q)? } else { None };
        let system = match &phase {
            Some(phi) => border(&jac, phi),
            None => jac,
        };
        let mut rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        if phase.is_some() {
            rhs.push(0.0);
        }
        let apply = |v: &[f64]| (&system * DVector::from_column_slice(v)).as_slice().to_vec();
        let outcome = match options.preconditioner {
            Preconditioner::None => gmres_preconditioned(apply, |v: &[f64]| v.to_vec(), &rhs, &options.gmres)?,
            Preconditioner::Lu => {
                let lu = system.clone().lu();
                let solve = |v: &[f64]| {
                    lu.solve(&DVector::from_column_slice(v))
                        .map(|x| x.as_slice().to_vec())
                        .unwrap_or_else(|| v.to_vec())
                };
                gmres_preconditioned(apply, solve, &rhs, &options.gmres)?
            }
        };
        if !outcome.converged {
            warn!(
                "Newton step {}: GMRES stopped at relative residual {:e}; continuing with an approximate step",
                step + 1,
                outcome.relative_residual
            );
        }
        gmres_iterations.push(outcome.iterations);
        gmres_converged.push(outcome.converged);
        let next: Vec<f64> = u.iter().zip(&outcome.solution[..u.len()]).map(|(a, d)| a + d).collect();
        q = TriDomainFunction::from_stacked(grid.clone(), &next)?;
        f = problem.residual(&q)?;
        let norm = max_abs(&f);
        info!("Newton step {}: residual {:e}, GMRES iterations {}", step + 1, norm, outcome.iterations);
        increases = if norm > current { increases + 1 } else { 0 };
        norms.push(norm);
        if increases >= 3 {
            status = Status::Diverged;
            break;
        }
    }

    let record = ConvergenceRecord {
        residual_norms: norms,
        gmres_iterations,
        gmres_converged,
        converged: status == Status::Converged,
        status,
        final_tail: q.tail_indicators(TAIL_COEFFICIENTS),
    };
    Ok((q, record))
}

/// Re-interpolates a solution for order `α_old` onto a grid of order
/// `α_new`. Inside the old middle domain the values are evaluated directly;
/// beyond it the old trace is reused with the factor `r^{α_new - α_old}`
/// frozen at the old boundary `r`, so that the decay rate switches from
/// `|x|^{-1-α_old}` to `|x|^{-1-α_new}` there.
pub fn reseed(old: &TriDomainFunction, grid: Arc<TriDomainGrid>) -> TriDomainFunction {
    let old_grid = old.grid();
    let (old_order, new_order) = (old.order(), grid.order());
    let (a_new, a_old) = (new_order.alpha(), old_order.alpha());
    let ratio = new_order.q() as f64 / old_order.q() as f64;
    let old_part = *old_grid.partition();

    let outer = |d: Domain, xi: f64| -> f64 {
        let x = grid.physical(d, xi);
        let edge = match d {
            Domain::Left => old_part.a,
            _ => old_part.b,
        };
        if x.abs() <= edge.abs() {
            old.value_at(x) * x.abs().powf(1.0 + a_new)
        } else {
            let (lo, hi) = old_grid.interval(d);
            let xi_old = xi.powf(ratio).clamp(lo, hi);
            old.evaluate(d, xi_old).unwrap_or(0.0) * edge.abs().powf(a_new - a_old)
        }
    };
    TriDomainFunction::from_traces(
        grid.clone(),
        |xi| outer(Domain::Left, xi),
        |x| {
            if x < old_part.a || x > old_part.b {
                // old outer domain: same frozen-factor rule as the traces
                let edge = if x < 0.0 { old_part.a } else { old_part.b };
                old.value_at(x) * (x / edge).abs().powf(a_old - a_new)
            } else {
                old.value_at(x)
            }
        },
        |xi| outer(Domain::Right, xi),
    )
}

/// One stage of a continuation in α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationStep {
    pub order: RationalOrder,
    pub partition: DomainPartition,
}

impl ContinuationStep {
    pub fn new(p: u32, q: u32, b: f64, delta: f64, n: usize) -> Result<Self> {
        Ok(Self {
            order: RationalOrder::new(p, q)?,
            partition: DomainPartition::uniform(-b, b, delta, n)?,
        })
    }
}

/// Branch of speed-one fKdV waves from α = 9/10 down to 5/13. The middle
/// domain shrinks with the wave width. Stages with a wide middle domain and
/// a large denominator use a wide near-boundary threshold: with `δ = 10⁻²`
/// the far-field kernel at `x = a + δ` is nearly singular on the `t^q`
/// scale and loses digits as `q` grows.
pub fn default_schedule() -> Vec<ContinuationStep> {
    [
        (9, 10, 1.0, 0.2, 200),
        (4, 5, 1.0, 1e-2, 200),
        (7, 10, 1.0, 0.2, 200),
        (13, 20, 1.0, 0.2, 200),
        (3, 5, 1.0, 1e-2, 200),
        (11, 20, 0.3, 0.06, 200),
        (21, 40, 0.2, 0.04, 200),
        (1, 2, 0.1, 1e-2, 200),
        (19, 40, 0.1, 1e-2, 200),
        (9, 20, 0.05, 1e-2, 256),
        (7, 16, 0.04, 1e-2, 256),
        (17, 40, 0.03, 1e-2, 256),
        (5, 12, 0.02, 5e-3, 256),
        (9, 22, 0.015, 5e-3, 256),
        (2, 5, 1e-2, 5e-3, 256),
        (11, 28, 5e-3, 2e-3, 300),
        (7, 18, 2e-3, 1e-3, 300),
        (5, 13, 1e-3, 5e-4, 400),
    ]
    .into_iter()
    .map(|(p, q, b, delta, n)| ContinuationStep::new(p, q, b, delta, n).expect("valid schedule entry"))
    .collect()
}

#[derive(Debug, Clone)]
pub struct TracedSolution {
    pub problem: SolitonProblem,
    pub solution: TriDomainFunction,
    pub record: ConvergenceRecord,
}

#[derive(Debug, Clone)]
pub struct TraceOutcome {
    /// Every attempted stage, the last one possibly unconverged.
    pub branch: Vec<TracedSolution>,
    /// Why the continuation stopped early.
    pub halted: Option<String>,
}

impl TraceOutcome {
    pub fn completed(&self) -> bool {
        self.halted.is_none()
    }
}

/// Linear extrapolation in α through the last two points of the branch,
/// both re-interpolated onto the new grid.
fn secant_predictor(
    older: &TracedSolution,
    newer: &TracedSolution,
    problem: &SolitonProblem,
) -> Result<TriDomainFunction> {
    let (a0, a1, a2) = (
        older.problem.order().alpha(),
        newer.problem.order().alpha(),
        problem.order().alpha(),
    );
    let theta = (a2 - a1) / (a1 - a0);
    let q1 = reseed(&newer.solution, problem.grid().clone());
    let q0 = reseed(&older.solution, problem.grid().clone());
    q1.combine(1.0 + theta, &q0, -theta)
}

/// Follows the solution branch through a strictly decreasing sequence of
/// orders. The first stage starts from `seed`, or from the α = 1 profile.
pub fn trace_alpha(
    template: &SolitonProblem,
    steps: &[ContinuationStep],
    seed: Option<&TriDomainFunction>,
    options: &NewtonOptions,
) -> Result<TraceOutcome> {
    if steps.is_empty() {
        return Err(Error::InvalidProblem("empty continuation schedule".into()));
    }
    for w in steps.windows(2) {
        if w[1].order.alpha() >= w[0].order.alpha() {
            return Err(Error::InvalidProblem(format!(
                "schedule must be strictly decreasing, got {} then {}",
                w[0].order, w[1].order
            )));
        }
    }
    let problems = steps
        .iter()
        .map(|s| template.with_grid(s.order, s.partition))
        .collect::<Result<Vec<_>>>()?;

    let mut branch: Vec<TracedSolution> = Vec::new();
    for problem in problems {
        let start = match (branch.len(), seed) {
            (0, Some(s)) => reseed(s, problem.grid().clone()),
            (0, None) => benjamin_ono(problem.grid().clone()),
            (1, _) => reseed(&branch[0].solution, problem.grid().clone()),
            (n, _) => secant_predictor(&branch[n - 2], &branch[n - 1], &problem)?,
        };
        let order = problem.order();
        match newton_solve(&problem, &start, options) {
            Ok((solution, record)) => {
                let converged = record.converged;
                let last = record.final_residual();
                branch.push(TracedSolution {
                    problem,
                    solution,
                    record,
                });
                if !converged {
                    return Ok(TraceOutcome {
                        branch,
                        halted: Some(format!("α = {order}: Newton stopped at residual {last:e}")),
                    });
                }
            }
            Err(e) => {
                return Ok(TraceOutcome {
                    branch,
                    halted: Some(format!("α = {order}: {e}")),
                })
            }
        }
    }
    Ok(TraceOutcome { branch, halted: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(p: u32, q: u32, b: f64, n: usize) -> Arc<TriDomainGrid> {
        let part = DomainPartition::uniform(-b, b, 0.25 * b.min(1.0), n).unwrap();
        Arc::new(TriDomainGrid::new(RationalOrder::new(p, q).unwrap(), part).unwrap())
    }

    #[test]
    fn reseed_onto_same_order_is_interpolation() {
        let g = grid(4, 5, 1.0, 30);
        let bo = benjamin_ono(g.clone());
        let fine = grid(4, 5, 1.0, 40);
        let moved = reseed(&bo, fine.clone());
        let direct = benjamin_ono(fine);
        for (a, b) in moved.stacked().iter().zip(direct.stacked()) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn reseed_is_continuous_across_the_old_boundary() {
        let g = grid(4, 5, 1.0, 30);
        let bo = benjamin_ono(g);
        let target = grid(2, 3, 0.5, 30);
        let moved = reseed(&bo, target);
        let (da, db) = moved.matching_defect();
        assert!(da < 1e-8 && db < 1e-8, "{da} {db}");
        // the old outer region keeps the shape of the old trace
        let at_inf = moved.values(Domain::Right).last().copied().unwrap();
        assert!(at_inf.is_finite());
    }

    #[test]
    fn rejects_bad_schedules() {
        let part = DomainPartition::uniform(-1.0, 1.0, 1e-2, 8).unwrap();
        let pr = SolitonProblem::fkdv(RationalOrder::new(4, 5).unwrap(), part, 1.0).unwrap();
        let up = [
            ContinuationStep {
                order: RationalOrder::new(1, 2).unwrap(),
                partition: part,
            },
            ContinuationStep {
                order: RationalOrder::new(4, 5).unwrap(),
                partition: part,
            },
        ];
        assert!(trace_alpha(&pr, &up, None, &NewtonOptions::default()).is_err());
        assert!(trace_alpha(&pr, &[], None, &NewtonOptions::default()).is_err());
    }
}
