use std::sync::Arc;

use super::SolitonProblem;
use crate::error::Result;
use crate::riesz::{fractional_derivative, Domain, RationalOrder, TriDomainFunction, TriDomainGrid};

/// `∫ u^k dx` over the real line. The outer pieces use `x = ∓ξ^{-q}`,
/// under which the integrand becomes `q (u^{I,III})^k ξ^{(k-1)q + kp - 1}`.
pub fn power_integral(u: &TriDomainFunction, k: u32) -> Result<f64> {
    let grid = u.grid();
    let (p, q) = (grid.order().p() as i32, grid.order().q() as i32);
    let k = k as i32;
    let part = grid.partition();
    let mid: Vec<f64> = u.values(Domain::Middle).iter().map(|v| v.powi(k)).collect();
    let mut total = grid.workspace(Domain::Middle).integrate(&mid, part.a, part.b)?;
    let exponent = (k - 1) * q + k * p - 1;
    for (d, upper) in [(Domain::Left, grid.xi_a()), (Domain::Right, grid.xi_b())] {
        let vals: Vec<f64> = u
            .values(d)
            .iter()
            .zip(grid.nodes(d))
            .map(|(v, xi)| q as f64 * v.powi(k) * xi.powi(exponent))
            .collect();
        total += grid.workspace(d).integrate(&vals, 0.0, upper)?;
    }
    Ok(total)
}

/// `∫ u² dx`.
pub fn mass(u: &TriDomainFunction) -> Result<f64> {
    power_integral(u, 2)
}

/// Moves `u` onto a grid of another order with the same partition.
fn change_order(u: &TriDomainFunction, order: RationalOrder) -> Result<TriDomainFunction> {
    let old = u.grid();
    let grid = Arc::new(TriDomainGrid::new(order, *old.partition())?);
    let ratio = order.q() as f64 / old.order().q() as f64;
    // u|x|^{1+β} = (u|x|^{1+α}) |x|^{β-α}, and |x|^{β-α} = ξ'^{q'(α-β)}
    let shift = order.q() as f64 * (old.order().alpha() - order.alpha());
    let trace = |d: Domain, xi: f64| -> Result<f64> {
        let (lo, hi) = old.interval(d);
        Ok(u.evaluate(d, xi.powf(ratio).clamp(lo, hi))? * xi.powf(shift))
    };
    let left = grid
        .nodes(Domain::Left)
        .iter()
        .map(|&xi| trace(Domain::Left, xi))
        .collect::<Result<Vec<_>>>()?;
    let right = grid
        .nodes(Domain::Right)
        .iter()
        .map(|&xi| trace(Domain::Right, xi))
        .collect::<Result<Vec<_>>>()?;
    TriDomainFunction::from_parts(grid, left, u.values(Domain::Middle).to_vec(), right)
}

/// `½∫(D^{α/2}u)² dx - (1/6)∫u³ dx`, with `α` the order of `u`'s grid.
pub fn hamiltonian(u: &TriDomainFunction) -> Result<f64> {
    let half = u.order().half()?;
    let resampled = change_order(u, half)?;
    let d = fractional_derivative(&resampled)?;
    Ok(0.5 * power_integral(&d, 2)? - power_integral(u, 3)? / 6.0)
}

/// Largest `|Q(x) - Q(-x)|` over the nodes; the outer domains compare the
/// traces, which differ from the values only by the even factor `|x|^{1+α}`.
pub fn parity_defect(u: &TriDomainFunction) -> f64 {
    let grid = u.grid();
    let mut worst = 0.0f64;
    for &x in grid.nodes(Domain::Middle) {
        worst = worst.max((u.value_at(x) - u.value_at(-x)).abs());
    }
    let (_, hi_l) = grid.interval(Domain::Left);
    let (_, hi_r) = grid.interval(Domain::Right);
    for (d, other, limit) in [(Domain::Left, Domain::Right, hi_r), (Domain::Right, Domain::Left, hi_l)] {
        for (&xi, &v) in grid.nodes(d).iter().zip(u.values(d)) {
            if xi <= limit {
                worst = worst.max((v - u.evaluate(other, xi).unwrap_or(v)).abs());
            }
        }
    }
    worst
}

/// Maps a speed-one solution to speed `c_new` via
/// `Q_c(x) = A Q(λx)` with `λ = c^{1/α}`, `A = c^{1/(n-1)}`.
pub fn rescale_soliton(
    problem: &SolitonProblem,
    q: &TriDomainFunction,
    c_new: f64,
) -> Result<(SolitonProblem, TriDomainFunction)> {
    let order = problem.order();
    let base = c_new / problem.c;
    let lambda = base.powf(1.0 / order.alpha());
    let amp = base.powf(1.0 / (problem.n_power as f64 - 1.0));
    let partition = problem.partition().scaled(lambda)?;
    let scaled = problem.with_speed(c_new, partition)?;
    // node k of every block maps to node k of the scaled grid
    let outer = amp * lambda.powf(-(1.0 + order.alpha()));
    let mix = |d: Domain, f: f64| -> Vec<f64> { q.values(d).iter().map(|v| v * f).collect() };
    let out = TriDomainFunction::from_parts(
        scaled.grid().clone(),
        mix(Domain::Left, outer),
        mix(Domain::Middle, amp),
        mix(Domain::Right, outer),
    )?;
    Ok((scaled, out))
}
