use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::grid::{Domain, RationalOrder, TriDomainFunction, TriDomainGrid};
use super::kernels::{self, Sink};
use crate::error::{check_len, Result};
use crate::gamma::gamma;
use crate::spectral::add_compensated;

/// `C_α = 1 / (2 Γ(1-α) sin((1-α)π/2))`.
pub fn prefactor(order: RationalOrder) -> f64 {
    let a = order.alpha();
    1.0 / (2.0 * gamma(1.0 - a) * ((1.0 - a) * PI / 2.0).sin())
}

fn clamp_coord(grid: &TriDomainGrid, d: Domain, coord: f64) -> f64 {
    let (lo, hi) = grid.interval(d);
    coord.clamp(lo, hi)
}

/// Interpolates `u` at each pushed point; the sum is compensated because the
/// result is later differentiated, which amplifies rounding by `O(N²)`.
struct ValueSink<'a> {
    u: &'a TriDomainFunction,
    sum: f64,
    comp: f64,
}

impl<'a> ValueSink<'a> {
    fn new(u: &'a TriDomainFunction) -> Self {
        Self { u, sum: 0.0, comp: 0.0 }
    }

}

impl Sink for ValueSink<'_> {
    fn push(&mut self, domain: Domain, coord: f64, weight: f64) {
        let c = clamp_coord(self.u.grid(), domain, coord);
        let term = weight * self.u.interpolate(domain, c);
        add_compensated(&mut self.sum, &mut self.comp, term);
    }
}

/// Accumulates the row of the linear map `u ↦ Σ weight · u(coord)`.
struct RowSink<'a> {
    grid: &'a TriDomainGrid,
    row: &'a mut [f64],
    comp: &'a mut [f64],
    scratch: [Vec<f64>; 3],
}

impl<'a> RowSink<'a> {
    fn new(grid: &'a TriDomainGrid, row: &'a mut [f64], comp: &'a mut [f64]) -> Self {
        let scratch = Domain::ALL.map(|d| vec![0.0; grid.len(d)]);
        Self {
            grid,
            row,
            comp,
            scratch,
        }
    }
}

impl Sink for RowSink<'_> {
    fn push(&mut self, domain: Domain, coord: f64, weight: f64) {
        let c = clamp_coord(self.grid, domain, coord);
        let k = match domain {
            Domain::Left => 0,
            Domain::Middle => 1,
            Domain::Right => 2,
        };
        let basis = &mut self.scratch[k];
        self.grid
            .workspace(domain)
            .basis_into(self.grid.nodes(domain), c, basis);
        let off = self.grid.offset(domain);
        let n = basis.len();
        for ((r, e), b) in self.row[off..off + n]
            .iter_mut()
            .zip(self.comp[off..off + n].iter_mut())
            .zip(basis.iter())
        {
            add_compensated(r, e, weight * b);
        }
    }
}

/// Values of `I⁻` and `I⁺` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszParts {
    pub value_minus: f64,
    pub value_plus: f64,
    /// In the outer domains, whether the values are divided by `ξ^p`.
    pub scaled: bool,
}

impl RieszParts {
    /// Unscaled `I⁻ - I⁺` given the local coordinate the parts belong to.
    pub fn unscaled_difference(&self, order: RationalOrder, domain: Domain, coord: f64) -> f64 {
        let diff = self.value_minus - self.value_plus;
        if self.scaled && domain != Domain::Middle {
            diff * coord.powi(order.p() as i32)
        } else {
            diff
        }
    }
}

fn xi_power(u: &TriDomainFunction, domain: Domain, coord: f64, scaled: bool) -> f64 {
    if scaled || domain == Domain::Middle {
        1.0
    } else {
        coord.powi(u.order().p() as i32)
    }
}

/// `I⁻(x) = ∫_{-∞}^x u(y)(x-y)^{-α} dy` at a local coordinate. With
/// `scaled`, outer-domain values are returned divided by `ξ^p`.
pub fn riesz_minus(u: &TriDomainFunction, domain: Domain, coord: f64, scaled: bool) -> Result<f64> {
    u.grid().check_coord(domain, coord)?;
    let mut sink = ValueSink::new(u);
    kernels::minus_part(u.grid(), domain, coord, 1.0, &mut sink)?;
    Ok((sink.sum + sink.comp) * xi_power(u, domain, coord, scaled))
}

/// `I⁺(x) = ∫_x^∞ u(y)(y-x)^{-α} dy` at a local coordinate.
pub fn riesz_plus(u: &TriDomainFunction, domain: Domain, coord: f64, scaled: bool) -> Result<f64> {
    u.grid().check_coord(domain, coord)?;
    let mut sink = ValueSink::new(u);
    kernels::plus_part(u.grid(), domain, coord, 1.0, &mut sink)?;
    Ok((sink.sum + sink.comp) * xi_power(u, domain, coord, scaled))
}

pub fn riesz_parts(u: &TriDomainFunction, domain: Domain, coord: f64, scaled: bool) -> Result<RieszParts> {
    Ok(RieszParts {
        value_minus: riesz_minus(u, domain, coord, scaled)?,
        value_plus: riesz_plus(u, domain, coord, scaled)?,
        scaled,
    })
}

/// Stacked `I⁻ - I⁺` on all nodes; outer domains hold `(I⁻ - I⁺)/ξ^p`.
pub fn riesz_difference(u: &TriDomainFunction) -> Result<Vec<f64>> {
    let (hi, lo) = difference_split(u)?;
    Ok(hi.iter().zip(&lo).map(|(h, l)| h + l).collect())
}

/// `I⁻ - I⁺` as unevaluated sums `hi + lo`. Keeping the low part through
/// the differentiation avoids amplifying the final rounding of `G` by `O(N²)`.
fn difference_split(u: &TriDomainFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = u.grid();
    let mut hi = Vec::with_capacity(grid.total_len());
    let mut lo = Vec::with_capacity(grid.total_len());
    for d in Domain::ALL {
        for &c in grid.nodes(d) {
            let mut sink = ValueSink::new(u);
            kernels::difference(grid, d, c, &mut sink)?;
            hi.push(sink.sum);
            lo.push(sink.comp);
        }
    }
    Ok((hi, lo))
}

/// Applies the classical derivative and the chain rule through
/// `x = ∓ξ^{-q}` to the stacked difference `G`.
fn derivative_from_difference(
    grid: &Arc<TriDomainGrid>,
    diff: &[f64],
    low: &[f64],
) -> Result<TriDomainFunction> {
    check_len(grid.total_len(), diff.len())?;
    check_len(grid.total_len(), low.len())?;
    let order = grid.order();
    let c = prefactor(order);
    let (p, q) = (order.p() as f64, order.q() as f64);
    let part = grid.partition();

    let block = |v: &'_ [f64], d: Domain| -> Vec<f64> {
        let off = grid.offset(d);
        v[off..off + grid.len(d)].to_vec()
    };
    // derivative and value of hi + lo on one domain
    let split = |d: Domain, lower: f64, upper: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let ws = grid.workspace(d);
        let (h, l) = (block(diff, d), block(low, d));
        let dh = ws.differentiate(&h, lower, upper)?;
        let dl = ws.differentiate(&l, lower, upper)?;
        let g = h.iter().zip(&l).map(|(a, b)| a + b).collect();
        Ok((g, dh.iter().zip(&dl).map(|(a, b)| a + b).collect()))
    };

    let (_, dg) = split(Domain::Middle, part.a, part.b)?;
    let middle: Vec<f64> = dg.into_iter().map(|v| c * v).collect();

    let outer = |d: Domain, upper: f64, sign: f64| -> Result<Vec<f64>> {
        let (g, dg) = split(d, 0.0, upper)?;
        Ok(grid
            .nodes(d)
            .iter()
            .zip(g.iter().zip(&dg))
            .map(|(&xi, (&gv, &dv))| sign * c / q * (p * gv + xi * dv))
            .collect())
    };
    let left = outer(Domain::Left, grid.xi_a(), 1.0)?;
    let right = outer(Domain::Right, grid.xi_b(), -1.0)?;
    TriDomainFunction::from_parts(grid.clone(), left, middle, right)
}

/// `D^α u` on every node. The outer blocks of the result hold the scaled
/// values `|x|^{1+α} D^α u`, i.e. the same trace convention as `u` itself;
/// use [`TriDomainFunction::value_at`] or multiply by `ξ^{p+q}` for the
/// unscaled derivative (which is `0` at `ξ = 0`).
pub fn fractional_derivative(u: &TriDomainFunction) -> Result<TriDomainFunction> {
    let (hi, lo) = difference_split(u)?;
    derivative_from_difference(u.grid(), &hi, &lo)
}

/// `M x` accumulated as if in twice the working precision (error-free
/// products and sums), so that the result is linear in `x` up to a final
/// rounding of each entry rather than `ε Σ|M_ij x_j|`.
pub fn apply_operator(m: &DMatrix<f64>, x: &[f64]) -> Result<Vec<f64>> {
    check_len(m.ncols(), x.len())?;
    let rows = m.nrows();
    let mut sum = vec![0.0; rows];
    let mut comp = vec![0.0; rows];
    for (col, &xj) in m.column_iter().zip(x) {
        if xj == 0.0 {
            continue;
        }
        for ((s, c), &a) in sum.iter_mut().zip(comp.iter_mut()).zip(col.iter()) {
            let p = a * xj;
            let e = a.mul_add(xj, -p);
            let t = *s + p;
            let z = t - *s;
            *c += (*s - (t - z)) + (p - z) + e;
            *s = t;
        }
    }
    Ok(sum.iter().zip(&comp).map(|(s, c)| s + c).collect())
}

/// Dense matrix `M` with `M · stacked(u) = stacked(fractional_derivative(u))`.
pub fn assemble_operator(grid: &Arc<TriDomainGrid>) -> Result<DMatrix<f64>> {
    let m = grid.total_len();
    // rows of u ↦ G
    let mut gmat = vec![0.0; m * m];
    let mut comp = vec![0.0; m * m];
    let mut row_idx = 0;
    for d in Domain::ALL {
        for &c in grid.nodes(d) {
            let range = row_idx * m..(row_idx + 1) * m;
            let mut sink = RowSink::new(grid, &mut gmat[range.clone()], &mut comp[range]);
            kernels::difference(grid, d, c, &mut sink)?;
            row_idx += 1;
        }
    }
    let gcomp = comp;
    let mut comp = vec![0.0; m * m];

    let order = grid.order();
    let c = prefactor(order);
    let (p, q) = (order.p() as f64, order.q() as f64);
    let part = grid.partition();
    let mut out = vec![0.0; m * m];
    for d in Domain::ALL {
        let ws = grid.workspace(d);
        let off = grid.offset(d);
        let n = grid.len(d);
        let nodes = grid.nodes(d);
        let (scale, sign) = match d {
            Domain::Left => (2.0 / grid.xi_a(), 1.0),
            Domain::Middle => (2.0 / (part.b - part.a), 1.0),
            Domain::Right => (2.0 / grid.xi_b(), -1.0),
        };
        // rows are combined as Σ_k D_ik (G_k - G_i), matching `differentiate`
        for i in 0..n {
            let target = (off + i) * m;
            let own = (off + i) * m;
            let outer = if d == Domain::Middle { 1.0 } else { sign / q };
            if d != Domain::Middle {
                for j in 0..m {
                    let g = gmat[own + j] + gcomp[own + j];
                    add_compensated(&mut out[target + j], &mut comp[target + j], outer * c * p * g);
                }
            }
            for k in 0..n {
                if k == i {
                    continue;
                }
                let mut coef = c * scale * ws.diff_entry(i, k);
                if d != Domain::Middle {
                    coef *= outer * nodes[i];
                }
                if coef == 0.0 {
                    continue;
                }
                let src = (off + k) * m;
                for j in 0..m {
                    let delta = (gmat[src + j] - gmat[own + j]) + (gcomp[src + j] - gcomp[own + j]);
                    add_compensated(&mut out[target + j], &mut comp[target + j], coef * delta);
                }
            }
        }
    }
    for (o, e) in out.iter_mut().zip(&comp) {
        *o += e;
    }
    Ok(DMatrix::from_row_slice(m, m, &out))
}
