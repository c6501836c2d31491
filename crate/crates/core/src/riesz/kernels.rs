//! Substituted Clenshaw–Curtis forms of `I⁻(x) = ∫_{-∞}^x u(y)(x-y)^{-α} dy`.
//!
//! Each sub-integral is written as `∫ g(t) u_D(f(t)) dt` with smooth `g` and
//! `f`; quadrature nodes are pushed into a [`Sink`] as
//! `(domain, coordinate, weight)` triples, so the same code either sums
//! interpolated values or accumulates rows of the linear map `u ↦ I⁻`.
//!
//! `I⁺` is obtained by mirroring: `I⁺_u(x) = I⁻_v(-x)` with `v(y) = u(-y)`,
//! which swaps the outer domains and negates the middle coordinate.
//!
//! In the outer domains the kernels return `I⁻/ξ^p`, which is finite at `ξ = 0`.

use super::grid::{Domain, TriDomainGrid};
use crate::error::{Error, Result};
use crate::spectral::{map_node, SpectralWorkspace};

/// Receiver of quadrature contributions `weight · u_domain(coord)`.
pub(crate) trait Sink {
    fn push(&mut self, domain: Domain, coord: f64, weight: f64);
}

/// Grid seen either directly or through `x ↦ -x`.
#[derive(Clone, Copy)]
pub(crate) struct View<'g> {
    grid: &'g TriDomainGrid,
    mirrored: bool,
    a: f64,
    b: f64,
    xi_a: f64,
    xi_b: f64,
    delta: f64,
    p: i32,
    q: i32,
    alpha: f64,
}

impl<'g> View<'g> {
    pub(crate) fn new(grid: &'g TriDomainGrid, mirrored: bool) -> Self {
        let part = grid.partition();
        let order = grid.order();
        let (a, b, xi_a, xi_b) = if mirrored {
            (-part.b, -part.a, grid.xi_b(), grid.xi_a())
        } else {
            (part.a, part.b, grid.xi_a(), grid.xi_b())
        };
        Self {
            grid,
            mirrored,
            a,
            b,
            xi_a,
            xi_b,
            delta: part.delta,
            p: order.p() as i32,
            q: order.q() as i32,
            alpha: order.alpha(),
        }
    }

    fn ws(&self, d: Domain) -> &'g SpectralWorkspace {
        self.grid.workspace(self.actual(d))
    }

    fn actual(&self, d: Domain) -> Domain {
        if self.mirrored {
            d.mirrored()
        } else {
            d
        }
    }

    fn gamma(&self, xi: f64) -> f64 {
        (0.5 / xi).min(1.0 / self.delta)
    }
}

/// Forwards pushes from a (possibly mirrored) view to the real grid,
/// multiplying weights by `sign`.
struct Forward<'s, S: Sink> {
    inner: &'s mut S,
    mirrored: bool,
    sign: f64,
}

impl<S: Sink> Sink for Forward<'_, S> {
    fn push(&mut self, domain: Domain, coord: f64, weight: f64) {
        if self.mirrored {
            let coord = if domain == Domain::Middle { -coord } else { coord };
            self.inner.push(domain.mirrored(), coord, self.sign * weight);
        } else {
            self.inner.push(domain, coord, self.sign * weight);
        }
    }
}

/// `v^{1/q}` with tiny negative round-off clamped to zero.
#[inline]
fn root(v: f64, q: i32) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v.powf(1.0 / q as f64)
    }
}

/// Clenshaw–Curtis sum of `f` over `[lower, upper]` pushed into `sink`.
/// Zero-length intervals contribute nothing.
fn quad<S: Sink>(
    piece: &'static str,
    ws: &SpectralWorkspace,
    lower: f64,
    upper: f64,
    sink: &mut S,
    mut f: impl FnMut(f64) -> (Domain, f64, f64),
) -> Result<()> {
    if lower == upper {
        return Ok(());
    }
    let half = 0.5 * (upper - lower);
    for (&l, &w) in ws.nodes().iter().zip(ws.cc_weights()) {
        let t = map_node(l, lower, upper);
        let (domain, coord, g) = f(t);
        if !(g.is_finite() && coord.is_finite()) {
            return Err(Error::NumericalDomain {
                piece,
                domain: domain.label(),
                coord: t,
            });
        }
        sink.push(domain, coord, half * w * g);
    }
    Ok(())
}

/// `t^{2p-1} (t^q ± ξ^q)^{-α}` for `t ≥ ξ`, written so that `t = ξ = 0`
/// gives the limit `t^{p-1}` at zero.
#[inline]
fn far_kernel(t: f64, xi: f64, sign: f64, p: i32, q: i32, alpha: f64) -> f64 {
    if t == 0.0 {
        return if p == 1 { 1.0 } else { 0.0 };
    }
    let r = (xi / t).powi(q);
    t.powi(p - 1) * (1.0 + sign * r).powf(-alpha)
}

/// Pushes `I⁻` (or `I⁻/ξ^p` in the outer domains) at a point of `view`.
pub(crate) fn minus<S: Sink>(view: &View, domain: Domain, coord: f64, sink: &mut S) -> Result<()> {
    match domain {
        Domain::Left => minus_left(view, coord, sink),
        Domain::Middle => minus_middle(view, coord, sink),
        Domain::Right => minus_right(view, coord, sink),
    }
}

/// `x < a`: split `∫_0^{ξ^q}` at `ξ^q/2`, local parameters at both ends.
/// The kernels are written through `τ = t/ξ`, since `ξ^q` alone underflows
/// for large `q` near `ξ = 0`.
fn minus_left<S: Sink>(v: &View, xi: f64, sink: &mut S) -> Result<()> {
    if xi == 0.0 {
        return Ok(());
    }
    let (p, q, alpha) = (v.p, v.q, v.alpha);
    let qf = q as f64;
    let scale = qf * xi.powi(p - 1);
    let t_end = xi * 2f64.powf(-1.0 / qf);
    let ws = v.ws(Domain::Left);

    // q t^{2p-1} (ξ^q - t^q)^{-α}
    quad("I-1", ws, 0.0, t_end, sink, |t| {
        let tau = t / xi;
        let g = scale * tau.powi(2 * p - 1) * (1.0 - tau.powi(q)).powf(-alpha);
        (Domain::Left, t, g)
    })?;
    // q s^{2α-1} t^{q-p-1} at the point s^{1/q}, s = ξ^q - t^q
    quad("I-2", ws, 0.0, t_end, sink, |t| {
        let tau = t / xi;
        let rest = 1.0 - tau.powi(q);
        let g = scale * rest.powf(2.0 * alpha - 1.0) * tau.powi(q - p - 1);
        (Domain::Left, xi * root(rest, q), g)
    })
}

/// `a ≤ x ≤ b`: the finite part `∫_a^x` and the tail `∫_{-∞}^a`.
fn minus_middle<S: Sink>(v: &View, x: f64, sink: &mut S) -> Result<()> {
    let (p, q, alpha) = (v.p, v.q, v.alpha);
    let qf = q as f64;
    let a = v.a;

    quad("I-3", v.ws(Domain::Middle), 0.0, root(x - a, q), sink, |t| {
        (Domain::Middle, x - t.powi(q), qf * t.powi(q - p - 1))
    })?;

    let ws = v.ws(Domain::Left);
    let tail = |t: f64| {
        let g = qf * t.powi(2 * p - 1) * (1.0 + x * t.powi(q)).powf(-alpha);
        (Domain::Left, t, g)
    };
    if x < a + v.delta {
        // near a the kernel (1 + x t^q)^{-α} is almost singular at t = ξ_a
        quad("I-4a", ws, 0.0, root(-0.5 / a, q), sink, tail)?;
        let lo = root(1.0 - x / (2.0 * a), q);
        let hi = root(1.0 - x / a, q);
        quad("I-4b", ws, lo, hi, sink, |t| {
            let s = (t.powi(q) - 1.0) / x;
            let g = qf / x * s.powf(2.0 * alpha - 1.0) * t.powi(q - p - 1);
            (Domain::Left, root(s, q), g)
        })
    } else {
        quad("I-4", ws, 0.0, v.xi_a, sink, tail)
    }
}

/// `x > b`: contributions of all three domains, divided by `ξ^p`.
fn minus_right<S: Sink>(v: &View, xi: f64, sink: &mut S) -> Result<()> {
    let (p, q, alpha) = (v.p, v.q, v.alpha);
    let qf = q as f64;
    let big_x = xi.powi(q);
    let near_infinity = xi < v.delta;
    let split = |end: f64| (v.gamma(xi) * xi).min(end);

    // ∫_{-∞}^a
    let ws = v.ws(Domain::Left);
    // q t^{2p-1} (ξ^q + t^q)^{-α}, through the smaller of t/ξ and ξ/t
    let k5 = |t: f64| {
        let g = if t >= xi {
            qf * far_kernel(t, xi, 1.0, p, q, alpha)
        } else {
            let tau = t / xi;
            qf * xi.powi(p - 1) * tau.powi(2 * p - 1) * (1.0 + tau.powi(q)).powf(-alpha)
        };
        (Domain::Left, t, g)
    };
    if near_infinity {
        let s = split(v.xi_a);
        quad("I-5a", ws, 0.0, s, sink, k5)?;
        quad("I-5b", ws, s, v.xi_a, sink, k5)?;
    } else {
        quad("I-5", ws, 0.0, v.xi_a, sink, k5)?;
    }

    // 1 - ξ^q b, exactly zero on the boundary node; the q-th root below
    // would turn a rounding error there into an O(ε^{1/q}) interval
    let gap = -(qf * (xi / v.xi_b).ln()).exp_m1();

    // ∫_a^b
    let ws = v.ws(Domain::Middle);
    if xi > v.xi_b - v.delta {
        // 1 - ξ^q y = t^q removes the near-singularity at y = b
        let lo = root(gap, q);
        let hi = root(1.0 - big_x * v.a, q);
        quad("I-6b", ws, lo, hi, sink, |t| {
            let y = ((1.0 - t.powi(q)) / big_x).clamp(v.a, v.b);
            (Domain::Middle, y, qf * t.powi(q - p - 1) / big_x)
        })?;
    } else {
        quad("I-6", ws, v.a, v.b, sink, |y| {
            (Domain::Middle, y, (1.0 - big_x * y).powf(-alpha))
        })?;
    }

    // ∫_b^x
    let ws = v.ws(Domain::Right);
    // q s^{2α-1} t^{q-p-1} at the point s^{1/q}, s = ξ^q + t^q
    let k7 = |t: f64| {
        if t <= xi {
            let tau = t / xi;
            let s = 1.0 + tau.powi(q);
            let g = qf * xi.powi(p - 1) * s.powf(2.0 * alpha - 1.0) * tau.powi(q - p - 1);
            (Domain::Right, xi * root(s, q), g)
        } else {
            let s = 1.0 + (xi / t).powi(q);
            let g = qf * t.powi(p - 1) * s.powf(2.0 * alpha - 1.0);
            (Domain::Right, t * root(s, q), g)
        }
    };
    if near_infinity {
        let s = split(v.xi_b);
        // (s^q - ξ^q)^{1/q}; both vanish at ξ = 0
        let upper = if s > 0.0 { s * root(1.0 - (xi / s).powi(q), q) } else { 0.0 };
        quad("I-7a", ws, 0.0, upper, sink, k7)?;
        quad("I-7b", ws, s, v.xi_b, sink, |eta| {
            (Domain::Right, eta, qf * far_kernel(eta, xi, -1.0, p, q, alpha))
        })
    } else {
        quad("I-7", ws, 0.0, root(gap / v.b, q), sink, k7)
    }
}

/// Pushes `I⁻ - I⁺` at a grid point (divided by `ξ^p` in the outer domains).
pub(crate) fn difference<S: Sink>(
    grid: &TriDomainGrid,
    domain: Domain,
    coord: f64,
    sink: &mut S,
) -> Result<()> {
    minus_part(grid, domain, coord, 1.0, sink)?;
    plus_part(grid, domain, coord, -1.0, sink)
}

pub(crate) fn minus_part<S: Sink>(
    grid: &TriDomainGrid,
    domain: Domain,
    coord: f64,
    sign: f64,
    sink: &mut S,
) -> Result<()> {
    let view = View::new(grid, false);
    let mut fwd = Forward {
        inner: sink,
        mirrored: false,
        sign,
    };
    minus(&view, domain, coord, &mut fwd)
}

pub(crate) fn plus_part<S: Sink>(
    grid: &TriDomainGrid,
    domain: Domain,
    coord: f64,
    sign: f64,
    sink: &mut S,
) -> Result<()> {
    let view = View::new(grid, true);
    let mut fwd = Forward {
        inner: sink,
        mirrored: true,
        sign,
    };
    let coord = if domain == Domain::Middle { -coord } else { coord };
    minus(&view, domain.mirrored(), coord, &mut fwd)
}
