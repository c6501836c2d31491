use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::spectral::{check_range, ChebCoefficients, SpectralWorkspace};

/// Order `α = p/q` with coprime `0 < p < q ≤ 128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalOrder {
    p: u32,
    q: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalOrder {
    pub const MAX_DENOMINATOR: u32 = 128;

    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p >= q {
            return Err(Error::InvalidOrder(format!(
                "{p}/{q}: need 0 < p < q"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidOrder(format!(
                "{p}/{q} is not in lowest terms"
            )));
        }
        if q > Self::MAX_DENOMINATOR {
            return Err(Error::InvalidOrder(format!(
                "{p}/{q}: denominator above {}",
                Self::MAX_DENOMINATOR
            )));
        }
        Ok(Self { p, q })
    }

    /// Smallest-denominator fraction equal to `x` within 1e-12.
    pub fn from_decimal(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::InvalidOrder(format!("{x} is not in (0, 1)")));
        }
        for q in 2..=Self::MAX_DENOMINATOR {
            let p = (x * q as f64).round();
            if p >= 1.0 && ((p / q as f64) - x).abs() < 1e-12 {
                return Self::new(p as u32, q);
            }
        }
        Err(Error::InvalidOrder(format!(
            "{x} has no representation p/q with q <= {}",
            Self::MAX_DENOMINATOR
        )))
    }

    /// Parses `p/q` strictly, or a decimal that is converted to lowest terms.
    /// The flag reports whether a decimal conversion happened.
    pub fn parse(s: &str) -> Result<(Self, bool)> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: u32 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidOrder(format!("bad numerator in {s:?}")))?;
            let q: u32 = q
                .trim()
                .parse()
                .map_err(|_| Error::InvalidOrder(format!("bad denominator in {s:?}")))?;
            Ok((Self::new(p, q)?, false))
        } else {
            let x: f64 = s
                .parse()
                .map_err(|_| Error::InvalidOrder(format!("cannot parse {s:?}")))?;
            Ok((Self::from_decimal(x)?, true))
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// The order `α/2`, reduced.
    pub fn half(&self) -> Result<Self> {
        if self.p % 2 == 0 {
            Self::new(self.p / 2, self.q)
        } else {
            Self::new(self.p, 2 * self.q)
        }
    }
}

impl fmt::Display for RationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s).map(|(o, _)| o)
    }
}

/// Which piece of the line a coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `x < a`, coordinate `ξ₋ = (-x)^{-1/q}`.
    Left,
    /// `a ≤ x ≤ b`, coordinate `x`.
    Middle,
    /// `x > b`, coordinate `ξ₊ = x^{-1/q}`.
    Right,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Left, Domain::Middle, Domain::Right];

    pub fn label(&self) -> &'static str {
        match self {
            Domain::Left => "I",
            Domain::Middle => "II",
            Domain::Right => "III",
        }
    }

    pub(crate) fn mirrored(self) -> Self {
        match self {
            Domain::Left => Domain::Right,
            Domain::Middle => Domain::Middle,
            Domain::Right => Domain::Left,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Boundaries `a < 0 < b`, near-boundary threshold `δ` and per-domain degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainPartition {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub n_left: usize,
    pub n_middle: usize,
    pub n_right: usize,
}

impl DomainPartition {
    pub fn new(
        a: f64,
        b: f64,
        delta: f64,
        n_left: usize,
        n_middle: usize,
        n_right: usize,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < 0.0 && b > 0.0) {
            return Err(Error::InvalidPartition(format!(
                "need a < 0 < b, got a={a}, b={b}"
            )));
        }
        let limit = 0.5 * a.abs().min(b).min(1.0);
        if !(delta > 0.0 && delta <= limit) {
            return Err(Error::InvalidPartition(format!(
                "delta={delta} must lie in (0, {limit}]"
            )));
        }
        for n in [n_left, n_middle, n_right] {
            if n < 2 {
                return Err(Error::InvalidResolution(n));
            }
        }
        Ok(Self {
            a,
            b,
            delta,
            n_left,
            n_middle,
            n_right,
        })
    }

    /// Same degree `n` in all three domains.
    pub fn uniform(a: f64, b: f64, delta: f64, n: usize) -> Result<Self> {
        Self::new(a, b, delta, n, n, n)
    }

    /// `γ = min(1/(2ξ), 1/δ)`.
    pub fn gamma(&self, xi: f64) -> f64 {
        (0.5 / xi).min(1.0 / self.delta)
    }

    pub fn degree(&self, d: Domain) -> usize {
        match d {
            Domain::Left => self.n_left,
            Domain::Middle => self.n_middle,
            Domain::Right => self.n_right,
        }
    }

    /// Partition with `a`, `b` divided by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.a / factor,
            self.b / factor,
            self.delta.min(0.5 * (self.a.abs() / factor).min(self.b / factor).min(1.0)),
            self.n_left,
            self.n_middle,
            self.n_right,
        )
    }
}

/// Collocation grids of the three domains for a given order and partition.
#[derive(Debug, Clone)]
pub struct TriDomainGrid {
    order: RationalOrder,
    partition: DomainPartition,
    workspaces: [Arc<SpectralWorkspace>; 3],
    nodes: [Vec<f64>; 3],
    xi_a: f64,
    xi_b: f64,
}

impl TriDomainGrid {
    pub fn new(order: RationalOrder, partition: DomainPartition) -> Result<Self> {
        let mut cache: Vec<Arc<SpectralWorkspace>> = Vec::new();
        let mut ws_for = |n: usize| -> Result<Arc<SpectralWorkspace>> {
            if let Some(ws) = cache.iter().find(|w| w.degree() == n) {
                return Ok(ws.clone());
            }
            let ws = Arc::new(SpectralWorkspace::new(n)?);
            cache.push(ws.clone());
            Ok(ws)
        };
        let workspaces = [
            ws_for(partition.n_left)?,
            ws_for(partition.n_middle)?,
            ws_for(partition.n_right)?,
        ];
        let qf = order.q() as f64;
        let xi_a = (-partition.a).powf(-1.0 / qf);
        let xi_b = partition.b.powf(-1.0 / qf);
        let nodes = [
            workspaces[0].mapped_nodes(0.0, xi_a),
            workspaces[1].mapped_nodes(partition.a, partition.b),
            workspaces[2].mapped_nodes(0.0, xi_b),
        ];
        Ok(Self {
            order,
            partition,
            workspaces,
            nodes,
            xi_a,
            xi_b,
        })
    }

    pub fn order(&self) -> RationalOrder {
        self.order
    }

    pub fn partition(&self) -> &DomainPartition {
        &self.partition
    }

    fn idx(d: Domain) -> usize {
        match d {
            Domain::Left => 0,
            Domain::Middle => 1,
            Domain::Right => 2,
        }
    }

    pub fn workspace(&self, d: Domain) -> &SpectralWorkspace {
        &self.workspaces[Self::idx(d)]
    }

    /// Mapped collocation nodes of a domain (ξ₋, x or ξ₊).
    pub fn nodes(&self, d: Domain) -> &[f64] {
        &self.nodes[Self::idx(d)]
    }

    /// `(-a)^{-1/q}`, the ξ₋ image of `x = a`.
    pub fn xi_a(&self) -> f64 {
        self.xi_a
    }

    /// `b^{-1/q}`, the ξ₊ image of `x = b`.
    pub fn xi_b(&self) -> f64 {
        self.xi_b
    }

    /// Coordinate interval `(lower, upper)` of a domain.
    pub fn interval(&self, d: Domain) -> (f64, f64) {
        match d {
            Domain::Left => (0.0, self.xi_a),
            Domain::Middle => (self.partition.a, self.partition.b),
            Domain::Right => (0.0, self.xi_b),
        }
    }

    pub fn len(&self, d: Domain) -> usize {
        self.partition.degree(d) + 1
    }

    /// Size of the stacked vector `(u_I, u_II, u_III)`.
    pub fn total_len(&self) -> usize {
        Domain::ALL.iter().map(|&d| self.len(d)).sum()
    }

    /// Offset of a domain block within the stacked vector.
    pub fn offset(&self, d: Domain) -> usize {
        match d {
            Domain::Left => 0,
            Domain::Middle => self.len(Domain::Left),
            Domain::Right => self.len(Domain::Left) + self.len(Domain::Middle),
        }
    }

    /// Physical position of a local coordinate (`±∞` at `ξ = 0`).
    pub fn physical(&self, d: Domain, coord: f64) -> f64 {
        let qf = self.order.q() as f64;
        match d {
            Domain::Left => {
                if coord == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -coord.powf(-qf)
                }
            }
            Domain::Middle => coord,
            Domain::Right => {
                if coord == 0.0 {
                    f64::INFINITY
                } else {
                    coord.powf(-qf)
                }
            }
        }
    }

    /// Domain and local coordinate of a physical position.
    pub fn locate(&self, x: f64) -> (Domain, f64) {
        let qf = self.order.q() as f64;
        if x < self.partition.a {
            let xi = if x.is_infinite() { 0.0 } else { (-x).powf(-1.0 / qf) };
            (Domain::Left, xi.min(self.xi_a))
        } else if x > self.partition.b {
            let xi = if x.is_infinite() { 0.0 } else { x.powf(-1.0 / qf) };
            (Domain::Right, xi.min(self.xi_b))
        } else {
            (Domain::Middle, x)
        }
    }

    /// `|x|^{-(1+α)} = ξ^{p+q}`, the factor turning a trace into a value.
    pub fn unscale_factor(&self, xi: f64) -> f64 {
        xi.powi((self.order.p() + self.order.q()) as i32)
    }

    pub(crate) fn check_coord(&self, d: Domain, coord: f64) -> Result<()> {
        let (lo, hi) = self.interval(d);
        check_range(coord, lo, hi)
    }
}

/// A function on `ℝ ∪ {∞}` stored as `u` on `[a, b]` and the rescaled
/// traces `u(x)|x|^{1+α}` on the two ξ grids.
#[derive(Debug, Clone)]
pub struct TriDomainFunction {
    grid: Arc<TriDomainGrid>,
    left: Vec<f64>,
    middle: Vec<f64>,
    right: Vec<f64>,
}

impl TriDomainFunction {
    /// Samples the three traces at the collocation nodes. `left` and
    /// `right` receive ξ coordinates and must return `u(x)|x|^{1+α}`
    /// (including the limit at `ξ = 0`); `middle` receives `x`.
    pub fn from_traces(
        grid: Arc<TriDomainGrid>,
        left: impl Fn(f64) -> f64,
        middle: impl Fn(f64) -> f64,
        right: impl Fn(f64) -> f64,
    ) -> Self {
        let left_vals = grid.nodes(Domain::Left).iter().map(|&t| left(t)).collect();
        let middle_vals = grid.nodes(Domain::Middle).iter().map(|&t| middle(t)).collect();
        let right_vals = grid.nodes(Domain::Right).iter().map(|&t| right(t)).collect();
        Self {
            grid,
            left: left_vals,
            middle: middle_vals,
            right: right_vals,
        }
    }

    pub fn from_parts(
        grid: Arc<TriDomainGrid>,
        left: Vec<f64>,
        middle: Vec<f64>,
        right: Vec<f64>,
    ) -> Result<Self> {
        check_len(grid.len(Domain::Left), left.len())?;
        check_len(grid.len(Domain::Middle), middle.len())?;
        check_len(grid.len(Domain::Right), right.len())?;
        Ok(Self {
            grid,
            left,
            middle,
            right,
        })
    }

    pub fn zeros(grid: Arc<TriDomainGrid>) -> Self {
        let (l, m, r) = (
            grid.len(Domain::Left),
            grid.len(Domain::Middle),
            grid.len(Domain::Right),
        );
        Self {
            grid,
            left: vec![0.0; l],
            middle: vec![0.0; m],
            right: vec![0.0; r],
        }
    }

    pub fn from_stacked(grid: Arc<TriDomainGrid>, stacked: &[f64]) -> Result<Self> {
        check_len(grid.total_len(), stacked.len())?;
        let (l, m) = (grid.len(Domain::Left), grid.len(Domain::Middle));
        Ok(Self {
            left: stacked[..l].to_vec(),
            middle: stacked[l..l + m].to_vec(),
            right: stacked[l + m..].to_vec(),
            grid,
        })
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.grid.total_len());
        v.extend_from_slice(&self.left);
        v.extend_from_slice(&self.middle);
        v.extend_from_slice(&self.right);
        v
    }

    pub fn grid(&self) -> &Arc<TriDomainGrid> {
        &self.grid
    }

    pub fn order(&self) -> RationalOrder {
        self.grid.order()
    }

    /// Stored node values of one domain (traces in the outer domains).
    pub fn values(&self, d: Domain) -> &[f64] {
        match d {
            Domain::Left => &self.left,
            Domain::Middle => &self.middle,
            Domain::Right => &self.right,
        }
    }

    pub fn values_mut(&mut self, d: Domain) -> &mut [f64] {
        match d {
            Domain::Left => &mut self.left,
            Domain::Middle => &mut self.middle,
            Domain::Right => &mut self.right,
        }
    }

    /// Chebyshev coefficients of the stored values of one domain.
    pub fn chebyshev(&self, d: Domain) -> ChebCoefficients {
        self.grid
            .workspace(d)
            .chebyshev_coefficients(self.values(d))
            .expect("block length matches its workspace")
    }

    /// Resolution indicators (last `tail` coefficients relative to the
    /// largest) of the left, middle and right blocks.
    pub fn tail_indicators(&self, tail: usize) -> [f64; 3] {
        Domain::ALL.map(|d| self.chebyshev(d).resolution_indicator(tail))
    }

    /// Barycentric interpolant of the trace of domain `d` at a local coordinate.
    pub fn evaluate(&self, d: Domain, coord: f64) -> Result<f64> {
        self.grid.check_coord(d, coord)?;
        Ok(self.interpolate(d, coord))
    }

    /// As [`evaluate`](Self::evaluate), without the range check.
    pub(crate) fn interpolate(&self, d: Domain, coord: f64) -> f64 {
        self.grid
            .workspace(d)
            .interpolate_mapped(self.grid.nodes(d), self.values(d), coord)
    }

    /// Value `u(x)` at any physical point; `0` at `x = ±∞`.
    pub fn value_at(&self, x: f64) -> f64 {
        let (d, coord) = self.grid.locate(x);
        let v = self.interpolate(d, coord);
        match d {
            Domain::Middle => v,
            _ => v * self.grid.unscale_factor(coord),
        }
    }

    /// Relative mismatch of the two representations of `u(a)` and `u(b)`.
    pub fn matching_defect(&self) -> (f64, f64) {
        let one_alpha = 1.0 + self.order().alpha();
        let p = self.grid.partition();
        let n_mid = self.middle.len();
        // node 0 of each ξ grid is the finite boundary
        let at_a = self.middle[n_mid - 1] * (-p.a).powf(one_alpha);
        let at_b = self.middle[0] * p.b.powf(one_alpha);
        let rel = |x: f64, y: f64| {
            let s = x.abs().max(y.abs());
            if s == 0.0 {
                0.0
            } else {
                (x - y).abs() / s
            }
        };
        (rel(self.left[0], at_a), rel(self.right[0], at_b))
    }

    /// `s·self + t·other` on the same grid.
    pub fn combine(&self, s: f64, other: &Self, t: f64) -> Result<Self> {
        check_len(self.grid.total_len(), other.grid.total_len())?;
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| s * a + t * b).collect();
        Ok(Self {
            grid: self.grid.clone(),
            left: mix(&self.left, &other.left),
            middle: mix(&self.middle, &other.middle),
            right: mix(&self.right, &other.right),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_validation() {
        assert!(RationalOrder::new(1, 2).is_ok());
        assert!(RationalOrder::new(2, 4).is_err());
        assert!(RationalOrder::new(3, 2).is_err());
        assert!(RationalOrder::new(0, 3).is_err());
        assert!(RationalOrder::new(1, 129).is_err());
        assert_eq!(RationalOrder::parse("0.8").unwrap(), (RationalOrder::new(4, 5).unwrap(), true));
        assert_eq!(RationalOrder::parse("19/50").unwrap().0.alpha(), 0.38);
        assert!(RationalOrder::parse("4/10").is_err());
        assert!(RationalOrder::parse("abc").is_err());
        assert_eq!(RationalOrder::new(1, 2).unwrap().half().unwrap().to_string(), "1/4");
        assert_eq!(RationalOrder::new(4, 5).unwrap().half().unwrap().to_string(), "2/5");
    }

    #[test]
    fn partition_validation() {
        assert!(DomainPartition::uniform(-2.0, 2.0, 1e-2, 20).is_ok());
        assert!(DomainPartition::uniform(2.0, 3.0, 1e-2, 20).is_err());
        assert!(DomainPartition::uniform(-1e-2, 1e-2, 5e-3, 20).is_ok());
        assert!(DomainPartition::uniform(-1e-2, 1e-2, 6e-3, 20).is_err());
        assert!(DomainPartition::uniform(-2.0, 2.0, 1e-2, 1).is_err());
        let p = DomainPartition::uniform(-2.0, 2.0, 1e-2, 20).unwrap();
        assert_eq!(p.gamma(1e-3), 100.0);
        assert_eq!(p.gamma(0.1), 5.0);
    }

    #[test]
    fn grid_coordinates() {
        let order = RationalOrder::new(1, 2).unwrap();
        let part = DomainPartition::new(-4.0, 9.0, 1e-2, 10, 12, 14).unwrap();
        let g = TriDomainGrid::new(order, part).unwrap();
        assert_eq!(g.total_len(), 11 + 13 + 15);
        assert!((g.xi_a() - 0.5).abs() < 1e-15);
        assert!((g.xi_b() - 1.0 / 3.0).abs() < 1e-15);
        // shared boundary points
        assert!((g.physical(Domain::Left, g.nodes(Domain::Left)[0]) + 4.0).abs() < 1e-12);
        assert!((g.physical(Domain::Right, g.nodes(Domain::Right)[0]) - 9.0).abs() < 1e-12);
        assert_eq!(g.physical(Domain::Right, 0.0), f64::INFINITY);
        let (d, xi) = g.locate(-16.0);
        assert_eq!(d, Domain::Left);
        assert!((xi - 0.25).abs() < 1e-15);
        // monotone maps
        let xs: Vec<f64> = g.nodes(Domain::Left).iter().map(|&t| g.physical(Domain::Left, t)).collect();
        assert!(xs.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn evaluate_and_matching() {
        let order = RationalOrder::new(1, 2).unwrap();
        let part = DomainPartition::uniform(-2.0, 3.0, 1e-2, 16).unwrap();
        let g = Arc::new(TriDomainGrid::new(order, part).unwrap());
        let u = TriDomainFunction::from_traces(
            g.clone(),
            |xi| xi / (1.0 + xi.powi(4)),
            |x| 1.0 / (1.0 + x * x),
            |xi| xi / (1.0 + xi.powi(4)),
        );
        let (da, db) = u.matching_defect();
        assert!(da < 1e-12 && db < 1e-12);
        assert_eq!(u.evaluate(Domain::Left, 0.0).unwrap(), 0.0);
        let node = g.nodes(Domain::Middle)[3];
        assert_eq!(u.evaluate(Domain::Middle, node).unwrap(), u.values(Domain::Middle)[3]);
        assert!(u.evaluate(Domain::Middle, 3.5).is_err());
        assert!((u.value_at(10.0) - 1.0 / 101.0).abs() < 1e-9);
        assert_eq!(u.value_at(f64::NEG_INFINITY), 0.0);

        let sq = TriDomainFunction::from_traces(g, |_| 0.0, |x| x * x, |_| 0.0);
        assert!((sq.evaluate(Domain::Middle, 0.5).unwrap() - 0.25).abs() < 1e-13);
        let back = TriDomainFunction::from_stacked(sq.grid().clone(), &sq.stacked()).unwrap();
        assert_eq!(back.stacked(), sq.stacked());
    }
}
