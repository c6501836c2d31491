//! Chebyshev collocation primitives on Chebyshev–Lobatto points.
//!
//! All routines work on the reference interval `[-1, 1]` and accept an
//! affine image `[lower, upper]` through the map
//! `t = upper (1 + l)/2 + lower (1 - l)/2`. Node `m` is `cos(mπ/N)`, so the
//! first entry of every sampled vector sits at `upper`.

use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};

/// Nodes, Clenshaw–Curtis weights, differentiation matrix and barycentric
/// weights for a fixed polynomial degree `N`.
#[derive(Debug, Clone)]
pub struct SpectralWorkspace {
    n: usize,
    nodes: Vec<f64>,
    cc_weights: Vec<f64>,
    /// Row-major `(N+1) x (N+1)` matrix acting on values at `nodes`.
    diff_matrix: Vec<f64>,
    bary_weights: Vec<f64>,
    /// `cos(kπ/N)` for `k = 0..2N`, used by the cosine transform.
    cos_table: Vec<f64>,
}

impl SpectralWorkspace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidResolution(n));
        }
        let nf = n as f64;
        // sin form keeps the node set exactly antisymmetric
        let nodes: Vec<f64> = (0..=n)
            .map(|m| (PI * (nf - 2.0 * m as f64) / (2.0 * nf)).sin())
            .collect();

        let cos_table: Vec<f64> = (0..2 * n).map(|k| (PI * k as f64 / nf).cos()).collect();
        let cos_idx = |k: usize| cos_table[k % (2 * n)];

        // Clenshaw–Curtis weights
        let mut cc_weights = vec![0.0; n + 1];
        if n % 2 == 0 {
            let w_end = 1.0 / (nf * nf - 1.0);
            cc_weights[0] = w_end;
            cc_weights[n] = w_end;
            for (m, w) in cc_weights.iter_mut().enumerate().take(n).skip(1) {
                let mut v = 1.0;
                for k in 1..n / 2 {
                    let kf = k as f64;
                    v -= 2.0 * cos_idx(2 * k * m) / (4.0 * kf * kf - 1.0);
                }
                v -= cos_idx(n * m) / (nf * nf - 1.0);
                *w = 2.0 * v / nf;
            }
        } else {
            let w_end = 1.0 / (nf * nf);
            cc_weights[0] = w_end;
            cc_weights[n] = w_end;
            for (m, w) in cc_weights.iter_mut().enumerate().take(n).skip(1) {
                let mut v = 1.0;
                for k in 1..=(n - 1) / 2 {
                    let kf = k as f64;
                    v -= 2.0 * cos_idx(2 * k * m) / (4.0 * kf * kf - 1.0);
                }
                *w = 2.0 * v / nf;
            }
        }

        let bary_weights: Vec<f64> = (0..=n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();

        // Differentiation matrix; node differences via the product formula
        // cos(iπ/N) - cos(jπ/N) = 2 sin((i+j)π/2N) sin((j-i)π/2N).
        let c = |i: usize| -> f64 {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            if i == 0 || i == n {
                2.0 * s
            } else {
                s
            }
        };
        let mut diff_matrix = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            let mut row_sum = 0.0;
            for j in 0..=n {
                if i == j {
                    continue;
                }
                let dx = 2.0
                    * (PI * (i + j) as f64 / (2.0 * nf)).sin()
                    * (PI * (j as f64 - i as f64) / (2.0 * nf)).sin();
                let d = c(i) / (c(j) * dx);
                diff_matrix[i * (n + 1) + j] = d;
                row_sum += d;
            }
            diff_matrix[i * (n + 1) + i] = -row_sum;
        }

        Ok(Self {
            n,
            nodes,
            cc_weights,
            diff_matrix,
            bary_weights,
            cos_table,
        })
    }

    /// Polynomial degree `N` (there are `N + 1` nodes).
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cc_weights(&self) -> &[f64] {
        &self.cc_weights
    }

    pub fn bary_weights(&self) -> &[f64] {
        &self.bary_weights
    }

    /// Entry `(i, j)` of the differentiation matrix on `[-1, 1]`.
    pub fn diff_entry(&self, i: usize, j: usize) -> f64 {
        self.diff_matrix[i * (self.n + 1) + j]
    }

    pub fn diff_row(&self, i: usize) -> &[f64] {
        &self.diff_matrix[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    /// Image of the nodes under the affine map onto `[lower, upper]`.
    pub fn mapped_nodes(&self, lower: f64, upper: f64) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&l| map_node(l, lower, upper))
            .collect()
    }

    /// Clenshaw–Curtis approximation of `∫_lower^upper f`, with `values`
    /// sampled at the mapped nodes. Reversed limits flip the sign.
    pub fn integrate(&self, values: &[f64], lower: f64, upper: f64) -> Result<f64> {
        check_len(self.len(), values.len())?;
        let s: f64 = self
            .cc_weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum();
        Ok(0.5 * (upper - lower) * s)
    }

    /// Spectral derivative of the interpolant through `values` on `[lower, upper]`.
    pub fn differentiate(&self, values: &[f64], lower: f64, upper: f64) -> Result<Vec<f64>> {
        check_len(self.len(), values.len())?;
        let scale = 2.0 / (upper - lower);
        // diagonal = -(off-diagonal sum), so D v = Σ_j D_ij (v_j - v_i)
        Ok((0..=self.n)
            .map(|i| {
                let row = self.diff_row(i);
                let vi = values[i];
                scale * compensated_sum(row.iter().zip(values).map(|(d, v)| d * (v - vi)))
            })
            .collect())
    }

    /// Evaluates the degree-`N` interpolant at `x` in `[lower, upper]`.
    pub fn barycentric_eval(&self, values: &[f64], lower: f64, upper: f64, x: f64) -> Result<f64> {
        check_len(self.len(), values.len())?;
        check_range(x, lower, upper)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, &l) in self.nodes.iter().enumerate() {
            let t = map_node(l, lower, upper);
            let c = self.bary_weights[j] / (x - t);
            // x on a node, or so close that the weight overflows
            if c.is_infinite() {
                return Ok(values[j]);
            }
            num += c * values[j];
            den += c;
        }
        Ok(num / den)
    }

    /// Writes the Lagrange basis values `L_j(x)` into `out`.
    ///
    /// `mapped` must hold the nodes mapped onto the interval containing `x`.
    /// No range check is done here; callers validate beforehand.
    pub fn basis_into(&self, mapped: &[f64], x: f64, out: &mut [f64]) {
        debug_assert_eq!(mapped.len(), self.len());
        debug_assert_eq!(out.len(), self.len());
        let hit = |(&t, &w): (&f64, &f64)| (w / (x - t)).is_infinite();
        if let Some(hit) = mapped.iter().zip(&self.bary_weights).position(hit) {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[hit] = 1.0;
            return;
        }
        let mut den = 0.0;
        for ((o, &t), &w) in out.iter_mut().zip(mapped).zip(&self.bary_weights) {
            let c = w / (x - t);
            *o = c;
            den += c;
        }
        let inv = 1.0 / den;
        out.iter_mut().for_each(|o| *o *= inv);
    }

    /// Interpolant value using pre-mapped nodes; no range check.
    pub fn interpolate_mapped(&self, mapped: &[f64], values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&t, &w), &v) in mapped.iter().zip(&self.bary_weights).zip(values) {
            let c = w / (x - t);
            if c.is_infinite() {
                return v;
            }
            num += c * v;
            den += c;
        }
        num / den
    }

    /// Coefficients in the `T_n` basis of the interpolant through `values`.
    pub fn chebyshev_coefficients(&self, values: &[f64]) -> Result<ChebCoefficients> {
        check_len(self.len(), values.len())?;
        let n = self.n;
        let nf = n as f64;
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (m, &v) in values.iter().enumerate() {
                let half = if m == 0 || m == n { 0.5 } else { 1.0 };
                s += half * v * self.cos_table[(k * m) % (2 * n)];
            }
            let half = if k == 0 || k == n { 0.5 } else { 1.0 };
            *c = 2.0 * half * s / nf;
        }
        Ok(ChebCoefficients { coeffs })
    }

    /// Node values of the expansion `Σ c_n T_n`.
    pub fn chebyshev_values(&self, coeffs: &ChebCoefficients) -> Result<Vec<f64>> {
        check_len(self.len(), coeffs.coeffs.len())?;
        let n = self.n;
        Ok((0..=n)
            .map(|m| {
                coeffs
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * self.cos_table[(k * m) % (2 * n)])
                    .sum()
            })
            .collect())
    }
}

/// Chebyshev expansion coefficients `c_0 … c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoefficients {
    pub coeffs: Vec<f64>,
}

impl ChebCoefficients {
    /// Largest `|c_n|` among the last `tail` coefficients, relative to the
    /// largest coefficient overall. Zero for the zero function.
    pub fn resolution_indicator(&self, tail: usize) -> f64 {
        let n = self.coeffs.len();
        let tail = tail.clamp(1, n);
        let max_all = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if max_all == 0.0 {
            return 0.0;
        }
        let max_tail = self.coeffs[n - tail..]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        max_tail / max_all
    }
}

/// Neumaier step: adds `term` to `sum`, collecting the rounding in `comp`.
#[inline]
pub(crate) fn add_compensated(sum: &mut f64, comp: &mut f64, term: f64) {
    let t = *sum + term;
    if sum.abs() >= term.abs() {
        *comp += (*sum - t) + term;
    } else {
        *comp += (term - t) + *sum;
    }
    *sum = t;
}

pub(crate) fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0, 0.0);
    for t in terms {
        add_compensated(&mut sum, &mut comp, t);
    }
    sum + comp
}

pub(crate) fn map_node(l: f64, lower: f64, upper: f64) -> f64 {
    0.5 * upper * (1.0 + l) + 0.5 * lower * (1.0 - l)
}

pub(crate) fn check_range(x: f64, lower: f64, upper: f64) -> Result<()> {
    let (lo, hi) = if lower <= upper {
        (lower, upper)
    } else {
        (upper, lower)
    };
    if !(lo..=hi).contains(&x) {
        return Err(Error::OutOfRange {
            value: x,
            lower: lo,
            upper: hi,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Weights from the exactness conditions `Σ w_m l_m^j = ∫ l^j`, solved
    /// by Gaussian elimination on the Vandermonde system.
    fn weights_by_moments(nodes: &[f64]) -> Vec<f64> {
        let n = nodes.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        for (j, row) in a.iter_mut().enumerate() {
            for (m, &l) in nodes.iter().enumerate() {
                row[m] = l.powi(j as i32);
            }
            row[n] = if j % 2 == 0 { 2.0 / (j as f64 + 1.0) } else { 0.0 };
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn rejects_low_resolution() {
        assert_eq!(
            SpectralWorkspace::new(1).unwrap_err(),
            Error::InvalidResolution(1)
        );
    }

    #[test]
    fn small_node_sets() {
        let ws = SpectralWorkspace::new(2).unwrap();
        assert_eq!(ws.nodes(), &[1.0, 0.0, -1.0]);
        let ws = SpectralWorkspace::new(4).unwrap();
        let h = 2f64.sqrt() / 2.0;
        for (a, b) in ws.nodes().iter().zip([1.0, h, 0.0, -h, -1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_match_moment_oracle() {
        let ws = SpectralWorkspace::new(2).unwrap();
        let w = ws.cc_weights();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((w[2] - 1.0 / 3.0).abs() < 1e-15);
        for n in 3..=12 {
            let ws = SpectralWorkspace::new(n).unwrap();
            let oracle = weights_by_moments(ws.nodes());
            for (a, b) in ws.cc_weights().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12, "N={n}");
            }
        }
    }

    #[test]
    fn weights_sum_and_monomials() {
        for n in [2, 3, 16, 17, 128, 401, 1024] {
            let ws = SpectralWorkspace::new(n).unwrap();
            let s: f64 = ws.cc_weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "N={n}: {s}");
        }
        for n in [8, 9, 30, 64] {
            let ws = SpectralWorkspace::new(n).unwrap();
            for j in 0..=n {
                let v: Vec<f64> = ws.nodes().iter().map(|l| l.powi(j as i32)).collect();
                let exact = if j % 2 == 0 { 2.0 / (j as f64 + 1.0) } else { 0.0 };
                assert!((ws.integrate(&v, -1.0, 1.0).unwrap() - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let ws = SpectralWorkspace::new(2).unwrap();
        assert!((ws.integrate(&[1.0; 3], 0.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((ws.integrate(&[1.0; 3], 3.0, 0.0).unwrap() + 3.0).abs() < 1e-15);
        let v: Vec<f64> = ws.nodes().iter().map(|t| t * t).collect();
        assert!((ws.integrate(&v, -1.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let ws = SpectralWorkspace::new(16).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|t| t.exp()).collect();
        let exact = 1f64.exp() - (-1f64).exp();
        assert!((ws.integrate(&v, -1.0, 1.0).unwrap() - exact).abs() < 1e-13);
        assert!((exact - 2.350_402_387_287_602_8).abs() < 1e-15);
        assert!(matches!(
            ws.integrate(&[1.0; 3], 0.0, 1.0),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn differentiate_examples() {
        for n in [2, 10, 100, 400] {
            let ws = SpectralWorkspace::new(n).unwrap();
            let d = ws.differentiate(&vec![3.5; n + 1], -2.0, 5.0).unwrap();
            assert!(d.iter().all(|v| v.abs() < 1e-11), "N={n}");
            let t = ws.mapped_nodes(-2.0, 5.0);
            let d = ws.differentiate(&t, -2.0, 5.0).unwrap();
            let tol = 1e-13 * (n * n) as f64;
            assert!(d.iter().all(|v| (v - 1.0).abs() < tol), "N={n}");
        }
        let ws = SpectralWorkspace::new(8).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|t| t.powi(3)).collect();
        let d = ws.differentiate(&v, -1.0, 1.0).unwrap();
        for (di, t) in d.iter().zip(ws.nodes()) {
            assert!((di - 3.0 * t * t).abs() < 1e-12);
        }
    }

    #[test]
    fn diff_matrix_rows_sum_to_zero() {
        for n in [5, 64, 256] {
            let ws = SpectralWorkspace::new(n).unwrap();
            for i in 0..=n {
                let s: f64 = ws.diff_row(i).iter().sum();
                assert!(s.abs() <= 1e-11 * (n * n) as f64);
            }
        }
    }

    #[test]
    fn monomial_derivatives() {
        let n = 20;
        let ws = SpectralWorkspace::new(n).unwrap();
        for k in 1..=n {
            let v: Vec<f64> = ws.nodes().iter().map(|l| l.powi(k as i32)).collect();
            let d = ws.differentiate(&v, -1.0, 1.0).unwrap();
            for (di, l) in d.iter().zip(ws.nodes()) {
                let exact = k as f64 * l.powi(k as i32 - 1);
                assert!((di - exact).abs() <= 1e-10 * (n * n) as f64);
            }
        }
    }

    #[test]
    fn barycentric_examples() {
        let ws = SpectralWorkspace::new(2).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|t| t * t).collect();
        assert!((ws.barycentric_eval(&v, -1.0, 1.0, 0.5).unwrap() - 0.25).abs() < 1e-15);

        let ws = SpectralWorkspace::new(40).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|t| 1.0 / (1.0 + t * t)).collect();
        let got = ws.barycentric_eval(&v, -1.0, 1.0, 0.3).unwrap();
        assert!((got - 1.0 / 1.09).abs() < 1e-12);

        let t = ws.mapped_nodes(2.0, 7.0);
        let vals: Vec<f64> = (0..41).map(|i| i as f64 * 0.37 - 3.0).collect();
        for (m, &tm) in t.iter().enumerate() {
            assert_eq!(ws.barycentric_eval(&vals, 2.0, 7.0, tm).unwrap(), vals[m]);
        }
        assert!(matches!(
            ws.barycentric_eval(&vals, 2.0, 7.0, 7.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn evaluation_next_to_a_node() {
        // the middle node of an even degree is 0; a subnormal offset must not give inf/inf
        let ws = SpectralWorkspace::new(400).unwrap();
        let mapped = ws.mapped_nodes(-1.0, 1.0);
        let v: Vec<f64> = mapped.iter().map(|t| 1.0 / (1.0 + t * t)).collect();
        let x = -1e-310;
        assert_eq!(ws.interpolate_mapped(&mapped, &v, x), 1.0);
        assert_eq!(ws.barycentric_eval(&v, -1.0, 1.0, x).unwrap(), 1.0);
        let mut basis = vec![0.0; 401];
        ws.basis_into(&mapped, x, &mut basis);
        assert_eq!(basis[200], 1.0);
        assert_eq!(basis.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn coefficient_examples() {
        let ws = SpectralWorkspace::new(8).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|&l| 4.0 * l.powi(3) - 3.0 * l).collect();
        let c = ws.chebyshev_coefficients(&v).unwrap();
        for (k, ck) in c.coeffs.iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((ck - want).abs() <= 1e-14, "k={k}: {ck}");
        }
        let c = ws.chebyshev_coefficients(&[5.0; 9]).unwrap();
        assert!((c.coeffs[0] - 5.0).abs() < 1e-14);
        assert!(c.coeffs[1..].iter().all(|x| x.abs() <= 1e-14));
    }

    #[test]
    fn exponential_coefficients_decay() {
        // c_n of e^l are 2 I_n(1) (half for n = 0); I_20(1) ≈ 3.9e-25
        let ws = SpectralWorkspace::new(20).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|l| l.exp()).collect();
        let c = ws.chebyshev_coefficients(&v).unwrap();
        assert!(c.coeffs[20].abs() <= 1e-15);
        // 2 I_1(1) = 1.1303182079849700
        assert!((c.coeffs[1] - 1.130_318_207_984_970).abs() < 1e-14);

        let ws = SpectralWorkspace::new(40).unwrap();
        let v: Vec<f64> = ws.nodes().iter().map(|l| l.exp()).collect();
        let c = ws.chebyshev_coefficients(&v).unwrap();
        assert!(c.resolution_indicator(5) <= 1e-14);
    }

    #[test]
    fn resolution_indicator_cases() {
        let c = ChebCoefficients { coeffs: vec![0.0; 9] };
        assert_eq!(c.resolution_indicator(3), 0.0);
        let ws = SpectralWorkspace::new(8).unwrap();
        let v: Vec<f64> = (0..=8).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c = ws.chebyshev_coefficients(&v).unwrap();
        assert!((c.resolution_indicator(1) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn coefficient_round_trip(vals in prop::collection::vec(-10.0f64..10.0, 33)) {
            let ws = SpectralWorkspace::new(32).unwrap();
            let c = ws.chebyshev_coefficients(&vals).unwrap();
            let back = ws.chebyshev_values(&c).unwrap();
            let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (a, b) in back.iter().zip(&vals) {
                prop_assert!((a - b).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn barycentric_reproduces_polynomials(
            coeffs in prop::collection::vec(-2.0f64..2.0, 13),
            xs in prop::collection::vec(0.0f64..1.0, 100),
        ) {
            let (lo, hi) = (-1.5, 3.0);
            let ws = SpectralWorkspace::new(12).unwrap();
            let poly = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
            let vals: Vec<f64> = ws.mapped_nodes(lo, hi).iter().map(|&t| poly(t)).collect();
            for u in xs {
                let x = lo + (hi - lo) * u;
                let got = ws.barycentric_eval(&vals, lo, hi, x).unwrap();
                let scale = 1.0 + coeffs.iter().map(|c| c.abs()).sum::<f64>() * 3f64.powi(12);
                prop_assert!((got - poly(x)).abs() <= 1e-12 * scale);
            }
        }
    }
}
