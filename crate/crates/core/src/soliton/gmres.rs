//! Restarted GMRES with Givens rotations and optional right preconditioning.

use crate::error::{check_len, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Target for `‖A x - b‖₂ / ‖b‖₂`.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            restart: 50,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// True relative residual of `solution`.
    pub relative_residual: f64,
    pub converged: bool,
    /// The Arnoldi process produced a zero vector.
    pub breakdown: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` with `A` given by its action.
pub fn gmres(
    apply: impl FnMut(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    options: &GmresOptions,
) -> Result<GmresOutcome> {
    gmres_preconditioned(apply, |v: &[f64]| v.to_vec(), rhs, options)
}

/// Solves `A x = b` as `(A P⁻¹) y = b`, `x = P⁻¹ y`; `precondition` applies `P⁻¹`.
pub fn gmres_preconditioned(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    mut precondition: impl FnMut(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    options: &GmresOptions,
) -> Result<GmresOutcome> {
    let n = rhs.len();
    let b_norm = norm(rhs);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(GmresOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
            breakdown: false,
        });
    }
    let restart = options.restart.max(1);
    let target = options.tol * b_norm;
    let mut iterations = 0;
    let mut breakdown = false;
    let mut r = rhs.to_vec();
    let mut r_norm = b_norm;

    while iterations < options.max_iter {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / r_norm).collect()];
        // Hessenberg columns, rotated in place
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut cs: Vec<f64> = Vec::with_capacity(restart);
        let mut sn: Vec<f64> = Vec::with_capacity(restart);
        let mut g = vec![r_norm];

        for j in 0..restart {
            let z = precondition(&basis[j]);
            check_len(n, z.len())?;
            let mut w = apply(&z);
            check_len(n, w.len())?;
            iterations += 1;

            let mut col = vec![0.0; j + 2];
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(&w, v);
                    col[i] += hij;
                    for (wk, vk) in w.iter_mut().zip(v) {
                        *wk -= hij * vk;
                    }
                }
            }
            let w_norm = norm(&w);
            col[j + 1] = w_norm;

            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);

            let col_scale = h[j].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let lucky = w_norm <= 1e-14 * col_scale.max(f64::MIN_POSITIVE);
            if lucky {
                breakdown = true;
            }
            if lucky || g[j + 1].abs() <= target || iterations >= options.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        // back substitution for the minimiser
        let k = h.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                s -= h[l][i] * yl;
            }
            y[i] = if h[i][i] == 0.0 { 0.0 } else { s / h[i][i] };
        }
        let mut update = vec![0.0; n];
        for (v, yi) in basis.iter().zip(&y) {
            for (u, vk) in update.iter_mut().zip(v) {
                *u += yi * vk;
            }
        }
        let dx = precondition(&update);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }

        let ax = apply(&x);
        r = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        r_norm = norm(&r);
        if r_norm <= target || breakdown || r_norm == 0.0 {
            break;
        }
    }

    Ok(GmresOutcome {
        solution: x,
        iterations,
        relative_residual: r_norm / b_norm,
        converged: r_norm <= target,
        breakdown,
    })
}
