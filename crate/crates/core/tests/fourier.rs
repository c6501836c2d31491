use std::sync::Arc;

use fraclap::fourier::*;
use fraclap::functions::{gauss_derivative_at_zero, Builtin};
use fraclap::riesz::{DomainPartition, RationalOrder, TriDomainFunction, TriDomainGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got >= want / factor && got <= want * factor
}

#[test]
fn sweep_reproduces_reference_table() {
    let table = table1_sweep(0.5, &SweepConfig::default()).unwrap();
    let left = [8.25e-2, 8.43e-3, 1.04e-4, 8.46e-6];
    let right = [2.68e-4, 8.64e-6, 2.68e-7, 4.38e-2];
    for (row, want) in table.by_resolution.iter().zip(left) {
        assert!(within_factor(row.error, want, 3.0), "{row:?} vs {want:e}");
    }
    for (row, want) in table.by_half_period.iter().zip(right) {
        assert!(within_factor(row.error, want, 3.0), "{row:?} vs {want:e}");
    }
    // the largest torus is under-resolved and collapses
    let last = table.by_half_period.last().unwrap().error;
    assert!(last > 100.0 * table.by_half_period[2].error);
}

#[test]
fn error_plateaus_with_resolution() {
    let coarse = lorentz_error(0.5, &TorusGrid::new(1e3, 1 << 15).unwrap()).unwrap();
    let fine = lorentz_error(0.5, &TorusGrid::new(1e3, 1 << 18).unwrap()).unwrap();
    let ratio = coarse.max(fine) / coarse.min(fine);
    assert!(ratio < 2.0, "{coarse:e} vs {fine:e}");
    assert!(fine > 1e-6);
}

#[test]
fn gaussian_dft_error_at_origin() {
    let grid = TorusGrid::new(1e3, 1 << 17).unwrap();
    let u = grid.map(|x| (-x * x).exp());
    let d = fft_fractional_derivative(&u, 0.5, &grid).unwrap();
    // x = 0 is the sample with n + 1 = N/2
    let i = grid.len() / 2 - 1;
    assert!(grid.sample(i).abs() < 1e-12);
    let err = (d[i] - gauss_derivative_at_zero(0.5)).abs();
    assert!(within_factor(err, 3.71e-6, 1.5), "{err:e}");
}

fn tri(f: Builtin, order: RationalOrder, a: f64, b: f64) -> TriDomainFunction {
    let part = DomainPartition::uniform(a, b, 1e-2, 200).unwrap();
    f.sample(Arc::new(TriDomainGrid::new(order, part).unwrap()))
}

#[test]
fn methods_differ_by_torus_truncation() {
    let grid = TorusGrid::new(1e3, 1 << 17).unwrap();
    let lorentz = tri(Builtin::Lorentz, RationalOrder::new(1, 2).unwrap(), -2.0, 2.0);
    let c = compare_methods(&lorentz, &grid, 100.0).unwrap();
    assert!(c.max_difference > 1e-7 && c.max_difference < 1e-5, "{:e}", c.max_difference);
    assert!(c.points_compared > 0);
    assert_eq!(c.input_spectrum.len(), grid.len() / 2 + 1);

    let power = tri(Builtin::Powerlaw, RationalOrder::new(2, 5).unwrap(), -2.0, 2.0);
    let c = compare_methods(&power, &grid, 100.0).unwrap();
    assert!(c.max_difference >= 1e-6 && c.max_difference <= 1e-4, "{:e}", c.max_difference);
    // the discrepancy is far above the resolution limit of the DFT
    assert!(Comparison::spectral_tail(&c.derivative_spectrum) < 1e-3 * c.max_difference);
}

#[test]
fn torus_soliton_at_benjamin_ono_order_neighbourhood() {
    let grid = TorusGrid::new(100.0, 1 << 14).unwrap();
    let eq = WaveEquation {
        alpha: 0.9,
        c: 1.0,
        kappa: 0.5,
        n_power: 2,
    };
    let start = grid.map(|x| 4.0 / (1.0 + x * x));
    let sol = dft_soliton(&eq, &grid, &start, 1e-10, 500).unwrap();
    assert!(sol.residual <= 1e-10);
    // sharper than the α = 1 profile 4/(1+x²)
    let peak = sol.profile.iter().cloned().fold(f64::MIN, f64::max);
    assert!(peak > 4.0 && peak < 5.0, "{peak}");
    // samples are symmetric about index N/2 - 1 (x = 0)
    let n = grid.len();
    for k in 1..n / 2 - 1 {
        assert!((sol.profile[n / 2 - 1 - k] - sol.profile[n / 2 - 1 + k]).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(values in prop::collection::vec(-1.0f64..1.0, 64)) {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut data, false).unwrap();
        let lhs: f64 = values.iter().map(|v| v * v).sum();
        let rhs: f64 = data.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn half_order_twice_is_full_order(
        values in prop::collection::vec(-1.0f64..1.0, 128),
        alpha in 0.05f64..0.95,
    ) {
        let grid = TorusGrid::new(7.0, 128).unwrap();
        let once = fft_fractional_derivative(&values, alpha, &grid).unwrap();
        let half = fft_fractional_derivative(&values, alpha / 2.0, &grid).unwrap();
        let twice = fft_fractional_derivative(&half, alpha / 2.0, &grid).unwrap();
        let scale = once.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }
}
