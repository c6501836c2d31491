use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use fraclap::fourier::{dft_soliton, TorusGrid, WaveEquation};
use fraclap::functions::Builtin;
use fraclap::riesz::*;
use fraclap::soliton::*;
use nalgebra::DVector;
use proptest::prelude::*;

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn fkdv(p: u32, q: u32, b: f64, delta: f64, n: usize) -> SolitonProblem {
    let part = DomainPartition::uniform(-b, b, delta, n).unwrap();
    SolitonProblem::fkdv(RationalOrder::new(p, q).unwrap(), part, 1.0).unwrap()
}

struct Converged {
    problem: SolitonProblem,
    solution: TriDomainFunction,
    record: ConvergenceRecord,
    torus: TorusGrid,
    torus_profile: Vec<f64>,
}

/// α = 4/5, c = 1 from the interpolated torus solution.
fn converged() -> &'static Converged {
    static CELL: OnceLock<Converged> = OnceLock::new();
    CELL.get_or_init(|| {
        let problem = fkdv(4, 5, 1.0, 1e-2, 200);
        let torus = TorusGrid::new(100.0, 1 << 16).unwrap();
        let eq = WaveEquation {
            alpha: 0.8,
            c: 1.0,
            kappa: 0.5,
            n_power: 2,
        };
        let dft = dft_soliton(&eq, &torus, &torus.map(benjamin_ono_profile), 1e-10, 1000).unwrap();
        let start = problem.from_torus(&dft.profile, &torus).unwrap();
        let (solution, record) = newton_solve(&problem, &start, &NewtonOptions::default()).unwrap();
        Converged {
            problem,
            solution,
            record,
            torus,
            torus_profile: dft.profile,
        }
    })
}

#[test]
fn newton_converges_from_torus_start() {
    let c = converged();
    let rec = &c.record;
    assert!(rec.converged, "{rec:?}");
    assert!(rec.newton_steps() <= 8, "{rec:?}");
    assert!(rec.final_residual() <= 1e-10);
    for w in rec.residual_norms.windows(2) {
        assert!(w[1] < w[0], "{:?}", rec.residual_norms);
    }
    for t in rec.final_tail {
        assert!(t <= 1e-10, "{t:e}");
    }
    assert!(parity_defect(&c.solution) <= 1e-9);
    // peaked at the origin
    let peak = c.solution.value_at(0.0);
    for x in [-0.5, 0.3, 2.0, 10.0] {
        assert!(c.solution.value_at(x) < peak);
    }
}

#[test]
fn torus_solution_differs_by_periodisation_error() {
    let c = converged();
    let gap = torus_difference(&c.solution, &c.torus_profile, &c.torus, 100.0).unwrap();
    assert!((1e-5..=1e-3).contains(&gap), "{gap:e}");
}

#[test]
fn converged_profile_is_a_fixed_point() {
    let c = converged();
    let (q, rec) = newton_solve(&c.problem, &c.solution, &NewtonOptions::default()).unwrap();
    assert_eq!(rec.newton_steps(), 0);
    assert_eq!(q.stacked(), c.solution.stacked());
    // polished to the rounding level, one forced step leaves it in place
    let tight = NewtonOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let (exact, rec) = newton_solve(&c.problem, &c.solution, &tight).unwrap();
    assert!(rec.converged, "{rec:?}");
    let opts = NewtonOptions {
        tol: 0.0,
        max_newton: 1,
        ..Default::default()
    };
    let (q, rec) = newton_solve(&c.problem, &exact, &opts).unwrap();
    assert_eq!(rec.newton_steps(), 1);
    let change = max_abs(q.stacked().iter().zip(exact.stacked()).map(|(a, b)| a - b));
    assert!(change <= 1e-12, "{change:e}");
}

fn probe(n: usize) -> Vec<f64> {
    (0..n).map(|i| (0.37 * i as f64).sin() + 0.5 * (1.3 * i as f64).cos()).collect()
}

/// Largest entry of `(F(Q+εv) - F(Q))/ε - Jv + εκ f v²`, with `f` the
/// outer-block unscale factor. The step is the perturbation actually stored
/// after rounding `Q + εv`, so only the evaluation itself is tested.
fn identity_defect(pr: &SolitonProblem, q: &TriDomainFunction, v: &[f64], eps: f64) -> f64 {
    let g = pr.grid();
    let base = q.stacked();
    let moved: Vec<f64> = base.iter().zip(v).map(|(a, b)| a + eps * b).collect();
    let step: Vec<f64> = moved.iter().zip(&base).map(|(m, a)| (m - a) / eps).collect();
    let r1 = pr.residual(&TriDomainFunction::from_stacked(g.clone(), &moved).unwrap()).unwrap();
    let r0 = pr.residual(q).unwrap();
    let jv = pr.jacobian_apply(q, &step).unwrap();
    let mut worst = 0.0f64;
    for d in Domain::ALL {
        for (k, &t) in g.nodes(d).iter().enumerate() {
            let i = g.offset(d) + k;
            let f = if d == Domain::Middle { 1.0 } else { g.unscale_factor(t) };
            let defect = (r1[i] - r0[i]) / eps - jv[i] + eps * pr.kappa * f * step[i] * step[i];
            worst = worst.max(defect.abs());
        }
    }
    worst
}

#[test]
fn jacobian_exactness_identity_at_soliton() {
    let c = converged();
    let v = probe(c.problem.grid().total_len());
    let worst = identity_defect(&c.problem, &c.solution, &v, 1e-3);
    assert!(worst <= 1e-11, "{worst:e}");
}

#[test]
fn finite_difference_jacobian_consistency() {
    let c = converged();
    let pr = &c.problem;
    let v = probe(pr.grid().total_len());
    let eps = 1e-6;
    let vf = TriDomainFunction::from_stacked(pr.grid().clone(), &v).unwrap();
    let r1 = pr.residual(&c.solution.combine(1.0, &vf, eps).unwrap()).unwrap();
    let r0 = pr.residual(&c.solution).unwrap();
    let jv = pr.jacobian_apply(&c.solution, &v).unwrap();
    let err: f64 = r1.iter().zip(&r0).zip(&jv).map(|((a, b), j)| ((a - b) / eps - j).powi(2)).sum::<f64>().sqrt();
    let vn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(err <= 1e-5 * vn, "{err:e}");
}

#[test]
fn gmres_solves_soliton_jacobian() {
    let c = converged();
    let pr = &c.problem;
    let m = pr.operator().unwrap();
    let jac = pr.jacobian_matrix(&m, &c.solution.stacked()).unwrap();
    // an even right-hand side keeps clear of the translation mode
    let g = pr.grid();
    let w = TriDomainFunction::from_traces(g.clone(), |t| t * (1.0 - t), |x| (-x * x).exp(), |t| t * (1.0 - t));
    let rhs = (&jac * DVector::from_vec(w.stacked())).as_slice().to_vec();
    let lu = jac.clone().lu();
    let opts = GmresOptions::default();
    let out = gmres_preconditioned(
        |v| (&jac * DVector::from_column_slice(v)).as_slice().to_vec(),
        |v| lu.solve(&DVector::from_column_slice(v)).unwrap().as_slice().to_vec(),
        &rhs,
        &opts,
    )
    .unwrap();
    assert!(out.converged && out.relative_residual <= 1e-13, "{out:?}");
    assert!(out.iterations <= opts.restart * opts.max_iter);
}

#[test]
fn rescaled_soliton_solves_faster_problem() {
    let c = converged();
    let (same_pr, same) = rescale_soliton(&c.problem, &c.solution, 1.0).unwrap();
    assert_eq!(same.stacked(), c.solution.stacked());
    assert_eq!(same_pr.partition(), c.problem.partition());

    let (pr2, q2) = rescale_soliton(&c.problem, &c.solution, 2.0).unwrap();
    let r = max_abs(pr2.residual(&q2).unwrap());
    assert!(r <= 1e-8, "{r:e}");
    let peak = q2.value_at(0.0);
    assert!((peak - 2.0 * c.solution.value_at(0.0)).abs() <= 1e-12 * peak);
    // the speed-2 wave is narrower by 2^{1/α}
    let lambda = 2f64.powf(1.25);
    assert!((q2.value_at(0.3 / lambda) - 2.0 * c.solution.value_at(0.3)).abs() < 1e-10);
}

#[test]
fn soliton_invariants_are_finite_and_consistent() {
    let c = converged();
    let m = mass(&c.solution).unwrap();
    let h = hamiltonian(&c.solution).unwrap();
    assert!(m > 0.0 && m.is_finite());
    assert!(h.is_finite());
    // mass scales like c^{2 - 1/α} under the speed rescaling
    let (_, q2) = rescale_soliton(&c.problem, &c.solution, 2.0).unwrap();
    let m2 = mass(&q2).unwrap();
    assert!((m2 / m - 2f64.powf(2.0 - 1.25)).abs() < 1e-9, "{}", m2 / m);
}

#[test]
fn lorentz_mass() {
    let part = DomainPartition::uniform(-2.0, 2.0, 1e-2, 200).unwrap();
    let g = Arc::new(TriDomainGrid::new(RationalOrder::new(1, 2).unwrap(), part).unwrap());
    let u = Builtin::Lorentz.sample(g.clone());
    assert!((mass(&u).unwrap() - PI / 2.0).abs() <= 1e-10);
    assert_eq!(mass(&TriDomainFunction::zeros(g.clone())).unwrap(), 0.0);
    assert_eq!(hamiltonian(&TriDomainFunction::zeros(g)).unwrap(), 0.0);
}

#[test]
fn benjamin_ono_start_converges_near_order_one() {
    let pr = fkdv(9, 10, 1.0, 1e-2, 120);
    let step = ContinuationStep {
        order: pr.order(),
        partition: *pr.partition(),
    };
    let out = trace_alpha(&pr, &[step], None, &NewtonOptions::default()).unwrap();
    assert!(out.completed(), "{:?}", out.halted);
    let rec = &out.branch[0].record;
    assert!(rec.final_residual() <= 1e-10);
    assert!(parity_defect(&out.branch[0].solution) <= 1e-9);
}

#[test]
fn trace_halts_with_partial_branch() {
    let pr = fkdv(9, 10, 1.0, 1e-2, 60);
    let part = *pr.partition();
    let steps = [
        ContinuationStep {
            order: RationalOrder::new(9, 10).unwrap(),
            partition: part,
        },
        ContinuationStep {
            order: RationalOrder::new(4, 5).unwrap(),
            partition: part,
        },
    ];
    let opts = NewtonOptions {
        tol: 1e-16,
        max_newton: 1,
        ..Default::default()
    };
    let out = trace_alpha(&pr, &steps, None, &opts).unwrap();
    assert!(!out.completed());
    assert_eq!(out.branch.len(), 1);
    assert!(!out.branch[0].record.converged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn jacobian_identity_for_random_directions(
        v in prop::collection::vec(-1.0f64..1.0, 3 * 25),
        p in prop::sample::select(vec![(2u32, 3u32), (3, 5), (4, 5), (5, 7)]),
    ) {
        let pr = fkdv(p.0, p.1, 1.0, 1e-2, 24);
        let q = benjamin_ono(pr.grid().clone());
        let worst = identity_defect(&pr, &q, &v, 1e-3);
        prop_assert!(worst <= 1e-11, "{worst:e}");
    }

    #[test]
    fn newton_from_zero_stays_at_zero(p in prop::sample::select(vec![(1u32, 2u32), (2, 3), (4, 5)])) {
        let pr = fkdv(p.0, p.1, 1.0, 1e-2, 16);
        let z = TriDomainFunction::zeros(pr.grid().clone());
        let (q, rec) = newton_solve(&pr, &z, &NewtonOptions::default()).unwrap();
        prop_assert!(rec.converged);
        prop_assert_eq!(rec.newton_steps(), 0);
        prop_assert!(q.stacked().iter().all(|&x| x == 0.0));
    }
}
