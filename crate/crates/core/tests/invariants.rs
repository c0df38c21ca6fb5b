mod common;

use avgfw::diagnostics::reference_optimum;
use avgfw::flows::{integrate, FlowConfig, FlowVariant};
use avgfw::linalg::{dist2, dot, Matrix};
use avgfw::objectives::gap_from_gradient;
use avgfw::{
    resume, solve, DomainKind, DomainSet, Objective, QuadraticLsData, Schedule, SolverConfig,
    SolverState, Variant, X0Policy,
};
use common::*;
use nalgebra::{DMatrix, DVector};

fn ls_parts(obj: &Objective) -> (DMatrix<f64>, DVector<f64>) {
    let Objective::QuadraticLs(d) = obj else {
        unreachable!()
    };
    let (m, n) = (d.a.nrows(), d.a.ncols());
    let mut a = DMatrix::zeros(m, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = d.a.matvec(&e);
        for i in 0..m {
            a[(i, j)] = col[i];
        }
    }
    (a, DVector::from_vec(d.y.clone()))
}

/// Exact smoothness constant `σ_max(A)²` for `½‖Ax − y‖²`.
fn exact_l(obj: &Objective) -> f64 {
    let (a, _) = ls_parts(obj);
    let s = a.singular_values();
    s.max().powi(2)
}

#[test]
fn iterates_stay_feasible() {
    for kind in all_kinds() {
        for variant in [Variant::Fw, Variant::AvgFw] {
            let obj = random_quadratic(3, 15, 9);
            let d = DomainSet::new(kind, 0.7, 9).unwrap();
            let cfg =
                SolverConfig::new(variant, Schedule::new(2.0, 0.6).unwrap(), 400).with_history();
            let t = solve(&obj, &d, &cfg).unwrap();
            let h = t.history.unwrap();
            for x in h.iterates.iter().chain(std::iter::once(&t.state.x)) {
                assert!(d.contains(x, 1e-9), "{kind} {variant}");
            }
            for sb in &h.s_bars[..] {
                if variant == Variant::AvgFw {
                    assert!(d.contains(sb, 1e-9));
                }
            }
        }
    }
}

#[test]
fn averaged_atom_is_unrolled_convex_combination() {
    let obj = random_quadratic(5, 12, 6);
    let d = DomainSet::new(DomainKind::L1Ball, 1.3, 6).unwrap();
    for (c, p) in [(3.0, 1.0), (2.0, 0.5), (1.0, 0.25)] {
        let s = Schedule::new(c, p).unwrap();
        let cfg = SolverConfig::new(Variant::AvgFw, s, 201).with_history();
        let h = solve(&obj, &d, &cfg).unwrap().history.unwrap();
        for k in [0usize, 1, 10, 57, 200] {
            let w = s.unrolled_weights(k as u64);
            let combo = w.apply(&h.atoms[..=k]);
            assert!(dist2(&combo, &h.s_bars[k]) <= 1e-12, "c={c} p={p} k={k}");
            assert!((w.sum() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn smoothness_descent_bound_holds() {
    // f(x + γd) ≤ f(x) + γ∇f(x)ᵀd + γ²L‖d‖²/2 along the actual step
    let obj = random_quadratic(8, 20, 10);
    let l = exact_l(&obj);
    for kind in all_kinds() {
        for variant in [Variant::Fw, Variant::AvgFw] {
            let d = DomainSet::new(kind, 1.0, 10).unwrap();
            let cfg = SolverConfig::new(variant, Schedule::default(), 300).with_history();
            let t = solve(&obj, &d, &cfg).unwrap();
            let h = t.history.unwrap();
            let mut xs = h.iterates.clone();
            xs.push(t.state.x.clone());
            for k in 0..300 {
                let x = &xs[k];
                let dir: Vec<f64> = match variant {
                    Variant::Fw => h.atoms[k].iter().zip(x).map(|(s, x)| s - x).collect(),
                    Variant::AvgFw => h.s_bars[k].iter().zip(x).map(|(s, x)| s - x).collect(),
                };
                let g = obj.gradient(x);
                let gamma = Schedule::default().gamma(k as u64);
                let dn: f64 = dir.iter().map(|v| v * v).sum();
                let bound = obj.value(x) + gamma * dot(&g, &dir) + 0.5 * gamma * gamma * l * dn;
                let f_next = obj.value(&xs[k + 1]);
                assert!(
                    f_next <= bound + 1e-10 * (1.0 + bound.abs()),
                    "{kind} {variant} k={k}"
                );
            }
        }
    }
}

#[test]
fn gap_upper_bounds_suboptimality() {
    // interior problems: the least-squares solution is the constrained optimum
    for seed in 0..5 {
        let obj = random_quadratic(100 + seed, 25, 8);
        let (a, y) = ls_parts(&obj);
        let ata = a.transpose() * &a;
        let x_ls = ata.cholesky().unwrap().solve(&(a.transpose() * &y));
        let x_ls: Vec<f64> = x_ls.iter().copied().collect();
        let f_star = obj.value(&x_ls);
        for kind in [DomainKind::L1Ball, DomainKind::L2Ball] {
            let r = 2.0 * x_ls.iter().map(|v| v.abs()).sum::<f64>();
            let d = DomainSet::new(kind, r, 8).unwrap();
            for variant in [Variant::Fw, Variant::AvgFw] {
                let cfg = SolverConfig::new(variant, Schedule::default(), 500);
                let t = solve(&obj, &d, &cfg).unwrap();
                for row in &t.rows {
                    let sub = row.f_value - f_star;
                    assert!(
                        row.gap >= sub - 1e-9 * (1.0 + f_star.abs()),
                        "{kind} k={}",
                        row.k
                    );
                }
            }
        }
    }
}

#[test]
fn objectives_are_convex_along_random_pairs() {
    let mut rng = seeded(21);
    let obj = random_quadratic(9, 10, 6);
    let logistic = {
        use rand::Rng;
        let z = random_dense(&mut rng, 30, 6);
        let labels = (0..30)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        Objective::Logistic(avgfw::LogisticData::new(z, labels).unwrap())
    };
    use rand::Rng;
    for o in [&obj, &logistic, &Objective::Scalar1D] {
        let n = o.dim();
        for _ in 0..200 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lin = o.value(&x) + dot(&o.gradient(&x), &diff);
            assert!(o.value(&y) >= lin - 1e-10 * (1.0 + lin.abs()));
        }
    }
}

#[test]
fn dense_and_sparse_backends_agree() {
    let Objective::QuadraticLs(d) = random_quadratic(31, 18, 12) else {
        unreachable!()
    };
    let Matrix::Dense(a) = &d.a else {
        unreachable!()
    };
    let sparse = Objective::QuadraticLs(QuadraticLsData::new(a.to_csr(), d.y.clone()).unwrap());
    let dense = Objective::QuadraticLs(d.clone());
    let dom = DomainSet::new(DomainKind::L1Ball, 2.0, 12).unwrap();
    let cfg = SolverConfig::new(Variant::AvgFw, Schedule::default(), 300);
    let td = solve(&dense, &dom, &cfg).unwrap();
    let ts = solve(&sparse, &dom, &cfg).unwrap();
    assert_eq!(td.atom_ids, ts.atom_ids);
    for (a, b) in td.rows.iter().zip(&ts.rows) {
        assert!((a.f_value - b.f_value).abs() <= 1e-10 * (1.0 + a.f_value.abs()));
        assert!((a.gap - b.gap).abs() <= 1e-9 * (1.0 + a.gap.abs()));
    }
    let lb_d = dense.lipschitz_bound();
    assert!((lb_d - sparse.lipschitz_bound()).abs() <= 1e-9 * lb_d);
}

#[test]
fn resume_split_is_bitwise_identical() {
    let (obj, d) = l1_quadratic();
    for variant in [Variant::Fw, Variant::AvgFw] {
        let cfg = SolverConfig::new(variant, Schedule::new(2.0, 0.7).unwrap(), 1000);
        let whole = solve(&obj, &d, &cfg).unwrap();
        let half = SolverConfig {
            max_iters: 500,
            ..cfg.clone()
        };
        let first = solve(&obj, &d, &half).unwrap();
        let second = resume(first.state.clone(), &obj, &d, &half).unwrap();
        assert_eq!(second.state, whole.state);
        let mut rows = first.rows.clone();
        rows.extend(second.rows.iter().cloned());
        assert_eq!(rows, whole.rows);
        let mut ids = first.atom_ids.clone();
        ids.extend(second.atom_ids.iter().cloned());
        assert_eq!(ids, whole.atom_ids);

        let fresh = SolverState::initial(&obj, &d, &cfg).unwrap();
        assert_eq!(resume(fresh, &obj, &d, &cfg).unwrap(), whole);
    }
}

#[test]
fn flow_step_halving_is_first_order_consistent() {
    let (obj, d) = l1_quadratic();
    let f_ref = reference_optimum(&obj, &d, 20_000).unwrap().f_star;
    let h_end = |dt: f64| {
        let cfg = FlowConfig {
            dt,
            f_ref: Some(f_ref),
            record_every: 10.0,
            ..FlowConfig::new(FlowVariant::FwFlow, Schedule::default(), 10.0)
        };
        integrate(&obj, &d, &cfg).unwrap().last().h
    };
    let h: Vec<f64> = [8e-3, 4e-3, 2e-3].iter().map(|&dt| h_end(dt)).collect();
    let (d1, d2) = ((h[1] - h[0]).abs(), (h[2] - h[1]).abs());
    assert!(d2 <= 2.0 * d1 + 1e-12, "changes {d1:e} then {d2:e}");
}

#[test]
fn flow_dominates_method() {
    let (obj, d) = l1_quadratic();
    let x0 = d.lmo(&obj.gradient(&vec![0.0; d.dim()])).unwrap().vector;
    let cfg = FlowConfig {
        dt: 1e-2,
        f_ref: Some(0.0),
        x0: X0Policy::Explicit(x0),
        ..FlowConfig::new(FlowVariant::FwFlow, Schedule::default(), 1000.0)
    };
    let flow = integrate(&obj, &d, &cfg).unwrap();
    let method = solve(
        &obj,
        &d,
        &SolverConfig::new(Variant::Fw, Schedule::default(), 1001),
    )
    .unwrap();
    // h differences do not depend on f*, so compare objective values
    for row in method.rows.iter().filter(|r| r.k >= 100) {
        let f_flow = flow.at(row.k as f64).f_value;
        assert!(
            f_flow <= row.f_value + 1e-6,
            "k={}: flow {f_flow} method {}",
            row.k,
            row.f_value
        );
    }
}

#[test]
fn averaged_flow_discretization_error_decays() {
    let (obj, d) = l1_quadratic();
    let cfg = FlowConfig {
        dt: 5e-3,
        f_ref: Some(0.0),
        record_every: 1.0,
        ..FlowConfig::new(FlowVariant::AvgFwFlow, Schedule::default(), 200.0)
    };
    let t = integrate(&obj, &d, &cfg).unwrap();
    assert!(t.at(200.0).disc_err < t.at(20.0).disc_err);
}

#[test]
fn gap_helper_matches_objective_gap() {
    let (obj, d) = l1_quadratic();
    let x = vec![0.0; d.dim()];
    let (g1, s1) = obj.gap(&d, &x).unwrap();
    let (g2, s2) = gap_from_gradient(&d, &x, &obj.gradient(&x)).unwrap();
    assert_eq!(g1, g2);
    assert_eq!(s1, s2);
}
