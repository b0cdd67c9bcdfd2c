use std::f64::consts::PI;

use super::*;
use crate::spectral::GridSpec;

fn solver(dim: usize, n: usize, l: f64, nu: f64, gamma: f64) -> Solver {
    let sg = SpectralGrid::new(GridSpec::new(dim, n, l).unwrap()).unwrap();
    Solver::new(sg, FlowParams::new(nu, gamma).unwrap()).unwrap()
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.add_scaled(-1.0, b).volume_norm_sq().sqrt() / b.volume_norm_sq().sqrt().max(1e-300)
}

#[test]
fn zero_state_rhs_is_force() {
    let s = solver(3, 16, 2.0 * PI, 0.1, 3.0);
    let f = s.grid().solenoidal_part(&s.grid().random_field(3, 2, 1));
    let u = SpectralField::zeros(*s.grid().spec(), 3);
    assert_eq!(s.rhs(&u, &f).unwrap(), f);
}

#[test]
fn unidirectional_shear_has_no_nonlinearity() {
    let l = 3.0;
    let s = solver(3, 32, l, 0.2, 5.0);
    let sg = s.grid();
    let k = 2.0 * PI / l;
    let g = |y: f64| (k * y).sin() + 0.5 * (2.0 * k * y).cos();
    let g2 = |y: f64| -k * k * (k * y).sin() - 2.0 * k * k * (2.0 * k * y).cos();
    let u = sg
        .analyze(&PhysicalField::from_fn(*sg.spec(), 3, |x| {
            [g(x[1]), 0.0, 0.0]
        }))
        .unwrap();
    let f = sg
        .analyze(&PhysicalField::from_fn(*sg.spec(), 3, |x| {
            [0.0, 0.0, (k * x[0]).cos()]
        }))
        .unwrap();
    assert!(s.nonlinear(&u).volume_norm_sq().sqrt() < 1e-13);
    let got = sg.to_physical(&s.rhs(&u, &f).unwrap()).unwrap();
    let want = PhysicalField::from_fn(*sg.spec(), 3, |x| [0.2 * g2(x[1]), 0.0, (k * x[0]).cos()]);
    assert!(got.add_scaled(-1.0, &want).max_magnitude() < 1e-12);
}

#[test]
fn nonlinearity_is_skew_symmetric() {
    for (dim, seed) in [(2, 1u64), (3, 2), (3, 3)] {
        let s = solver(dim, 32, 1.0 + seed as f64, 0.1, 1.0);
        let u = s.grid().random_field(dim, 32, seed).scaled(3.0);
        let n = s.nonlinear(&u);
        let ratio = n.inner(&u).abs() / (n.volume_norm_sq() * u.volume_norm_sq()).sqrt();
        assert!(ratio < 1e-10, "dim {dim}: {ratio:e}");
    }
}

#[test]
fn half_divergence_term_vanishes_for_solenoidal_data() {
    let s = solver(3, 16, 1.0, 0.1, 0.0);
    let sg = s.grid();
    let u = sg.solenoidal_part(&sg.random_field(3, 16, 4));
    let div = sg.to_physical(&sg.divergence(&u)).unwrap();
    let up = sg.to_physical(&u).unwrap();
    let mut du = up.clone();
    for c in 0..3 {
        for (v, d) in du.component_mut(c).iter_mut().zip(div.component(0)) {
            *v *= 0.5 * d;
        }
    }
    let f = SpectralField::zeros(*sg.spec(), 3);
    let rhs = s.rhs(&u, &f).unwrap();
    assert!(du.volume_norm_sq().sqrt() <= 1e-10 * rhs.volume_norm_sq().sqrt());
}

#[test]
fn implicit_solve_inverts_operator() {
    let s = solver(3, 8, 1.0, 0.3, 7.0);
    let sg = s.grid();
    let x = sg.random_field(3, 8, 5);
    let a = 0.013;
    // b = x - a * L x
    let b = x.add_scaled(-a, &s.linear(&x));
    let mut sol = b.clone();
    s.implicit_solve(&mut sol, a);
    assert!(rel_diff(&sol, &x) < 1e-13);
}

#[test]
fn shear_decay_matches_exact_solution() {
    let l = 2.0 * PI;
    for gamma in [0.0, 1.0, 1e3] {
        let nu = 1.0;
        let s = solver(3, 16, l, nu, gamma);
        let sg = s.grid();
        let u0 = PhysicalField::from_fn(*sg.spec(), 3, |x| [x[1].sin(), 0.0, 0.0]);
        let dt = 1e-3;
        let mut u = u0.clone();
        for k in 0..1000 {
            u = s.step(&u, k as f64 * dt, dt, &Forcing::Zero).unwrap();
        }
        let exact = u0.scaled((-nu * 1.0).exp());
        let err = u.add_scaled(-1.0, &exact).volume_norm_sq().sqrt();
        assert!(err < 1e-6, "gamma {gamma}: {err:e}");
    }
}

#[test]
fn large_gamma_damps_divergence() {
    let l = 2.0 * PI;
    let s = solver(3, 16, l, 0.01, 1e6);
    let sg = s.grid();
    let u0 = PhysicalField::from_fn(*sg.spec(), 3, |x| [x[0].sin(), 0.3 * x[0].cos(), 0.0]);
    let d0 = sg
        .divergence(&sg.analyze(&u0).unwrap())
        .volume_norm_sq()
        .sqrt();
    let u1 = s.step(&u0, 0.0, 1e-2, &Forcing::Zero).unwrap();
    let d1 = sg
        .divergence(&sg.analyze(&u1).unwrap())
        .volume_norm_sq()
        .sqrt();
    assert!(d1 * 1e3 <= d0, "{d0} -> {d1}");
}

#[test]
fn step_keeps_mean_zero_and_symmetry_exact() {
    let s = solver(3, 16, 1.0, 0.02, 0.5);
    let sg = s.grid();
    let f = sg.solenoidal_part(&sg.random_field(3, 2, 9));
    let mut u = sg.random_field(3, 4, 8);
    for k in 0..20 {
        u = s
            .step_spectral(&u, k as f64 * 1e-2, 1e-2, &Forcing::Steady(&f))
            .unwrap();
        assert!(sg.is_conjugate_symmetric(&u));
        for c in 0..3 {
            assert_eq!(u.component(c)[0], num_complex::Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn unforced_energy_does_not_grow_beyond_dt_cubed() {
    let s = solver(2, 32, 2.0 * PI, 0.01, 0.3);
    let sg = s.grid();
    let mut u = sg.random_field(2, 6, 10);
    let dt = 2e-3;
    for k in 0..200 {
        let next = s
            .step_spectral(&u, k as f64 * dt, dt, &Forcing::Zero)
            .unwrap();
        let growth = next.volume_norm_sq() - u.volume_norm_sq();
        assert!(growth <= 50.0 * dt.powi(3), "step {k}: {growth:e}");
        u = next;
    }
}

#[test]
fn nan_is_reported() {
    let s = solver(2, 8, 1.0, 0.1, 0.0);
    let mut u = SpectralField::zeros(*s.grid().spec(), 2);
    u.component_mut(0)[3] = num_complex::Complex64::new(f64::NAN, 0.0);
    let f = SpectralField::zeros(*s.grid().spec(), 2);
    assert!(matches!(s.rhs(&u, &f), Err(Error::NonFinite(_))));
    let other = solver(2, 16, 1.0, 0.1, 0.0);
    let v = SpectralField::zeros(*other.grid().spec(), 2);
    assert!(matches!(s.rhs(&v, &f), Err(Error::GridMismatch { .. })));
}

#[test]
fn suggest_dt_examples() {
    let g = GridSpec::new(2, 64, 2.0 * PI).unwrap();
    let cfg = StepperConfig {
        dt: 0.1,
        ..StepperConfig::new(0.1)
    };
    assert_eq!(suggest_dt(&PhysicalField::zeros(g, 2), &cfg), 0.1);
    let u = PhysicalField::from_fn(g, 2, |x| [x[0].cos(), 0.0, 0.0]);
    let dt = suggest_dt(&u, &cfg);
    assert!((dt - 0.4 * 2.0 * PI / 64.0).abs() < 1e-12);
    assert!((dt - 0.0393).abs() < 1e-4);
    let dt2 = suggest_dt(&u.scaled(2.0), &cfg);
    assert!((dt2 - 0.5 * dt).abs() < 1e-15);
}

#[test]
fn mms_zero_target_has_zero_error() {
    let g = GridSpec::new(2, 16, 1.0).unwrap();
    let target = TrigFamily::zero(&g);
    let cfg = StepperConfig {
        t_end: Some(0.1),
        ..StepperConfig::new(1e-2)
    };
    let r = run_mms(&target, FlowParams::new(0.1, 1.0).unwrap(), g, &cfg).unwrap();
    assert_eq!(r.max_error, 0.0);
}

#[test]
fn mms_shear_decay_is_integrator_error_only() {
    let g = GridSpec::new(3, 32, 2.0 * PI).unwrap();
    let params = FlowParams::new(0.1, 2.0).unwrap();
    let target = MmsTarget::ShearDecay.family(&g, &params);
    let cfg = StepperConfig {
        t_end: Some(1.0),
        ..StepperConfig::new(1e-3)
    };
    let r = run_mms(&target, params, g, &cfg).unwrap();
    assert!(r.max_error <= 1e-8, "{:e}", r.max_error);
}

#[test]
fn mms_divergent_target_converges_at_second_order() {
    let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
    let params = FlowParams::new(0.05, 1.0).unwrap();
    let target = MmsTarget::Divergent.family(&g, &params);
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let cfg = StepperConfig {
                t_end: Some(0.5),
                ..StepperConfig::new(dt)
            };
            run_mms(&target, params, g, &cfg).unwrap().max_error
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "{errs:?}");
    }
}

#[test]
fn manufactured_force_matches_pseudospectral_rhs() {
    // At fixed t, f_mms - u_t must equal N(u) - nu lap u - gamma grad div u.
    let g = GridSpec::new(3, 16, 2.0).unwrap();
    let params = FlowParams::new(0.07, 0.9).unwrap();
    let s = Solver::new(SpectralGrid::new(g).unwrap(), params).unwrap();
    let sg = s.grid();
    let target = TrigFamily::divergent(&g);
    let t = 0.37;
    let u = sg
        .analyze(&PhysicalField::from_fn(g, 3, |x| target.eval(x, t).u))
        .unwrap();
    let f_minus_ut = sg
        .analyze(&PhysicalField::from_fn(g, 3, |x| {
            let f = target.forcing(x, t, &params, 3);
            let v = target.eval(x, t);
            [f[0] - v.du_dt[0], f[1] - v.du_dt[1], f[2] - v.du_dt[2]]
        }))
        .unwrap();
    let spectral = s.nonlinear(&u).add_scaled(-1.0, &s.linear(&u));
    assert!(rel_diff(&spectral, &f_minus_ut) < 1e-12);
}
