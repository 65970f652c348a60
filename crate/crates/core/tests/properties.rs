use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;

use qchaos::control::{routh_hurwitz, saturation, simulate_sync, ControllerConfig};
use qchaos::integrator::{integrate, IntegratorSettings, PhaseState};
use qchaos::model::{
    derive_params, quantum_potential, velocity_excited, velocity_numeric, Branch, ComplexPoint, EigenstateSpec,
    StateField,
};

fn gamma_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..0.99, 1.01f64..2.0]
}

fn branch_strategy() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eta_product_is_gamma(beta in 0.001f64..=2.0, gamma in gamma_strategy(), branch in branch_strategy()) {
        let p = derive_params(beta, gamma, branch).unwrap();
        prop_assert!((p.eta1 * p.eta2 - gamma).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn decoupled_limit(gamma in 0.01f64..0.99) {
        let p = derive_params(0.0, gamma, Branch::Plus).unwrap();
        prop_assert_eq!(p.eta1, 1.0);
        prop_assert_eq!(p.eta2, gamma);
        prop_assert_eq!(p.a4, 0.0);
        prop_assert_eq!(p.b1, 0.0);
        prop_assert_eq!(p.rho1, 0.0);
        prop_assert_eq!(p.rho2, 0.0);
    }

    #[test]
    fn numeric_velocity_ignores_global_factor(
        re in -3.0f64..3.0, im in -3.0f64..3.0,
        xr in -1.5f64..1.5, xi in -0.5f64..0.5, yr in -1.5f64..1.5, yi in -0.5f64..0.5,
    ) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 0.1);
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let pt = ComplexPoint::from_parts(xr, xi, yr, yi);
        prop_assume!(qchaos::model::excited_node(&p, &pt).norm() > 0.05);
        let plain = velocity_numeric(&p, &EigenstateSpec::first_excited(), &pt).unwrap();
        let scaled = velocity_numeric(&p, &EigenstateSpec::superposition(vec![(c, 1, 0)]).unwrap(), &pt).unwrap();
        prop_assert!((plain.0 - scaled.0).norm() < 1e-9 * (1.0 + plain.0.norm()));
        prop_assert!((plain.1 - scaled.1).norm() < 1e-9 * (1.0 + plain.1.norm()));
    }

    #[test]
    fn ground_quantum_potential_is_flat(xr in -4.0f64..4.0, xi in -2.0f64..2.0, yr in -4.0f64..4.0, yi in -2.0f64..2.0) {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let q = quantum_potential(&p, &EigenstateSpec::ground(), &ComplexPoint::from_parts(xr, xi, yr, yi)).unwrap();
        prop_assert!((q - Complex64::new(-(p.a3 + p.a5), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn excited_velocity_finite_off_node(
        beta in 0.05f64..2.0, gamma in gamma_strategy(),
        xr in -3.0f64..3.0, xi in -1.0f64..1.0, yr in -3.0f64..3.0, yi in -1.0f64..1.0,
    ) {
        let p = derive_params(beta, gamma, Branch::Plus).unwrap();
        let pt = ComplexPoint::from_parts(xr, xi, yr, yi);
        match velocity_excited(&p, &pt) {
            Ok((dx, dy)) => prop_assert!(dx.is_finite() && dy.is_finite()),
            Err(e) => prop_assert!(e.is_singularity()),
        }
    }

    #[test]
    fn routh_hurwitz_matches_roots(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, c3 in -5.0f64..5.0) {
        // companion matrix of l^3 + c3 l^2 + c2 l + c1
        let m = Matrix3::new(-c3, -c2, -c1, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let max_re = m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(max_re.abs() > 1e-6);
        prop_assert_eq!(routh_hurwitz(c1, c2, c3), max_re < 0.0);
    }

    #[test]
    fn saturation_is_odd_and_bounded(s in -10.0f64..10.0, eps in 1e-4f64..2.0) {
        let v = saturation(s, eps);
        prop_assert!(v.abs() <= 1.0);
        prop_assert_eq!(v, -saturation(-s, eps));
        prop_assert!(v * s >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn controlled_v_never_rises(xr in 0.2f64..2.5, yr in -2.0f64..2.0, q in 0.5f64..6.0, r in 0.5f64..6.0) {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let cfg = ControllerConfig::with_gains(q, r).unwrap();
        let run = simulate_sync(
            &p, &cfg,
            PhaseState::new(2.0, 0.0, 2.0, 0.0),
            PhaseState::new(xr, 0.0, yr, 0.0),
            IntegratorSettings::new(10.0, 1e-3, 10).unwrap(),
        ).unwrap();
        prop_assume!(run.abort.is_none());
        for w in run.lyap_v.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
    }
}

#[test]
fn decoupled_ground_orbit_is_a_circle() {
    let gamma = 0.4;
    let p = derive_params(0.0, gamma, Branch::Plus).unwrap();
    let s0 = PhaseState::new(1.0, 0.0, 1.0, 0.0);
    let tr = integrate(&StateField::ground(p), s0, 100.0, 1e-3, 10).unwrap();
    let r0 = s0.x_r.hypot(s0.x_i);
    let drift = tr
        .states
        .iter()
        .map(|s| (s.x_r.hypot(s.x_i) - r0).abs() / r0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "relative radius drift {drift:e}");
}

#[test]
fn integration_is_bitwise_deterministic() {
    let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
    let run = || {
        let tr = integrate(&StateField::first_excited(p), PhaseState::new(0.4, 0.0, 0.8, 0.0), 50.0, 1e-3, 10).unwrap();
        let mut buf = Vec::new();
        qchaos::integrator::write_trajectory_csv(&tr, &mut buf).unwrap();
        buf
    };
    assert_eq!(run(), run());
}
