//! Randomized invariants.

use num_complex::Complex64 as C;
use proptest::prelude::*;
use vlab_core::bifurcation::{fit_scaling_with_limit, BifurcationSequence};
use vlab_core::dynamics::{integrate, IntegrateOptions, SimState};
use vlab_core::equilibrium::{array_speed, verify_equilibrium};
use vlab_core::field::{array_velocity, relative_stream_function};
use vlab_core::lattice::{build_finite_array, nondimensionalize, FiniteArraySpec, StreetParams, VortexSet};

fn params() -> impl Strategy<Value = StreetParams<f64>> {
    (0.05f64..0.5, 0.0f64..1.0, 0usize..40).prop_map(|(b, t, n)| {
        let h = (b + 0.1).max(0.3) + t;
        StreetParams::unit(b, h, n).unwrap()
    })
}

fn off_lattice(p: &StreetParams<f64>, x: f64, y: f64) -> Option<C> {
    let z = C::new(x, y * p.h);
    (p.distance_to_nearest_vortex(z) > 0.05).then_some(z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_arrays_are_neutral(half_streets in 0usize..6, rows in 1usize..12) {
        let p = StreetParams::unit(0.2805, 1.2, 0).unwrap();
        let spec = FiniteArraySpec::new(2 * half_streets + 1, rows).unwrap();
        let set = build_finite_array(&p, &spec).unwrap();
        prop_assert_eq!(set.len(), (2 * half_streets + 1) * 2 * rows);
        prop_assert_eq!(set.total_circulation(), 0.0);
        prop_assert!(set.min_separation() > 0.0);
    }

    #[test]
    fn velocity_is_periodic(p in params(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        if let Some(z) = off_lattice(&p, x, y) {
            let d = array_velocity(z + C::new(p.a, 0.0), &p).unwrap() - array_velocity(z, &p).unwrap();
            prop_assert!(d.norm() < 1e-11);
        }
    }

    #[test]
    fn stream_function_has_glide_symmetry(p in params(), x in -1.0f64..1.0, y in -0.45f64..0.45) {
        if let Some(z) = off_lattice(&p, x, y) {
            let u = array_speed(&p).u;
            let image = C::new(z.re + 0.5 * p.a, p.b - z.im);
            let lhs = relative_stream_function(image, &p, u).unwrap();
            let rhs = -relative_stream_function(z, &p, u).unwrap() - u * p.b;
            prop_assert!((lhs - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn rescaling_scales_velocity(
        a in 0.5f64..3.0, b in 0.05f64..0.5, t in 0.0f64..1.0, gamma in -3.0f64..3.0,
        x in -1.0f64..1.0, y in -1.0f64..1.0,
    ) {
        prop_assume!(gamma.abs() > 0.1);
        let h = (b + 0.1).max(0.3) + t;
        let unit = StreetParams::unit(b, h, 10).unwrap();
        let dim = StreetParams::new(a, b * a, h * a, gamma, 10).unwrap();
        let nd = nondimensionalize(&dim).unwrap();
        prop_assert!((nd.params.b - unit.b).abs() < 1e-14 && (nd.params.h - unit.h).abs() < 1e-14);
        if let Some(z) = off_lattice(&unit, x, y) {
            let v_dim = array_velocity(z * a, &dim).unwrap();
            let v_unit = array_velocity(z, &nd.params).unwrap();
            prop_assert!((v_dim - v_unit * (gamma.abs() / a)).norm() < 1e-11 * (1.0 + v_dim.norm()));
        }
    }

    #[test]
    fn equilibrium_holds(b in 0.05f64..0.5, t in 0.0f64..1.0) {
        let p = StreetParams::unit(b, (b + 0.1).max(0.3) + t, 150).unwrap();
        let c = verify_equilibrium(&p).unwrap();
        prop_assert!(c.residual < 1e-10);
        prop_assert!(c.speed.u.abs() <= 0.5 * 301.0);
    }

    #[test]
    fn scaling_fit_recovers_model(h in 0.3f64..0.9, c in 0.01f64..0.3, d in 1.01f64..1.1) {
        let seq = BifurcationSequence {
            b: 0.2,
            h_values: (1..=100).map(|k| h + c / d.powi(k)).collect(),
            tolerances: vec![0.0; 100],
        };
        let fit = fit_scaling_with_limit(&seq, (20, 60), h).unwrap();
        prop_assert!((fit.c - c).abs() < 1e-10 * c.max(1.0));
        prop_assert!((fit.delta - d).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dynamics_is_translation_equivariant(
        pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, prop_oneof![Just(1.0), Just(-1.0)]), 2..6),
        dx in -5.0f64..5.0, dy in -5.0f64..5.0,
    ) {
        let set = VortexSet::from_points(pts.iter().map(|&(x, y, g)| (C::new(x, y), g)).collect());
        prop_assume!(set.min_separation() > 0.2);
        let shift = C::new(dx, dy);
        let opts = IntegrateOptions::fixed(0.01);
        let a = integrate(&SimState::new(set.clone()), 0.2, &opts);
        let b = integrate(&SimState::new(set.translated(shift)), 0.2, &opts);
        if let (Ok(a), Ok(b)) = (a, b) {
            for (z0, z1) in a.last().vortices.positions.iter().zip(&b.last().vortices.positions) {
                prop_assert!((z1 - z0 - shift).norm() < 1e-10);
            }
        }
    }
}
