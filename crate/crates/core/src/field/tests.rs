use super::*;
use crate::lattice::{build_finite_array, nondimensionalize, FiniteArraySpec};
use num_complex::Complex64 as C;

fn reference(n: usize) -> StreetParams<f64> {
    StreetParams::unit(0.2805, 1.2, n).unwrap()
}

fn probes(count: usize, seed: u64) -> Vec<C> {
    // deterministic LCG probes in a central box, away from the vortices
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    let p = reference(150);
    let mut out = Vec::new();
    while out.len() < count {
        let z = C::new(next() * 2.0 - 1.0, next() * 2.4 - 1.2);
        if p.distance_to_nearest_vortex(z) > 0.05 {
            out.push(z);
        }
    }
    out
}

#[test]
fn zero_truncation_is_single_street() {
    let p = reference(0);
    for z in probes(20, 1) {
        assert_eq!(array_potential(z, &p).unwrap().im, single_street_potential(z, &p).unwrap().im);
        assert_eq!(array_stream_function(z, &p).unwrap(), single_street_potential(z, &p).unwrap().im);
    }
}

#[test]
fn singular_points_are_rejected() {
    let p = reference(3);
    assert!(array_velocity(C::new(0.0, 0.0), &p).is_err());
    assert!(array_stream_function(C::new(2.5, 0.2805 + 1.2), &p).is_err());
    assert!(single_street_potential(C::new(0.5, 0.2805), &p).is_err());
    // street 1 is not part of a single street
    assert!(single_street_potential(C::new(0.0, 1.2), &p).is_ok());
}

#[test]
fn velocity_is_derivative_of_potential() {
    let p = reference(150);
    let step = 1e-6;
    for z in probes(100, 2) {
        let d = C::new(step, 0.0);
        // dw/dz along x equals ū; use Im only (Re w is branch dependent)
        // so compare ∂Ψ/∂x = -v and ∂Ψ/∂y = u.
        let dpsi_dx = (array_stream_function(z + d, &p).unwrap() - array_stream_function(z - d, &p).unwrap())
            / (2.0 * step);
        let dy = C::new(0.0, step);
        let dpsi_dy = (array_stream_function(z + dy, &p).unwrap() - array_stream_function(z - dy, &p).unwrap())
            / (2.0 * step);
        let fd = C::new(dpsi_dy, dpsi_dx);
        let u = array_velocity(z, &p).unwrap();
        assert!((fd - u).norm() / u.norm().max(1.0) < 1e-6, "{z} {fd} {u}");
        // the potential itself, away from the branch cut of the arguments
        let w = |z| array_potential(z, &p).unwrap();
        let dw = (w(z + d) - w(z - d)) / (2.0 * step);
        if (dw - u).norm() < 1.0 {
            assert!((dw - u).norm() / u.norm().max(1.0) < 1e-6);
        }
    }
}

#[test]
fn velocity_derivative_matches_finite_differences() {
    let p = reference(150);
    let step = 1e-5;
    for z in probes(30, 3) {
        let d = C::new(step, 0.0);
        let fd = (array_velocity(z + d, &p).unwrap() - array_velocity(z - d, &p).unwrap()) / (2.0 * step);
        let an = array_velocity_derivative(z, &p).unwrap();
        assert!((fd - an).norm() / an.norm().max(1.0) < 1e-6, "{z} {fd} {an}");
    }
}

#[test]
fn fields_are_periodic_in_x() {
    let p = reference(150);
    for z in probes(30, 4) {
        let shifted = z + C::new(1.0, 0.0);
        let du = array_velocity(shifted, &p).unwrap() - array_velocity(z, &p).unwrap();
        assert!(du.norm() < 1e-12);
        let dpsi = relative_stream_function(shifted, &p, 0.3).unwrap() - relative_stream_function(z, &p, 0.3).unwrap();
        assert!(dpsi.abs() < 1e-12);
    }
}

#[test]
fn velocity_inherits_glide_symmetry() {
    // the configuration is invariant under (x, y) -> (x + a/2, b - y) with Γ -> -Γ,
    // so u(x + a/2, b - y) = u(x, y) and v(x + a/2, b - y) = -v(x, y)
    let p = reference(150);
    for z in probes(30, 5) {
        let image = C::new(z.re + 0.5, p.b - z.im);
        let u0 = array_velocity(z, &p).unwrap();
        let u1 = array_velocity(image, &p).unwrap();
        assert!((u1.re - u0.re).abs() < 1e-10 && (u1.im + u0.im).abs() < 1e-10);
    }
    // reflection x -> -x: u even, v odd
    for z in probes(30, 6) {
        let u0 = array_velocity(z, &p).unwrap();
        let u1 = array_velocity(C::new(-z.re, z.im), &p).unwrap();
        assert!((u1.re - u0.re).abs() < 1e-10 && (u1.im + u0.im).abs() < 1e-10);
    }
}

#[test]
fn single_street_far_field() {
    let p = reference(0);
    for &x in &[0.0, 0.13, 0.5, 0.77] {
        let up = single_street_potential(C::new(x, 50.0), &p).unwrap();
        let down = single_street_potential(C::new(x, -50.0), &p).unwrap();
        // the stream function tends to ±Γb/(2a), the velocity to zero
        assert!((up.im - 0.5 * p.b).abs() < 1e-10);
        assert!((down.im + 0.5 * p.b).abs() < 1e-10);
        assert!(array_velocity(C::new(x, 50.0), &p).unwrap().norm() < 1e-10);
    }
}

#[test]
fn single_street_decays_exponentially() {
    let p = reference(0);
    let x = 0.21;
    let dev = |y: f64| (single_street_potential(C::new(x, y), &p).unwrap().im - 0.5 * p.b).abs();
    let ratio = |y: f64| dev(y + 1.0) / dev(y);
    let expected = (-2.0 * std::f64::consts::PI).exp();
    for &y in &[3.0, 4.0] {
        assert!((ratio(y) / expected - 1.0).abs() < 0.05, "{}", ratio(y) / expected);
    }
    let speed = |y: f64| array_velocity(C::new(x, y), &p).unwrap().norm();
    for &y in &[3.0, 4.0, 5.0] {
        assert!((speed(y + 1.0) / speed(y) / expected - 1.0).abs() < 0.05);
    }
}

#[test]
fn stack_far_field_vanishes() {
    for &h in &[0.3, 0.5, 1.2] {
        let p = StreetParams::unit(0.2805, h, 50).unwrap();
        let z = C::new(0.37, 0.5 * p.b + 100.0 * h);
        assert!(array_velocity(z, &p).unwrap().norm() < 1e-6);
    }
}

#[test]
fn single_street_matches_explicit_rows() {
    let p = reference(0);
    let z = C::new(0.25, 0.5 * p.b);
    let m_max = 1_000_000i64;
    // symmetric partial sums converge like 1/M for the rows paired as dipoles
    let mut psi = 0.0;
    for m in (-m_max..=m_max).rev() {
        let minus = (z - p.negative_site(m, 0)).norm().ln();
        let plus = (z - p.positive_site(m, 0)).norm().ln();
        psi += plus - minus;
    }
    psi *= -1.0 / (2.0 * std::f64::consts::PI);
    let closed = single_street_potential(z, &p).unwrap().im;
    assert!((psi - closed).abs() < 1e-6, "{psi} {closed}");
}

#[test]
fn set_velocity_single_and_pair() {
    let one = VortexSet::from_points(vec![(C::new(0.0, 0.0), 1.0)]);
    let z = C::new(0.0, 2.0);
    let u = set_velocity(z, &one).unwrap().conj();
    // counter-clockwise: at (0, 2) the flow points in -x
    assert!((u - C::new(-1.0 / (4.0 * std::f64::consts::PI), 0.0)).norm() < 1e-15);
    let pair = VortexSet::from_points(vec![(C::new(-0.5, 0.0), 1.0), (C::new(0.5, 0.0), -1.0)]);
    let u = set_velocity(C::new(0.0, 0.0), &pair).unwrap();
    assert!((u.norm() - 2.0 / std::f64::consts::PI).abs() < 1e-14);
    assert!(set_velocity(C::new(0.5, 0.0), &pair).is_err());
    let d = set_velocity_derivative(C::new(0.1, 0.3), &pair).unwrap();
    let e = 1e-6;
    let fd = (set_velocity(C::new(0.1 + e, 0.3), &pair).unwrap() - set_velocity(C::new(0.1 - e, 0.3), &pair).unwrap())
        / (2.0 * e);
    assert!((fd - d).norm() < 1e-7);
}

#[test]
fn finite_array_approaches_infinite_array() {
    let p = reference(150);
    let z = C::new(0.3, 0.6);
    let exact = array_velocity(z, &p).unwrap();
    let err = |rows: usize| {
        let set = build_finite_array(&p, &FiniteArraySpec::new(11, rows).unwrap()).unwrap();
        (set_velocity(z, &set).unwrap() - exact).norm()
    };
    let (e10, e40, e160) = (err(10), err(40), err(160));
    assert!(e40 < e10 && e160 < e40, "{e10} {e40} {e160}");
}

#[test]
fn nondimensional_velocity_scales() {
    let p = StreetParams::new(2.0, 0.561, 2.4, 3.0, 20).unwrap();
    let nd = nondimensionalize(&p).unwrap();
    for z in probes(10, 7) {
        let dim = array_velocity(z * 2.0, &p).unwrap();
        let unit = array_velocity(z, &nd.params).unwrap();
        assert!((dim - unit * (3.0 / 2.0)).norm() < 1e-12);
    }
}

#[test]
fn comoving_gradient_and_hessian() {
    let field = ArrayField { params: reference(150) };
    let frame = CoMoving::along_x(&field, 0.37);
    let e = 1e-5;
    for z in probes(20, 8) {
        let g = frame.stream_gradient(z).unwrap();
        let fx = (frame.stream(z + C::new(e, 0.0)).unwrap() - frame.stream(z - C::new(e, 0.0)).unwrap()) / (2.0 * e);
        let fy = (frame.stream(z + C::new(0.0, e)).unwrap() - frame.stream(z - C::new(0.0, e)).unwrap()) / (2.0 * e);
        assert!((g - C::new(fx, fy)).norm() / g.norm().max(1.0) < 1e-5);
        let hs = frame.stream_hessian(z).unwrap();
        assert!((hs[0][0] + hs[1][1]).abs() < 1e-12);
        let gx = (frame.stream_gradient(z + C::new(e, 0.0)).unwrap() - frame.stream_gradient(z - C::new(e, 0.0)).unwrap())
            / (2.0 * e);
        assert!((gx.re - hs[0][0]).abs() < 1e-5 * hs[0][0].abs().max(1.0));
        assert!((gx.im - hs[0][1]).abs() < 1e-5 * hs[0][1].abs().max(1.0));
    }
}

#[test]
fn grid_of_constant_is_constant() {
    let g = sample_grid(Window::new(0.0, 1.0, 0.0, 1.0).unwrap(), Resolution::new(2, 2).unwrap(), |_| {
        GridSample::Scalar(4.0)
    });
    assert_eq!(g.values, vec![4.0; 4]);
}

#[test]
fn grid_is_periodic_and_masks_vortices() {
    let field = ArrayField { params: reference(150) };
    let frame = CoMoving::along_x(&field, 0.3);
    let w = Window::new(0.0, 1.0, -0.5, 0.8).unwrap();
    let res = Resolution::new(21, 27).unwrap();
    let g0 = sample_stream_grid(w, res, &frame, true);
    let g1 = sample_stream_grid(w.shifted(1.0, 0.0), res, &frame, true);
    assert!(g0.is_masked(0, 10));
    for (a, b) in g0.values.iter().zip(&g1.values) {
        assert!((a.is_nan() && b.is_nan()) || (a - b).abs() < 1e-12);
    }
}

#[test]
fn grid_refinement_converges() {
    let field = ArrayField { params: reference(150) };
    let frame = CoMoving::along_x(&field, 0.3);
    let w = Window::new(0.1, 0.4, 0.4, 0.9).unwrap();
    let coarse = sample_stream_grid(w, Resolution::new(41, 41).unwrap(), &frame, false);
    let fine = sample_stream_grid(w, Resolution::new(81, 81).unwrap(), &frame, false);
    for &(x, y) in &[(0.17, 0.55), (0.33, 0.71), (0.25, 0.62)] {
        let d = coarse.interpolate(x, y).unwrap() - fine.interpolate(x, y).unwrap();
        assert!(d.abs() < 1e-3);
    }
}

#[test]
fn combined_sweep_matches_separate_calls() {
    let p = reference(150);
    for z in probes(20, 9) {
        let (v, d) = array_velocity_with_derivative(z, &p).unwrap();
        assert_eq!(v, array_velocity(z, &p).unwrap());
        assert!((d - array_velocity_derivative(z, &p).unwrap()).norm() <= 1e-14 * d.norm().max(1.0));
    }
}
