//! Common translation speed of the street array under the paired
//! (one street above, one below) truncation, and its verification.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{LatticeError, StreetParams};
use crate::scalar::{cplx, from_i64, from_usize, lit, Real};
use crate::trig::cot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Params(#[from] LatticeError),
    #[error("truncation list must be non-decreasing")]
    UnsortedTruncations,
}

/// Translation speed `U_N` of the truncated array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSpeed<T> {
    pub u: T,
    pub n_used: usize,
    /// `Γ b / (a h)`: the difference between the paired-truncation speed
    /// and the doubly periodic (radially truncated) lattice speed.
    pub offset: T,
}

impl<T: Real> EquilibriumSpeed<T> {
    /// Speed with the constant offset removed.
    pub fn lattice_speed(&self) -> T {
        self.u - self.offset
    }
}

/// Speed of a single street, `Γ/(2a) tanh(π b / a)`.
pub fn street_speed<T: Real>(params: &StreetParams<T>) -> T {
    params.gamma / (lit::<T>(2.0) * params.a) * (T::PI() * params.b / params.a).tanh()
}

/// `tanh(π(b + nh)/a) + tanh(π(b - nh)/a)` written as
/// `sinh(2πb/a) / (cosh(π(b+nh)/a) cosh(π(b-nh)/a))`, free of cancellation.
fn paired_term<T: Real>(params: &StreetParams<T>, n: usize) -> T {
    let k = T::PI() / params.a;
    let nh = from_usize::<T>(n) * params.h;
    let up = k * (params.b + nh);
    let down = k * (params.b - nh);
    let num = (lit::<T>(2.0) * k * params.b).sinh();
    let den = up.cosh() * down.cosh();
    if den.is_infinite() {
        T::zero()
    } else {
        num / den
    }
}

/// `U_N = Γ/(2a) Σ_{n=-N..N} tanh(π(b + nh)/a)`, summed as the `n = 0` term
/// followed by the symmetric `(n, -n)` pairs.
pub fn array_speed<T: Real>(params: &StreetParams<T>) -> EquilibriumSpeed<T> {
    let k = T::PI() / params.a;
    let mut sum = (k * params.b).tanh();
    for n in 1..=params.big_n {
        sum = sum + paired_term(params, n);
    }
    EquilibriumSpeed {
        u: params.gamma / (lit::<T>(2.0) * params.a) * sum,
        n_used: params.big_n,
        offset: params.gamma * params.b / (params.a * params.h),
    }
}

/// `(2N + 1, U_N)` for each requested truncation.
pub fn convergence_table<T: Real>(
    params: &StreetParams<T>,
    n_list: &[usize],
) -> Result<Vec<(usize, T)>, EquilibriumError> {
    params.validate()?;
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(EquilibriumError::UnsortedTruncations);
    }
    let k = T::PI() / params.a;
    let scale = params.gamma / (lit::<T>(2.0) * params.a);
    let mut sum = (k * params.b).tanh();
    let mut reached = 0usize;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        while reached < n {
            reached += 1;
            sum = sum + paired_term(params, reached);
        }
        out.push((2 * n + 1, scale * sum));
    }
    Ok(out)
}

/// Velocities of the two representative vortices computed from the
/// explicit cotangent sums, and their deviation from `U_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumCheck<T> {
    /// Conjugate velocity of the `-Γ` vortex at the origin.
    pub origin: Complex<T>,
    /// Conjugate velocity of the `+Γ` vortex at `a/2 + ib`.
    pub half_cell: Complex<T>,
    pub speed: EquilibriumSpeed<T>,
    /// `max |ū - U_N|` over both vortices.
    pub residual: T,
}

/// Computes both vortex velocities with their own row removed, summing the
/// remaining rows street by street, and compares them with [`array_speed`].
pub fn verify_equilibrium<T: Real>(params: &StreetParams<T>) -> Result<EquilibriumCheck<T>, EquilibriumError> {
    params.validate()?;
    let k = T::PI() / params.a;
    let half_a = lit::<T>(0.5) * params.a;
    let pref = cplx(T::zero(), -params.gamma / (lit::<T>(2.0) * params.a)); // Γ/(2ai)

    // vortex at z = 0: +Γ rows of every street, -Γ rows of streets n ≠ 0
    let mut plus = Complex::new(T::zero(), T::zero());
    let mut minus = Complex::new(T::zero(), T::zero());
    for n in params.street_indices() {
        let nh = from_i64::<T>(n) * params.h;
        plus = plus + cot(cplx(k * (-half_a), -k * (params.b + nh)));
        if n != 0 {
            minus = minus + cot(cplx(T::zero(), -k * nh));
        }
    }
    let origin = pref * (plus - minus);

    // vortex at z = a/2 + ib: -Γ rows of every street, +Γ rows of n ≠ 0
    let mut plus = Complex::new(T::zero(), T::zero());
    let mut minus = Complex::new(T::zero(), T::zero());
    for n in params.street_indices() {
        let nh = from_i64::<T>(n) * params.h;
        if n != 0 {
            plus = plus + cot(cplx(T::zero(), -k * nh));
        }
        minus = minus + cot(cplx(k * half_a, k * (params.b - nh)));
    }
    let half_cell = pref * (plus - minus);

    let speed = array_speed(params);
    let u = cplx(speed.u, T::zero());
    let residual = (origin - u).norm().max((half_cell - u).norm());
    Ok(EquilibriumCheck { origin, half_cell, speed, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: f64, h: f64, n: usize) -> StreetParams<f64> {
        StreetParams::unit(b, h, n).unwrap()
    }

    #[test]
    fn street_speed_closed_form() {
        let b = 2f64.sqrt().acosh() / std::f64::consts::PI;
        let u = street_speed(&params(b, 1.0, 0));
        assert!((u - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(street_speed(&params(1e-12, 1.0, 0)) < 1e-11);
        let wide = StreetParams::new(2.0, 0.561, 2.4, 1.0, 0).unwrap();
        assert!((street_speed(&wide) - 0.5 * street_speed(&params(0.2805, 1.2, 0))).abs() < 1e-16);
    }

    #[test]
    fn single_street_truncation_is_street_speed() {
        let p = params(0.2805, 1.2, 0);
        assert_eq!(array_speed(&p).u, street_speed(&p));
    }

    #[test]
    fn paired_sum_matches_direct_summation() {
        let p = params(0.2805, 0.46, 150);
        let direct: f64 = p
            .street_indices()
            .map(|n| (std::f64::consts::PI * (p.b + n as f64 * p.h)).tanh())
            .sum::<f64>()
            * 0.5;
        assert!((array_speed(&p).u - direct).abs() < 1e-13);
    }

    #[test]
    fn square_lattice_keeps_only_boundary_term() {
        let p = params(0.5, 1.0, 150);
        let u = array_speed(&p).u;
        let expected = 0.5 * (std::f64::consts::PI * 150.5).tanh();
        assert!((u - expected).abs() < 1e-10);
        assert!(array_speed(&p).lattice_speed().abs() < 1e-10);
    }

    #[test]
    fn speed_is_bounded() {
        for &(b, h) in &[(0.1, 0.3), (0.2805, 1.2), (0.45, 0.5)] {
            let s = array_speed(&params(b, h, 150));
            assert!(s.u.abs() <= 0.5 * 301.0);
            assert!(s.u.is_finite());
        }
    }

    #[test]
    fn convergence_table_rules() {
        let p = params(0.2805, 0.3, 150);
        assert_eq!(
            convergence_table(&p, &[3, 1]),
            Err(EquilibriumError::UnsortedTruncations)
        );
        let t = convergence_table(&p, &[7, 7, 7]).unwrap();
        assert!(t.iter().all(|&(m, u)| m == 15 && u == t[0].1));
        let t = convergence_table(&p, &[0, 5, 150]).unwrap();
        assert_eq!(t[0].1, street_speed(&p));
        assert_eq!(t[2].1, array_speed(&p).u);
    }

    #[test]
    fn representative_vortices_move_at_array_speed() {
        let c = verify_equilibrium(&params(0.2805, 1.2, 150)).unwrap();
        assert!(c.residual < 1e-10, "{}", c.residual);
        assert!(c.origin.im.abs() < 1e-13 && c.half_cell.im.abs() < 1e-13);
        let c0 = verify_equilibrium(&params(0.2805, 1.2, 0)).unwrap();
        assert!((c0.origin.re - street_speed(&params(0.2805, 1.2, 0))).abs() < 1e-15);
        assert!(c0.residual < 1e-15);
    }
}
