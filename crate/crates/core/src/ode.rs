//! Explicit Runge–Kutta integrators for autonomous systems `y' = f(y)`.

use crate::scalar::{lit, Real};

/// Classical fourth-order Runge–Kutta step.
pub fn rk4_step<T: Real, E>(
    f: &mut impl FnMut(&[T]) -> Result<Vec<T>, E>,
    y: &[T],
    dt: T,
) -> Result<Vec<T>, E> {
    let half = lit::<T>(0.5);
    let axpy = |a: T, x: &[T], y: &[T]| -> Vec<T> { y.iter().zip(x).map(|(&yi, &xi)| yi + a * xi).collect() };
    let k1 = f(y)?;
    let k2 = f(&axpy(half * dt, &k1, y))?;
    let k3 = f(&axpy(half * dt, &k2, y))?;
    let k4 = f(&axpy(dt, &k3, y))?;
    let sixth = dt / lit::<T>(6.0);
    Ok((0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect())
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step: the fifth-order solution and the componentwise
/// difference to the embedded fourth-order solution.
pub fn dopri_step<T: Real, E>(
    f: &mut impl FnMut(&[T]) -> Result<Vec<T>, E>,
    y: &[T],
    dt: T,
) -> Result<(Vec<T>, Vec<T>), E> {
    let n = y.len();
    let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
    for a_row in &A {
        let yi: Vec<T> = (0..n)
            .map(|i| {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate() {
                    let a = a_row[j];
                    if a != 0.0 {
                        acc = acc + dt * lit::<T>(a) * kj[i];
                    }
                }
                acc
            })
            .collect();
        k.push(f(&yi)?);
    }
    let mut y5 = y.to_vec();
    let mut err = vec![T::zero(); n];
    for s in 0..7 {
        let b5 = lit::<T>(B5[s]);
        let de = lit::<T>(B5[s] - B4[s]);
        for i in 0..n {
            y5[i] = y5[i] + dt * b5 * k[s][i];
            err[i] = err[i] + dt * de * k[s][i];
        }
    }
    Ok((y5, err))
}

/// Step-size control for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub atol: T,
    pub rtol: T,
    pub h_min: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn absolute(atol: T) -> Self {
        Self { atol, rtol: T::zero(), h_min: lit(1e-14), h_max: T::infinity(), max_steps: 10_000_000 }
    }
}

/// Why an adaptive integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub enum AdaptiveError<E> {
    Rhs(E),
    StepTooSmall,
    TooManySteps,
}

/// Integrates from `t` to `t_end` with Dormand–Prince 5(4), landing exactly
/// on `t_end`. `h` is the initial step guess and is updated to the last
/// accepted step. Returns the number of accepted steps.
pub fn integrate_adaptive<T: Real, E>(
    f: &mut impl FnMut(&[T]) -> Result<Vec<T>, E>,
    y: &mut Vec<T>,
    t: T,
    t_end: T,
    h: &mut T,
    tol: &Tolerance<T>,
) -> Result<usize, AdaptiveError<E>> {
    let mut t = t;
    let mut steps = 0;
    let safety = lit::<T>(0.9);
    let grow = lit::<T>(5.0);
    let shrink = lit::<T>(0.2);
    let exponent = lit::<T>(0.2);
    while t < t_end {
        if steps >= tol.max_steps {
            return Err(AdaptiveError::TooManySteps);
        }
        let remaining = t_end - t;
        let last = *h >= remaining;
        let dt = if last { remaining } else { *h };
        let (y5, err) = dopri_step(f, y, dt).map_err(AdaptiveError::Rhs)?;
        let mut norm = T::zero();
        for i in 0..y.len() {
            let scale = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            norm = norm.max(err[i].abs() / scale);
        }
        if norm <= T::one() {
            *y = y5;
            t = if last { t_end } else { t + dt };
            steps += 1;
            let factor = if norm == T::zero() { grow } else { (safety * norm.powf(-exponent)).min(grow) };
            if !last {
                *h = (dt * factor).min(tol.h_max);
            }
        } else {
            let factor = (safety * norm.powf(-exponent)).max(shrink);
            *h = dt * factor;
            if *h < tol.h_min {
                return Err(AdaptiveError::StepTooSmall);
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn oscillator(y: &[f64]) -> Result<Vec<f64>, Infallible> {
        Ok(vec![y[1], -y[0]])
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut y = vec![1.0, 0.0];
            for _ in 0..n {
                y = rk4_step(&mut oscillator, &y, dt).unwrap();
            }
            (y[0] - 1f64.cos()).abs()
        };
        let order = (run(20) / run(40)).log2();
        assert!((order - 4.0).abs() < 0.1, "{order}");
    }

    #[test]
    fn adaptive_meets_tolerance() {
        let mut y = vec![1.0, 0.0];
        let mut h = 0.1;
        let steps = integrate_adaptive(&mut oscillator, &mut y, 0.0, 10.0, &mut h, &Tolerance::absolute(1e-10)).unwrap();
        assert!(steps > 10);
        assert!((y[0] - 10f64.cos()).abs() < 1e-8 && (y[1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn adaptive_propagates_rhs_errors() {
        let mut f = |y: &[f64]| if y[0] > 2.0 { Err("boom") } else { Ok(vec![1.0]) };
        let mut y = vec![0.0];
        let mut h = 0.5;
        let r = integrate_adaptive(&mut f, &mut y, 0.0, 5.0, &mut h, &Tolerance::absolute(1e-8));
        assert_eq!(r, Err(AdaptiveError::Rhs("boom")));
        assert!(y[0] <= 2.0);
    }
}
