//! Scalar root finding.

use crate::scalar::{lit, Real};

/// Result of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub fx: T,
    /// Width of the final bracket.
    pub bracket: T,
    pub iterations: usize,
}

/// Brent's method on `[a, b]` with `f(a)` and `f(b)` of opposite sign.
///
/// Stops when `|f| ≤ ftol` or the bracket is narrower than `xtol`; returns
/// `None` if the bracket is invalid or evaluation fails.
pub fn brent<T: Real, E>(
    mut f: impl FnMut(T) -> Result<T, E>,
    a: T,
    b: T,
    xtol: T,
    ftol: T,
    max_iter: usize,
) -> Result<Option<Root<T>>, E> {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa.is_nan() || fb.is_nan() || fa * fb > T::zero() {
        return Ok(None);
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 0..max_iter {
        if fb.abs() <= ftol || fb == T::zero() {
            return Ok(Some(Root { x: b, fx: fb, bracket: (b - c).abs(), iterations: it }));
        }
        if fb * fc > T::zero() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol {
            return Ok(Some(Root { x: b, fx: fb, bracket: (b - c).abs(), iterations: it }));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (lit::<T>(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else if m > T::zero() { b + tol } else { b - tol };
        fb = f(b)?;
    }
    Ok(Some(Root { x: b, fx: fb, bracket: (b - c).abs(), iterations: max_iter }))
}
