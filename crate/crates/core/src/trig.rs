//! Overflow-free circular functions of complex argument.
//!
//! Lattice sums with `N = 150` streets evaluate `cot` and `sin` at
//! imaginary parts of several hundred, where `cosh`/`sinh` overflow. Every
//! routine here works with `q = exp(2iz)` taken on the decaying side.

use num_complex::Complex;

use crate::scalar::{cplx, lit, Real};

/// Beyond this `|Im z|` the cotangent is replaced by its limit `-i sign(Im z)`.
pub const COT_SATURATION: f64 = 30.0;

/// `cot(z)`, stable for arbitrarily large `|Im z|`.
pub fn cot<T: Real>(z: Complex<T>) -> Complex<T> {
    let sat = lit::<T>(COT_SATURATION);
    if z.im > sat {
        return cplx(T::zero(), -T::one());
    }
    if z.im < -sat {
        return cplx(T::zero(), T::one());
    }
    if z.im >= T::zero() {
        cot_upper(z)
    } else {
        cot_upper(z.conj()).conj()
    }
}

// cot z = -i (1 + q) / (1 - q), q = exp(2iz), |q| <= 1 for Im z >= 0.
fn cot_upper<T: Real>(z: Complex<T>) -> Complex<T> {
    let two = lit::<T>(2.0);
    let q = Complex::from_polar((-two * z.im).exp(), two * z.re);
    let one = Complex::new(T::one(), T::zero());
    let num = one + q;
    let den = one - q;
    cplx(T::zero(), -T::one()) * num / den
}

/// True when `cot` would return its saturated value at `z`.
#[inline]
pub fn cot_saturated<T: Real>(z: Complex<T>) -> bool {
    z.im.abs() > lit::<T>(COT_SATURATION)
}

/// `ln|sin z| - |Im z| + ln 2`, i.e. the bounded remainder of `ln|sin z|`.
///
/// Splitting off `|Im z|` lets callers difference two large `ln|sin|`
/// values exactly.
pub fn log_abs_sin_remainder<T: Real>(z: Complex<T>) -> T {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let ay = z.im.abs();
    let e = (-two * ay).exp();
    let one_minus = -(-two * ay).exp_m1();
    let s = z.re.sin();
    (four * s * s * e + one_minus * one_minus).ln() / two
}

/// `ln|sin z|` for any `z`; `-inf` at the zeros of `sin`.
pub fn log_abs_sin<T: Real>(z: Complex<T>) -> T {
    z.im.abs() - T::LN_2() + log_abs_sin_remainder(z)
}

/// `log sin z` on an arbitrary but fixed branch. The real part is exact;
/// the imaginary part is only meaningful modulo `2 pi`.
pub fn log_sin<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.im < T::zero() {
        return log_sin(z.conj()).conj();
    }
    let two = lit::<T>(2.0);
    let q = Complex::from_polar((-two * z.im).exp(), two * z.re);
    let one = Complex::new(T::one(), T::zero());
    // sin z = (i/2) e^{-iz} (1 - q)
    let minus_iz = cplx(z.im, -z.re);
    minus_iz + cplx(-T::LN_2(), T::FRAC_PI_2()) + (one - q).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn naive_cot(z: Complex64) -> Complex64 {
        z.cos() / z.sin()
    }

    #[test]
    fn cot_matches_naive_in_safe_strip() {
        for &(x, y) in &[(0.3, 0.2), (1.1, -0.7), (-2.0, 3.5), (0.01, 0.0), (2.9, -10.0)] {
            let z = Complex64::new(x, y);
            let d = (cot(z) - naive_cot(z)).norm();
            assert!(d < 1e-12 * (1.0 + naive_cot(z).norm()), "{z}: {d}");
        }
    }

    #[test]
    fn cot_saturates_without_overflow() {
        let up = cot(Complex64::new(0.4, 500.0));
        let down = cot(Complex64::new(0.4, -500.0));
        assert_eq!(up, Complex64::new(0.0, -1.0));
        assert_eq!(down, Complex64::new(0.0, 1.0));
        // continuity across the saturation threshold
        let just = cot(Complex64::new(0.4, 29.999));
        assert!((just - up).norm() < 1e-20);
    }

    #[test]
    fn log_abs_sin_matches_naive() {
        for &(x, y) in &[(0.3, 0.2), (1.1, -0.7), (-2.0, 3.5), (2.9, -10.0), (0.5, 0.0)] {
            let z = Complex64::new(x, y);
            let naive = z.sin().norm().ln();
            assert!((log_abs_sin(z) - naive).abs() < 1e-13, "{z}");
        }
        // far from overflow trouble
        let z = Complex64::new(0.25, 400.0);
        assert!((log_abs_sin(z) - (400.0 - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_sin_exponentiates_back() {
        for &(x, y) in &[(0.3, 0.2), (1.1, -0.7), (-2.0, 3.5), (2.9, -10.0)] {
            let z = Complex64::new(x, y);
            let back = log_sin(z).exp();
            assert!((back - z.sin()).norm() < 1e-12 * z.sin().norm(), "{z}");
        }
    }
}
