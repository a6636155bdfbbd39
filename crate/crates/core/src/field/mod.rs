//! Complex potentials, conjugate velocities and stream functions.
//!
//! Conventions: a vortex of circulation Γ at `z0` has potential
//! `(Γ / 2πi) log(z - z0)`; the conjugate velocity is `ū = u - i v = dw/dz`
//! and the stream function is `Im w`, which is single valued. `Re w` is
//! reported on an arbitrary branch and carries no physics.

mod grid;

pub use grid::{sample_grid, sample_stream_grid, FieldGrid, GridSample, Resolution, Window};

use num_complex::Complex;
use thiserror::Error;

use crate::lattice::{StreetParams, VortexSet};
use crate::scalar::{cplx, from_i64, lit, Real};
use crate::trig::{cot, cot_saturated, log_abs_sin_remainder, log_sin};

/// Evaluation closer than `SINGULAR_TOL * a` to a vortex is an error.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Grid samples closer than `MASK_TOL * a` to a vortex are masked.
pub const MASK_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum FieldError {
    #[error("evaluation point ({x}, {y}) coincides with a vortex")]
    Singular { x: f64, y: f64 },
}

fn singular<T: Real>(z: Complex<T>) -> FieldError {
    FieldError::Singular {
        x: z.re.to_f64().unwrap_or(f64::NAN),
        y: z.im.to_f64().unwrap_or(f64::NAN),
    }
}

fn check_lattice_point<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Result<(), FieldError> {
    if params.distance_to_nearest_vortex(z) <= lit::<T>(SINGULAR_TOL) * params.a {
        Err(singular(z))
    } else {
        Ok(())
    }
}

/// `|s - β| - |s|` without cancellation.
#[inline]
fn abs_shift_difference<T: Real>(s: T, beta: T) -> T {
    if beta >= T::zero() {
        if s >= beta {
            -beta
        } else if s <= T::zero() {
            beta
        } else {
            beta - (s + s)
        }
    } else {
        -abs_shift_difference(s - beta, -beta)
    }
}

/// `ln|sin(π/a (z - a/2 - ib))| - ln|sin(π z / a)|` for a street at the origin.
#[inline]
fn street_log_ratio<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> T {
    let k = T::PI() / params.a;
    let half = lit::<T>(0.5);
    let num = cplx(k * (z.re - half * params.a), k * (z.im - params.b));
    let den = cplx(k * z.re, k * z.im);
    abs_shift_difference(k * z.im, k * params.b) + log_abs_sin_remainder(num) - log_abs_sin_remainder(den)
}

fn street_potential_at_origin<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Complex<T> {
    let k = T::PI() / params.a;
    let half = lit::<T>(0.5);
    let num = cplx(k * (z.re - half * params.a), k * (z.im - params.b));
    let den = cplx(k * z.re, k * z.im);
    let arg = (log_sin(num) - log_sin(den)).im;
    let c = params.gamma / (lit::<T>(2.0) * T::PI());
    // (Γ/2πi)(ln|Q| + i arg Q) = (Γ/2π)(arg Q - i ln|Q|)
    cplx(c * arg, -c * street_log_ratio(z, params))
}

/// Complex potential of the single street `n = 0`.
pub fn single_street_potential<T: Real>(
    z: Complex<T>,
    params: &StreetParams<T>,
) -> Result<Complex<T>, FieldError> {
    check_lattice_point(z, &params.with_big_n(0))?;
    Ok(street_potential_at_origin(z, params))
}

/// Complex potential `w_N` of the truncated stack of `2N + 1` streets.
pub fn array_potential<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Result<Complex<T>, FieldError> {
    check_lattice_point(z, params)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in params.street_indices() {
        let shift = cplx(T::zero(), from_i64::<T>(n) * params.h);
        acc = acc + street_potential_at_origin(z - shift, params);
    }
    Ok(acc)
}

/// Stream function `Im w_N` of the truncated stack.
pub fn array_stream_function<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Result<T, FieldError> {
    check_lattice_point(z, params)?;
    Ok(array_stream_unchecked(z, params))
}

fn array_stream_unchecked<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> T {
    let mut acc = T::zero();
    for n in params.street_indices() {
        let shifted = cplx(z.re, z.im - from_i64::<T>(n) * params.h);
        acc = acc + street_log_ratio(shifted, params);
    }
    -params.gamma / (lit::<T>(2.0) * T::PI()) * acc
}

/// Relative stream function `Im(w_N - u_frame z)`; its level sets are the
/// streamlines seen by an observer translating at `u_frame` along `x`.
pub fn relative_stream_function<T: Real>(
    z: Complex<T>,
    params: &StreetParams<T>,
    u_frame: T,
) -> Result<T, FieldError> {
    Ok(array_stream_function(z, params)? - u_frame * z.im)
}

/// Conjugate velocity `ū = dw_N/dz` of the truncated stack.
pub fn array_velocity<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Result<Complex<T>, FieldError> {
    check_lattice_point(z, params)?;
    Ok(array_velocity_unchecked(z, params))
}

/// Calls `f(cot A_n, cot B_n)` for every street whose two cotangents differ;
/// saturated pairs cancel exactly and are skipped.
#[inline]
fn for_each_street_cot<T: Real>(z: Complex<T>, params: &StreetParams<T>, mut f: impl FnMut(Complex<T>, Complex<T>)) {
    let k = T::PI() / params.a;
    let half = lit::<T>(0.5);
    let xa = k * (z.re - half * params.a);
    let xb = k * z.re;
    for n in params.street_indices() {
        let yn = from_i64::<T>(n) * params.h;
        let za = cplx(xa, k * (z.im - params.b - yn));
        let zb = cplx(xb, k * (z.im - yn));
        if cot_saturated(za) && cot_saturated(zb) && (za.im > T::zero()) == (zb.im > T::zero()) {
            continue;
        }
        f(cot(za), cot(zb));
    }
}

fn array_velocity_unchecked<T: Real>(z: Complex<T>, params: &StreetParams<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for_each_street_cot(z, params, |ca, cb| acc = acc + ca - cb);
    // Γ / (2 a i) = -i Γ / (2a)
    acc * cplx(T::zero(), -params.gamma / (lit::<T>(2.0) * params.a))
}

/// `dū/dz`, the analytic derivative of [`array_velocity`].
pub fn array_velocity_derivative<T: Real>(
    z: Complex<T>,
    params: &StreetParams<T>,
) -> Result<Complex<T>, FieldError> {
    check_lattice_point(z, params)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for_each_street_cot(z, params, |ca, cb| acc = acc + ca * ca - cb * cb);
    // d/dz cot(πz/a) = -(π/a)(1 + cot²); the constant parts cancel per street.
    // -(π Γ)/(2 a² i) = i π Γ / (2 a²)
    let c = T::PI() * params.gamma / (lit::<T>(2.0) * params.a * params.a);
    Ok(acc * cplx(T::zero(), c))
}

/// [`array_velocity`] and [`array_velocity_derivative`] from one sweep.
pub fn array_velocity_with_derivative<T: Real>(
    z: Complex<T>,
    params: &StreetParams<T>,
) -> Result<(Complex<T>, Complex<T>), FieldError> {
    check_lattice_point(z, params)?;
    let mut v = Complex::new(T::zero(), T::zero());
    let mut d = Complex::new(T::zero(), T::zero());
    for_each_street_cot(z, params, |ca, cb| {
        v = v + ca - cb;
        d = d + ca * ca - cb * cb;
    });
    let two_a = lit::<T>(2.0) * params.a;
    let c = T::PI() * params.gamma / (two_a * params.a);
    Ok((v * cplx(T::zero(), -params.gamma / two_a), d * cplx(T::zero(), c)))
}

/// Conjugate velocity induced at `z` by an explicit vortex set.
pub fn set_velocity<T: Real>(z: Complex<T>, vortices: &VortexSet<T>) -> Result<Complex<T>, FieldError> {
    let tol = lit::<T>(SINGULAR_TOL);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (p, &g) in vortices.positions.iter().zip(&vortices.strengths) {
        let d = z - *p;
        if d.norm() <= tol {
            return Err(singular(z));
        }
        acc = acc + d.inv() * g;
    }
    // Σ Γ_j / (2πi (z - z_j))
    Ok(acc * cplx(T::zero(), -T::one() / (lit::<T>(2.0) * T::PI())))
}

/// `dū/dz` of an explicit vortex set.
pub fn set_velocity_derivative<T: Real>(
    z: Complex<T>,
    vortices: &VortexSet<T>,
) -> Result<Complex<T>, FieldError> {
    let tol = lit::<T>(SINGULAR_TOL);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (p, &g) in vortices.positions.iter().zip(&vortices.strengths) {
        let d = z - *p;
        if d.norm() <= tol {
            return Err(singular(z));
        }
        let inv = d.inv();
        acc = acc + inv * inv * g;
    }
    Ok(acc * cplx(T::zero(), T::one() / (lit::<T>(2.0) * T::PI())))
}

/// Stream function `-Σ Γ_j ln|z - z_j| / 2π` of an explicit vortex set.
pub fn set_stream_function<T: Real>(z: Complex<T>, vortices: &VortexSet<T>) -> Result<T, FieldError> {
    let tol = lit::<T>(SINGULAR_TOL);
    let mut acc = T::zero();
    for (p, &g) in vortices.positions.iter().zip(&vortices.strengths) {
        let d = (z - *p).norm();
        if d <= tol {
            return Err(singular(z));
        }
        acc = acc + g * d.ln();
    }
    Ok(-acc / (lit::<T>(2.0) * T::PI()))
}

/// A planar point-vortex flow, observed either in the lab frame or in a
/// frame translating with constant velocity.
pub trait FlowField<T: Real>: Sync {
    /// Lab-frame conjugate velocity `u - i v`.
    fn conj_velocity(&self, z: Complex<T>) -> Result<Complex<T>, FieldError>;
    /// `d(u - i v)/dz`.
    fn conj_velocity_derivative(&self, z: Complex<T>) -> Result<Complex<T>, FieldError>;
    /// Both of the above in one pass.
    fn conj_velocity_with_derivative(&self, z: Complex<T>) -> Result<(Complex<T>, Complex<T>), FieldError> {
        Ok((self.conj_velocity(z)?, self.conj_velocity_derivative(z)?))
    }
    /// Lab-frame stream function.
    fn stream_function(&self, z: Complex<T>) -> Result<T, FieldError>;
    fn distance_to_nearest_vortex(&self, z: Complex<T>) -> T;
    /// Characteristic length (the row spacing `a`).
    fn length_scale(&self) -> T;
    /// Circulation magnitude used to scale tolerances.
    fn circulation_scale(&self) -> T;
}

/// The infinite (truncated) street array.
#[derive(Debug, Clone, Copy)]
pub struct ArrayField<T> {
    pub params: StreetParams<T>,
}

impl<T: Real> FlowField<T> for ArrayField<T> {
    fn conj_velocity(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        array_velocity(z, &self.params)
    }
    fn conj_velocity_derivative(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        array_velocity_derivative(z, &self.params)
    }
    fn conj_velocity_with_derivative(&self, z: Complex<T>) -> Result<(Complex<T>, Complex<T>), FieldError> {
        array_velocity_with_derivative(z, &self.params)
    }
    fn stream_function(&self, z: Complex<T>) -> Result<T, FieldError> {
        array_stream_function(z, &self.params)
    }
    fn distance_to_nearest_vortex(&self, z: Complex<T>) -> T {
        self.params.distance_to_nearest_vortex(z)
    }
    fn length_scale(&self) -> T {
        self.params.a
    }
    fn circulation_scale(&self) -> T {
        self.params.gamma.abs()
    }
}

/// An explicit finite vortex set.
#[derive(Debug, Clone)]
pub struct SetField<'a, T> {
    pub vortices: &'a VortexSet<T>,
    /// Length used for tolerances, normally the initial row spacing.
    pub length: T,
}

impl<T: Real> FlowField<T> for SetField<'_, T> {
    fn conj_velocity(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        set_velocity(z, self.vortices)
    }
    fn conj_velocity_derivative(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        set_velocity_derivative(z, self.vortices)
    }
    fn stream_function(&self, z: Complex<T>) -> Result<T, FieldError> {
        set_stream_function(z, self.vortices)
    }
    fn distance_to_nearest_vortex(&self, z: Complex<T>) -> T {
        self.vortices.distance_to_nearest(z)
    }
    fn length_scale(&self) -> T {
        self.length
    }
    fn circulation_scale(&self) -> T {
        self.vortices
            .strengths
            .iter()
            .fold(T::zero(), |m, g| m.max(g.abs()))
    }
}

/// A flow seen from a frame translating with velocity `frame = U + iV`.
///
/// The relative stream function is `Ψ - (U y - V x)` and the relative
/// conjugate velocity is `ū - (U - iV)`.
#[derive(Debug, Clone, Copy)]
pub struct CoMoving<'a, F, T> {
    pub field: &'a F,
    pub frame: Complex<T>,
}

impl<'a, F: FlowField<T>, T: Real> CoMoving<'a, F, T> {
    pub fn new(field: &'a F, frame: Complex<T>) -> Self {
        Self { field, frame }
    }

    /// Frame translating along `x` only.
    pub fn along_x(field: &'a F, u: T) -> Self {
        Self::new(field, cplx(u, T::zero()))
    }

    pub fn stream(&self, z: Complex<T>) -> Result<T, FieldError> {
        Ok(self.field.stream_function(z)? - (self.frame.re * z.im - self.frame.im * z.re))
    }

    /// Relative conjugate velocity `F(z)`; stagnation points are its zeros.
    pub fn conj_velocity(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        Ok(self.field.conj_velocity(z)? - self.frame.conj())
    }

    /// Relative velocity as a planar vector `u + i v`.
    pub fn velocity(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        Ok(self.conj_velocity(z)?.conj())
    }

    /// Gradient `(∂Ψ/∂x, ∂Ψ/∂y)` packed as a complex number.
    pub fn stream_gradient(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let f = self.conj_velocity(z)?;
        // Ψ_x = -v = Im F, Ψ_y = u - U = Re F
        Ok(cplx(f.im, f.re))
    }

    /// Hessian `[[Ψ_xx, Ψ_xy], [Ψ_xy, Ψ_yy]]` from the analytic `dF/dz`.
    pub fn stream_hessian(&self, z: Complex<T>) -> Result<[[T; 2]; 2], FieldError> {
        let d = self.field.conj_velocity_derivative(z)?;
        Ok([[d.im, d.re], [d.re, -d.im]])
    }

    pub fn field(&self) -> &F {
        self.field
    }
}

#[cfg(test)]
mod tests;
