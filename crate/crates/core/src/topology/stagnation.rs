//! Newton search for co-moving stagnation points.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::{CoMoving, FlowField, Window};
use crate::scalar::{cplx, from_usize, lit, Real};

/// Newton iterations allowed per seed.
pub const NEWTON_MAX_ITER: usize = 50;
/// Residual `|ū - U|` (in units of Γ/a) at which Newton stops.
pub const NEWTON_CONVERGED: f64 = 1e-12;
/// Largest residual (in units of Γ/a) of a reported root.
pub const NEWTON_ACCEPTED: f64 = 1e-10;
/// Roots closer than this (in units of a) are merged.
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StagnationKind {
    Saddle,
    Center,
}

/// A zero of the co-moving velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StagnationPoint<T> {
    pub position: Complex<T>,
    pub kind: StagnationKind,
    /// Relative stream function at the point.
    pub psi: T,
    /// Unit unstable and stable directions of a saddle.
    pub eigendirections: Option<[Complex<T>; 2]>,
    /// `|ū - U|` at the point.
    pub residual: T,
}

/// Classifies a root from the analytic velocity gradient.
///
/// The relative stream function is harmonic, so its Hessian
/// `[[Im F', Re F'], [Re F', -Im F']]` has determinant `-|F'|²`: every
/// nondegenerate stagnation point is a saddle. The unstable direction makes
/// the angle `-arg(F')/2` with the x-axis.
pub fn classify<T: Real, F: FlowField<T>>(
    frame: &CoMoving<'_, F, T>,
    z: Complex<T>,
) -> Option<StagnationPoint<T>> {
    let f = frame.conj_velocity(z).ok()?;
    let hess = frame.stream_hessian(z).ok()?;
    let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    let psi = frame.stream(z).ok()?;
    let (kind, eig) = if det < T::zero() {
        let d = frame.field().conj_velocity_derivative(z).ok()?;
        let theta = -d.arg() / lit::<T>(2.0);
        let unstable = cplx(theta.cos(), theta.sin());
        let stable = unstable * cplx(T::zero(), T::one());
        (StagnationKind::Saddle, Some([unstable, stable]))
    } else {
        (StagnationKind::Center, None)
    };
    Some(StagnationPoint { position: z, kind, psi, eigendirections: eig, residual: f.norm() })
}

/// Newton iteration on `F(z) = ū - conj(frame)` from `z`.
pub fn newton<T: Real, F: FlowField<T>>(frame: &CoMoving<'_, F, T>, mut z: Complex<T>) -> Option<Complex<T>> {
    let a = frame.field().length_scale();
    let vel = frame.field().circulation_scale() / a;
    let converged = lit::<T>(NEWTON_CONVERGED) * vel;
    let accepted = lit::<T>(NEWTON_ACCEPTED) * vel;
    let max_step = lit::<T>(0.1) * a;
    for _ in 0..NEWTON_MAX_ITER {
        let (v, d) = frame.field().conj_velocity_with_derivative(z).ok()?;
        let f = v - frame.frame.conj();
        if f.norm() < converged {
            return Some(z);
        }
        if d.norm() == T::zero() {
            return None;
        }
        let mut step = f / d;
        let len = step.norm();
        if len > max_step {
            step = step * (max_step / len);
        }
        z = z - step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
    }
    let f = frame.conj_velocity(z).ok()?;
    (f.norm() < accepted).then_some(z)
}

/// Seeds a `nx × ny` grid over `window`, runs Newton from each seed and
/// returns the distinct roots inside the window, sorted by `(y, x)`.
///
/// With `period = Some(p)` root abscissae are reduced into
/// `[x_min, x_min + p)` before deduplication.
pub fn search<T: Real, F: FlowField<T>>(
    frame: &CoMoving<'_, F, T>,
    window: Window<T>,
    nx: usize,
    ny: usize,
    period: Option<T>,
) -> Vec<StagnationPoint<T>> {
    let a = frame.field().length_scale();
    let dx = (window.x_max - window.x_min) / from_usize::<T>(nx);
    let dy = (window.y_max - window.y_min) / from_usize::<T>(ny);
    let half = lit::<T>(0.5);
    let mut roots: Vec<Complex<T>> = (0..nx * ny)
        .into_par_iter()
        .filter_map(|s| {
            let (i, j) = (s % nx, s / nx);
            let seed = cplx(
                window.x_min + (from_usize::<T>(i) + half) * dx,
                window.y_min + (from_usize::<T>(j) + half) * dy,
            );
            let mut z = newton(frame, seed)?;
            if let Some(p) = period {
                let shift = ((z.re - window.x_min) / p).floor();
                z.re = z.re - shift * p;
            }
            (z.im >= window.y_min && z.im < window.y_max && z.re >= window.x_min && z.re < window.x_max)
                .then_some(z)
        })
        .collect();
    roots.sort_by(|p, q| {
        p.im.partial_cmp(&q.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.re.partial_cmp(&q.re).unwrap_or(std::cmp::Ordering::Equal))
    });
    let tol = lit::<T>(DEDUP_TOL) * a;
    let same = |p: Complex<T>, q: Complex<T>| {
        let mut d = p - q;
        if let Some(per) = period {
            d.re = d.re - (d.re / per).round() * per;
        }
        d.norm() < tol
    };
    let mut unique: Vec<Complex<T>> = Vec::new();
    for z in roots {
        if !unique.iter().any(|&u| same(u, z)) {
            unique.push(z);
        }
    }
    unique.into_iter().filter_map(|z| classify(frame, z)).collect()
}
