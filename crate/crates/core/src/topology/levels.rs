//! Saddle levels of the infinite array and the level-ordering class.
//!
//! On the symmetry line `x = 0` between the `-Γ` rows of streets 0 and 1 the
//! co-moving velocity is horizontal and has exactly one zero, the upper
//! saddle of street 0. The glide `(x, y) -> (x + a/2, b - y)` maps it onto the
//! lower saddle with `Ψ_l = -Ψ_u - U b`, and translation by `ih` shifts every
//! level by the flux per period `Δ = Γ b / a - U h`. The separatrix of the
//! upper saddle of street 0 reaches street `k` once `Ψ_u - Ψ_l` passes `k Δ`.

use num_complex::Complex;
use serde::Serialize;

use crate::equilibrium::array_speed;
use crate::field::{array_stream_function, array_velocity};
use crate::lattice::StreetParams;
use crate::roots::brent;
use crate::scalar::{cplx, lit, Real};

use super::TopologyError;

/// Saddle levels bounding the transport region of the central street.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleLevels<T> {
    /// Upper saddle of street 0, on `x = 0`.
    pub upper: Complex<T>,
    /// Lower saddle of street 0, on `x = a/2`.
    pub lower: Complex<T>,
    pub psi_upper: T,
    pub psi_lower: T,
    /// Frame speed `U_N`.
    pub u: T,
    /// Change of the relative stream function over one street period.
    pub period_flux: T,
}

impl<T: Real> SaddleLevels<T> {
    /// `q = (Ψ_u - Ψ_l) / Δ`; the class is `1 + floor(q)`.
    pub fn ratio(&self) -> T {
        (self.psi_upper - self.psi_lower) / self.period_flux
    }

    /// `g_k = Ψ_u - Ψ_l - k Δ`, which vanishes at the k-th bifurcation.
    pub fn gap(&self, k: usize) -> T {
        self.psi_upper - self.psi_lower - T::from_usize(k).unwrap() * self.period_flux
    }
}

/// Locates the upper saddle of street 0 and derives the level structure.
pub fn saddle_levels<T: Real>(params: &StreetParams<T>) -> Result<SaddleLevels<T>, TopologyError> {
    params.validate()?;
    let u = array_speed(params).u;
    let eps = lit::<T>(1e-9) * params.h;
    let f = |y: T| array_velocity(cplx(T::zero(), y), params).map(|w| w.re - u);
    let root = brent(f, eps, params.h - eps, lit(1e-15), T::zero(), 200)?.ok_or(TopologyError::NoSaddle)?;
    let upper = cplx(T::zero(), root.x);
    let psi_upper = array_stream_function(upper, params)? - u * root.x;
    let lower = cplx(lit::<T>(0.5) * params.a, params.b - root.x);
    let psi_lower = -psi_upper - u * params.b;
    let period_flux = params.gamma * params.b / params.a - u * params.h;
    Ok(SaddleLevels { upper, lower, psi_upper, psi_lower, u, period_flux })
}

/// Class from the ordering of saddle levels, `k = 1 + floor(q)`.
///
/// Fails with [`TopologyError::Degenerate`] when a saddle of street 0 and a
/// saddle of another street share a level to within `10⁻¹⁰ Γ`.
pub fn level_class<T: Real>(params: &StreetParams<T>) -> Result<usize, TopologyError> {
    let levels = saddle_levels(params)?;
    class_from_levels(&levels, params.gamma.abs())
}

pub(crate) fn class_from_levels<T: Real>(levels: &SaddleLevels<T>, gamma: T) -> Result<usize, TopologyError> {
    let tol = lit::<T>(1e-10) * gamma;
    if !(levels.period_flux < -tol) {
        return Err(TopologyError::Degenerate { gap: levels.period_flux.to_f64().unwrap_or(f64::NAN) });
    }
    let q = levels.ratio();
    let nearest = q.round().max(T::one());
    let gap = levels.psi_upper - levels.psi_lower - nearest * levels.period_flux;
    if gap.abs() < tol {
        return Err(TopologyError::Degenerate { gap: gap.to_f64().unwrap_or(f64::NAN) });
    }
    let k = T::one() + q.floor().max(T::zero());
    Ok(k.to_usize().unwrap_or(usize::MAX))
}
