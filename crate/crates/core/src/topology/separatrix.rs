//! Arc-length tracing of saddle separatrices.

use num_complex::Complex;
use serde::Serialize;

use crate::field::{CoMoving, FieldError, FlowField};
use crate::ode::dopri_step;
use crate::scalar::{cplx, lit, Real};

use super::stagnation::StagnationPoint;

/// Controls for [`trace_branch`]. Lengths are absolute.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions<T> {
    pub arc_budget: T,
    /// Initial displacement from the saddle along the unstable direction.
    pub offset: T,
    /// Distance to a translate of the origin saddle that ends a branch.
    pub closure_tol: T,
    /// Distance to a vortex that ends a branch.
    pub vortex_tol: T,
    /// Local error tolerance of the arc-length integration.
    pub step_tol: T,
    pub max_step: T,
    /// x-period of the flow, if any.
    pub period: Option<T>,
}

impl<T: Real> TraceOptions<T> {
    /// Defaults scaled by the row spacing `a`.
    pub fn scaled(a: T, arc_budget: T, period: Option<T>) -> Self {
        Self {
            arc_budget,
            offset: lit::<T>(1e-6) * a,
            closure_tol: lit::<T>(1e-5) * a,
            vortex_tol: lit::<T>(1e-3) * a,
            step_tol: lit::<T>(1e-10) * a,
            max_step: lit::<T>(0.02) * a,
            period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the origin saddle translated by `shift` periods.
    Closed { shift: i64 },
    ArcBudget,
    NearVortex,
    /// The step size collapsed, e.g. at a degenerate saddle connection.
    Stalled,
}

/// One half of a separatrix, starting next to the saddle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch<T> {
    pub points: Vec<Complex<T>>,
    pub termination: Termination,
    pub arc_length: T,
    /// Largest `|Ψ - ψ_saddle|` along the branch.
    pub max_level_error: T,
}

fn nearest_translate<T: Real>(z: Complex<T>, origin: Complex<T>, period: Option<T>) -> (i64, T) {
    match period {
        Some(p) => {
            let m = ((z.re - origin.re) / p).round();
            let d = (z - origin - cplx(m * p, T::zero())).norm();
            (m.to_i64().unwrap_or(0), d)
        }
        None => (0, (z - origin).norm()),
    }
}

fn direction<T: Real, F: FlowField<T>>(frame: &CoMoving<'_, F, T>, z: Complex<T>) -> Result<Complex<T>, FieldError> {
    let v = frame.velocity(z)?;
    let n = v.norm();
    Ok(if n > T::zero() { v / n } else { v })
}

/// Pulls `z` back onto the level `psi0` along the stream-function gradient.
fn project<T: Real, F: FlowField<T>>(
    frame: &CoMoving<'_, F, T>,
    z: Complex<T>,
    psi0: T,
    limit: T,
) -> Result<Complex<T>, FieldError> {
    let mut z = z;
    for _ in 0..2 {
        let g = frame.stream_gradient(z)?;
        let g2 = g.norm_sqr();
        if g2 == T::zero() {
            break;
        }
        let mut dz = g * ((frame.stream(z)? - psi0) / g2);
        let len = dz.norm();
        if len > limit {
            dz = dz * (limit / len);
        }
        z = z - dz;
    }
    Ok(z)
}

/// Follows the streamline through `saddle` leaving along `dir`.
pub fn trace_branch<T: Real, F: FlowField<T>>(
    frame: &CoMoving<'_, F, T>,
    saddle: &StagnationPoint<T>,
    dir: Complex<T>,
    opts: &TraceOptions<T>,
) -> Branch<T> {
    let origin = saddle.position;
    let psi0 = saddle.psi;
    let half = lit::<T>(0.5);
    let mut z = origin + dir * opts.offset;
    let mut points = vec![origin, z];
    let mut arc = opts.offset;
    let mut h = opts.offset;
    let mut armed = false;
    let mut max_err = T::zero();
    let arm_distance = lit::<T>(100.0) * opts.closure_tol;
    let h_floor = lit::<T>(1e-14) * opts.max_step;
    let mut rhs = |y: &[T]| -> Result<Vec<T>, FieldError> {
        let d = direction(frame, cplx(y[0], y[1]))?;
        Ok(vec![d.re, d.im])
    };
    let termination = loop {
        if arc >= opts.arc_budget {
            break Termination::ArcBudget;
        }
        let (shift, d_target) = nearest_translate(z, origin, opts.period);
        if shift != 0 || armed {
            if d_target < opts.closure_tol {
                break Termination::Closed { shift };
            }
        } else if d_target > arm_distance {
            armed = true;
        }
        let d_vortex = frame.field().distance_to_nearest_vortex(z);
        if d_vortex < opts.vortex_tol {
            break Termination::NearVortex;
        }
        let cap = opts.max_step.min(half * d_target).min(half * d_vortex);
        h = h.min(cap);
        if h < h_floor {
            break Termination::Stalled;
        }
        let step = match dopri_step(&mut rhs, &[z.re, z.im], h) {
            Ok(s) => s,
            Err(_) => break Termination::NearVortex,
        };
        let (y5, err) = step;
        let norm = err[0].abs().max(err[1].abs()) / opts.step_tol;
        if norm > T::one() {
            h = h * (lit::<T>(0.9) * norm.powf(lit(-0.2))).max(lit(0.2));
            continue;
        }
        let moved = cplx(y5[0], y5[1]);
        let next = match project(frame, moved, psi0, lit::<T>(0.1) * h) {
            Ok(p) => p,
            Err(_) => break Termination::NearVortex,
        };
        if let Ok(psi) = frame.stream(next) {
            max_err = max_err.max((psi - psi0).abs());
        }
        arc = arc + (next - z).norm();
        z = next;
        points.push(z);
        let grow = if norm == T::zero() { lit(5.0) } else { (lit::<T>(0.9) * norm.powf(lit(-0.2))).min(lit(5.0)) };
        h = h * grow;
    };
    Branch { points, termination, arc_length: arc, max_level_error: max_err }
}
