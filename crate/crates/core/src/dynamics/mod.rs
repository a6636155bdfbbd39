//! Time evolution of finite vortex arrays.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{sample_stream_grid, CoMoving, FieldGrid, Resolution, SetField, Window};
use crate::lattice::{StreetParams, VortexLabel, VortexSet};
use crate::ode::{integrate_adaptive, rk4_step, AdaptiveError, Tolerance};
use crate::scalar::{cplx, from_usize, lit, Real};
use crate::topology::{search, StagnationKind, StagnationPoint};

/// Minimum separation (in units of a) below which integration aborts.
pub const COLLISION_FLOOR: f64 = 1e-8;
/// Default absolute tolerance (in units of a) of the adaptive scheme.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Positions at one instant; strengths never change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState<T> {
    pub time: T,
    pub vortices: VortexSet<T>,
}

impl<T: Real> SimState<T> {
    pub fn new(vortices: VortexSet<T>) -> Self {
        Self { time: T::zero(), vortices }
    }

    fn to_vec(&self) -> Vec<T> {
        self.vortices.positions.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    fn with_positions(&self, time: T, y: &[T]) -> Self {
        let mut vortices = self.vortices.clone();
        for (z, c) in vortices.positions.iter_mut().zip(y.chunks_exact(2)) {
            *z = cplx(c[0], c[1]);
        }
        Self { time, vortices }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError<T: std::fmt::Debug> {
    #[error("vortices {i} and {j} approached within {separation:e} at t = {time:?}")]
    NearCollision {
        i: usize,
        j: usize,
        separation: f64,
        time: T,
        /// Last state that passed the separation check.
        last_valid: Box<SimState<T>>,
    },
    #[error("invalid integration request: {0}")]
    Invalid(String),
    #[error("step size underflow at t = {time:?}")]
    StepUnderflow { time: T, last_valid: Box<SimState<T>> },
    #[error("reference vortex {0:?} not found")]
    MissingReference(VortexLabel),
}

/// A pair closer than the collision floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub i: usize,
    pub j: usize,
    pub separation: f64,
}

fn velocities_raw<T: Real>(
    positions: &[Complex<T>],
    strengths: &[T],
    floor: T,
) -> Result<Vec<Complex<T>>, Collision> {
    let n = positions.len();
    let scale = T::one() / (lit::<T>(2.0) * T::PI());
    let one = |k: usize| -> Result<Complex<T>, Collision> {
        let zk = positions[k];
        // conjugate velocity Σ Γ_j / (2πi (z_k - z_j)); planar velocity is its conjugate,
        // Σ Γ_j i (z_k - z_j) / (2π |z_k - z_j|²)
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            if j == k {
                continue;
            }
            let d = zk - positions[j];
            let r2 = d.norm_sqr();
            if r2 < floor * floor {
                return Err(Collision { i: k.min(j), j: k.max(j), separation: r2.sqrt().to_f64().unwrap_or(0.0) });
            }
            acc = acc + cplx(-d.im, d.re) * (strengths[j] / r2);
        }
        Ok(acc * scale)
    };
    if n >= 64 {
        (0..n).into_par_iter().map(one).collect()
    } else {
        (0..n).map(one).collect()
    }
}

/// Planar velocities `u + iv` of every vortex, induced by all the others.
pub fn vortex_velocities<T: Real>(state: &SimState<T>, length: T) -> Result<Vec<Complex<T>>, DynamicsError<T>> {
    let floor = lit::<T>(COLLISION_FLOOR) * length;
    velocities_raw(&state.vortices.positions, &state.vortices.strengths, floor).map_err(|c| {
        DynamicsError::NearCollision {
            i: c.i,
            j: c.j,
            separation: c.separation,
            time: state.time,
            last_valid: Box::new(state.clone()),
        }
    })
}

/// First integrals of the point-vortex system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedQuantities<T> {
    /// `-(1/4π) Σ_{i≠j} Γ_i Γ_j ln|z_i - z_j|`
    pub hamiltonian: T,
    /// `(Σ Γ_i x_i, Σ Γ_i y_i)`
    pub impulse: [T; 2],
    /// `Σ Γ_i |z_i|²`
    pub angular_impulse: T,
    pub total_circulation: T,
}

pub fn conserved_quantities<T: Real>(state: &SimState<T>) -> ConservedQuantities<T> {
    let z = &state.vortices.positions;
    let g = &state.vortices.strengths;
    let mut h = T::zero();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            h = h + g[i] * g[j] * (z[i] - z[j]).norm().ln();
        }
    }
    let mut impulse = [T::zero(); 2];
    let mut angular = T::zero();
    for (p, &s) in z.iter().zip(g) {
        impulse[0] = impulse[0] + s * p.re;
        impulse[1] = impulse[1] + s * p.im;
        angular = angular + s * p.norm_sqr();
    }
    ConservedQuantities {
        hamiltonian: -h / (lit::<T>(2.0) * T::PI()),
        impulse,
        angular_impulse: angular,
        total_circulation: g.iter().copied().sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Rk4Fixed,
    Rk45Adaptive,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rk4-fixed" | "rk4" => Ok(Scheme::Rk4Fixed),
            "rk45-adaptive" | "rk45" => Ok(Scheme::Rk45Adaptive),
            other => Err(format!("unknown scheme '{other}' (expected rk4-fixed or rk45-adaptive)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions<T> {
    pub scheme: Scheme,
    /// Fixed step for RK4, initial step guess for RK45.
    pub dt: T,
    /// Absolute position tolerance for RK45.
    pub tol: T,
    /// Times at which states are recorded; the final time is always recorded.
    pub snapshots: Vec<T>,
    /// Length unit for the collision floor.
    pub length: T,
}

impl<T: Real> IntegrateOptions<T> {
    pub fn adaptive(tol: T) -> Self {
        Self { scheme: Scheme::Rk45Adaptive, dt: lit(1e-2), tol, snapshots: Vec::new(), length: T::one() }
    }

    pub fn fixed(dt: T) -> Self {
        Self { scheme: Scheme::Rk4Fixed, dt, tol: lit(DEFAULT_TOL), snapshots: Vec::new(), length: T::one() }
    }

    pub fn with_snapshots(mut self, times: Vec<T>) -> Self {
        self.snapshots = times;
        self
    }
}

/// Recorded states with their first integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub snapshots: Vec<SimState<T>>,
    pub conserved: Vec<ConservedQuantities<T>>,
    pub steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &SimState<T> {
        self.snapshots.last().expect("trajectory always holds the final state")
    }
}

/// Advances `state` to `t_end`, recording the requested snapshots.
pub fn integrate<T: Real>(
    state: &SimState<T>,
    t_end: T,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>, DynamicsError<T>> {
    if !(opts.dt > T::zero()) || !(t_end >= state.time) || !(opts.tol > T::zero()) {
        return Err(DynamicsError::Invalid("need dt > 0, tol > 0 and t_end >= start time".into()));
    }
    let floor = lit::<T>(COLLISION_FLOOR) * opts.length;
    vortex_velocities(state, opts.length)?;
    let mut stops: Vec<T> = opts
        .snapshots
        .iter()
        .copied()
        .filter(|&t| t >= state.time && t <= t_end)
        .collect();
    stops.push(t_end);
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup();

    let strengths = state.vortices.strengths.clone();
    let mut rhs = |y: &[T]| -> Result<Vec<T>, Collision> {
        let pos: Vec<Complex<T>> = y.chunks_exact(2).map(|c| cplx(c[0], c[1])).collect();
        let v = velocities_raw(&pos, &strengths, floor)?;
        Ok(v.iter().flat_map(|w| [w.re, w.im]).collect())
    };
    let collided = |c: Collision, time: T, last: SimState<T>| DynamicsError::NearCollision {
        i: c.i,
        j: c.j,
        separation: c.separation,
        time,
        last_valid: Box::new(last),
    };

    let mut y = state.to_vec();
    let mut t = state.time;
    let mut h = opts.dt;
    let mut steps = 0;
    let mut traj = Trajectory { snapshots: Vec::new(), conserved: Vec::new(), steps: 0 };
    let tol = Tolerance::absolute(opts.tol * opts.length);
    for &stop in &stops {
        match opts.scheme {
            Scheme::Rk4Fixed => {
                while t < stop {
                    let dt = opts.dt.min(stop - t);
                    // land exactly on the stop when the remainder is round-off
                    let (dt, next) = if stop - (t + dt) <= T::epsilon() * stop.abs().max(T::one()) * lit(8.0) {
                        (stop - t, stop)
                    } else {
                        (dt, t + dt)
                    };
                    match rk4_step(&mut rhs, &y, dt) {
                        Ok(ny) => y = ny,
                        Err(c) => return Err(collided(c, t, state.with_positions(t, &y))),
                    }
                    t = next;
                    steps += 1;
                }
            }
            Scheme::Rk45Adaptive => {
                let before = y.clone();
                match integrate_adaptive(&mut rhs, &mut y, t, stop, &mut h, &tol) {
                    Ok(n) => steps += n,
                    Err(AdaptiveError::Rhs(c)) => return Err(collided(c, t, state.with_positions(t, &before))),
                    Err(_) => {
                        return Err(DynamicsError::StepUnderflow {
                            time: t,
                            last_valid: Box::new(state.with_positions(t, &before)),
                        })
                    }
                }
                t = stop;
            }
        }
        let snap = state.with_positions(stop, &y);
        traj.conserved.push(conserved_quantities(&snap));
        traj.snapshots.push(snap);
    }
    traj.steps = steps;
    Ok(traj)
}

/// Same positions with every strength negated; integrating it retraces the
/// original motion backwards in time.
pub fn time_reversed<T: Real>(state: &SimState<T>) -> SimState<T> {
    let mut s = state.clone();
    for g in &mut s.vortices.strengths {
        *g = -*g;
    }
    s
}

/// Velocity of the labelled vortex, used as a co-moving frame.
pub fn reference_velocity<T: Real>(
    state: &SimState<T>,
    reference: VortexLabel,
    length: T,
) -> Result<Complex<T>, DynamicsError<T>> {
    let idx = state.vortices.index_of(reference).ok_or(DynamicsError::MissingReference(reference))?;
    Ok(vortex_velocities(state, length)?[idx])
}

/// Relative stream function of the finite set, seen from a frame moving
/// with the instantaneous velocity of the reference vortex.
pub fn comoving_snapshot<T: Real>(
    state: &SimState<T>,
    reference: VortexLabel,
    window: Window<T>,
    resolution: Resolution,
    length: T,
) -> Result<FieldGrid<T>, DynamicsError<T>> {
    let frame_velocity = reference_velocity(state, reference, length)?;
    let field = SetField { vortices: &state.vortices, length };
    let frame = CoMoving::new(&field, frame_velocity);
    Ok(sample_stream_grid(window, resolution, &frame, false))
}

/// Level gap between two saddles that are x-translates of each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleGap<T> {
    pub left: StagnationPoint<T>,
    pub right: StagnationPoint<T>,
    pub gap: T,
}

/// Saddles of the central cell of a street-configured finite array, in the
/// frame of the reference vortex, and the level gaps between neighbouring
/// translates. In the infinite array every gap vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingReport<T> {
    pub frame_velocity: Complex<T>,
    pub saddles: Vec<StagnationPoint<T>>,
    pub gaps: Vec<SaddleGap<T>>,
}

impl<T: Real> SplittingReport<T> {
    pub fn max_gap(&self) -> T {
        self.gaps.iter().fold(T::zero(), |m, g| m.max(g.gap))
    }

    pub fn min_gap(&self) -> T {
        self.gaps.iter().fold(T::infinity(), |m, g| m.min(g.gap))
    }
}

/// Searches `-periods·a <= x < periods·a` across the period cell of the
/// central street.
pub fn saddle_splitting_report<T: Real>(
    state: &SimState<T>,
    params: &StreetParams<T>,
    reference: VortexLabel,
    periods: usize,
) -> Result<SplittingReport<T>, DynamicsError<T>> {
    let frame_velocity = reference_velocity(state, reference, params.a)?;
    let field = SetField { vortices: &state.vortices, length: params.a };
    let frame = CoMoving::new(&field, frame_velocity);
    let half = lit::<T>(0.5);
    let span = from_usize::<T>(periods) * params.a;
    let window = Window {
        x_min: -span,
        x_max: span,
        y_min: half * (params.b - params.h),
        y_max: half * (params.b + params.h),
    };
    let saddles: Vec<_> = search(&frame, window, 40 * 2 * periods, 40, None)
        .into_iter()
        .filter(|s| s.kind == StagnationKind::Saddle)
        .collect();
    let tol = lit::<T>(0.25) * params.a;
    let mut gaps = Vec::new();
    for s in &saddles {
        let target = s.position + cplx(params.a, T::zero());
        if let Some(t) = saddles.iter().find(|t| (t.position - target).norm() < tol) {
            gaps.push(SaddleGap { left: *s, right: *t, gap: (t.psi - s.psi).abs() });
        }
    }
    Ok(SplittingReport { frame_velocity, saddles, gaps })
}

/// A `±Γ` pair close together and moving together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipolePair<T> {
    pub i: usize,
    pub j: usize,
    pub distance: T,
    /// Mean planar velocity of the pair.
    pub velocity: Complex<T>,
}

/// Translating dipole pairs: opposite-sign vortices within `0.5 a` whose
/// velocity difference is below half the self-induced dipole speed
/// `Γ / (2π d)`. Each vortex joins at most one pair, nearest first.
pub fn dipole_clusters<T: Real>(state: &SimState<T>, length: T) -> Result<Vec<DipolePair<T>>, DynamicsError<T>> {
    let v = vortex_velocities(state, length)?;
    let z = &state.vortices.positions;
    let g = &state.vortices.strengths;
    let radius = lit::<T>(0.5) * length;
    let mut candidates = Vec::new();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if g[i] * g[j] >= T::zero() {
                continue;
            }
            let d = (z[i] - z[j]).norm();
            if d >= radius {
                continue;
            }
            let dipole_speed = g[i].abs().min(g[j].abs()) / (lit::<T>(2.0) * T::PI() * d);
            if (v[i] - v[j]).norm() < lit::<T>(0.5) * dipole_speed {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut used = vec![false; z.len()];
    let mut out = Vec::new();
    for (d, i, j) in candidates {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        out.push(DipolePair { i, j, distance: d, velocity: (v[i] + v[j]) * lit::<T>(0.5) });
    }
    Ok(out)
}
