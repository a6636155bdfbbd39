//! Co-moving stagnation points, separatrices and streamline topology.
//!
//! The topology class `k` counts the streets linked by the transport region
//! that surrounds the separatrices of the central street. It is obtained two
//! ways: by tracing the separatrices of the central saddles and recording
//! which streets they wind around, and from the ordering of the saddle
//! stream-function levels (see [`levels`]). The second is smooth in the
//! parameters and drives the bifurcation search.

pub mod levels;
pub mod separatrix;
pub mod stagnation;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equilibrium::array_speed;
use crate::field::{ArrayField, CoMoving, FieldError, Window};
use crate::lattice::{LatticeError, StreetParams};
use crate::scalar::{from_i64, lit, Real};

pub use levels::{level_class, saddle_levels, SaddleLevels};
pub use separatrix::{trace_branch, Branch, Termination, TraceOptions};
pub use stagnation::{classify, newton, search, StagnationKind, StagnationPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error(transparent)]
    Params(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("search window [{y_min}, {y_max}) leaves the reliable central region |y| <= {limit}")]
    WindowOutsideCore { y_min: f64, y_max: f64, limit: f64 },
    #[error("stagnation root count changed from {coarse} to {fine} under seed refinement")]
    RefinementMismatch { coarse: usize, fine: usize },
    #[error("no saddle found between streets 0 and 1")]
    NoSaddle,
    #[error("point is not a saddle")]
    NotSaddle,
    #[error("degenerate configuration: saddle levels coincide (gap {gap:e})")]
    Degenerate { gap: f64 },
    #[error("separatrix tracing gives class {traced}, saddle levels give {levels}")]
    TierMismatch { traced: usize, levels: usize },
}

/// Streamline-topology class: `k` streets share one transport region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyClass {
    pub k: usize,
    pub region_label: String,
}

impl TopologyClass {
    pub fn new(k: usize) -> Self {
        Self { k, region_label: region_label(k) }
    }
}

/// `1 -> A`, `2 -> B`, ..., `26 -> Z`, `27 -> AA`, ...
pub fn region_label(k: usize) -> String {
    let mut n = k;
    let mut out = Vec::new();
    while n > 0 {
        let r = (n - 1) % 26;
        out.push(b'A' + r as u8);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

/// Seed density per unit cell (one x-period by one street gap).
pub const SEEDS_PER_CELL: usize = 40;

/// The period cell of the central street, `b/2 - h/2 <= y < b/2 + h/2`.
pub fn central_window<T: Real>(params: &StreetParams<T>) -> (T, T) {
    let half = lit::<T>(0.5);
    (half * (params.b - params.h), half * (params.b + params.h))
}

fn search_cells<T: Real>(
    params: &StreetParams<T>,
    u: T,
    y_min: T,
    y_max: T,
    density: usize,
) -> Vec<StagnationPoint<T>> {
    let field = ArrayField { params: *params };
    let frame = CoMoving::along_x(&field, u);
    let gaps = ((y_max - y_min) / params.h).ceil().to_usize().unwrap_or(1).max(1);
    let window = Window { x_min: T::zero(), x_max: params.a, y_min, y_max };
    stagnation::search(&frame, window, density, density * gaps, Some(params.a))
}

/// All co-moving stagnation points with `0 <= x < a` and
/// `y_min <= y < y_max`, in the frame moving at `U_N`.
///
/// The count is checked against a search with doubled seed density.
pub fn find_stagnation_points<T: Real>(
    params: &StreetParams<T>,
    y_min: T,
    y_max: T,
) -> Result<Vec<StagnationPoint<T>>, TopologyError> {
    params.validate()?;
    if params.big_n > 0 {
        let limit = from_i64::<T>(params.big_n as i64) * params.h / lit(4.0);
        if y_min < -limit || y_max > limit || !(y_min < y_max) {
            return Err(TopologyError::WindowOutsideCore {
                y_min: y_min.to_f64().unwrap_or(f64::NAN),
                y_max: y_max.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let u = array_speed(params).u;
    let coarse = search_cells(params, u, y_min, y_max, SEEDS_PER_CELL);
    let fine = search_cells(params, u, y_min, y_max, 2 * SEEDS_PER_CELL);
    if coarse.len() != fine.len() {
        return Err(TopologyError::RefinementMismatch { coarse: coarse.len(), fine: fine.len() });
    }
    Ok(coarse)
}

/// Separatrix through a saddle of the street array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatrixPath<T> {
    pub origin: StagnationPoint<T>,
    /// The two branches leaving along `±` the unstable direction.
    pub branches: [Branch<T>; 2],
    /// Streets whose centre line the path crosses.
    pub streets_visited: BTreeSet<i64>,
    pub budget_exhausted: bool,
}

impl<T: Real> SeparatrixPath<T> {
    /// Both branches joined through the saddle into one polyline.
    pub fn polyline(&self) -> Vec<num_complex::Complex<T>> {
        let mut out: Vec<_> = self.branches[0].points.iter().rev().copied().collect();
        out.extend(self.branches[1].points.iter().skip(1));
        out
    }

    pub fn max_level_error(&self) -> T {
        self.branches[0].max_level_error.max(self.branches[1].max_level_error)
    }
}

/// Streets whose centre line `y = n h + b/2` the polyline reaches.
///
/// A separatrix that winds between the two rows of street `n` must cross its
/// centre line; one that only skirts the street does not.
pub fn streets_crossed<T: Real>(params: &StreetParams<T>, points: &[num_complex::Complex<T>]) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let (lo, hi) = points.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), z| {
        (lo.min(z.im), hi.max(z.im))
    });
    if !(lo <= hi) {
        return out;
    }
    let offset = lit::<T>(0.5) * params.b;
    let first = ((lo - offset) / params.h).ceil().to_i64().unwrap_or(0);
    let last = ((hi - offset) / params.h).floor().to_i64().unwrap_or(-1);
    out.extend(first..=last);
    out
}

/// Traces both branches of the separatrix through saddle `s` in the frame
/// moving at `u_frame`.
pub fn trace_separatrix<T: Real>(
    s: &StagnationPoint<T>,
    params: &StreetParams<T>,
    u_frame: T,
    arc_budget: T,
) -> Result<SeparatrixPath<T>, TopologyError> {
    let dirs = match (s.kind, s.eigendirections) {
        (StagnationKind::Saddle, Some(d)) => d,
        _ => return Err(TopologyError::NotSaddle),
    };
    let field = ArrayField { params: *params };
    let frame = CoMoving::along_x(&field, u_frame);
    let opts = TraceOptions::scaled(params.a, arc_budget, Some(params.a));
    let branches = [
        trace_branch(&frame, s, -dirs[0], &opts),
        trace_branch(&frame, s, dirs[0], &opts),
    ];
    let mut streets = streets_crossed(params, &branches[0].points);
    streets.extend(streets_crossed(params, &branches[1].points));
    let budget_exhausted = branches.iter().any(|b| b.termination == Termination::ArcBudget);
    Ok(SeparatrixPath { origin: *s, branches, streets_visited: streets, budget_exhausted })
}

/// Default arc budget for a class query: enough to wind around a handful of
/// streets in both directions.
pub fn default_arc_budget<T: Real>(params: &StreetParams<T>) -> T {
    lit::<T>(40.0) * (params.a + params.h)
}

/// Class from separatrix tracing alone.
pub fn traced_class<T: Real>(params: &StreetParams<T>) -> Result<(usize, Vec<SeparatrixPath<T>>), TopologyError> {
    let (y_min, y_max) = central_window(params);
    let points = find_stagnation_points(params, y_min, y_max)?;
    let u = array_speed(params).u;
    let budget = default_arc_budget(params);
    let paths = points
        .par_iter()
        .filter(|p| p.kind == StagnationKind::Saddle)
        .map(|p| trace_separatrix(p, params, u, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let k = paths.iter().map(|p| p.streets_visited.len()).max().unwrap_or(0).max(1);
    Ok((k, paths))
}

/// Topology class of the street array, traced and cross-checked against the
/// saddle-level ordering.
pub fn topology_class<T: Real>(params: &StreetParams<T>) -> Result<TopologyClass, TopologyError> {
    let levels = level_class(params)?;
    let (traced, _) = traced_class(params)?;
    if traced != levels {
        return Err(TopologyError::TierMismatch { traced, levels });
    }
    Ok(TopologyClass::new(levels))
}
