//! Critical street separations `h_k`, bifurcation curves over `b`, and the
//! geometric scaling law `h_k ≈ h_∞ + c / δ^k`.
//!
//! Classes come from the saddle-level ordering of the topology module; each
//! `h_k` is bracketed by bisection on the integer class and then refined as
//! the root of the level gap `g_k(h)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::StreetParams;
use crate::roots::brent;
use crate::scalar::{from_usize, lit, Real};
use crate::topology::{saddle_levels, TopologyError};

/// Bracket width at which class bisection hands over to root refinement.
pub const BISECTION_WIDTH: f64 = 1e-4;
/// Level-gap tolerance (in units of Γ) for `k <= 50`.
pub const GAP_TOL: f64 = 1e-12;
/// Level-gap tolerance (in units of Γ) for `k > 50`.
pub const DEEP_GAP_TOL: f64 = 1e-13;
/// Default OLS window `[k_lo, k_hi]` for [`fit_scaling`].
pub const DEFAULT_FIT_WINDOW: (usize, usize) = (20, 60);
/// Largest supported sequence length.
pub const MAX_K: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcationError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid bracket [{h_lo}, {h_hi}] for k = {k}: classes {class_lo} and {class_hi}")]
    InvalidBracket { k: usize, h_lo: f64, h_hi: f64, class_lo: usize, class_hi: usize },
    #[error("b = {b} is outside (0, 1/2); b = 1/2 is the degenerate square lattice")]
    Degenerate { b: f64 },
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("level-gap refinement failed for k = {k}")]
    Refinement { k: usize },
    #[error("scaling fit: {0}")]
    Fit(String),
}

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Class `1 + floor(q)` at separation `h`, without the degeneracy guard.
///
/// The flux per period `Δ` vanishes at the accumulation point `h_∞` of the
/// sequence and is positive below it, where every street is linked; such
/// separations report `usize::MAX`.
pub fn class_at<T: Real>(base: &StreetParams<T>, h: T) -> Result<usize, BifurcationError> {
    let levels = saddle_levels(&base.with_h(h))?;
    if !(levels.period_flux < T::zero()) {
        return Ok(usize::MAX);
    }
    let q = levels.ratio().floor().max(T::zero());
    Ok(1 + q.to_usize().unwrap_or(usize::MAX - 1))
}

/// One critical separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bifurcation<T> {
    pub k: usize,
    pub h: T,
    /// Bound on `|h - h_k|` implied by the final level gap.
    pub tolerance: T,
    /// Level gap `g_k` at `h`.
    pub gap: T,
}

/// Locates `h_k` inside `bracket = (h_lo, h_hi)`, where the class must be
/// `k + 1` at `h_lo` and `k` at `h_hi`. `base` supplies `a`, `b`, `Γ`, `N`.
pub fn find_bifurcation<T: Real>(
    base: &StreetParams<T>,
    k: usize,
    bracket: (T, T),
) -> Result<Bifurcation<T>, BifurcationError> {
    let (mut lo, mut hi) = bracket;
    let invalid = |class_lo, class_hi| BifurcationError::InvalidBracket {
        k,
        h_lo: f64_of(bracket.0),
        h_hi: f64_of(bracket.1),
        class_lo,
        class_hi,
    };
    if k == 0 || !(lo < hi) || lo <= base.b {
        return Err(invalid(0, 0));
    }
    let (class_lo, class_hi) = (class_at(base, lo)?, class_at(base, hi)?);
    if class_lo != k + 1 || class_hi != k {
        return Err(invalid(class_lo, class_hi));
    }
    let width = lit::<T>(BISECTION_WIDTH) * base.a;
    let half = lit::<T>(0.5);
    while hi - lo > width {
        let mid = half * (lo + hi);
        if class_at(base, mid)? > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tol = lit::<T>(if k > 50 { DEEP_GAP_TOL } else { GAP_TOL }) * base.gamma.abs();
    let gap = |h: T| saddle_levels(&base.with_h(h)).map(|l| l.gap(k));
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    let root = brent(gap, lo, hi, T::epsilon() * hi, tol, 200)?.ok_or(BifurcationError::Refinement { k })?;
    if !(root.fx.abs() <= tol) {
        return Err(BifurcationError::Refinement { k });
    }
    let slope = ((g_hi - g_lo) / (hi - lo)).abs();
    let tolerance = (root.fx.abs() + tol) / slope;
    Ok(Bifurcation { k, h: root.x, tolerance, gap: root.fx })
}

/// Ordered critical separations `h_1 > h_2 > ...` at fixed `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationSequence<T> {
    pub b: T,
    pub h_values: Vec<T>,
    pub tolerances: Vec<T>,
}

impl<T: Real> BifurcationSequence<T> {
    /// `h_k` for 1-based `k`.
    pub fn h(&self, k: usize) -> Option<T> {
        k.checked_sub(1).and_then(|i| self.h_values.get(i)).copied()
    }

    pub fn len(&self) -> usize {
        self.h_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_values.is_empty()
    }
}

/// Shrinks `(lo, hi)` (class `> k` at `lo`, `<= k` at `hi`) until the class
/// at `lo` is exactly `k + 1` and at `hi` exactly `k`.
fn tighten<T: Real>(base: &StreetParams<T>, k: usize, mut lo: T, mut hi: T) -> Result<(T, T), BifurcationError> {
    let half = lit::<T>(0.5);
    let mut class_lo = class_at(base, lo)?;
    let mut class_hi = class_at(base, hi)?;
    for _ in 0..200 {
        if class_lo == k + 1 && class_hi == k {
            return Ok((lo, hi));
        }
        let mid = half * (lo + hi);
        let c = class_at(base, mid)?;
        if c > k {
            lo = mid;
            class_lo = c;
        } else {
            hi = mid;
            class_hi = c;
        }
    }
    Err(BifurcationError::InvalidBracket {
        k,
        h_lo: f64_of(lo),
        h_hi: f64_of(hi),
        class_lo,
        class_hi,
    })
}

/// `h_1, ..., h_{k_max}` at the `b` of `base`, each bracket chained from the
/// previous root.
pub fn bifurcation_sequence<T: Real>(
    base: &StreetParams<T>,
    k_max: usize,
) -> Result<BifurcationSequence<T>, BifurcationError> {
    base.validate().map_err(TopologyError::from)?;
    let ratio = base.b / base.a;
    let half = lit::<T>(0.5);
    if !(ratio > T::zero() && ratio < half) {
        return Err(BifurcationError::Degenerate { b: f64_of(ratio) });
    }
    if k_max == 0 || k_max > MAX_K {
        return Err(BifurcationError::Invalid(format!("k_max must lie in 1..={MAX_K}, got {k_max}")));
    }
    // an upper end in class 1
    let mut hi = base.a.max(lit::<T>(2.0) * base.b);
    while class_at(base, hi)? > 1 {
        hi = hi * lit(2.0);
    }
    let floor = base.b + lit::<T>(1e-6) * base.a;
    let mut step = lit::<T>(0.1) * base.a;
    let mut seq = BifurcationSequence { b: base.b, h_values: Vec::new(), tolerances: Vec::new() };
    for k in 1..=k_max {
        let mut lo = (hi - step).max(floor);
        while class_at(base, lo)? <= k {
            if lo <= floor {
                return Err(BifurcationError::InvalidBracket {
                    k,
                    h_lo: f64_of(lo),
                    h_hi: f64_of(hi),
                    class_lo: k,
                    class_hi: k,
                });
            }
            step = step * lit(2.0);
            lo = (hi - step).max(floor);
        }
        let (lo, hi_k) = tighten(base, k, lo, hi)?;
        let bif = find_bifurcation(base, k, (lo, hi_k))?;
        if let Some(&prev) = seq.h_values.last() {
            step = (prev - bif.h) * lit(1.5);
        } else {
            step = (hi - bif.h).max(step) * half;
        }
        let guard = (lit::<T>(10.0) * bif.tolerance).max(T::epsilon() * bif.h * lit(64.0));
        hi = bif.h - guard;
        seq.h_values.push(bif.h);
        seq.tolerances.push(bif.tolerance);
    }
    Ok(seq)
}

/// `b` values from 0.05 to 0.5 in 22 equal increments.
pub fn default_b_grid<T: Real>() -> Vec<T> {
    (0..=22).map(|i| lit::<T>(0.05) + lit::<T>(0.45) * from_usize::<T>(i) / lit(22.0)).collect()
}

/// Bifurcation values over a grid of `b`; failures are kept per point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationCurves<T> {
    pub k_max: usize,
    pub b: Vec<T>,
    pub points: Vec<Result<Vec<T>, String>>,
}

impl<T: Real> BifurcationCurves<T> {
    /// `(b, h_k(b))` over the points that succeeded.
    pub fn curve(&self, k: usize) -> Vec<(T, T)> {
        self.b
            .iter()
            .zip(&self.points)
            .filter_map(|(&b, p)| p.as_ref().ok().and_then(|h| h.get(k - 1)).map(|&h| (b, h)))
            .collect()
    }

    /// Linear extrapolation of `h_k` to `b_target` through the last `n_last`
    /// successful points of the curve.
    pub fn extrapolate(&self, k: usize, b_target: T, n_last: usize) -> Option<T> {
        let pts = self.curve(k);
        if pts.len() < 2 || n_last < 2 {
            return None;
        }
        let tail = &pts[pts.len() - n_last.min(pts.len())..];
        let (slope, intercept) = ols(tail.iter().copied())?;
        Some(intercept + slope * b_target)
    }
}

/// Runs [`bifurcation_sequence`] for every `b` in parallel.
pub fn bifurcation_curves<T: Real>(base: &StreetParams<T>, b_grid: &[T], k_max: usize) -> BifurcationCurves<T> {
    let points = b_grid
        .par_iter()
        .map(|&b| {
            let mut p = *base;
            p.b = b * base.a;
            bifurcation_sequence(&p, k_max)
                .map(|s| s.h_values)
                .map_err(|e| e.to_string())
        })
        .collect();
    BifurcationCurves { k_max, b: b_grid.to_vec(), points }
}

/// Least-squares line `y = slope x + intercept`.
fn ols<T: Real>(pts: impl Iterator<Item = (T, T)> + Clone) -> Option<(T, T)> {
    let n = from_usize::<T>(pts.clone().count());
    if n < lit(2.0) {
        return None;
    }
    let mx = pts.clone().map(|p| p.0).sum::<T>() / n;
    let my = pts.clone().map(|p| p.1).sum::<T>() / n;
    let sxx = pts.clone().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fitted scaling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit<T> {
    /// Limit used in the fit (the last computed `h_k` unless given).
    pub h_inf_proxy: T,
    pub c: T,
    pub delta: T,
    pub fit_window: (usize, usize),
    /// Root-mean-square residual of the fit in `log(h_k - h_∞)`.
    pub rms_residual: T,
}

/// Fits `log(h_k - h_ref) = log c - k log δ` over `window`, using the last
/// entry of the sequence as `h_ref`.
pub fn fit_scaling<T: Real>(
    seq: &BifurcationSequence<T>,
    window: (usize, usize),
) -> Result<ScalingFit<T>, BifurcationError> {
    let last = seq.len();
    if window.1 >= last {
        return Err(BifurcationError::Fit(format!(
            "window end {} must be below the last index {last}",
            window.1
        )));
    }
    fit_scaling_with_limit(seq, window, seq.h_values[last - 1])
}

/// As [`fit_scaling`] with an explicit limit `h_ref`.
pub fn fit_scaling_with_limit<T: Real>(
    seq: &BifurcationSequence<T>,
    window: (usize, usize),
    h_ref: T,
) -> Result<ScalingFit<T>, BifurcationError> {
    let (k_lo, k_hi) = window;
    if k_lo == 0 || k_lo >= k_hi || k_hi > seq.len() {
        return Err(BifurcationError::Fit(format!(
            "window [{k_lo}, {k_hi}] does not fit a sequence of {}",
            seq.len()
        )));
    }
    let mut pts = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let d = seq.h(k).unwrap() - h_ref;
        if !(d > T::zero()) {
            return Err(BifurcationError::Fit(format!("h_{k} does not exceed the limit")));
        }
        pts.push((from_usize::<T>(k), d.ln()));
    }
    let (slope, intercept) =
        ols(pts.iter().copied()).ok_or_else(|| BifurcationError::Fit("degenerate window".into()))?;
    let rms = (pts
        .iter()
        .map(|&(k, y)| {
            let r = y - (intercept + slope * k);
            r * r
        })
        .sum::<T>()
        / from_usize::<T>(pts.len()))
    .sqrt();
    let delta = (-slope).exp();
    let c = intercept.exp();
    if !(delta > T::one()) {
        return Err(BifurcationError::Fit(format!("ratio δ = {} is not above 1", f64_of(delta))));
    }
    Ok(ScalingFit { h_inf_proxy: h_ref, c, delta, fit_window: window, rms_residual: rms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(b: f64) -> StreetParams<f64> {
        StreetParams::unit(b, 1.0, 150).unwrap()
    }

    #[test]
    fn first_three_critical_values() {
        let seq = bifurcation_sequence(&base(0.2805), 3).unwrap();
        let expected = [0.9598, 0.8568, 0.8096];
        for (h, p) in seq.h_values.iter().zip(expected) {
            assert!((h - p).abs() < 5e-3, "{h} vs {p}");
        }
        assert!(seq.tolerances.iter().all(|&t| t <= 1e-8));
    }

    #[test]
    fn bracket_is_consistent() {
        let b = base(0.2805);
        let seq = bifurcation_sequence(&b, 6).unwrap();
        for (i, (&h, &tol)) in seq.h_values.iter().zip(&seq.tolerances).enumerate() {
            let k = i + 1;
            assert_eq!(class_at(&b, h + 10.0 * tol).unwrap(), k);
            assert_eq!(class_at(&b, h - 10.0 * tol).unwrap(), k + 1);
        }
    }

    #[test]
    fn invalid_brackets_are_rejected() {
        let b = base(0.2805);
        assert!(matches!(
            find_bifurcation(&b, 1, (0.82, 1.2)),
            Err(BifurcationError::InvalidBracket { class_lo: 3, class_hi: 1, .. })
        ));
        assert!(matches!(find_bifurcation(&b, 1, (1.0, 0.9)), Err(BifurcationError::InvalidBracket { .. })));
        let h1 = find_bifurcation(&b, 1, (0.9, 1.2)).unwrap();
        assert!((h1.h - 0.959832).abs() < 1e-5);
    }

    #[test]
    fn degenerate_and_invalid_requests() {
        assert!(matches!(bifurcation_sequence(&base(0.5), 3), Err(BifurcationError::Degenerate { .. })));
        assert!(matches!(bifurcation_sequence(&base(0.2), 0), Err(BifurcationError::Invalid(_))));
        assert!(matches!(bifurcation_sequence(&base(0.2), 101), Err(BifurcationError::Invalid(_))));
    }

    #[test]
    fn sequence_decreases_with_shrinking_gaps() {
        let seq = bifurcation_sequence(&base(0.3), 30).unwrap();
        let gaps: Vec<f64> = seq.h_values.windows(2).map(|w| w[0] - w[1]).collect();
        assert!(gaps.iter().all(|&g| g > 0.0));
        assert!(gaps.windows(2).skip(5).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fit_recovers_exact_model() {
        let (h, c, d) = (0.6, 0.12, 1.035);
        let seq = BifurcationSequence {
            b: 0.3,
            h_values: (1..=100).map(|k| h + c / f64::powi(d, k)).collect(),
            tolerances: vec![0.0; 100],
        };
        let fit = fit_scaling_with_limit(&seq, (10, 60), h).unwrap();
        assert!((fit.c - c).abs() < 1e-10 && (fit.delta - d).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-10);
        let proxy = fit_scaling(&seq, DEFAULT_FIT_WINDOW).unwrap();
        assert_eq!(proxy.h_inf_proxy, seq.h_values[99]);
        assert!(proxy.delta > 1.0);
    }

    #[test]
    fn fit_rejects_bad_windows() {
        let seq = BifurcationSequence { b: 0.3, h_values: vec![1.0, 0.9, 0.85, 0.84], tolerances: vec![0.0; 4] };
        assert!(fit_scaling(&seq, (1, 4)).is_err());
        assert!(fit_scaling_with_limit(&seq, (2, 2), 0.5).is_err());
        assert!(fit_scaling_with_limit(&seq, (1, 4), 0.86).is_err());
    }

    #[test]
    fn grid_has_23_points() {
        let g: Vec<f64> = default_b_grid();
        assert_eq!(g.len(), 23);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[22] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn curves_record_failures_and_order() {
        let curves = bifurcation_curves(&base(0.2), &[0.2, 0.3, 0.5], 3);
        assert!(curves.points[2].is_err());
        for p in curves.points.iter().take(2) {
            let h = p.as_ref().unwrap();
            assert!(h[0] > h[1] && h[1] > h[2]);
        }
        assert_eq!(curves.curve(2).len(), 2);
    }
}
