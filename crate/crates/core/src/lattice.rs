//! Street geometry: lattice parameters, finite truncated arrays and the
//! plain-text parameter file.
//!
//! Street `n` carries `-Γ` vortices at `m a + i n h` and `+Γ` vortices at
//! `(m + 1/2) a + i (b + n h)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cplx, from_i64, lit, Real};

/// Default truncation half-count: 301 streets.
pub const DEFAULT_BIG_N: usize = 150;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice parameter: {0}")]
    InvalidParams(String),
    #[error("invalid finite array: {0}")]
    InvalidArray(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("config key `{0}` is missing")]
    MissingKey(&'static str),
}

/// Parameters of the infinite staggered array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreetParams<T> {
    /// Spacing between neighbouring vortices of one row.
    pub a: T,
    /// Separation of the two rows of a street.
    pub b: T,
    /// Street-to-street separation.
    pub h: T,
    /// Circulation magnitude Γ.
    pub gamma: T,
    /// Streets `n = -N..=N` enter every lattice sum.
    pub big_n: usize,
}

impl<T: Real> StreetParams<T> {
    pub fn new(a: T, b: T, h: T, gamma: T, big_n: usize) -> Result<Self, LatticeError> {
        let p = Self { a, b, h, gamma, big_n };
        p.validate()?;
        Ok(p)
    }

    /// Unit spacing and circulation, the convention of every parameter study.
    pub fn unit(b: T, h: T, big_n: usize) -> Result<Self, LatticeError> {
        Self::new(T::one(), b, h, T::one(), big_n)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let bad = |m: String| Err(LatticeError::InvalidParams(m));
        let finite = [self.a, self.b, self.h, self.gamma].iter().all(|v| v.is_finite());
        if !finite {
            return bad("parameters must be finite".into());
        }
        if self.a <= T::zero() {
            return bad(format!("a = {} must be positive", self.a));
        }
        if self.h <= T::zero() {
            return bad(format!("h = {} must be positive", self.h));
        }
        if self.gamma == T::zero() {
            return bad("gamma must be non-zero".into());
        }
        if self.b <= T::zero() || self.b >= self.h {
            return bad(format!("b = {} must satisfy 0 < b < h = {}", self.b, self.h));
        }
        Ok(())
    }

    pub fn with_h(self, h: T) -> Self {
        Self { h, ..self }
    }

    pub fn with_big_n(self, big_n: usize) -> Self {
        Self { big_n, ..self }
    }

    /// Street indices of the truncated stack, `-N..=N`.
    pub fn street_indices(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.big_n as i64;
        -n..=n
    }

    /// Position of the `-Γ` vortex `(m, n)`.
    pub fn negative_site(&self, m: i64, n: i64) -> Complex<T> {
        cplx(from_i64::<T>(m) * self.a, from_i64::<T>(n) * self.h)
    }

    /// Position of the `+Γ` vortex `(m, n)`.
    pub fn positive_site(&self, m: i64, n: i64) -> Complex<T> {
        let half = lit::<T>(0.5);
        cplx(
            (from_i64::<T>(m) + half) * self.a,
            self.b + from_i64::<T>(n) * self.h,
        )
    }

    /// Distance from `z` to the nearest vortex of the truncated stack.
    pub fn distance_to_nearest_vortex(&self, z: Complex<T>) -> T {
        let half = lit::<T>(0.5);
        let wrap = |x: T| {
            // distance to the nearest multiple of a
            let r = x / self.a - (x / self.a).round();
            r.abs() * self.a
        };
        let dxn = wrap(z.re);
        let dxp = wrap(z.re - half * self.a);
        let n_max = from_i64::<T>(self.big_n as i64);
        let clamp = |v: T| v.max(-n_max).min(n_max);
        let mut best = T::infinity();
        // nearest two streets of each row family suffice
        for base in [z.im / self.h, (z.im - self.b) / self.h] {
            let c = clamp(base.floor());
            for n in [c, clamp(c + T::one())] {
                let dyn_ = z.im - n * self.h;
                let dyp = z.im - self.b - n * self.h;
                best = best.min(dxn.hypot(dyn_)).min(dxp.hypot(dyp));
            }
        }
        best
    }
}

/// Parameters rescaled to `a = 1`, `|Γ| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nondimensional<T> {
    pub params: StreetParams<T>,
    /// Length unit: the original `a`.
    pub length_scale: T,
    /// Time unit `a² / |Γ|`.
    pub time_scale: T,
}

/// Rescales space by `a` and time by `a²/|Γ|`.
///
/// The sign of Γ is kept so that a negative circulation still maps onto the
/// same flow (with `gamma = -1`).
pub fn nondimensionalize<T: Real>(params: &StreetParams<T>) -> Result<Nondimensional<T>, LatticeError> {
    params.validate()?;
    let a = params.a;
    let scaled = StreetParams {
        a: T::one(),
        b: params.b / a,
        h: params.h / a,
        gamma: params.gamma.signum(),
        big_n: params.big_n,
    };
    scaled.validate()?;
    Ok(Nondimensional {
        params: scaled,
        length_scale: a,
        time_scale: a * a / params.gamma.abs(),
    })
}

/// Shape of a finite truncated array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteArraySpec {
    /// Number of streets; odd so that a middle street exists.
    pub n_streets: usize,
    /// Vortices in each of the two rows of a street.
    pub vortices_per_row: usize,
}

impl FiniteArraySpec {
    pub fn new(n_streets: usize, vortices_per_row: usize) -> Result<Self, LatticeError> {
        let s = Self { n_streets, vortices_per_row };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n_streets == 0 || self.vortices_per_row == 0 {
            return Err(LatticeError::InvalidArray("counts must be positive".into()));
        }
        if self.n_streets.is_multiple_of(2) {
            return Err(LatticeError::InvalidArray(format!(
                "n_streets = {} must be odd",
                self.n_streets
            )));
        }
        Ok(())
    }

    /// Column indices `m`: `P` consecutive integers starting at `-floor(P/2)`.
    pub fn row_indices(&self) -> std::ops::Range<i64> {
        let p = self.vortices_per_row as i64;
        let lo = -(p / 2);
        lo..lo + p
    }

    /// Street indices `n = -(S-1)/2 ..= (S-1)/2`.
    pub fn street_indices(&self) -> std::ops::RangeInclusive<i64> {
        let half = (self.n_streets as i64 - 1) / 2;
        -half..=half
    }

    pub fn total(&self) -> usize {
        2 * self.n_streets * self.vortices_per_row
    }
}

/// `(p, n)` label of a finite-array vortex. Odd `p = 2m + 1` are the `-Γ`
/// vortices at `m a + i n h`, even `p = 2m` the `+Γ` vortices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VortexLabel {
    pub p: i64,
    pub n: i64,
}

impl VortexLabel {
    pub fn is_negative(&self) -> bool {
        self.p.rem_euclid(2) == 1
    }

    /// Column index `m` recovered from `p`.
    pub fn column(&self) -> i64 {
        if self.is_negative() {
            (self.p - 1).div_euclid(2)
        } else {
            self.p.div_euclid(2)
        }
    }
}

impl fmt::Display for VortexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.n)
    }
}

/// An explicit finite collection of point vortices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexSet<T> {
    pub positions: Vec<Complex<T>>,
    pub strengths: Vec<T>,
    pub labels: Vec<VortexLabel>,
}

impl<T: Real> VortexSet<T> {
    /// Builds a set from raw data, labelling vortices `(i, 0)` in order.
    pub fn from_points(points: Vec<(Complex<T>, T)>) -> Self {
        let labels = (0..points.len())
            .map(|i| VortexLabel { p: i as i64, n: 0 })
            .collect();
        let (positions, strengths) = points.into_iter().unzip();
        Self { positions, strengths, labels }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_circulation(&self) -> T {
        self.strengths.iter().copied().sum()
    }

    pub fn index_of(&self, label: VortexLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    /// Smallest pairwise distance (infinite for fewer than two vortices).
    pub fn min_separation(&self) -> T {
        let mut best = T::infinity();
        for i in 0..self.positions.len() {
            for j in i + 1..self.positions.len() {
                best = best.min((self.positions[i] - self.positions[j]).norm());
            }
        }
        best
    }

    /// Distance from `z` to the nearest vortex.
    pub fn distance_to_nearest(&self, z: Complex<T>) -> T {
        self.positions
            .iter()
            .map(|p| (*p - z).norm())
            .fold(T::infinity(), T::min)
    }

    /// Copy with every position shifted by `dz`.
    pub fn translated(&self, dz: Complex<T>) -> Self {
        Self {
            positions: self.positions.iter().map(|p| *p + dz).collect(),
            ..self.clone()
        }
    }
}

/// Builds the truncated street array used for time evolution.
///
/// A `-Γ` vortex sits exactly at the origin (label `p = 1, n = 0`).
pub fn build_finite_array<T: Real>(
    params: &StreetParams<T>,
    spec: &FiniteArraySpec,
) -> Result<VortexSet<T>, LatticeError> {
    params.validate()?;
    spec.validate()?;
    let mut positions = Vec::with_capacity(spec.total());
    let mut strengths = Vec::with_capacity(spec.total());
    let mut labels = Vec::with_capacity(spec.total());
    for n in spec.street_indices() {
        for m in spec.row_indices() {
            positions.push(params.negative_site(m, n));
            strengths.push(-params.gamma);
            labels.push(VortexLabel { p: 2 * m + 1, n });

            positions.push(params.positive_site(m, n));
            strengths.push(params.gamma);
            labels.push(VortexLabel { p: 2 * m, n });
        }
    }
    Ok(VortexSet { positions, strengths, labels })
}

/// Label of the `-Γ` vortex at the origin.
pub const ORIGIN_LABEL: VortexLabel = VortexLabel { p: 1, n: 0 };

/// Contents of a `key = value` parameter file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamFile {
    entries: BTreeMap<String, String>,
}

impl ParamFile {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| LatticeError::Config {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(LatticeError::Config { line: i + 1, msg: "empty key".into() });
            }
            entries.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn number(&self, key: &'static str) -> Result<Option<f64>, LatticeError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| LatticeError::Config {
                    line: 0,
                    msg: format!("`{key}` is not a number: `{v}`"),
                })
            })
            .transpose()
    }

    fn count(&self, key: &'static str) -> Result<Option<usize>, LatticeError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| LatticeError::Config {
                    line: 0,
                    msg: format!("`{key}` is not a non-negative integer: `{v}`"),
                })
            })
            .transpose()
    }

    /// Street parameters; `a` and `gamma` default to 1 and `big_n` to 150.
    pub fn street_params<T: Real>(&self) -> Result<StreetParams<T>, LatticeError> {
        let a = self.number("a")?.unwrap_or(1.0);
        let gamma = self.number("gamma")?.unwrap_or(1.0);
        let b = self.number("b")?.ok_or(LatticeError::MissingKey("b"))?;
        let h = self.number("h")?.ok_or(LatticeError::MissingKey("h"))?;
        let big_n = self.count("big_n")?.unwrap_or(DEFAULT_BIG_N);
        StreetParams::new(lit(a), lit(b), lit(h), lit(gamma), big_n)
    }

    /// Finite array shape; defaults to 11 streets of 10 vortices per row.
    pub fn finite_array_spec(&self) -> Result<FiniteArraySpec, LatticeError> {
        FiniteArraySpec::new(
            self.count("n_streets")?.unwrap_or(11),
            self.count("vortices_per_row")?.unwrap_or(10),
        )
    }
}
