//! Rectangular sampling of scalar and vector fields.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CoMoving, FlowField, MASK_TOL};
use crate::format::fmt_sig;
use crate::scalar::{cplx, from_usize, lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Real> Window<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Option<Self> {
        let ok = x_min < x_max && y_min < y_max && [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        ok.then_some(Self { x_min, x_max, y_min, y_max })
    }

    pub fn shifted(&self, dx: T, dy: T) -> Self {
        Self {
            x_min: self.x_min + dx,
            x_max: self.x_max + dx,
            y_min: self.y_min + dy,
            y_max: self.y_max + dy,
        }
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nx: usize,
    pub ny: usize,
}

impl Resolution {
    pub fn new(nx: usize, ny: usize) -> Option<Self> {
        (nx >= 2 && ny >= 2).then_some(Self { nx, ny })
    }
}

/// One evaluated grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSample<T> {
    Masked,
    Scalar(T),
    Vector(T, [T; 2]),
}

/// Samples on a regular `nx × ny` lattice of nodes, stored row-major
/// (`y` outer, `x` inner). Masked nodes hold `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid<T> {
    pub window: Window<T>,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vectors: Option<Vec<[T; 2]>>,
}

impl<T: Real> FieldGrid<T> {
    pub fn dx(&self) -> T {
        (self.window.x_max - self.window.x_min) / from_usize::<T>(self.nx - 1)
    }

    pub fn dy(&self) -> T {
        (self.window.y_max - self.window.y_min) / from_usize::<T>(self.ny - 1)
    }

    pub fn x(&self, i: usize) -> T {
        self.window.x_min + from_usize::<T>(i) * self.dx()
    }

    pub fn y(&self, j: usize) -> T {
        self.window.y_min + from_usize::<T>(j) * self.dy()
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[j * self.nx + i]
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.value(i, j).is_nan()
    }

    /// Bilinear interpolation; `None` outside the window or next to a mask.
    pub fn interpolate(&self, x: T, y: T) -> Option<T> {
        if !self.window.contains(cplx(x, y)) {
            return None;
        }
        let fx = (x - self.window.x_min) / self.dx();
        let fy = (y - self.window.y_min) / self.dy();
        let i = fx.floor().to_usize()?.min(self.nx - 2);
        let j = fy.floor().to_usize()?.min(self.ny - 2);
        let tx = fx - from_usize::<T>(i);
        let ty = fy - from_usize::<T>(j);
        let one = T::one();
        let v = self.value(i, j) * (one - tx) * (one - ty)
            + self.value(i + 1, j) * tx * (one - ty)
            + self.value(i, j + 1) * (one - tx) * ty
            + self.value(i + 1, j + 1) * tx * ty;
        (!v.is_nan()).then_some(v)
    }

    /// Finite (unmasked) value range.
    pub fn range(&self) -> Option<(T, T)> {
        let mut it = self.values.iter().copied().filter(|v| !v.is_nan());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// CSV with header `x,y,value[,vx,vy]`, rows in storage order, masked
    /// cells as `NaN`, numbers to 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.vectors.is_some() { "x,y,value,vx,vy\n" } else { "x,y,value\n" });
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                let _ = write!(
                    out,
                    "{},{},{}",
                    fmt_sig(to_f64(self.x(i)), 12),
                    fmt_sig(to_f64(self.y(j)), 12),
                    fmt_sig(to_f64(self.values[k]), 12)
                );
                if let Some(vs) = &self.vectors {
                    let _ = write!(
                        out,
                        ",{},{}",
                        fmt_sig(to_f64(vs[k][0]), 12),
                        fmt_sig(to_f64(vs[k][1]), 12)
                    );
                }
                out.push('\n');
            }
        }
        out
    }

    /// JSON document with window metadata; masked cells become `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let r = |v: T| crate::format::json_number(to_f64(v));
        let mut doc = serde_json::json!({
            "window": {
                "x_min": r(self.window.x_min),
                "x_max": r(self.window.x_max),
                "y_min": r(self.window.y_min),
                "y_max": r(self.window.y_max),
            },
            "nx": self.nx,
            "ny": self.ny,
            "layout": "row-major, y outer",
            "values": self.values.iter().map(|v| r(*v)).collect::<Vec<_>>(),
        });
        if let Some(vs) = &self.vectors {
            doc["vectors"] = vs.iter().map(|v| serde_json::json!([r(v[0]), r(v[1])])).collect();
        }
        doc
    }
}

/// Evaluates `f` at every node, in parallel over rows.
pub fn sample_grid<T, F>(window: Window<T>, res: Resolution, f: F) -> FieldGrid<T>
where
    T: Real,
    F: Fn(Complex<T>) -> GridSample<T> + Sync,
{
    let dx = (window.x_max - window.x_min) / from_usize::<T>(res.nx - 1);
    let dy = (window.y_max - window.y_min) / from_usize::<T>(res.ny - 1);
    let rows: Vec<Vec<GridSample<T>>> = (0..res.ny)
        .into_par_iter()
        .map(|j| {
            let y = window.y_min + from_usize::<T>(j) * dy;
            (0..res.nx)
                .map(|i| f(cplx(window.x_min + from_usize::<T>(i) * dx, y)))
                .collect()
        })
        .collect();
    let has_vectors = rows.iter().flatten().any(|s| matches!(s, GridSample::Vector(..)));
    let mut values = Vec::with_capacity(res.nx * res.ny);
    let mut vectors = Vec::with_capacity(if has_vectors { res.nx * res.ny } else { 0 });
    let nan = T::nan();
    for s in rows.into_iter().flatten() {
        match s {
            GridSample::Masked => {
                values.push(nan);
                vectors.push([nan, nan]);
            }
            GridSample::Scalar(v) => {
                values.push(v);
                vectors.push([nan, nan]);
            }
            GridSample::Vector(v, w) => {
                values.push(v);
                vectors.push(w);
            }
        }
    }
    FieldGrid {
        window,
        nx: res.nx,
        ny: res.ny,
        values,
        vectors: has_vectors.then_some(vectors),
    }
}

/// Relative stream function (and optionally relative velocity) of `flow`,
/// masking nodes within `1e-6 a` of a vortex.
pub fn sample_stream_grid<T: Real, F: FlowField<T>>(
    window: Window<T>,
    res: Resolution,
    flow: &CoMoving<'_, F, T>,
    with_velocity: bool,
) -> FieldGrid<T> {
    let mask = lit::<T>(MASK_TOL) * flow.field().length_scale();
    sample_grid(window, res, |z| {
        if flow.field().distance_to_nearest_vortex(z) <= mask {
            return GridSample::Masked;
        }
        let Ok(psi) = flow.stream(z) else { return GridSample::Masked };
        if !with_velocity {
            return GridSample::Scalar(psi);
        }
        match flow.velocity(z) {
            Ok(v) => GridSample::Vector(psi, [v.re, v.im]),
            Err(_) => GridSample::Masked,
        }
    })
}
