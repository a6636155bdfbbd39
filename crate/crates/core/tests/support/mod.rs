//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use vlab_core::lattice::StreetParams;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `Σ_{m=-M..M} f(m)` plus the two tails `Σ_{|m|>M} f(m)`.
///
/// The tails are the integral `∫_{M+½}^∞ g` of `g(x) = f(x) + f(-x)`,
/// evaluated with the substitution `x = X/s` on `s ∈ (0, 1]`, plus the
/// midpoint-rule correction `g'(X)/24`.
fn column_sum<T>(m_max: i64, f: impl Fn(f64) -> T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let mut acc = f(0.0);
    for m in 1..=m_max {
        acc = acc + f(m as f64) + f(-(m as f64));
    }
    let g = |x: f64| f(x) + f(-x);
    let big_x = m_max as f64 + 0.5;
    let mut tail = g(big_x) * 0.0;
    for (node, weight) in gauss_legendre(48) {
        let s = 0.5 * (node + 1.0);
        tail = tail + g(big_x / s) * (0.5 * weight * big_x / (s * s));
    }
    let step = 0.5;
    let slope = (g(big_x + step) - g(big_x - step)) * (1.0 / (2.0 * step));
    acc + tail + slope * (1.0 / 24.0)
}

/// Conjugate velocity of the stack by explicit superposition, `2 m_max + 1`
/// vortex pairs per street.
pub fn brute_velocity(p: &StreetParams<f64>, z: C, m_max: i64) -> C {
    let c = C::new(0.5 * p.a, p.b);
    let mut acc = C::new(0.0, 0.0);
    for n in -(p.big_n as i64)..=p.big_n as i64 {
        let base = C::new(0.0, n as f64 * p.h);
        // -Γ at m a + inh, +Γ at m a + c + inh
        let col = |x: f64| {
            let w = z - base - C::new(x * p.a, 0.0);
            (w - c).inv() - w.inv()
        };
        acc += column_sum(m_max, col);
    }
    acc * (p.gamma / (2.0 * PI * C::i()))
}

/// Stream function of the stack by explicit superposition.
pub fn brute_stream(p: &StreetParams<f64>, z: C, m_max: i64) -> f64 {
    let c = C::new(0.5 * p.a, p.b);
    let mut acc = 0.0;
    for n in -(p.big_n as i64)..=p.big_n as i64 {
        let base = C::new(0.0, n as f64 * p.h);
        // ln|w - c| - ln|w| = ½ log1p(|1 - c/w|² - 1)
        let col = |x: f64| {
            let w = z - base - C::new(x * p.a, 0.0);
            let r = c / w;
            0.5 * (r.norm_sqr() - 2.0 * r.re).ln_1p()
        };
        acc += column_sum(m_max, col);
    }
    -p.gamma / (2.0 * PI) * acc
}

/// Plain partial sum without tail correction, for comparison.
pub fn raw_stream(p: &StreetParams<f64>, z: C, m_max: i64) -> f64 {
    let c = C::new(0.5 * p.a, p.b);
    let mut acc = 0.0;
    for n in -(p.big_n as i64)..=p.big_n as i64 {
        let base = C::new(0.0, n as f64 * p.h);
        for m in -m_max..=m_max {
            let w = z - base - C::new(m as f64 * p.a, 0.0);
            acc += (w - c).norm().ln() - w.norm().ln();
        }
    }
    -p.gamma / (2.0 * PI) * acc
}

/// Deterministic probe points in `[-a, a] × [-h, h]`, at least `clearance`
/// from every vortex.
pub fn probes(p: &StreetParams<f64>, count: usize, clearance: f64, seed: u64) -> Vec<C> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = C::new(rng.random_range(-p.a..p.a), rng.random_range(-p.h..p.h));
        if p.distance_to_nearest_vortex(z) >= clearance * p.a {
            out.push(z);
        }
    }
    out
}

pub fn reference_params(h: f64, big_n: usize) -> StreetParams<f64> {
    StreetParams::unit(0.2805, h, big_n).unwrap()
}
