//! Numerical laboratory for arrays of staggered (reverse) von Kármán vortex
//! streets.
//!
//! * [`lattice`] builds street parameters and finite truncated arrays.
//! * [`field`] evaluates potentials, velocities and stream functions.
//! * [`equilibrium`] computes the common translation speed of the streets.
//! * [`topology`] finds co-moving stagnation points, traces separatrices and
//!   classifies the streamline pattern by the number of linked streets.
//! * [`bifurcation`] locates the critical street separations and fits their
//!   geometric scaling law.
//! * [`dynamics`] integrates finite arrays in time.
//!
//! Everything numerical is generic over [`Real`]; the `*64` aliases below fix
//! the scalar to `f64`, which every documented tolerance assumes.

// `!(x < y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod dynamics;
pub mod equilibrium;
pub mod field;
pub mod format;
pub mod lattice;
pub mod ode;
pub mod roots;
pub mod scalar;
pub mod topology;
pub mod trig;

pub use scalar::{lit, Real};

pub use bifurcation::{BifurcationSequence, ScalingFit};
pub use dynamics::{ConservedQuantities, SimState};
pub use equilibrium::EquilibriumSpeed;
pub use field::FieldGrid;
pub use lattice::{FiniteArraySpec, StreetParams, VortexLabel, VortexSet};
pub use topology::{SeparatrixPath, StagnationPoint, TopologyClass};
pub use topology::levels::SaddleLevels;

pub type Complex64 = num_complex::Complex<f64>;
pub type StreetParams64 = StreetParams<f64>;
pub type VortexSet64 = VortexSet<f64>;
pub type FieldGrid64 = FieldGrid<f64>;
pub type EquilibriumSpeed64 = EquilibriumSpeed<f64>;
pub type StagnationPoint64 = StagnationPoint<f64>;
pub type SeparatrixPath64 = SeparatrixPath<f64>;
pub type BifurcationSequence64 = BifurcationSequence<f64>;
pub type ScalingFit64 = ScalingFit<f64>;
pub type SimState64 = SimState<f64>;
pub type ConservedQuantities64 = ConservedQuantities<f64>;
pub type SaddleLevels64 = SaddleLevels<f64>;
