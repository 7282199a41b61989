//! Orbit metrics and pressure estimators for symbolic and circle dynamics.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! * [`systems`]: shifts, subshifts of finite type, doubling and rotations,
//!   with base metrics and potentials;
//! * [`orbit_metrics`]: Bowen, mean, max-mean and Feldman-Katok orbit
//!   metrics, their `q`-step variants, and the edit distance on words;
//! * [`measures`]: seeded empirical measures, dynamical ball masses and the
//!   Brin-Katok local entropy estimate;
//! * [`estimators`]: weighted covers of measures and spaces by dynamical
//!   balls, spanning-set pressure, exact symbolic pressure, and convergence
//!   tables over `(n, eps, q)` grids.
//!
//! IO, configuration files and the command-line front end live in the
//! `orbit-pressure` crate.

#![no_std]

extern crate alloc;

mod bitset;
mod error;
mod linalg;

pub mod estimators;
pub mod measures;
pub mod orbit_metrics;
pub mod systems;

pub use error::{Error, Result};
pub use estimators::{
    convergence_table, covering_weight, exact_shift_pressure, inf_over_q, measure_pressure_estimate,
    spanning_pressure, topological_cover_weight, CoverMethod, CoverSolution, PressureEstimate, Variant,
};
pub use measures::{ball_mass, brin_katok_estimate, sample_measure, EmpiricalMeasure, MeasureSpec};
pub use orbit_metrics::{
    bowen_distance, edit_distance, fk_distance, match_value, maxmean_distance, mean_distance, orbit_distance,
    Family, MatchParams, MatchResult, MetricKind,
};
pub use systems::{CircleFn, CirclePoint, DynSystem, Point, Potential, SystemKind, TransitionMatrix};
