//! Numerical analytic capacity for finitely connected plane domains.
//!
//! The crate computes Ahlfors functions and analytic capacity through a
//! Szegő-kernel boundary integral equation, lower bounds for the Cauchy
//! capacity through a discretized linear program, Koebe circle-domain maps,
//! horizontal slit maps of symmetric two-disk domains, and a set of scripted
//! sweeps over the compact sets built from the graph of `x sin(1/x)`.
//!
//! Layout:
//! - [`geometry`]: boundary curves, domains, scenes, tube fattenings, offset cycles.
//! - [`conformal`]: boundary discretization, Ahlfors function, `γ`, boundary traces.
//! - [`koebe`]: circle-domain uniformization by Koebe iteration.
//! - [`slit`]: doubly connected horizontal slit maps and the quarter-length rule.
//! - [`measures`]: Cauchy transforms, `γ_c`/`γ₊` linear programs, Painlevé and jump measures.
//! - [`experiments`]: convergence sweeps emitting tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod koebe;
pub mod measures;
pub mod numeric;
pub mod slit;

pub use num_complex::Complex64 as C64;

pub use conformal::{ahlfors_solve, boundary_traces, discretize, gamma, AhlforsFunction, BoundaryDiscretization, CapacityEstimate, Method, Side};
pub use error::{Error, Result};
pub use geometry::{CurveSpec, Cycle, Orientation, ParamCurve, PlanarDomain, Scene, WiggleVariant};
pub use koebe::{koebe_eval, koebe_uniformize, CircleDomain, Direction, KoebeMap};
pub use measures::{
    cauchy_eval, gamma_c_lower, gamma_plus_lower, jump_measure, mass_at_infinity, painleve_length_upper, painleve_measure, CauchyField,
    DensityMeasure, LpBound, LpConfig,
};
pub use slit::{gamma_from_slits, slit_uniformize, Interval, SlitDomain, SlitMap};
