//! Parameter sweeps that reproduce the constructions: closing gaps between
//! disks, fattened truncations of the oscillating graph, boundary-jump
//! growth, small-disk domains with small capacity, and Koebe-map convergence.
//! Each returns a [`SweepResult`] table; a failing row is recorded and the sweep goes on.

mod convergence;
mod counterexample;
mod table;
mod tangency;
mod wiggle_sets;

pub use convergence::{run_koebe_convergence, KoebeFamily};
pub use counterexample::{covering_radius, run_counterexample, MAX_COUNTEREXAMPLE_K};
pub use table::{csv_quote, format_float, SweepResult, SweepRow};
pub use tangency::{run_tangency_sweep, tangent_pair};
pub use wiggle_sets::{extrapolate_to_zero, lp_support_nodes, run_jump_growth, run_paper_e, MAX_WIGGLE_K};

use crate::{Error, Result};

/// Starting node count per curve for every Szegő solve in the sweeps.
pub const SZEGO_NODES: usize = 64;
pub const SLIT_TOL: f64 = 1e-9;

pub const DEFAULT_GAPS: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];
pub const DEFAULT_EPS_LADDER: [f64; 3] = [0.04, 0.02, 0.01];
pub const DEFAULT_DELTA_LADDER: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
pub const DEFAULT_KOEBE_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn check_ladder(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSpec(format!("empty {name} ladder")));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidSpec(format!("{name} values must be positive")));
    }
    if values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidSpec(format!("{name} ladder must be strictly decreasing")));
    }
    Ok(())
}
