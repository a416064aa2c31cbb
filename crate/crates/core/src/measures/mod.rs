//! Cauchy transforms of boundary measures, Cauchy-capacity lower bounds by
//! linear programming, and the Painlevé and jump measures built from
//! Ahlfors-function boundary data.

mod density;

pub use density::{cauchy_eval, mass_at_infinity, CauchyField, CurveSamples, DensityMeasure};
mod limits;
mod lp;

pub use lp::{gamma_c_lower, gamma_plus_lower, solve_capacity_lp, LpBound, LpConfig, DEFAULT_ANGLES, DEFAULT_COLLOC};
mod painleve;
pub use painleve::{jump_measure, painleve_length_upper, painleve_measure};
