//! Small numerical kernels shared by the solvers.

mod extrapolate;
mod fft;
mod linalg;
mod sequence;

pub use extrapolate::{aitken_limit, least_squares_line, richardson};
pub use fft::{spectral_derivative, trig_evaluate, trig_interpolate, trig_interpolate_transpose, Spectrum};
pub use linalg::{gmres, lstsq_real, solve_dense, GmresReport};
pub use sequence::{halton, halton_disk};
