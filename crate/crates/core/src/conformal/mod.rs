//! Ahlfors function and analytic capacity through the Szegő kernel of a
//! Möbius-reduced bounded domain.

mod ahlfors;
mod discretize;
mod szego;

use serde::{Deserialize, Serialize};

pub use ahlfors::{ahlfors_fixed, ahlfors_solve, reduction_point, AhlforsFunction, DOUBLING_TOL, MAX_TOTAL_NODES};
pub use discretize::{discretize, BoundaryDiscretization, CurveNodes, Warp, MIN_NODES};
pub use szego::{DENSE_LIMIT, STORED_LIMIT};

use crate::geometry::{ParamCurve, PlanarDomain};
use crate::{Error, Result, C64};

/// How a capacity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Szego,
    Slit,
    GammaCLp,
    GammaPlusLp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Szego => "szego",
            Method::Slit => "slit",
            Method::GammaCLp => "gamma_c_lp",
            Method::GammaPlusLp => "gamma_plus_lp",
        })
    }
}

/// A capacity value with its provenance. `certification` is the factor the
/// raw value was divided by to make it admissible (1 when none was needed,
/// reported as its reciprocal so it lies in `(0, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub method: Method,
    pub nodes: usize,
    pub certification: f64,
}

/// Analytic capacity by the Szegő route, `n` starting nodes per curve.
pub fn gamma(domain: &PlanarDomain, n: usize) -> Result<CapacityEstimate> {
    let f = ahlfors_solve(domain, n)?;
    Ok(CapacityEstimate { value: f.gamma(), method: Method::Szego, nodes: f.total_nodes(), certification: 1.0 })
}

/// Side of an oriented curve: `Plus` is the left (for a counterclockwise
/// curve, the inside), `Minus` the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// Number of samples used by [`boundary_traces`] on `curve`.
pub fn trace_samples(curve: &ParamCurve) -> usize {
    (2 * curve.coeffs().len()).next_power_of_two().max(256)
}

/// `(sample point, f(sample + δ·normal))` along `curve`, the normal pointing to `side`.
pub fn boundary_traces(f: &AhlforsFunction, curve: &ParamCurve, side: Side, delta: f64) -> Result<Vec<(C64, C64)>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidSpec(format!("trace offset must be positive, got {delta}")));
    }
    let (z, dz, _) = curve.sample(trace_samples(curve));
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    z.iter()
        .zip(&dz)
        .map(|(z, d)| {
            let p = z + C64::new(0.0, sign * delta) * d / d.norm();
            f.eval_checked(p)
                .map(|v| (*z, v))
                .ok_or_else(|| Error::Geometry(format!("offset point {p} lies outside the domain")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk(c: C64, r: f64) -> ParamCurve {
        ParamCurve::circle(c, r).unwrap()
    }

    #[test]
    fn unit_disk_is_exact() {
        let d = PlanarDomain::new(vec![disk(C64::new(0.0, 0.0), 1.0)]).unwrap();
        let f = ahlfors_solve(&d, 64).unwrap();
        assert!((f.gamma() - 1.0).abs() < 1e-10, "{}", f.gamma());
        for t in [0.0, 1.0, 2.5] {
            let z = C64::from_polar(2.0, t);
            assert!((f.eval(z) - 1.0 / z).norm() < 1e-8);
            assert!((f.derivative(z).unwrap() + 1.0 / (z * z)).norm() < 1e-8);
        }
        assert_eq!(f.eval(C64::new(0.2, 0.1)), C64::new(0.0, 0.0));
    }

    #[test]
    fn scaled_and_translated_disks() {
        let d = PlanarDomain::new(vec![disk(C64::new(5.0, 5.0), 0.5)]).unwrap();
        let g = gamma(&d, 32).unwrap();
        assert!((g.value - 0.5).abs() < 1e-10);
        assert_eq!(g.method, Method::Szego);
    }

    #[test]
    fn ellipse_capacity_is_mean_semi_axis() {
        let e = ParamCurve::ellipse(C64::new(0.3, -0.2), 2.0, 1.0, 0.4).unwrap();
        let d = PlanarDomain::new(vec![e]).unwrap();
        let g = gamma(&d, 64).unwrap();
        assert!((g.value - 1.5).abs() < 1e-6, "{}", g.value);
    }

    #[test]
    fn two_disks_are_symmetric_and_bounded() {
        let d = PlanarDomain::new(vec![disk(C64::new(-2.0, 0.0), 1.0), disk(C64::new(2.0, 0.0), 1.0)]).unwrap();
        let f = ahlfors_solve(&d, 64).unwrap();
        assert!(f.gamma() > 1.0 && f.gamma() < 2.0);
        for z in [C64::new(0.0, 0.5), C64::new(3.5, 1.0), C64::new(-0.5, -2.0)] {
            let a = f.eval(z.conj());
            let b = f.eval(z).conj();
            assert!((a - b).norm() < 1e-8);
        }
        let traces = boundary_traces(&f, &d.curves()[0], Side::Minus, 1e-3).unwrap();
        assert!(traces.iter().all(|(_, v)| v.norm() <= 1.0 + 1e-8));
        assert!(traces.iter().any(|(_, v)| v.norm() > 0.99));
        assert!(matches!(boundary_traces(&f, &d.curves()[0], Side::Plus, 1e-3), Err(Error::Geometry(_))));
    }

    #[test]
    fn disk_traces_match_inverse() {
        let d = PlanarDomain::new(vec![disk(C64::new(0.0, 0.0), 1.0)]).unwrap();
        let f = ahlfors_solve(&d, 64).unwrap();
        for (_, v) in boundary_traces(&f, &d.curves()[0], Side::Minus, 0.01).unwrap() {
            assert!((v.norm() - 1.0 / 1.01).abs() < 1e-10);
        }
        let _ = PI;
    }
}
