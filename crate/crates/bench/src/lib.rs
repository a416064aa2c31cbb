//! Fixture scenes shared by the benchmarks.

use ahlfors_core::{ParamCurve, PlanarDomain, C64};

/// Two unit disks centered at `±c`.
pub fn two_disks(c: f64) -> PlanarDomain {
    PlanarDomain::new(vec![
        ParamCurve::circle(C64::new(-c, 0.0), 1.0).expect("valid circle"),
        ParamCurve::circle(C64::new(c, 0.0), 1.0).expect("valid circle"),
    ])
    .expect("disjoint disks")
}

/// Two ellipses with semi-axes `1.2` and `1` centered at `±2`.
pub fn two_ellipses() -> PlanarDomain {
    PlanarDomain::new(vec![
        ParamCurve::ellipse(C64::new(-2.0, 0.0), 1.2, 1.0, 0.0).expect("valid ellipse"),
        ParamCurve::ellipse(C64::new(2.0, 0.0), 1.2, 1.0, 0.0).expect("valid ellipse"),
    ])
    .expect("disjoint ellipses")
}
