//! Boundary curves, planar domains, scenes and offset cycles.

mod curve;
mod scene;
mod tube;
mod wiggle;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use curve::{Orientation, ParamCurve};
pub use scene::{parse_scene, read_scene, Scene};
pub use tube::{tube_boundary, LineField};
pub use wiggle::{hook_path, wiggle_path, wiggle_scene, WiggleVariant, WIGGLE_NODES};

pub(crate) use curve::segment_distance;

use crate::numeric::Spectrum;
use crate::{Error, Result, C64};

/// Serialized description of one boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64, angle: f64 },
    Trig { coeffs: Vec<[f64; 2]> },
    Polyline { points: Vec<[f64; 2]>, smoothing: f64 },
}

fn pt(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl CurveSpec {
    pub fn circle(center: C64, radius: f64) -> Self {
        CurveSpec::Circle { center: [center.re, center.im], radius }
    }

    pub fn ellipse(center: C64, a: f64, b: f64, angle: f64) -> Self {
        CurveSpec::Ellipse { center: [center.re, center.im], a, b, angle }
    }

    pub fn trig(curve: &ParamCurve) -> Self {
        CurveSpec::Trig { coeffs: curve.coeffs().iter().map(|c| [c.re, c.im]).collect() }
    }

    pub fn polyline(points: &[C64], smoothing: f64) -> Self {
        CurveSpec::Polyline { points: points.iter().map(|z| [z.re, z.im]).collect(), smoothing }
    }
}

/// Builds the curve described by `spec`, counterclockwise.
///
/// A polyline is read as an open path; the curve is the boundary of its
/// smooth fattening at distance `0.8·smoothing`, so every boundary point lies
/// within `smoothing` of the path.
pub fn make_curve(spec: &CurveSpec) -> Result<ParamCurve> {
    let curve = match spec {
        CurveSpec::Circle { center, radius } => ParamCurve::circle(pt(*center), *radius)?,
        CurveSpec::Ellipse { center, a, b, angle } => ParamCurve::ellipse(pt(*center), *a, *b, *angle)?,
        CurveSpec::Trig { coeffs } => ParamCurve::from_coeffs(coeffs.iter().copied().map(pt).collect())?,
        CurveSpec::Polyline { points, smoothing } => {
            if points.len() < 2 {
                return Err(Error::InvalidSpec("polyline needs at least two points".into()));
            }
            if !(*smoothing > 0.0) {
                return Err(Error::InvalidSpec(format!("smoothing radius must be positive, got {smoothing}")));
            }
            let path: Vec<C64> = points.iter().copied().map(pt).collect();
            tube_boundary(&[path], 0.8 * smoothing, 0.4 * smoothing, None)?
        }
    };
    Ok(curve.oriented(Orientation::Positive))
}

/// Complement of finitely many disjoint closed Jordan regions, containing `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDomain {
    curves: Vec<ParamCurve>,
}

impl PlanarDomain {
    /// Curves are stored counterclockwise. Fails if two curves meet or one encloses another.
    pub fn new(curves: Vec<ParamCurve>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Invariant("a domain needs at least one boundary curve".into()));
        }
        let curves: Vec<ParamCurve> = curves.into_iter().map(|c| c.oriented(Orientation::Positive)).collect();
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let (a, b) = (&curves[i], &curves[j]);
                let scale = a.diameter().max(b.diameter());
                let (gap, _) = a.gap_to(b);
                if gap <= 1e-9 * scale {
                    return Err(Error::Invariant(format!("boundary curves {i} and {j} intersect")));
                }
                if a.encloses(b.polygon()[0]) || b.encloses(a.polygon()[0]) {
                    return Err(Error::Invariant(format!("boundary curves {i} and {j} are nested")));
                }
            }
        }
        Ok(Self { curves })
    }

    pub fn curves(&self) -> &[ParamCurve] {
        &self.curves
    }

    /// Number of boundary components.
    pub fn connectivity(&self) -> usize {
        self.curves.len()
    }

    /// True when `z` lies in the open domain (outside every closed region).
    pub fn contains(&self, z: C64) -> bool {
        self.curves.iter().all(|c| !c.encloses(z) && c.distance_to(z) > 0.0)
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<C64> = self.curves.iter().flat_map(|c| c.polygon().iter().copied()).collect();
        let (lo, hi) = pts.iter().fold(
            (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
            |(lo, hi), z| (C64::new(lo.re.min(z.re), lo.im.min(z.im)), C64::new(hi.re.max(z.re), hi.im.max(z.im))),
        );
        (hi - lo).norm()
    }

    /// Smallest distance between two different boundary curves (`∞` for one curve).
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.curves.len() {
            for j in i + 1..self.curves.len() {
                best = best.min(self.curves[i].gap_to(&self.curves[j]).0);
            }
        }
        best
    }

    /// Distance from `z` to the nearest boundary point.
    pub fn distance_to_boundary(&self, z: C64) -> f64 {
        self.curves.iter().map(|c| c.distance_to(z)).fold(f64::INFINITY, f64::min)
    }

    /// True when the domain is mapped to itself by `z ↦ z̄` (checked on samples).
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        let scale = self.diameter();
        self.curves.iter().all(|c| {
            let step = (c.polygon().len() / 64).max(1);
            c.polygon().iter().step_by(step).all(|z| self.distance_to_boundary(z.conj()) <= tol * scale)
        })
    }
}

/// Finite union of disjoint closed curves surrounding a compact set.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub curves: Vec<ParamCurve>,
    pub total_length: f64,
}

impl Cycle {
    pub fn new(curves: Vec<ParamCurve>) -> Self {
        let total_length = curves.iter().map(ParamCurve::length).sum();
        Self { curves, total_length }
    }
}

/// Outward normal offset `z(t) - iε z'(t)/|z'(t)|` of a counterclockwise curve.
pub fn offset_curve(curve: &ParamCurve, eps: f64) -> Result<ParamCurve> {
    let curve = curve.oriented(Orientation::Positive);
    let scale = curve.diameter();
    let mut m = (4 * curve.coeffs().len()).next_power_of_two().max(64);
    loop {
        let (z, dz, _) = curve.sample(m);
        let mut w: Vec<C64> = z.iter().zip(&dz).map(|(z, d)| z - C64::new(0.0, eps) * d / d.norm()).collect();
        Spectrum::new(m).forward(&mut w);
        let half = m / 2;
        let tail = (half / 2..half).map(|k| w[k].norm().max(w[m - k].norm())).fold(0.0, f64::max) / m as f64;
        if tail < 1e-14 * scale || m >= 1 << 16 {
            let k = half - 1;
            let coeffs: Vec<C64> = (-(k as i64)..=k as i64).map(|j| w[j.rem_euclid(m as i64) as usize] / m as f64).collect();
            let out = ParamCurve::from_coeffs_unchecked(coeffs)?;
            out.check_invariants()
                .map_err(|e| Error::Geometry(format!("offset by {eps} folds over itself: {e}")))?;
            return Ok(trim(out, scale));
        }
        m *= 2;
    }
}

/// Drops negligible high modes.
fn trim(curve: ParamCurve, scale: f64) -> ParamCurve {
    let c = curve.coeffs();
    let k = curve.degree();
    let mut keep = 1;
    for j in 1..=k {
        if c[k + j].norm() > 1e-16 * scale || c[k - j].norm() > 1e-16 * scale {
            keep = j;
        }
    }
    if keep == k {
        return curve;
    }
    ParamCurve::from_coeffs_unchecked(c[k - keep..=k + keep].to_vec()).unwrap_or(curve)
}

/// Outward `ε`-offset of every boundary curve of `domain`.
pub fn offset_cycle(domain: &PlanarDomain, eps: f64) -> Result<Cycle> {
    if !(eps > 0.0) {
        return Err(Error::InvalidSpec(format!("offset must be positive, got {eps}")));
    }
    let curves = domain.curves().iter().map(|c| offset_curve(c, eps)).collect::<Result<Vec<_>>>()?;
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            if curves[i].gap_to(&curves[j]).0 <= 0.0 || curves[i].encloses(curves[j].polygon()[0]) {
                return Err(Error::Geometry(format!("offset curves {i} and {j} collide at ε = {eps}")));
            }
        }
    }
    Ok(Cycle::new(curves))
}

/// Distance from `z` to a polyline.
pub fn polyline_distance(z: C64, path: &[C64]) -> f64 {
    match path {
        [] => f64::INFINITY,
        [p] => (z - p).norm(),
        _ => path.windows(2).map(|w| curve::segment_distance(z, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Length of the offset of a simple counterclockwise curve (for `ε` below the
/// smallest concave curvature radius).
pub fn offset_length(length: f64, eps: f64) -> f64 {
    length + 2.0 * PI * eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_offsets() {
        let d = PlanarDomain::new(vec![ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap()]).unwrap();
        let c = offset_cycle(&d, 0.1).unwrap();
        assert!((c.total_length - 2.0 * PI * 1.1).abs() < 1e-10);
        assert!((c.curves[0].point(0.3).norm() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn ellipse_offset_length_formula() {
        let e = ParamCurve::ellipse(C64::new(0.5, 0.0), 2.0, 1.0, 0.3).unwrap();
        let o = offset_curve(&e, 0.2).unwrap();
        assert!((o.length() - offset_length(e.length(), 0.2)).abs() < 1e-9);
    }

    #[test]
    fn overlapping_and_nested_rejected() {
        let a = ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap();
        let b = ParamCurve::circle(C64::new(1.5, 0.0), 1.0).unwrap();
        let c = ParamCurve::circle(C64::new(0.0, 0.0), 0.5).unwrap();
        assert!(matches!(PlanarDomain::new(vec![a.clone(), b]), Err(Error::Invariant(_))));
        assert!(matches!(PlanarDomain::new(vec![a, c]), Err(Error::Invariant(_))));
    }

    #[test]
    fn polyline_stays_within_smoothing_radius() {
        let pts = [C64::new(0.0, -1.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
        let r = 0.1;
        let c = make_curve(&CurveSpec::polyline(&pts, r)).unwrap();
        for z in c.polygon() {
            let d = segment_distance(*z, pts[0], pts[1]).min(segment_distance(*z, pts[1], pts[2]));
            assert!(d <= r, "{d}");
        }
    }

    #[test]
    fn degenerate_specs() {
        assert!(matches!(make_curve(&CurveSpec::circle(C64::new(0.0, 0.0), 0.0)), Err(Error::InvalidSpec(_))));
        let pts = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(make_curve(&CurveSpec::polyline(&pts, 0.1)), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn symmetry_detection() {
        let d = PlanarDomain::new(vec![
            ParamCurve::circle(C64::new(-3.0, 0.0), 1.0).unwrap(),
            ParamCurve::circle(C64::new(3.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        assert!(d.is_real_symmetric(1e-12));
        let e = PlanarDomain::new(vec![ParamCurve::circle(C64::new(0.0, 0.5), 1.0).unwrap()]).unwrap();
        assert!(!e.is_real_symmetric(1e-6));
    }
}
