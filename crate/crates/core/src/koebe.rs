//! Koebe iteration onto circle domains.
//!
//! Each step maps the exterior of one image curve onto the exterior of a disk
//! by `φ(z) = a1/f(z) - b0`, where `f` is the Ahlfors function of that single
//! curve and `b0` makes `φ(z) = z + O(1/z)`. Composing steps in cyclic order
//! drives every boundary curve toward a circle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conformal::{ahlfors_solve, AhlforsFunction};
use crate::geometry::{ParamCurve, PlanarDomain};
use crate::numeric::{lstsq_real, Spectrum};
use crate::{Error, Result, C64};

/// Disjoint closed disks; the domain is the complement of their union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleDomain {
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
}

impl CircleDomain {
    pub fn new(centers: Vec<C64>, radii: Vec<f64>) -> Result<Self> {
        if centers.len() != radii.len() || centers.is_empty() {
            return Err(Error::Shape(format!("{} centers for {} radii", centers.len(), radii.len())));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::Invariant(format!("disk radius {r} is not positive")));
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                if (centers[i] - centers[j]).norm() <= radii[i] + radii[j] {
                    return Err(Error::Invariant(format!("disks {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { centers, radii })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn to_domain(&self) -> Result<PlanarDomain> {
        let curves = self
            .centers
            .iter()
            .zip(&self.radii)
            .map(|(c, r)| ParamCurve::circle(*c, *r))
            .collect::<Result<Vec<_>>>()?;
        PlanarDomain::new(curves)
    }

    /// True when `w` lies outside every closed disk.
    pub fn contains(&self, w: C64) -> bool {
        self.centers.iter().zip(&self.radii).all(|(c, r)| (w - c).norm() > *r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug)]
struct Step {
    f: AhlforsFunction,
    a1: C64,
    b0: C64,
}

impl Step {
    fn apply(&self, z: C64) -> Option<C64> {
        let v = self.f.eval_checked(z)?;
        Some(self.a1 / v - self.b0)
    }

    fn apply_with_derivative(&self, z: C64) -> Option<(C64, C64)> {
        let v = self.f.eval_checked(z)?;
        let dv = self.f.derivative(z)?;
        Some((self.a1 / v - self.b0, -self.a1 * dv / (v * v)))
    }
}

/// Normalized conformal map `g(z) = z + a1/z + …` of a domain onto a circle domain.
#[derive(Debug)]
pub struct KoebeMap {
    domain: PlanarDomain,
    steps: Vec<Step>,
    pub target: CircleDomain,
    /// Estimate of the constant Laurent term `a0` (zero for a normalized map).
    pub normalization_residual: f64,
    /// Largest circularity residual of the image curves.
    pub residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Least-squares circle through `points`: algebraic fit refined by Gauss–Newton.
pub fn fit_circle(points: &[C64]) -> Result<(C64, f64)> {
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => points[i].re,
        1 => points[i].im,
        _ => 1.0,
    });
    let b: Vec<f64> = points.iter().map(|p| -p.norm_sqr()).collect();
    let x = lstsq_real(a, &b)?;
    let mut c = C64::new(-x[0] / 2.0, -x[1] / 2.0);
    let mut r = (c.norm_sqr() - x[2]).max(0.0).sqrt();
    for _ in 0..20 {
        let jac = DMatrix::from_fn(n, 3, |i, j| {
            let d = points[i] - c;
            let len = d.norm();
            match j {
                0 => -d.re / len,
                1 => -d.im / len,
                _ => -1.0,
            }
        });
        let res: Vec<f64> = points.iter().map(|p| -((p - c).norm() - r)).collect();
        let step = lstsq_real(jac, &res)?;
        c += C64::new(step[0], step[1]);
        r += step[2];
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-15 * r {
            break;
        }
    }
    Ok((c, r))
}

/// Max relative radial deviation of `points` from their best-fit circle.
pub fn circularity(points: &[C64]) -> Result<(f64, C64, f64)> {
    let (c, r) = fit_circle(points)?;
    let dev = points.iter().map(|p| ((p - c).norm() - r).abs()).fold(0.0, f64::max) / r;
    Ok((dev, c, r))
}

fn curve_from_samples(samples: &[C64]) -> Result<ParamCurve> {
    let m = samples.len();
    let mut spec = samples.to_vec();
    Spectrum::new(m).forward(&mut spec);
    let k = m / 2 - 1;
    let coeffs = (-(k as i64)..=k as i64).map(|j| spec[j.rem_euclid(m as i64) as usize] / m as f64).collect();
    ParamCurve::from_coeffs(coeffs)
}

const START_NODES: usize = 64;

/// Koebe iteration until every image curve is a circle within `tol`.
pub fn koebe_uniformize(domain: &PlanarDomain, tol: f64, max_iter: usize) -> Result<(KoebeMap, CircleDomain)> {
    if !(tol >= 1e-12) {
        return Err(Error::InvalidSpec(format!("tolerance {tol} is below 1e-12")));
    }
    let samples = domain
        .curves()
        .iter()
        .map(|c| (8 * c.coeffs().len()).next_power_of_two().max(256))
        .max()
        .unwrap_or(256);
    let mut images: Vec<Vec<C64>> = domain.curves().iter().map(|c| c.sample(samples).0).collect();
    let mut steps: Vec<Step> = Vec::new();
    let mut warnings = Vec::new();
    let residuals = |images: &[Vec<C64>]| -> Result<Vec<f64>> { images.iter().map(|p| circularity(p).map(|r| r.0)).collect() };
    let mut res = residuals(&images)?;
    let m = images.len();
    let mut next = 0;
    while res.iter().cloned().fold(0.0, f64::max) > tol {
        if steps.len() >= max_iter {
            return Err(Error::NonConvergence {
                iterations: steps.len(),
                residual: res.iter().cloned().fold(0.0, f64::max),
            });
        }
        // Next component (cyclic order) that is not yet circular.
        let j = (0..m).map(|d| (next + d) % m).find(|&j| res[j] > tol).unwrap_or(next);
        next = (j + 1) % m;
        let single = PlanarDomain::new(vec![curve_from_samples(&images[j])?])?;
        let f = ahlfors_solve(&single, START_NODES)?;
        warnings.extend(f.warnings.iter().cloned());
        let (a1, a2) = f.expansion_at_infinity();
        let b0 = -f.reduction_point() - a2 / a1;
        let step = Step { f, a1, b0 };
        for (i, curve) in images.iter_mut().enumerate() {
            if i == j {
                // |f| = 1 on its own boundary, so that curve lands on a circle.
                let m = curve.len();
                for (k, z) in curve.iter_mut().enumerate() {
                    *z = C64::from_polar(step.a1.norm(), 2.0 * PI * k as f64 / m as f64) - step.b0;
                }
            } else {
                for z in curve.iter_mut() {
                    *z = step.apply(*z).ok_or_else(|| Error::Geometry("image curve crossed a mapped component".into()))?;
                }
            }
        }
        steps.push(step);
        res = residuals(&images)?;
    }
    let fits = images.iter().map(|p| circularity(p)).collect::<Result<Vec<_>>>()?;
    let target = CircleDomain::new(fits.iter().map(|f| f.1).collect(), fits.iter().map(|f| f.2).collect())?;
    for i in 0..m {
        for j in i + 1..m {
            let gap = (target.centers[i] - target.centers[j]).norm() - target.radii[i] - target.radii[j];
            let spacing = 2.0 * PI * target.radii[i].max(target.radii[j]) / samples as f64;
            if gap < 10.0 * spacing {
                warnings.push(format!("image disks {i} and {j} nearly touch (gap {gap:.3e})"));
            }
        }
    }
    let mut map = KoebeMap {
        domain: domain.clone(),
        iterations: steps.len(),
        steps,
        target: target.clone(),
        normalization_residual: 0.0,
        residual: res.iter().cloned().fold(0.0, f64::max),
        warnings,
    };
    map.normalization_residual = map.constant_term()?.norm();
    Ok((map, target))
}

impl KoebeMap {
    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    /// Mean of `g(z) - z` over a large circle, i.e. the constant Laurent coefficient.
    fn constant_term(&self) -> Result<C64> {
        let radius = 10.0 * (self.domain.diameter() + self.domain.curves()[0].point(0.0).norm());
        let n = 64;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let z = C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64);
            acc += self.forward(z)? - z;
        }
        Ok(acc / n as f64)
    }

    /// `g(z)` for `z` in the domain.
    pub fn forward(&self, z: C64) -> Result<C64> {
        self.forward_with_derivative(z).map(|(w, _)| w)
    }

    fn forward_with_derivative(&self, z: C64) -> Result<(C64, C64)> {
        let (mut w, mut d) = (z, C64::new(1.0, 0.0));
        for step in &self.steps {
            let (v, dv) = step
                .apply_with_derivative(w)
                .ok_or_else(|| Error::Domain(format!("point {z} is not in the domain")))?;
            w = v;
            d *= dv;
        }
        Ok((w, d))
    }

    /// `g⁻¹(w)` for `w` in the circle domain: Newton from the identity, with a
    /// continuation in from far away when the direct iteration fails.
    pub fn inverse(&self, w: C64) -> Result<C64> {
        if !self.target.contains(w) {
            return Err(Error::Domain(format!("point {w} is not in the circle domain")));
        }
        if self.steps.is_empty() {
            return Ok(w);
        }
        if let Some(z) = self.newton(w, w) {
            return Ok(z);
        }
        let scale = 10.0 * (self.domain.diameter() + w.norm());
        let dir = if w.norm() > 0.0 { w / w.norm() } else { C64::new(1.0, 0.0) };
        let far = dir * scale;
        let mut z = far;
        let stages = 64;
        for s in 1..=stages {
            let target = far + (w - far) * (s as f64 / stages as f64);
            z = self.newton(target, z).ok_or_else(|| Error::Evaluation(format!("inverse map diverged near {target}")))?;
        }
        Ok(z)
    }

    fn newton(&self, w: C64, seed: C64) -> Option<C64> {
        let mut z = seed;
        let scale = 1.0 + w.norm();
        for _ in 0..60 {
            let (g, dg) = self.forward_with_derivative(z).ok()?;
            let r = g - w;
            if r.norm() <= 1e-12 * scale {
                return Some(z);
            }
            let mut step = r / dg;
            // Halve the step until the iterate stays in the domain.
            let mut ok = false;
            for _ in 0..30 {
                if self.forward(z - step).is_ok() {
                    ok = true;
                    break;
                }
                step /= 2.0;
            }
            if !ok {
                return None;
            }
            z -= step;
        }
        let (g, _) = self.forward_with_derivative(z).ok()?;
        ((g - w).norm() <= 1e-11 * scale).then_some(z)
    }
}

/// Pointwise forward or inverse evaluation.
pub fn koebe_eval(map: &KoebeMap, points: &[C64], direction: Direction) -> Result<Vec<C64>> {
    points
        .iter()
        .map(|&p| match direction {
            Direction::Forward => map.forward(p),
            Direction::Inverse => map.inverse(p),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipses(a: f64) -> PlanarDomain {
        PlanarDomain::new(vec![
            ParamCurve::ellipse(C64::new(-3.0, 0.0), a, 1.0, 0.0).unwrap(),
            ParamCurve::ellipse(C64::new(3.0, 0.0), a, 1.0, 0.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn circle_fit_is_exact_on_circles() {
        let pts: Vec<C64> = (0..50).map(|k| C64::new(1.0, -2.0) + C64::from_polar(0.7, k as f64 * 0.3)).collect();
        let (dev, c, r) = circularity(&pts).unwrap();
        assert!(dev < 1e-14 && (c - C64::new(1.0, -2.0)).norm() < 1e-13 && (r - 0.7).abs() < 1e-13);
    }

    #[test]
    fn circle_domain_is_fixed() {
        let d = PlanarDomain::new(vec![
            ParamCurve::circle(C64::new(-2.0, 0.0), 1.0).unwrap(),
            ParamCurve::circle(C64::new(2.0, 0.5), 0.5).unwrap(),
        ])
        .unwrap();
        let (map, target) = koebe_uniformize(&d, 1e-12, 10).unwrap();
        assert_eq!(map.iterations, 0);
        assert!(map.residual <= 1e-14);
        assert!((target.radii[1] - 0.5).abs() < 1e-14);
        let z = C64::new(0.3, 1.7);
        assert_eq!(map.forward(z).unwrap(), z);
    }

    #[test]
    fn two_ellipses_become_circles() {
        let d = ellipses(1.3);
        let (map, target) = koebe_uniformize(&d, 1e-8, 50).unwrap();
        assert!(map.residual <= 1e-8);
        assert!(map.iterations <= 50);
        assert!(map.normalization_residual < 1e-8, "{}", map.normalization_residual);
        assert!((target.centers[0] + target.centers[1]).norm() < 1e-8);
        for z in [C64::new(0.0, 0.4), C64::new(-3.0, 1.5), C64::new(5.0, -2.0)] {
            let w = map.forward(z).unwrap();
            assert!((map.inverse(w).unwrap() - z).norm() < 1e-8);
            assert!((map.forward(z.conj()).unwrap() - w.conj()).norm() < 1e-8);
        }
        assert!(matches!(map.forward(C64::new(-3.0, 0.0)), Err(Error::Domain(_))));
    }
}
