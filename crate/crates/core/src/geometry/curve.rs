use std::collections::HashMap;
use std::f64::consts::PI;

use crate::numeric::Spectrum;
use crate::{Error, Result, C64};

/// Orientation of a closed curve relative to the bounded region it encloses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

/// Closed curve `z(t) = Σ_{k=-K}^{K} c_k e^{ikt}`, `t ∈ [0, 2π)`.
#[derive(Debug, Clone)]
pub struct ParamCurve {
    coeffs: Vec<C64>,
    orientation: Orientation,
    polygon: Vec<C64>,
}

impl PartialEq for ParamCurve {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl ParamCurve {
    /// Builds a curve from coefficients of modes `-K..=K` (odd length) and checks
    /// injectivity and a nondegenerate derivative.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        let curve = Self::from_coeffs_unchecked(coeffs)?;
        curve.check_invariants()?;
        Ok(curve)
    }

    pub(crate) fn from_coeffs_unchecked(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) || coeffs.len() < 3 {
            return Err(Error::InvalidSpec(format!(
                "trigonometric curve needs an odd number (>= 3) of coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidSpec("non-finite coefficient".into()));
        }
        let area: f64 = {
            let k = (coeffs.len() / 2) as i64;
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64 - k) as f64 * c.norm_sqr())
                .sum::<f64>()
                * PI
        };
        let orientation = if area >= 0.0 { Orientation::Positive } else { Orientation::Negative };
        let mut curve = Self { coeffs, orientation, polygon: Vec::new() };
        let n = curve.check_samples();
        curve.polygon = curve.sample(n).0;
        Ok(curve)
    }

    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSpec(format!("circle radius must be positive, got {radius}")));
        }
        Self::from_coeffs(vec![C64::new(0.0, 0.0), center, C64::new(radius, 0.0)])
    }

    /// `z(t) = c + e^{iφ}(a cos t + i b sin t)`.
    pub fn ellipse(center: C64, a: f64, b: f64, angle: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidSpec(format!("ellipse semi-axes must be positive, got {a}, {b}")));
        }
        let rot = C64::from_polar(1.0, angle);
        Self::from_coeffs(vec![rot * (a - b) / 2.0, center, rot * (a + b) / 2.0])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Highest Fourier mode `K`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        let mut polygon = self.polygon.clone();
        polygon[1..].reverse();
        Self {
            coeffs,
            orientation: match self.orientation {
                Orientation::Positive => Orientation::Negative,
                Orientation::Negative => Orientation::Positive,
            },
            polygon,
        }
    }

    pub fn oriented(&self, orientation: Orientation) -> Self {
        if self.orientation == orientation {
            self.clone()
        } else {
            self.reversed()
        }
    }

    /// Signed enclosed area (positive for counterclockwise curves).
    pub fn signed_area(&self) -> f64 {
        let k = self.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - k) as f64 * c.norm_sqr())
            .sum::<f64>()
            * PI
    }

    /// Value and first two derivatives at arbitrary parameters.
    pub fn eval_at(&self, t: f64) -> (C64, C64, C64) {
        let k = self.degree() as i64;
        let mut z = C64::new(0.0, 0.0);
        let mut dz = z;
        let mut d2z = z;
        let step = C64::from_polar(1.0, t);
        let mut e = C64::from_polar(1.0, -(k as f64) * t);
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = (i as i64 - k) as f64;
            let term = c * e;
            z += term;
            dz += term * C64::new(0.0, m);
            d2z -= term * (m * m);
            e *= step;
        }
        (z, dz, d2z)
    }

    pub fn point(&self, t: f64) -> C64 {
        self.eval_at(t).0
    }

    /// Values and first two derivatives at `t_j = 2πj/n`, by folding modes mod `n`.
    pub fn sample(&self, n: usize) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let k = self.degree() as i64;
        let plan = Spectrum::new(n);
        let mut bins = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = i as i64 - k;
            let b = m.rem_euclid(n as i64) as usize;
            let mf = m as f64;
            bins[0][b] += c;
            bins[1][b] += c * C64::new(0.0, mf);
            bins[2][b] -= c * (mf * mf);
        }
        let [mut z, mut dz, mut d2z] = bins;
        plan.inverse(&mut z);
        plan.inverse(&mut dz);
        plan.inverse(&mut d2z);
        (z, dz, d2z)
    }

    /// Sample count used by the invariant checks: 8× the coefficient count, at least 64.
    pub fn check_samples(&self) -> usize {
        (8 * self.coeffs.len()).max(64)
    }

    /// Arclength by the periodic trapezoid rule (spectrally accurate).
    pub fn length(&self) -> f64 {
        let n = (4 * self.coeffs.len()).max(256);
        let (_, dz, _) = self.sample(n);
        dz.iter().map(|d| d.norm()).sum::<f64>() * 2.0 * PI / n as f64
    }

    /// Diagonal of the bounding box of the check polygon.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    pub fn bbox(&self) -> (C64, C64) {
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in &self.polygon {
            lo.re = lo.re.min(z.re);
            lo.im = lo.im.min(z.im);
            hi.re = hi.re.max(z.re);
            hi.im = hi.im.max(z.im);
        }
        (lo, hi)
    }

    /// Dense sample polygon used for containment and distance queries.
    pub fn polygon(&self) -> &[C64] {
        &self.polygon
    }

    /// Whether `z` lies in the bounded region enclosed by the curve (winding test on the polygon).
    pub fn encloses(&self, z: C64) -> bool {
        let (lo, hi) = self.bbox();
        if z.re < lo.re || z.re > hi.re || z.im < lo.im || z.im > hi.im {
            return false;
        }
        let p = &self.polygon;
        let n = p.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (p[i], p[j]);
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if z.re < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Distance from `z` to the polygon approximation of the curve.
    pub fn distance_to(&self, z: C64) -> f64 {
        let p = &self.polygon;
        let n = p.len();
        (0..n)
            .map(|i| segment_distance(z, p[i], p[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum distance between the two curves (sample-polygon approximation)
    /// and the parameter on `self` where it occurs. A strided pass locates the
    /// closest region, which is then refined at full polygon resolution.
    pub fn gap_to(&self, other: &ParamCurve) -> (f64, f64) {
        let n = self.polygon.len();
        let stride = (n / 256).max(1);
        let other_stride = (other.polygon.len() / 256).max(1);
        let coarse_other: Vec<C64> = other.polygon.iter().step_by(other_stride).copied().collect();
        let mut best_i = 0;
        let mut best_d = f64::INFINITY;
        for i in (0..n).step_by(stride) {
            let z = self.polygon[i];
            let d = coarse_other.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
            if d < best_d {
                best_d = d;
                best_i = i;
            }
        }
        let mut best = (f64::INFINITY, 0.0);
        let span = 2 * stride;
        for off in 0..=2 * span {
            let i = (best_i + n + off - span) % n;
            let d = other.distance_to(self.polygon[i]);
            if d < best.0 {
                best = (d, 2.0 * PI * i as f64 / n as f64);
            }
        }
        best
    }

    /// Checks `|z'| ≥ 1e-9·diam` and that the check polygon is simple with
    /// pairwise sample separation above `1e-9·diam`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.check_samples();
        let (z, dz, _) = self.sample(n);
        let diam = self.diameter().max(f64::MIN_POSITIVE);
        let tol = 1e-9 * diam;
        if let Some((j, d)) = dz.iter().enumerate().find(|(_, d)| d.norm() < tol) {
            return Err(Error::Invariant(format!(
                "degenerate parameterization: |z'| = {:.3e} at sample {j}",
                d.norm()
            )));
        }
        if let Some((i, j)) = first_crossing(&z, tol) {
            return Err(Error::Invariant(format!(
                "curve is not simple: sample segments {i} and {j} meet"
            )));
        }
        Ok(())
    }
}

pub(crate) fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_meet(p1: C64, p2: C64, q1: C64, q2: C64, tol: f64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0 {
        return true;
    }
    segment_distance(p1, q1, q2) < tol
        || segment_distance(p2, q1, q2) < tol
        || segment_distance(q1, p1, p2) < tol
        || segment_distance(q2, p1, p2) < tol
}

/// First pair of non-adjacent segments of the closed polygon that intersect or
/// come within `tol`, found through a uniform grid hash.
pub(crate) fn first_crossing(points: &[C64], tol: f64) -> Option<(usize, usize)> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    let cell = (0..n)
        .map(|i| {
            let (a, b) = seg(i);
            (b - a).norm()
        })
        .fold(0.0, f64::max)
        .max(tol)
        * 2.0;
    let key = |z: C64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n {
        let (a, b) = seg(i);
        let (ka, kb) = (key(a), key(b));
        for x in ka.0.min(kb.0)..=ka.0.max(kb.0) {
            for y in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                grid.entry((x, y)).or_default().push(i);
            }
        }
    }
    let mut keys: Vec<_> = grid.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let mut near: Vec<usize> = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = grid.get(&(k.0 + dx, k.1 + dy)) {
                    near.extend(v);
                }
            }
        }
        near.sort_unstable();
        near.dedup();
        for &i in &grid[&k] {
            for &j in &near {
                if j <= i {
                    continue;
                }
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                // Skip segments two apart: they share a neighbour and can be closer than `tol`
                // on strongly refined curves without any crossing.
                let close_in_index = (j - i) <= 2 || (n - (j - i)) <= 2;
                let (p1, p2) = seg(i);
                let (q1, q2) = seg(j);
                let hit = if close_in_index {
                    segments_meet(p1, p2, q1, q2, 0.0)
                } else {
                    segments_meet(p1, p2, q1, q2, tol)
                };
                if hit {
                    return Some((i, j));
                }
            }
        }
    }
    None
}
