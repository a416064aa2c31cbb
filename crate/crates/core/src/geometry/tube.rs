//! Smooth fattenings of polyline sets.
//!
//! A set of segments `S` is fattened to the superlevel set of the Gaussian
//! line density
//!
//! ```text
//! ψ(z) = (2π)^{-1/2} σ^{-1} ∫_S exp(-|z-ξ|² / 2σ²) ds(ξ)
//! ```
//!
//! at level `exp(-w²/2σ²)`, whose boundary sits exactly at distance `w` from
//! any long straight piece. `ψ` is real-analytic, increasing in `S`, so the
//! fattenings of nested sets are nested. The outer boundary is traced by
//! arclength continuation, then re-parameterized with a curvature-weighted
//! speed and converted to trigonometric coefficients.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::curve::ParamCurve;
use crate::numeric::Spectrum;
use crate::{Error, Result, C64};

const CUTOFF_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy)]
struct Segment {
    start: C64,
    dir: C64,
    len: f64,
}

/// Gaussian line density of a union of polylines.
pub struct LineField {
    segments: Vec<Segment>,
    sigma: f64,
    cell: f64,
    cutoff2: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
    bbox: (C64, C64),
}

impl LineField {
    pub fn new(paths: &[Vec<C64>], sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidSpec("field width must be positive".into()));
        }
        let mut segments = Vec::new();
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for path in paths {
            if path.len() < 2 {
                return Err(Error::InvalidSpec("polyline needs at least two points".into()));
            }
            for w in path.windows(2) {
                let d = w[1] - w[0];
                let len = d.norm();
                if len <= 1e-14 * (1.0 + w[0].norm()) {
                    return Err(Error::InvalidSpec(format!("coincident polyline points at {}", w[0])));
                }
                segments.push(Segment { start: w[0], dir: d / len, len });
            }
            for z in path {
                lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
                hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
            }
        }
        let cell = CUTOFF_SIGMAS * sigma;
        let key = |z: C64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, s) in segments.iter().enumerate() {
            let end = s.start + s.dir * s.len;
            let a = key(C64::new(s.start.re.min(end.re) - cell, s.start.im.min(end.im) - cell));
            let b = key(C64::new(s.start.re.max(end.re) + cell, s.start.im.max(end.im) + cell));
            for x in a.0..=b.0 {
                for y in a.1..=b.1 {
                    grid.entry((x, y)).or_default().push(i);
                }
            }
        }
        Ok(Self { segments, sigma, cell, cutoff2: cell * cell, grid, bbox: (lo, hi) })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Field value and gradient (as a complex number `∂x + i∂y`).
    pub fn value_grad(&self, z: C64) -> (f64, C64) {
        let key = ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64);
        let Some(list) = self.grid.get(&key) else {
            return (0.0, C64::new(0.0, 0.0));
        };
        let s2 = self.sigma * self.sigma;
        let rt2s = std::f64::consts::SQRT_2 * self.sigma;
        let norm = 1.0 / ((2.0 * PI).sqrt() * self.sigma);
        let mut value = 0.0;
        let mut grad = C64::new(0.0, 0.0);
        for &i in list {
            let s = &self.segments[i];
            let rel = (z - s.start) * s.dir.conj();
            let (a, b) = (rel.re, rel.im);
            let past = if a < 0.0 { -a } else if a > s.len { a - s.len } else { 0.0 };
            if past * past + b * b > self.cutoff2 {
                continue;
            }
            let gb = (-b * b / (2.0 * s2)).exp();
            let along = self.sigma * (PI / 2.0).sqrt() * (libm::erf(a / rt2s) - libm::erf((a - s.len) / rt2s));
            let integral = gb * along;
            let da = gb * ((-a * a / (2.0 * s2)).exp() - (-(a - s.len) * (a - s.len) / (2.0 * s2)).exp());
            let db = -b / s2 * integral;
            value += integral;
            grad += s.dir * C64::new(da, db);
        }
        (value * norm, grad * norm)
    }

    fn value(&self, z: C64) -> f64 {
        self.value_grad(z).0
    }
}

/// Newton projection onto `ψ = level` along the gradient.
fn project(field: &LineField, mut z: C64, level: f64) -> Result<C64> {
    for _ in 0..30 {
        let (v, g) = field.value_grad(z);
        let g2 = g.norm_sqr();
        if g2 == 0.0 {
            return Err(Error::Geometry("flat field while projecting onto tube boundary".into()));
        }
        let step = g * ((level - v) / g2);
        z += step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    let (v, g) = field.value_grad(z);
    if ((v - level) / g.norm()).abs() < 1e-12 {
        Ok(z)
    } else {
        Err(Error::Geometry("projection onto tube boundary did not converge".into()))
    }
}

/// Unit tangent of the level curve with the superlevel set on the left.
fn tangent(field: &LineField, z: C64) -> C64 {
    let g = field.value_grad(z).1;
    let t = C64::new(0.0, -1.0) * g;
    t / t.norm()
}

/// Advances along the level curve by arclength `ds` with RK4 substeps and a final projection.
fn advance(field: &LineField, z: C64, ds: f64, max_sub: f64, level: f64) -> Result<C64> {
    let subs = (ds.abs() / max_sub).ceil().max(1.0) as usize;
    let h = ds / subs as f64;
    let mut p = z;
    for _ in 0..subs {
        let k1 = tangent(field, p);
        let k2 = tangent(field, p + k1 * (h / 2.0));
        let k3 = tangent(field, p + k2 * (h / 2.0));
        let k4 = tangent(field, p + k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        p = project(field, p, level)?;
    }
    Ok(p)
}

/// Curvature of the circle through three points (signed, positive for left turns).
fn menger(a: C64, b: C64, c: C64) -> f64 {
    let cr = (b - a).re * (c - a).im - (b - a).im * (c - a).re;
    let den = (b - a).norm() * (c - b).norm() * (c - a).norm();
    if den == 0.0 {
        0.0
    } else {
        2.0 * cr / den
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

struct Trace {
    points: Vec<C64>,
    arcs: Vec<f64>,
    curvature: Vec<f64>,
    step: f64,
    length: f64,
}

/// Outer boundary of the fattening `{ψ ≥ exp(-w²/2σ²)}` traced counterclockwise.
fn trace_outer(field: &LineField, width: f64) -> Result<(Trace, f64)> {
    let sigma = field.sigma();
    let level = (-width * width / (2.0 * sigma * sigma)).exp();
    let (lo, hi) = field.bbox;
    // March from a point left of the bounding box toward the leftmost segment point.
    let anchor = field
        .segments
        .iter()
        .map(|s| s.start)
        .chain(field.segments.iter().map(|s| s.start + s.dir * s.len))
        .fold(C64::new(f64::INFINITY, 0.0), |m, z| if z.re < m.re { z } else { m });
    let mut outside = C64::new(lo.re - width - 20.0 * sigma, anchor.im);
    let march = sigma / 8.0;
    let mut probe = outside;
    loop {
        probe += march;
        if field.value(probe) >= level {
            break;
        }
        outside = probe;
        if probe.re > hi.re + width {
            return Err(Error::Geometry("could not locate the tube boundary".into()));
        }
    }
    let (mut a, mut b) = (outside, probe);
    for _ in 0..80 {
        let m = (a + b) / 2.0;
        if field.value(m) >= level {
            b = m;
        } else {
            a = m;
        }
    }
    let start = project(field, b, level)?;

    let base = (sigma / 8.0).min(width / 8.0);
    let mut points = vec![start];
    let mut arcs = vec![0.0];
    let mut travelled = 0.0;
    let mut kappa = 1.0 / width;
    let max_steps = 5_000_000;
    loop {
        let h = base.min(0.05 / kappa.abs().max(1e-12));
        let last = *points.last().unwrap();
        let to_start = (start - last).norm();
        if travelled > 8.0 * base && to_start <= 1.5 * h && ((start - last) * tangent(field, last).conj()).re > 0.0 {
            travelled += to_start;
            break;
        }
        let next = advance(field, last, h, h / 2.0, level)?;
        if points.len() >= 2 {
            let prev = points[points.len() - 2];
            kappa = menger(prev, last, next);
        }
                points.push(next);
        travelled += h;
        arcs.push(travelled);
        if points.len() > max_steps {
            return Err(Error::Geometry("tube boundary trace did not close".into()));
        }
    }
    let n = points.len();
    let mut curvature = vec![0.0; n];
    for i in 0..n {
        curvature[i] = menger(points[(i + n - 1) % n], points[i], points[(i + 1) % n]);
    }
    Ok((Trace { points, arcs, curvature, step: base, length: travelled }, level))
}

/// Builds a closed counterclockwise trigonometric curve bounding the smooth
/// fattening of `paths`. `samples` fixes the sample count (a power of two);
/// `None` doubles from 512 until the Fourier tail is negligible.
pub fn tube_boundary(paths: &[Vec<C64>], width: f64, sigma: f64, samples: Option<usize>) -> Result<ParamCurve> {
    if !(width > 0.0) {
        return Err(Error::InvalidSpec("tube width must be positive".into()));
    }
    let field = LineField::new(paths, sigma)?;
    let (trace, level) = trace_outer(&field, width)?;
    let n = trace.points.len();

    let arcs = &trace.arcs;
    let total = trace.length;

    // Curvature-weighted parameter τ(s) = s + Σ a_i Φ((s - s_i)/b): smooth and monotone.
    let blur = width / 4.0;
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let ds = if i + 1 < n { arcs[i + 1] - arcs[i] } else { total - arcs[i] };
            3.0 * width * trace.curvature[i].abs() * ds
        })
        .collect();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + weights[i];
    }
    let extra = prefix[n];
    let lower = |x: f64| arcs.partition_point(|&a| a < x);
    let tau = |s: f64| -> (f64, f64) {
        let mut v = s;
        let mut dv = 1.0;
        for shift in [-total, 0.0, total] {
            let lo = lower(s - shift - 8.0 * blur);
            let hi = lower(s - shift + 8.0 * blur);
            v += prefix[lo];
            for i in lo..hi {
                let x = (s - arcs[i] - shift) / blur;
                v += weights[i] * normal_cdf(x);
                dv += weights[i] * (-0.5 * x * x).exp() / ((2.0 * PI).sqrt() * blur);
            }
        }
        (v, dv)
    };
    let tau0 = tau(0.0).0;
    let period = total + extra;

    // One RK4 step from the nearest trace point.
    let point_at = |s: f64| -> Result<C64> {
        let i = arcs.partition_point(|&a| a <= s).saturating_sub(1);
        let (p, ds) = if i + 1 < n && arcs[i + 1] - s < s - arcs[i] {
            (trace.points[i + 1], s - arcs[i + 1])
        } else if i + 1 == n && total - s < s - arcs[i] {
            (trace.points[0], s - total)
        } else {
            (trace.points[i], s - arcs[i])
        };
        advance(&field, p, ds, trace.step, level)
    };

    let build = |m: usize| -> Result<ParamCurve> {
        let mut zs = Vec::with_capacity(m);
        let mut s = 0.0;
        for j in 0..m {
            let target = tau0 + period * j as f64 / m as f64;
            for _ in 0..60 {
                let (v, dv) = tau(s);
                let step = (v - target) / dv;
                s -= step;
                if step.abs() < 1e-14 * total {
                    break;
                }
            }
            s = s.clamp(0.0, total);
            zs.push(point_at(s)?);
        }
        let plan = Spectrum::new(m);
        plan.forward(&mut zs);
        let half = m / 2;
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * (half - 1) + 1];
        for k in -(half as i64 - 1)..=(half as i64 - 1) {
            let bin = k.rem_euclid(m as i64) as usize;
            coeffs[(k + half as i64 - 1) as usize] = zs[bin] / m as f64;
        }
        ParamCurve::from_coeffs_unchecked(coeffs)
    };

    let tail_ok = |c: &ParamCurve| -> bool {
        let k = c.degree();
        let scale = c.diameter();
        let cut = k - k / 8;
        let tail = c
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as i64 - k as i64).unsigned_abs() as usize > cut)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        tail < 1e-10 * scale
    };

    let curve = match samples {
        Some(m) => {
            if m < 16 {
                return Err(Error::Resolution(format!("tube sample count {m} is below 16")));
            }
            build(m)?
        }
        None => {
            let mut m = 512;
            loop {
                let c = build(m)?;
                if tail_ok(&c) || m >= 1 << 15 {
                    break c;
                }
                m *= 2;
            }
        }
    };
    curve
        .check_invariants()
        .map_err(|e| Error::Resolution(format!("tube boundary under-resolved: {e}")))?;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_of_long_line_is_gaussian_in_distance() {
        let path = vec![C64::new(-5.0, 0.0), C64::new(5.0, 0.0)];
        let f = LineField::new(&[path], 0.1).unwrap();
        for d in [0.0, 0.05, 0.2] {
            let (v, g) = f.value_grad(C64::new(0.3, d));
            assert!((v - (-d * d / 0.02f64).exp()).abs() < 1e-12);
            assert!((g.im + d / 0.01 * v).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let path = vec![C64::new(0.0, 0.0), C64::new(0.3, 0.1), C64::new(0.35, -0.2)];
        let f = LineField::new(&[path], 0.05).unwrap();
        let z = C64::new(0.2, 0.07);
        let h = 1e-6;
        let (_, g) = f.value_grad(z);
        let gx = (f.value(z + h) - f.value(z - h)) / (2.0 * h);
        let gy = (f.value(z + C64::new(0.0, h)) - f.value(z - C64::new(0.0, h))) / (2.0 * h);
        assert!((g - C64::new(gx, gy)).norm() < 1e-6 * g.norm());
    }

    #[test]
    fn tube_of_segment_is_a_stadium_like_curve() {
        let path = vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)];
        let c = tube_boundary(&[path], 0.2, 0.1, None).unwrap();
        assert!(c.signed_area() > 0.0);
        // Long sides sit at distance 0.2 from the segment.
        let top = c.polygon().iter().filter(|z| z.re.abs() < 0.5).map(|z| z.im.abs());
        for y in top {
            assert!((y - 0.2).abs() < 1e-6, "{y}");
        }
    }
}
