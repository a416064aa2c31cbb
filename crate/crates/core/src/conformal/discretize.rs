use std::f64::consts::PI;

use crate::geometry::{ParamCurve, PlanarDomain};
use crate::{Error, Result, C64};

/// Smallest admissible node count per curve.
pub const MIN_NODES: usize = 16;

/// Parameter change `θ(u) = c + 2 atan(β tan(u/2))` clustering nodes near `θ = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp {
    pub center: f64,
    pub beta: f64,
}

impl Warp {
    fn theta(&self, u: f64) -> (f64, f64) {
        let (s, c) = (u / 2.0).sin_cos();
        let theta = self.center + 2.0 * (self.beta * s).atan2(c);
        let dtheta = self.beta / (c * c + self.beta * self.beta * s * s);
        (theta, dtheta)
    }

    /// Inverse of the parameter change: the `u` with `θ(u) = theta`.
    pub fn parameter(&self, theta: f64) -> f64 {
        let (s, c) = ((theta - self.center) / 2.0).sin_cos();
        2.0 * s.atan2(self.beta * c)
    }
}

/// Trapezoid nodes on one closed curve, in the curve's own orientation.
#[derive(Debug, Clone)]
pub struct CurveNodes {
    pub points: Vec<C64>,
    /// `z'(u) Δu`, the complex line element.
    pub dz: Vec<C64>,
    /// Arclength weights `|dz|`.
    pub weights: Vec<f64>,
    pub tangents: Vec<C64>,
    pub warp: Option<Warp>,
}

impl CurveNodes {
    pub fn new(curve: &ParamCurve, n: usize, warp: Option<Warp>) -> Self {
        let du = 2.0 * PI / n as f64;
        let (points, dz): (Vec<C64>, Vec<C64>) = match warp {
            None => {
                let (z, dz, _) = curve.sample(n);
                (z, dz.into_iter().map(|d| d * du).collect())
            }
            Some(w) => (0..n)
                .map(|k| {
                    let (theta, dtheta) = w.theta(k as f64 * du);
                    let (z, dz, _) = curve.eval_at(theta);
                    (z, dz * (dtheta * du))
                })
                .unzip(),
        };
        let weights: Vec<f64> = dz.iter().map(|d| d.norm()).collect();
        let tangents = dz.iter().zip(&weights).map(|(d, w)| d / *w).collect();
        Self { points, dz, weights, tangents, warp }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Boundary nodes of a domain, one block per curve.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    pub curves: Vec<CurveNodes>,
}

impl BoundaryDiscretization {
    pub fn total_nodes(&self) -> usize {
        self.curves.iter().map(CurveNodes::len).sum()
    }

    /// Node counts per curve.
    pub fn counts(&self) -> Vec<usize> {
        self.curves.iter().map(CurveNodes::len).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.curves.iter().flat_map(|c| c.points.iter().copied())
    }

    pub fn dz(&self) -> impl Iterator<Item = C64> + '_ {
        self.curves.iter().flat_map(|c| c.dz.iter().copied())
    }

    /// Same curves and warps with `factor` times as many nodes.
    pub fn refined(&self, domain: &PlanarDomain, factor: usize) -> Self {
        let curves = domain
            .curves()
            .iter()
            .zip(&self.curves)
            .map(|(c, nodes)| CurveNodes::new(c, nodes.len() * factor, nodes.warp))
            .collect();
        Self { curves }
    }
}

/// Equispaced-in-parameter nodes, `n` per curve.
pub fn discretize(domain: &PlanarDomain, n: usize) -> Result<BoundaryDiscretization> {
    if n < MIN_NODES {
        return Err(Error::Resolution(format!("need at least {MIN_NODES} nodes per curve, got {n}")));
    }
    let curves = domain.curves().iter().map(|c| CurveNodes::new(c, n, None)).collect();
    Ok(BoundaryDiscretization { curves })
}

/// Nearest other curve for each curve: `(gap, parameter of the closest point, clustering warp)`.
pub(crate) fn gap_warps(domain: &PlanarDomain) -> Vec<(f64, f64, Option<Warp>)> {
    let curves = domain.curves();
    (0..curves.len())
        .map(|i| {
            let mut best = (f64::INFINITY, 0.0);
            for (j, other) in curves.iter().enumerate() {
                if j != i {
                    let (gap, t) = curves[i].gap_to(other);
                    if gap < best.0 {
                        best = (gap, t);
                    }
                }
            }
            let (gap, t) = best;
            if !gap.is_finite() {
                return (gap, 0.0, None);
            }
            let (_, dz, d2z) = curves[i].eval_at(t);
            let bend = (dz.conj() * d2z).im.abs();
            let radius = if bend > 0.0 { dz.norm().powi(3) / bend } else { f64::INFINITY };
            let radius = radius.min(curves[i].diameter() / 2.0);
            let warp = (gap < 0.25 * radius).then(|| Warp { center: t, beta: (gap / radius).sqrt() });
            (gap, t, warp)
        })
        .collect()
}

/// Nodes with clustering toward near contacts, `counts[i]` on curve `i`.
pub(crate) fn discretize_clustered(domain: &PlanarDomain, counts: &[usize]) -> BoundaryDiscretization {
    let warps = gap_warps(domain);
    let curves = domain
        .curves()
        .iter()
        .zip(counts)
        .zip(warps)
        .map(|((c, &n), (_, _, warp))| CurveNodes::new(c, n, warp))
        .collect();
    BoundaryDiscretization { curves }
}
