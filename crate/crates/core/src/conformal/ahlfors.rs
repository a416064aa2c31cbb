use std::f64::consts::PI;
use std::sync::OnceLock;

use super::discretize::{discretize_clustered, gap_warps, BoundaryDiscretization, MIN_NODES};
use super::szego::{self, MappedNodes};
use crate::geometry::PlanarDomain;
use crate::numeric::{trig_evaluate, trig_interpolate};
use crate::{Error, Result, C64};

/// Relative change of `γ` under node doubling accepted as converged.
pub const DOUBLING_TOL: f64 = 1e-8;
/// Node budget for the doubling loop.
pub const MAX_TOTAL_NODES: usize = 32768;
/// Target ratio of evaluation distance to local node spacing.
const NEAR_RATIO: f64 = 4.0;
const MAX_REFINE: usize = 1024;
/// Node budget of a refined evaluation level.
const MAX_REFINED_NODES: usize = 1 << 20;

#[derive(Debug)]
struct Level {
    w: Vec<C64>,
    dw: Vec<C64>,
    s: Vec<C64>,
    l0: Vec<C64>,
}

/// Ahlfors function of the exterior of a [`PlanarDomain`]'s boundary curves.
#[derive(Debug)]
pub struct AhlforsFunction {
    domain: PlanarDomain,
    z0: C64,
    disc: BoundaryDiscretization,
    base: Level,
    refined: Vec<OnceLock<Level>>,
    gamma: f64,
    /// `(total nodes, γ)` for every solve of the doubling loop.
    pub history: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
    /// GMRES iterations of the last solve (0 for a direct solve).
    pub iterations: usize,
}

impl AhlforsFunction {
    /// `f'(∞) = lim z f(z)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    /// Pole of the Möbius reduction `w = 1/(z - z0)`; lies inside a boundary curve.
    pub fn reduction_point(&self) -> C64 {
        self.z0
    }

    pub fn discretization(&self) -> &BoundaryDiscretization {
        &self.disc
    }

    pub fn total_nodes(&self) -> usize {
        self.disc.total_nodes()
    }

    /// `f(z)`, zero off the closure of the domain.
    pub fn eval(&self, z: C64) -> C64 {
        self.eval_checked(z).unwrap_or(C64::new(0.0, 0.0))
    }

    /// `f(z)`, or `None` when `z` lies inside one of the boundary curves.
    pub fn eval_checked(&self, z: C64) -> Option<C64> {
        if z == self.z0 {
            return None;
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Some(C64::new(0.0, 0.0));
        }
        let w = 1.0 / (z - self.z0);
        let sums = self.sums(w, false)?;
        let (s, l0) = (sums.s, sums.l0);
        Some(2.0 * PI * w * s / (1.0 + 2.0 * PI * w * l0))
    }

    /// `f'(z)`; `None` off the domain.
    pub fn derivative(&self, z: C64) -> Option<C64> {
        if z == self.z0 || !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let w = 1.0 / (z - self.z0);
        let sums = self.sums(w, true)?;
        let num = 2.0 * PI * w * sums.s;
        let den = 1.0 + 2.0 * PI * w * sums.l0;
        let dnum = 2.0 * PI * (sums.s + w * sums.ds);
        let dden = 2.0 * PI * (sums.l0 + w * sums.dl0);
        let df_dw = (dnum * den - num * dden) / (den * den);
        Some(df_dw * (-w * w))
    }

    /// Taylor coefficients `(F'(0), F''(0)/2)` of the reduced map `F(w) = f(z0 + 1/w)`,
    /// so that `f(z) = a1/(z - z0) + a2/(z - z0)^2 + …` near infinity.
    pub fn expansion_at_infinity(&self) -> (C64, C64) {
        let b = &self.base;
        let cauchy = |vals: &[C64], power: i32| -> C64 {
            vals.iter().zip(&b.dw).zip(&b.w).map(|((v, dw), w)| v * dw / w.powi(power)).sum::<C64>()
                / C64::new(0.0, 2.0 * PI)
        };
        let s0 = cauchy(&b.s, 1);
        let s1 = cauchy(&b.s, 2);
        let l00 = cauchy(&b.l0, 1);
        (2.0 * PI * s0, 2.0 * PI * s1 - 4.0 * PI * PI * s0 * l00)
    }

    /// `|f| = 1` values at the discretization nodes, one block per curve.
    pub fn boundary_values(&self) -> Vec<Vec<C64>> {
        let mut out = Vec::new();
        let mut at = 0;
        for c in &self.disc.curves {
            let block = (at..at + c.len())
                .map(|j| self.base.s[j] / (self.base.l0[j] + 1.0 / (2.0 * PI * self.base.w[j])))
                .collect();
            out.push(block);
            at += c.len();
        }
        out
    }

    /// Boundary values on curve `curve` at parameters `thetas` of that curve,
    /// interpolated from the node values.
    pub fn boundary_values_at(&self, curve: usize, thetas: &[f64]) -> Vec<C64> {
        let values = &self.boundary_values()[curve];
        let nodes = &self.disc.curves[curve];
        let params: Vec<f64> = match nodes.warp {
            None => thetas.to_vec(),
            Some(w) => thetas.iter().map(|&t| w.parameter(t)).collect(),
        };
        trig_evaluate(values, &params)
    }

    fn level(&self, factor: usize) -> &Level {
        if factor <= 1 {
            return &self.base;
        }
        let slot = factor.trailing_zeros() as usize - 1;
        self.refined[slot].get_or_init(|| {
            let disc = self.disc.refined(&self.domain, factor);
            let nodes = MappedNodes::new(&disc, self.z0);
            let mut s = Vec::with_capacity(nodes.w.len());
            let mut l0 = Vec::with_capacity(nodes.w.len());
            let mut at = 0;
            for c in &self.disc.curves {
                let n = c.len();
                s.extend(trig_interpolate(&self.base.s[at..at + n], n * factor));
                l0.extend(trig_interpolate(&self.base.l0[at..at + n], n * factor));
                at += n;
            }
            Level { w: nodes.w, dw: nodes.dw, s, l0 }
        })
    }

    fn sums(&self, w: C64, derivative: bool) -> Option<Sums> {
        let cap = (MAX_REFINED_NODES / self.base.w.len()).max(1);
        let cap = if cap.is_power_of_two() { cap } else { cap.next_power_of_two() / 2 };
        let cap = cap.min(MAX_REFINE);
        let mut factor = 1;
        loop {
            let level = self.level(factor);
            let mut ratio = f64::INFINITY;
            for (wj, dwj) in level.w.iter().zip(&level.dw) {
                ratio = ratio.min((w - wj).norm() / dwj.norm());
            }
            if ratio >= NEAR_RATIO || factor >= cap {
                return barycentric(level, w, derivative);
            }
            factor = (factor * ((NEAR_RATIO / ratio).ceil() as usize).next_power_of_two()).min(cap);
        }
    }
}

struct Sums {
    s: C64,
    l0: C64,
    ds: C64,
    dl0: C64,
}

/// Barycentric Cauchy interpolation of the boundary data at interior `w`.
fn barycentric(level: &Level, w: C64, derivative: bool) -> Option<Sums> {
    let zero = C64::new(0.0, 0.0);
    let (mut den, mut ns, mut nl) = (zero, zero, zero);
    let (mut dden, mut dns, mut dnl) = (zero, zero, zero);
    for j in 0..level.w.len() {
        let d = level.w[j] - w;
        if d == zero {
            let s = level.s[j];
            let l0 = level.l0[j];
            return Some(Sums { s, l0, ds: zero, dl0: zero });
        }
        let c = level.dw[j] / d;
        den += c;
        ns += level.s[j] * c;
        nl += level.l0[j] * c;
        if derivative {
            let e = c / d;
            dden += e;
            dns += level.s[j] * e;
            dnl += level.l0[j] * e;
        }
    }
    let winding = den / C64::new(0.0, 2.0 * PI);
    if (winding - 1.0).norm() > 0.5 {
        return None;
    }
    let s = ns / den;
    let l0 = nl / den;
    let (ds, dl0) = if derivative { ((dns - s * dden) / den, (dnl - l0 * dden) / den) } else { (zero, zero) };
    Some(Sums { s, l0, ds, dl0 })
}

/// Point deep inside the boundary curve with the largest inscribed disk.
pub fn reduction_point(domain: &PlanarDomain) -> C64 {
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    for curve in domain.curves() {
        let poly = curve.polygon();
        let coarse: Vec<C64> = poly.iter().step_by((poly.len() / 2048).max(1)).copied().collect();
        let dist = |z: C64, pts: &[C64]| -> f64 {
            let n = pts.len();
            (0..n).map(|i| crate::geometry::segment_distance(z, pts[i], pts[(i + 1) % n])).fold(f64::INFINITY, f64::min)
        };
        let (lo, hi) = curve.bbox();
        let grid = 48;
        let mut local = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
        for a in 0..grid {
            for b in 0..grid {
                let z = C64::new(
                    lo.re + (hi.re - lo.re) * (a as f64 + 0.5) / grid as f64,
                    lo.im + (hi.im - lo.im) * (b as f64 + 0.5) / grid as f64,
                );
                if curve.encloses(z) {
                    let d = dist(z, &coarse);
                    if d > local.0 {
                        local = (d, z);
                    }
                }
            }
        }
        if !local.0.is_finite() {
            // Very thin curve: fall back to the midpoint between two opposite samples.
            let z = (poly[0] + poly[poly.len() / 2]) / 2.0;
            local = (0.0, z);
        }
        // Pattern search refinement.
        let mut step = ((hi - lo).norm() / grid as f64).max(local.0 / 4.0);
        let (mut d, mut z) = (dist(local.1, poly), local.1);
        while step > 1e-6 * (hi - lo).norm() {
            let mut moved = false;
            for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let c = z + dir * step;
                if curve.encloses(c) {
                    let dc = dist(c, poly);
                    if dc > d {
                        (d, z) = (dc, c);
                        moved = true;
                    }
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        if d > best.0 {
            best = (d, z);
        }
    }
    best.1
}

fn initial_count(degree: usize, n: usize) -> usize {
    n.max((degree + 1).next_power_of_two())
}

/// One solve with `counts[i]` nodes on curve `i`.
pub fn ahlfors_fixed(domain: &PlanarDomain, counts: &[usize], z0: C64) -> Result<AhlforsFunction> {
    if counts.len() != domain.connectivity() {
        return Err(Error::Shape(format!("{} node counts for {} curves", counts.len(), domain.connectivity())));
    }
    if let Some(&n) = counts.iter().find(|&&n| n < MIN_NODES) {
        return Err(Error::Resolution(format!("need at least {MIN_NODES} nodes per curve, got {n}")));
    }
    let disc = discretize_clustered(domain, counts);
    let nodes = MappedNodes::new(&disc, z0);
    let sol = szego::solve(&nodes)?;
    let mut warnings = Vec::new();
    for (i, (gap, t, _)) in gap_warps(domain).into_iter().enumerate() {
        if !gap.is_finite() {
            continue;
        }
        let c = &disc.curves[i];
        let contact = domain.curves()[i].point(t);
        let nearest = (0..c.len())
            .min_by(|&a, &b| (c.points[a] - contact).norm().total_cmp(&(c.points[b] - contact).norm()))
            .unwrap_or(0);
        let local = c.weights[nearest];
        if gap < 10.0 * local {
            warnings.push(format!("curve {i}: gap {gap:.3e} is below 10 node spacings ({local:.3e})"));
        }
    }
    let total = disc.total_nodes();
    Ok(AhlforsFunction {
        domain: domain.clone(),
        z0,
        base: Level { w: nodes.w, dw: nodes.dw, s: sol.s, l0: sol.l0 },
        disc,
        refined: (0..MAX_REFINE.trailing_zeros()).map(|_| OnceLock::new()).collect(),
        gamma: sol.gamma,
        history: vec![(total, sol.gamma)],
        warnings,
        iterations: sol.iterations,
    })
}

/// Ahlfors function with node doubling until `γ` changes by less than
/// [`DOUBLING_TOL`] relative. `n` is the starting node count per curve.
pub fn ahlfors_solve(domain: &PlanarDomain, n: usize) -> Result<AhlforsFunction> {
    if n < MIN_NODES {
        return Err(Error::Resolution(format!("need at least {MIN_NODES} nodes per curve, got {n}")));
    }
    let z0 = reduction_point(domain);
    let mut counts: Vec<usize> = domain.curves().iter().map(|c| initial_count(c.degree(), n)).collect();
    let mut prev = ahlfors_fixed(domain, &counts, z0)?;
    let mut history = prev.history.clone();
    loop {
        counts.iter_mut().for_each(|c| *c *= 2);
        let total: usize = counts.iter().sum();
        if total > MAX_TOTAL_NODES {
            let last = history.last().map(|h| h.1).unwrap_or(f64::NAN);
            let change = if history.len() >= 2 {
                (history[history.len() - 1].1 - history[history.len() - 2].1).abs() / last
            } else {
                f64::NAN
            };
            return Err(Error::Accuracy(format!(
                "node doubling did not converge within {MAX_TOTAL_NODES} nodes (last relative change {change:.2e})"
            )));
        }
        let mut next = ahlfors_fixed(domain, &counts, z0)?;
        history.push((total, next.gamma));
        let change = (next.gamma - prev.gamma).abs() / next.gamma;
        if change < DOUBLING_TOL {
            next.history = history;
            return Ok(next);
        }
        prev = next;
    }
}
