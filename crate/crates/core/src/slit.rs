//! Horizontal slit maps of two-disk domains symmetric about the real axis.
//!
//! A Möbius map `ζ = (z - p)/(K (z - q))`, with `p`, `q` the common symmetric
//! points of both circles, sends the domain onto the annulus `ρ < |ζ| < 1` and
//! infinity to the real point `α`. There the slit map is
//! `g(ζ) = R/(ζ - α) + Σ a_n ζ^n`, and requiring `Im g` to be constant on both
//! circles decouples into a 2×2 system per Fourier mode.

use serde::{Deserialize, Serialize};

use crate::conformal::{CapacityEstimate, Method};
use crate::koebe::CircleDomain;
use crate::{Error, Result, C64};

/// Slits closer than this fraction of their total length are reported as touching.
pub const TOUCHING_FRACTION: f64 = 1e-6;
const START_TERMS: usize = 16;
const MAX_TERMS: usize = 1 << 20;
const ENDPOINT_TOL: f64 = 1e-9;
const CHECK_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invariant(format!("interval [{lo}, {hi}] is not ordered")));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Complement of one or two closed intervals on the line `Im w = height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitDomain {
    pub height: f64,
    pub intervals: Vec<Interval>,
}

impl SlitDomain {
    /// Intervals must be sorted and may share at most an endpoint.
    pub fn new(height: f64, intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() || intervals.len() > 2 {
            return Err(Error::Shape(format!("{} intervals, expected one or two", intervals.len())));
        }
        if intervals.len() == 2 && intervals[0].hi > intervals[1].lo {
            return Err(Error::Invariant(format!(
                "intervals [{}, {}] and [{}, {}] overlap",
                intervals[0].lo, intervals[0].hi, intervals[1].lo, intervals[1].hi
            )));
        }
        Ok(Self { height, intervals })
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Distance from the right end of the first interval to the left end of the second.
    pub fn gap(&self) -> f64 {
        match self.intervals.as_slice() {
            [a, b] => b.lo - a.hi,
            _ => 0.0,
        }
    }

    pub fn is_touching(&self) -> bool {
        self.intervals.len() == 2 && self.gap() < TOUCHING_FRACTION * self.total_length()
    }

    /// True when some interval has zero length.
    pub fn is_degenerate(&self) -> bool {
        self.intervals.iter().any(|i| i.length() == 0.0)
    }
}

/// Analytic capacity of the slits: a quarter of their total length.
pub fn gamma_from_slits(slits: &SlitDomain) -> CapacityEstimate {
    CapacityEstimate { value: slits.total_length() / 4.0, method: Method::Slit, nodes: 0, certification: 1.0 }
}

/// Normalized slit map `h(z) = z + O(1/z)`.
#[derive(Debug, Clone)]
pub struct SlitMap {
    disks: CircleDomain,
    p: f64,
    q: f64,
    scale: f64,
    alpha: f64,
    rho: f64,
    residue: f64,
    constant: f64,
    /// `a_n`, n ≥ 1.
    positive: Vec<f64>,
    /// `a_{-n} ρ^{-n}`, n ≥ 1.
    negative: Vec<f64>,
    /// Disk index sent to `|ζ| = 1`.
    outer: usize,
    pub target: SlitDomain,
    pub normalization_residual: f64,
    /// Largest deviation of `Im h` from its mean on either circle.
    pub residual: f64,
    pub terms: usize,
    pub warnings: Vec<String>,
}

impl SlitMap {
    fn build(disks: &CircleDomain, terms: usize) -> Self {
        let (c, r) = (&disks.centers, &disks.radii);
        let (c1, c2, r1, r2) = (c[0].re, c[1].re, r[0], r[1]);
        // p + q and pq from (p - c)(q - c) = r² on both circles.
        let s = (c2 * c2 - c1 * c1 - r2 * r2 + r1 * r1) / (c2 - c1);
        let t = r1 * r1 - c1 * c1 + c1 * s;
        let disc = (s * s / 4.0 - t).max(0.0).sqrt();
        let (p, q) = (s / 2.0 - disc, s / 2.0 + disc);
        let k: Vec<f64> = (0..2).map(|j| ((c[j].re + r[j] - p) / (c[j].re + r[j] - q)).abs()).collect();
        let outer = if k[0] > k[1] { 0 } else { 1 };
        let scale = k[outer];
        let rho = k[1 - outer] / scale;
        let alpha = 1.0 / scale;
        let residue = (q - p) / scale;

        let mut positive = Vec::with_capacity(terms);
        let mut negative = Vec::with_capacity(terms);
        let (mut alpha_n, mut ratio_n, mut rho_n) = (1.0, 1.0, 1.0);
        for _ in 1..=terms {
            // alpha_n = α^{n-1}; ratio_n = (ρ/α)^n; rho_n = ρ^n.
            ratio_n *= rho / alpha;
            rho_n *= rho;
            let q1 = residue * alpha_n;
            let q2 = residue / alpha * ratio_n;
            let neg = (q2 - q1 * rho_n) / (rho_n * rho_n - 1.0);
            positive.push(neg * rho_n + q1);
            negative.push(neg);
            alpha_n *= alpha;
        }
        let mut map = Self {
            disks: disks.clone(),
            p,
            q,
            scale,
            alpha,
            rho,
            residue,
            constant: 0.0,
            positive,
            negative,
            outer,
            target: SlitDomain { height: 0.0, intervals: Vec::new() },
            normalization_residual: 0.0,
            residual: 0.0,
            terms,
            warnings: Vec::new(),
        };
        // h(z) - z → 0: the pole part already equals z - q at ζ = α.
        map.constant = map.q - map.series(C64::new(map.alpha, 0.0)).re;
        map
    }

    fn series(&self, zeta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let (mut up, mut down) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let inv = self.rho / zeta;
        for (a, b) in self.positive.iter().zip(&self.negative) {
            up *= zeta;
            down *= inv;
            acc += up * a + down * b;
        }
        acc
    }

    fn on_annulus(&self, zeta: C64) -> C64 {
        self.residue / (zeta - self.alpha) + self.constant + self.series(zeta)
    }

    fn zeta(&self, z: C64) -> C64 {
        (z - self.p) / ((z - self.q) * self.scale)
    }

    /// `h(z)` for `z` outside both open disks.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let inside = self.disks.centers.iter().zip(&self.disks.radii).any(|(c, r)| (z - c).norm() < r * (1.0 - 1e-12));
        if inside || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("point {z} is not in the domain")));
        }
        Ok(self.on_annulus(self.zeta(z)))
    }

    /// Real images of the circles, in disk order.
    fn slit_images(&self) -> [Interval; 2] {
        let ends = |r: f64| {
            let (a, b) = (self.on_annulus(C64::new(r, 0.0)).re, self.on_annulus(C64::new(-r, 0.0)).re);
            Interval { lo: a.min(b), hi: a.max(b) }
        };
        let (outer, inner) = (ends(1.0), ends(self.rho));
        if self.outer == 0 {
            [outer, inner]
        } else {
            [inner, outer]
        }
    }

    fn finish(&mut self, tol: f64) -> Result<()> {
        let mut heights = [0.0; 2];
        let mut residual = 0.0_f64;
        for (j, (c, r)) in self.disks.centers.iter().zip(&self.disks.radii).enumerate() {
            let im: Vec<f64> = (0..CHECK_NODES)
                .map(|k| {
                    let z = c + C64::from_polar(*r, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CHECK_NODES as f64);
                    self.on_annulus(self.zeta(z)).im
                })
                .collect();
            heights[j] = im.iter().sum::<f64>() / CHECK_NODES as f64;
            residual = residual.max(im.iter().map(|v| (v - heights[j]).abs()).fold(0.0, f64::max));
        }
        self.residual = residual;
        if residual > tol {
            self.warnings.push(format!("Im h varies by {residual:.3e} on a boundary circle (tolerance {tol:.1e})"));
        }
        let mut slits = self.slit_images().to_vec();
        slits.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        // Endpoints of touching slits may cross by rounding.
        if slits[0].hi > slits[1].lo && slits[0].hi - slits[1].lo < 1e-12 * (slits[1].hi - slits[0].lo) {
            let mid = (slits[0].hi + slits[1].lo) / 2.0;
            slits[0].hi = mid;
            slits[1].lo = mid;
        }
        self.target = SlitDomain::new((heights[0] + heights[1]) / 2.0, slits)?;
        let big = 10.0 * (self.disks.centers.iter().map(|c| c.norm()).fold(0.0, f64::max) + self.disks.radii.iter().sum::<f64>());
        let n = 64;
        let mean = (0..n)
            .map(|k| {
                let z = C64::from_polar(big, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
                self.on_annulus(self.zeta(z)) - z
            })
            .sum::<C64>()
            / n as f64;
        self.normalization_residual = mean.norm();
        Ok(())
    }
}

/// Slit map of the exterior of two disks with real centers.
pub fn slit_uniformize(disks: &CircleDomain, tol: f64) -> Result<(SlitMap, SlitDomain)> {
    if disks.len() != 2 {
        return Err(Error::Unsupported(format!("slit maps need exactly two disks, got {}", disks.len())));
    }
    let scale = disks.centers.iter().map(|c| c.norm()).fold(0.0, f64::max) + disks.radii.iter().sum::<f64>();
    if disks.centers.iter().any(|c| c.im.abs() > 1e-12 * scale) {
        return Err(Error::Unsupported("slit maps need both disk centers on the real axis".into()));
    }
    let disks = CircleDomain::new(disks.centers.iter().map(|c| C64::new(c.re, 0.0)).collect(), disks.radii.clone())?;
    let mut terms = START_TERMS;
    let mut map = SlitMap::build(&disks, terms);
    let mut ends = map.slit_images();
    loop {
        let next = terms * 2;
        let finer = SlitMap::build(&disks, next);
        let finer_ends = finer.slit_images();
        let moved = ends
            .iter()
            .zip(&finer_ends)
            .map(|(a, b)| (a.lo - b.lo).abs().max((a.hi - b.hi).abs()))
            .fold(0.0, f64::max);
        map = finer;
        ends = finer_ends;
        terms = next;
        if moved < ENDPOINT_TOL * scale {
            break;
        }
        if terms >= MAX_TERMS {
            map.warnings.push(format!("slit endpoints still moved by {moved:.3e} at {terms} terms"));
            break;
        }
    }
    map.finish(tol)?;
    let target = map.target.clone();
    Ok((map, target))
}
