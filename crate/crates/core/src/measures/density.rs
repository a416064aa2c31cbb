use std::f64::consts::PI;

use crate::geometry::ParamCurve;
use crate::numeric::trig_interpolate;
use crate::{Error, Result, C64};

/// Node samples of a curve at `t_j = 2πj/n`: points, `z'(t_j)·2π/n`, arclength weights, unit tangents.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub points: Vec<C64>,
    pub dz: Vec<C64>,
    pub weights: Vec<f64>,
    pub tangents: Vec<C64>,
}

impl CurveSamples {
    pub fn new(curve: &ParamCurve, n: usize) -> Self {
        let (points, d, _) = curve.sample(n);
        let h = 2.0 * PI / n as f64;
        let dz: Vec<C64> = d.iter().map(|v| v * h).collect();
        let weights = dz.iter().map(|v| v.norm()).collect();
        let tangents = d.iter().map(|v| v / v.norm()).collect();
        Self { points, dz, weights, tangents }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest node spacing.
    pub fn spacing(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }
}

/// A complex measure on finitely many closed curves, `dμ = ρ |dξ|`, with the
/// density `ρ` given by its samples at equispaced parameter nodes.
#[derive(Debug, Clone)]
pub struct DensityMeasure {
    curves: Vec<ParamCurve>,
    samples: Vec<CurveSamples>,
    density: Vec<Vec<C64>>,
}

/// Smallest ratio of evaluation distance to node spacing handled by refinement.
const NEAR_LIMIT: f64 = 1.0;
/// Distance/spacing ratio at which the plain trapezoid rule is used.
const FAR_RATIO: f64 = 8.0;
const MAX_REFINE: usize = 64;

impl DensityMeasure {
    pub fn new(curves: Vec<ParamCurve>, density: Vec<Vec<C64>>) -> Result<Self> {
        if curves.len() != density.len() || curves.is_empty() {
            return Err(Error::Shape(format!("{} support curves for {} density blocks", curves.len(), density.len())));
        }
        if let Some(d) = density.iter().find(|d| d.len() < 4) {
            return Err(Error::Shape(format!("density block with {} nodes", d.len())));
        }
        if density.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Invariant("density has non-finite values".into()));
        }
        let samples = curves.iter().zip(&density).map(|(c, d)| CurveSamples::new(c, d.len())).collect();
        Ok(Self { curves, samples, density })
    }

    /// Measure with density `ρ(ξ, tangent)` evaluated at `n` nodes per curve.
    pub fn from_fn(curves: Vec<ParamCurve>, n: usize, rho: impl Fn(C64, C64) -> C64) -> Result<Self> {
        let density = curves
            .iter()
            .map(|c| {
                let s = CurveSamples::new(c, n);
                s.points.iter().zip(&s.tangents).map(|(p, t)| rho(*p, *t)).collect()
            })
            .collect();
        Self::new(curves, density)
    }

    pub fn curves(&self) -> &[ParamCurve] {
        &self.curves
    }

    pub fn samples(&self) -> &[CurveSamples] {
        &self.samples
    }

    pub fn density(&self) -> &[Vec<C64>] {
        &self.density
    }

    pub fn total_nodes(&self) -> usize {
        self.density.iter().map(Vec::len).sum()
    }

    /// `Σ |ρ_j| w_j`.
    pub fn total_variation(&self) -> f64 {
        self.samples
            .iter()
            .zip(&self.density)
            .map(|(s, d)| s.weights.iter().zip(d).map(|(w, r)| w * r.norm()).sum::<f64>())
            .sum()
    }

    /// `μ(E) = Σ ρ_j w_j`.
    pub fn mass(&self) -> C64 {
        self.samples
            .iter()
            .zip(&self.density)
            .map(|(s, d)| s.weights.iter().zip(d).map(|(w, r)| r * *w).sum::<C64>())
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.density.iter_mut().flatten().for_each(|r| *r *= factor);
        out
    }

    /// `aμ + bν` for measures on the same support nodes.
    pub fn combine(a: C64, mu: &Self, b: C64, nu: &Self) -> Result<Self> {
        let same = mu.curves.len() == nu.curves.len()
            && mu.density.iter().zip(&nu.density).all(|(x, y)| x.len() == y.len())
            && mu.curves.iter().zip(&nu.curves).all(|(x, y)| x.coeffs() == y.coeffs());
        if !same {
            return Err(Error::Shape("measures live on different supports".into()));
        }
        let mut out = mu.clone();
        for (x, y) in out.density.iter_mut().zip(&nu.density) {
            for (r, s) in x.iter_mut().zip(y) {
                *r = a * *r + b * s;
            }
        }
        Ok(out)
    }

    /// Distance from `z` to the nearest support node.
    pub fn distance_to_support(&self, z: C64) -> f64 {
        self.samples.iter().flat_map(|s| s.points.iter()).map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `Cμ(z) = ∫ dμ(ξ)/(ξ - z)`. Blocks close to `z` are evaluated on a trig-refined
    /// grid; points within one node spacing of the support are rejected.
    pub fn cauchy(&self, z: C64) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for ((curve, s), d) in self.curves.iter().zip(&self.samples).zip(&self.density) {
            let h = s.spacing();
            let dist = s.points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
            if dist <= NEAR_LIMIT * h {
                return Err(Error::Evaluation(format!(
                    "point {z} is within one node spacing ({h:.3e}) of the support"
                )));
            }
            if dist >= FAR_RATIO * h {
                total += trapezoid(&s.points, &s.weights, d, z);
            } else {
                let factor = ((FAR_RATIO * h / dist).ceil() as usize).next_power_of_two().min(MAX_REFINE);
                let fine = CurveSamples::new(curve, d.len() * factor);
                let rho = trig_interpolate(d, d.len() * factor);
                total += trapezoid(&fine.points, &fine.weights, &rho, z);
            }
        }
        Ok(total)
    }

    /// Evaluator for `Cμ`.
    pub fn field(&self) -> CauchyField<'_> {
        CauchyField { measure: self }
    }
}

fn trapezoid(points: &[C64], weights: &[f64], rho: &[C64], z: C64) -> C64 {
    points.iter().zip(weights).zip(rho).map(|((p, w), r)| r * *w / (p - z)).sum()
}

/// Cauchy transform of a [`DensityMeasure`].
#[derive(Debug, Clone, Copy)]
pub struct CauchyField<'a> {
    measure: &'a DensityMeasure,
}

impl CauchyField<'_> {
    pub fn measure(&self) -> &DensityMeasure {
        self.measure
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.measure.cauchy(z)
    }

    /// Relative Cauchy–Riemann residual `|∂f/∂x + i ∂f/∂y| / |∂f/∂x|` by central differences.
    pub fn cauchy_riemann_residual(&self, z: C64, h: f64) -> Result<f64> {
        let fx = (self.eval(z + h)? - self.eval(z - h)?) / (2.0 * h);
        let fy = (self.eval(z + C64::new(0.0, h))? - self.eval(z - C64::new(0.0, h))?) / (2.0 * h);
        let scale = fx.norm().max(f64::MIN_POSITIVE);
        Ok((fx + C64::i() * fy).norm() / scale)
    }
}

/// `Cμ(z) = ∫ dμ/(ξ - z)` with the accuracy safeguards of [`DensityMeasure::cauchy`].
pub fn cauchy_eval(mu: &DensityMeasure, z: C64) -> Result<C64> {
    mu.cauchy(z)
}

/// `μ(E)`; the Cauchy transform behaves like `-μ(E)/z` at infinity.
pub fn mass_at_infinity(mu: &DensityMeasure) -> C64 {
    mu.mass()
}
