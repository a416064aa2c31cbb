use std::f64::consts::PI;

use rayon::prelude::*;

use super::density::CurveSamples;
use crate::geometry::ParamCurve;
use crate::numeric::{spectral_derivative, trig_interpolate, trig_interpolate_transpose, Spectrum};
use crate::C64;

/// Which one-sided limit of `Cμ` on a positively oriented support curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Limit {
    /// From the unbounded side (right of the direction of travel).
    Outer,
    /// From the enclosed side.
    Inner,
}

/// One-sided boundary values of `Cμ` at the nodes of an upsampled grid, for
/// densities given at coarse nodes and extended by trigonometric interpolation.
///
/// With `g = ρ |dξ|/dξ`, the outer limit at `ζ_i` is `∫ (g(ξ) - g(ζ_i)) dξ/(ξ - ζ_i)`
/// over the own curve plus the plain integrals over the others; the inner limit adds `2πi g(ζ_i)`.
pub(crate) struct BoundaryLimits {
    coarse: Vec<usize>,
    fine: Vec<CurveSamples>,
    offsets: Vec<usize>,
    plans: Vec<(Spectrum, Spectrum)>,
}

impl BoundaryLimits {
    pub fn new(curves: &[ParamCurve], coarse: &[usize], factor: usize) -> Self {
        let fine: Vec<CurveSamples> = curves.iter().zip(coarse).map(|(c, n)| CurveSamples::new(c, n * factor)).collect();
        let mut offsets = vec![0];
        for f in &fine {
            offsets.push(offsets.last().unwrap() + f.len());
        }
        let plans = coarse.iter().map(|n| (Spectrum::new(*n), Spectrum::new(n * factor))).collect();
        Self { coarse: coarse.to_vec(), fine, offsets, plans }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    #[cfg(test)]
    pub fn fine(&self) -> &[CurveSamples] {
        &self.fine
    }

    /// First global fine node of curve `b`.
    pub fn offset(&self, b: usize) -> usize {
        self.offsets[b]
    }

    /// Curve index and local node of global fine node `i`.
    pub fn locate(&self, i: usize) -> (usize, usize) {
        let b = self.offsets.partition_point(|&o| o <= i) - 1;
        (b, i - self.offsets[b])
    }

    fn upsample(&self, rho: &[Vec<C64>]) -> Vec<Vec<C64>> {
        rho.iter()
            .zip(&self.fine)
            .map(|(r, f)| trig_interpolate(r, f.len()).iter().zip(&f.tangents).map(|(v, t)| v / t).collect())
            .collect()
    }

    /// Outer and inner limits at every fine node.
    pub fn values(&self, rho: &[Vec<C64>]) -> (Vec<C64>, Vec<C64>) {
        let g = self.upsample(rho);
        let dg: Vec<Vec<C64>> = g.iter().map(|b| spectral_derivative(b)).collect();
        let outer: Vec<C64> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let (b, k) = self.locate(i);
                let zeta = self.fine[b].points[k];
                let mut acc = C64::new(0.0, 0.0);
                let mut own = C64::new(0.0, 0.0);
                for (c, (s, gc)) in self.fine.iter().zip(&g).enumerate() {
                    for (j, ((p, d), gj)) in s.points.iter().zip(&s.dz).zip(gc).enumerate() {
                        if c == b && j == k {
                            continue;
                        }
                        let e = d / (p - zeta);
                        acc += gj * e;
                        if c == b {
                            own += e;
                        }
                    }
                }
                let h = 2.0 * PI / self.fine[b].len() as f64;
                acc - g[b][k] * own + dg[b][k] * h
            })
            .collect();
        let inner = outer
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (b, k) = self.locate(i);
                v + C64::new(0.0, 2.0 * PI) * g[b][k]
            })
            .collect();
        (outer, inner)
    }

    /// Coefficients `r` with `C(ζ_i) = Σ r_bk ρ_bk` over the coarse densities.
    pub fn row(&self, i: usize, side: Limit) -> Vec<Vec<C64>> {
        let (b, k) = self.locate(i);
        let zeta = self.fine[b].points[k];
        let n = self.fine[b].len();
        let mut rows: Vec<Vec<C64>> = self
            .fine
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.points
                    .iter()
                    .zip(&s.dz)
                    .enumerate()
                    .map(|(j, (p, d))| if c == b && j == k { C64::new(0.0, 0.0) } else { d / (p - zeta) })
                    .collect()
            })
            .collect();
        let own: C64 = rows[b].iter().sum();
        let h = 2.0 * PI / n as f64;
        for (j, v) in rows[b].iter_mut().enumerate() {
            if j != k {
                // Row of the spectral differentiation matrix on an even grid.
                let m = j as i64 - k as i64;
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let cot = 1.0 / (PI * (k as f64 - j as f64) / n as f64).tan();
                *v += 0.5 * sign * cot * h;
            }
        }
        rows[b][k] = -own + if side == Limit::Inner { C64::new(0.0, 2.0 * PI) } else { C64::new(0.0, 0.0) };
        rows.iter()
            .zip(&self.fine)
            .zip(&self.plans)
            .zip(&self.coarse)
            .map(|(((r, s), plans), &nc)| {
                let scaled: Vec<C64> = r.iter().zip(&s.tangents).map(|(v, t)| v / t).collect();
                trig_interpolate_transpose(&scaled, nc, (&plans.0, &plans.1))
            })
            .collect()
    }

    /// Coefficients of `μ(E) = ∫ ρ |dξ|` on the fine grid.
    pub fn mass_row(&self) -> Vec<Vec<C64>> {
        self.fine
            .iter()
            .zip(&self.plans)
            .zip(&self.coarse)
            .map(|((s, plans), &nc)| {
                let w: Vec<C64> = s.weights.iter().map(|w| C64::new(*w, 0.0)).collect();
                trig_interpolate_transpose(&w, nc, (&plans.0, &plans.1))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves() -> Vec<ParamCurve> {
        vec![
            ParamCurve::ellipse(C64::new(-2.0, 0.0), 1.0, 0.6, 0.3).unwrap(),
            ParamCurve::circle(C64::new(2.0, 0.5), 0.7).unwrap(),
        ]
    }

    #[test]
    fn limits_of_constant_density_on_circle() {
        // g = 1 on the unit circle: Cμ is 2πi inside and 0 outside.
        let c = vec![ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap()];
        let lim = BoundaryLimits::new(&c, &[32], 2);
        let s = CurveSamples::new(&c[0], 32);
        let rho = vec![s.tangents.clone()];
        let (outer, inner) = lim.values(&rho);
        assert!(outer.iter().all(|v| v.norm() < 1e-12));
        assert!(inner.iter().all(|v| (v - C64::new(0.0, 2.0 * PI)).norm() < 1e-12));
    }

    #[test]
    fn rows_reproduce_values() {
        let c = curves();
        let lim = BoundaryLimits::new(&c, &[24, 16], 2);
        let rho: Vec<Vec<C64>> = [24, 16]
            .iter()
            .map(|&n| (0..n).map(|j| C64::new((j as f64 * 0.7).sin(), (j as f64 * 0.3).cos())).collect())
            .collect();
        let (outer, inner) = lim.values(&rho);
        for i in [0, 5, 47, 48, 60] {
            for (side, want) in [(Limit::Outer, outer[i]), (Limit::Inner, inner[i])] {
                let r = lim.row(i, side);
                let got: C64 = r.iter().zip(&rho).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y)).sum();
                assert!((got - want).norm() < 1e-10 * (1.0 + want.norm()), "{i} {side:?} {got} {want}");
            }
        }
        let m: C64 = lim.mass_row().iter().zip(&rho).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y)).sum();
        let fine: C64 = lim.upsample(&rho).iter().zip(lim.fine()).flat_map(|(g, s)| g.iter().zip(&s.dz).map(|(g, d)| g * d)).sum();
        assert!((m - fine).norm() < 1e-12);
    }

    #[test]
    fn limits_of_simple_pole_density() {
        // g = 1/(ξ - a) with a enclosed: Cμ = 2πi/(a - z) outside and 0 inside.
        let c = curves();
        let a = C64::new(-2.1, 0.1);
        let n = 160;
        let lim = BoundaryLimits::new(&c[..1], &[n], 2);
        let s = CurveSamples::new(&c[0], n);
        let rho = vec![s.points.iter().zip(&s.tangents).map(|(p, t)| t / (p - a)).collect::<Vec<_>>()];
        let (outer, inner) = lim.values(&rho);
        let f = &lim.fine()[0];
        for k in 0..f.len() {
            let want = C64::new(0.0, 2.0 * PI) / (a - f.points[k]);
            assert!((outer[k] - want).norm() < 1e-9, "{k} {} {want}", outer[k]);
            assert!(inner[k].norm() < 1e-9);
        }
    }
}
