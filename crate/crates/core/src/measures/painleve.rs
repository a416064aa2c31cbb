use std::f64::consts::PI;

use rayon::prelude::*;

use super::density::{CurveSamples, DensityMeasure};
use crate::conformal::AhlforsFunction;
use crate::geometry::{offset_cycle, Cycle, Orientation, ParamCurve, PlanarDomain};
use crate::numeric::Spectrum;
use crate::{Error, Result, C64};

const START_NODES: usize = 256;
const MAX_NODES: usize = 1 << 16;
/// Relative size of the top half of the spectrum at which a density counts as resolved.
const SPECTRAL_TAIL: f64 = 1e-13;

/// `dμ = -(1/2πi) f(ζ) dζ` on the counterclockwise curves of `cycle`, so that
/// `Cμ = f` outside the cycle and `μ(E) = -f'(∞)`.
pub fn painleve_measure(f: &AhlforsFunction, cycle: &Cycle) -> Result<DensityMeasure> {
    if cycle.curves.is_empty() {
        return Err(Error::Geometry("empty cycle".into()));
    }
    for (i, c) in f.domain().curves().iter().enumerate() {
        let z = c.point(0.0);
        if !cycle.curves.iter().any(|g| g.encloses(z)) {
            return Err(Error::Geometry(format!("cycle does not surround boundary curve {i}")));
        }
    }
    let curves: Vec<ParamCurve> = cycle.curves.iter().map(|c| c.oriented(Orientation::Positive)).collect();
    let blocks = curves.iter().map(|c| cauchy_density(f, c)).collect::<Result<Vec<_>>>()?;
    DensityMeasure::new(curves, blocks)
}

fn cauchy_density(f: &AhlforsFunction, curve: &ParamCurve) -> Result<Vec<C64>> {
    let mut n = (4 * curve.coeffs().len()).next_power_of_two().max(START_NODES);
    loop {
        let s = CurveSamples::new(curve, n);
        let rho = s
            .points
            .par_iter()
            .zip(&s.tangents)
            .map(|(z, t)| {
                f.eval_checked(*z)
                    .map(|v| -v * t / C64::new(0.0, 2.0 * PI))
                    .ok_or_else(|| Error::Geometry(format!("cycle enters the compact set at {z}")))
            })
            .collect::<Result<Vec<C64>>>()?;
        if n >= MAX_NODES || resolved(&rho) {
            return Ok(rho);
        }
        n *= 2;
    }
}

fn resolved(samples: &[C64]) -> bool {
    let n = samples.len();
    let mut spec = samples.to_vec();
    Spectrum::new(n).forward(&mut spec);
    let top = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail = spec[n / 4..3 * n / 4].iter().map(|c| c.norm()).fold(0.0, f64::max);
    tail <= SPECTRAL_TAIL * top
}

/// `dμ = (1/2πi)(f₊ - f₋) dζ` on `curve`, from traces sampled at its equispaced nodes.
pub fn jump_measure(plus: &[C64], minus: &[C64], curve: &ParamCurve) -> Result<DensityMeasure> {
    if plus.len() != minus.len() {
        return Err(Error::Shape(format!("{} plus samples against {} minus samples", plus.len(), minus.len())));
    }
    let s = CurveSamples::new(curve, plus.len());
    let rho = plus.iter().zip(minus).zip(&s.tangents).map(|((p, m), t)| (p - m) * t / C64::new(0.0, 2.0 * PI)).collect();
    DensityMeasure::new(vec![curve.clone()], vec![rho])
}

/// Shortest offset cycle over a decreasing ladder of offsets.
pub fn painleve_length_upper(domain: &PlanarDomain, ladder: &[f64]) -> Result<f64> {
    if ladder.is_empty() {
        return Err(Error::InvalidSpec("empty offset ladder".into()));
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidSpec("offset ladder must be strictly decreasing".into()));
    }
    let mut best = f64::INFINITY;
    for &eps in ladder {
        best = best.min(offset_cycle(domain, eps)?.total_length);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ahlfors_solve;
    use crate::geometry::{wiggle_scene, WiggleVariant};

    fn disk() -> PlanarDomain {
        PlanarDomain::new(vec![ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn disk_measure_reproduces_inverse() {
        let f = ahlfors_solve(&disk(), 64).unwrap();
        let cycle = Cycle::new(vec![ParamCurve::circle(C64::new(0.0, 0.0), 2.0).unwrap()]);
        let mu = painleve_measure(&f, &cycle).unwrap();
        for k in 0..12 {
            let z = C64::from_polar(5.0, 0.5 * k as f64);
            assert!((mu.cauchy(z).unwrap() - 1.0 / z).norm() < 1e-8);
        }
        assert!((mu.mass() + 1.0).norm() < 1e-8);
        assert!(mu.total_variation() <= 2.0 + 1e-8);
    }

    #[test]
    fn two_disk_measure_matches_ahlfors_function() {
        let d = PlanarDomain::new(vec![
            ParamCurve::circle(C64::new(-2.0, 0.0), 1.0).unwrap(),
            ParamCurve::circle(C64::new(2.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        let f = ahlfors_solve(&d, 64).unwrap();
        let mu = painleve_measure(&f, &offset_cycle(&d, 0.1).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            for j in 0..10 {
                let z = C64::new(-6.0 + 0.6 * i as f64, -3.0 + 0.6 * j as f64);
                if d.distance_to_boundary(z) > 0.5 && d.contains(z) {
                    worst = worst.max((mu.cauchy(z).unwrap() - f.eval(z)).norm());
                }
            }
        }
        assert!(worst < 1e-6, "{worst}");
        assert!(mu.total_variation() <= mu.curves().iter().map(ParamCurve::length).sum::<f64>() / (2.0 * PI) + 1e-8);
    }

    #[test]
    fn cycle_must_surround_the_set() {
        let f = ahlfors_solve(&disk(), 64).unwrap();
        let off = Cycle::new(vec![ParamCurve::circle(C64::new(5.0, 0.0), 1.0).unwrap()]);
        assert!(matches!(painleve_measure(&f, &off), Err(Error::Geometry(_))));
    }

    #[test]
    fn jump_measures() {
        let c = ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap();
        let v = vec![C64::new(0.3, 0.1); 64];
        let zero = jump_measure(&v, &v, &c).unwrap();
        assert_eq!(zero.total_variation(), 0.0);
        let plus: Vec<C64> = (0..64).map(|j| C64::from_polar(1.0, 0.1 * j as f64)).collect();
        let minus: Vec<C64> = plus.iter().map(|p| -p).collect();
        let mu = jump_measure(&plus, &minus, &c).unwrap();
        assert!(mu.total_variation() <= c.length() / PI + 1e-12);
        assert!(matches!(jump_measure(&plus, &minus[..10], &c), Err(Error::Shape(_))));
    }

    #[test]
    fn offset_lengths() {
        let l = painleve_length_upper(&disk(), &[0.1, 0.05, 0.01]).unwrap();
        assert!(l > 2.0 * PI && l <= 2.0 * PI * 1.01, "{l}");
        let two = PlanarDomain::new(vec![
            ParamCurve::circle(C64::new(-3.0, 0.0), 1.0).unwrap(),
            ParamCurve::circle(C64::new(3.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        assert!(painleve_length_upper(&two, &[0.1, 0.01]).unwrap() <= 4.0 * PI * 1.01);
        let thm1 = |k| wiggle_scene(k, WiggleVariant::Thm1, 0.02, None).unwrap().domain;
        let (a, b) = (painleve_length_upper(&thm1(1), &[5e-4, 2e-4]).unwrap(), painleve_length_upper(&thm1(3), &[5e-4, 2e-4]).unwrap());
        assert!(a.is_finite() && b > a);
        assert!(matches!(painleve_length_upper(&disk(), &[0.01, 0.1]), Err(Error::InvalidSpec(_))));
    }
}
