use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Forward/inverse transforms of one fixed length.
pub struct Spectrum {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectrum {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `X_k = Σ x_j e^{-2πijk/n}` in place.
    pub fn forward(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.len);
        self.forward.process(data);
    }

    /// `x_j = Σ X_k e^{2πijk/n}` in place, unnormalized.
    pub fn inverse(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.len);
        self.inverse.process(data);
    }
}

/// Signed frequency of FFT bin `k` for length `n` (Nyquist bin reported as `n/2`).
pub(crate) fn frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Derivative with respect to `t ∈ [0, 2π)` of periodic samples taken at `t_j = 2πj/n`.
pub fn spectral_derivative(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let plan = Spectrum::new(n);
    let mut data = samples.to_vec();
    plan.forward(&mut data);
    for (k, x) in data.iter_mut().enumerate() {
        let freq = frequency(k, n);
        if n.is_multiple_of(2) && k == n / 2 {
            *x = C64::new(0.0, 0.0);
        } else {
            *x *= C64::new(0.0, freq as f64);
        }
    }
    plan.inverse(&mut data);
    let scale = 1.0 / n as f64;
    data.iter().map(|x| x * scale).collect()
}

/// Coefficient map used by both interpolation and its transpose: fine bin for coarse bin `k`.
/// The Nyquist bin of an even coarse length is split evenly between `±n/2`.
fn spread(k: usize, coarse: usize, fine: usize) -> [(usize, f64); 2] {
    if coarse.is_multiple_of(2) && k == coarse / 2 {
        [(coarse / 2, 0.5), (fine - coarse / 2, 0.5)]
    } else if k < coarse / 2 + coarse % 2 {
        [(k, 1.0), (0, 0.0)]
    } else {
        [(fine - (coarse - k), 1.0), (0, 0.0)]
    }
}

/// Trigonometric interpolation of `coarse` periodic samples onto `fine` equispaced points.
pub fn trig_interpolate(samples: &[C64], fine: usize) -> Vec<C64> {
    let n = samples.len();
    assert!(fine >= n, "trig_interpolate only refines");
    let mut spec = samples.to_vec();
    Spectrum::new(n).forward(&mut spec);
    let mut out = vec![C64::new(0.0, 0.0); fine];
    for (k, x) in spec.iter().enumerate() {
        for (bin, w) in spread(k, n, fine) {
            if w != 0.0 {
                out[bin] += x * w;
            }
        }
    }
    Spectrum::new(fine).inverse(&mut out);
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|x| *x *= scale);
    out
}

/// Trigonometric interpolant of periodic samples (taken at `t_j = 2πj/n`) evaluated at arbitrary parameters.
pub fn trig_evaluate(samples: &[C64], params: &[f64]) -> Vec<C64> {
    let n = samples.len();
    let mut spec = samples.to_vec();
    Spectrum::new(n).forward(&mut spec);
    let scale = 1.0 / n as f64;
    params
        .iter()
        .map(|&t| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, x) in spec.iter().enumerate() {
                if n.is_multiple_of(2) && k == n / 2 {
                    acc += x * (k as f64 * t).cos();
                } else {
                    acc += x * C64::from_polar(1.0, frequency(k, n) as f64 * t);
                }
            }
            acc * scale
        })
        .collect()
}

/// Transpose of [`trig_interpolate`]: maps a fine-grid row vector `r` to the coarse
/// vector `P^T r`, so that `r · (P x) = (P^T r) · x` for every coarse `x`.
pub fn trig_interpolate_transpose(row: &[C64], coarse: usize, plans: (&Spectrum, &Spectrum)) -> Vec<C64> {
    let fine = row.len();
    let (coarse_plan, fine_plan) = plans;
    let mut spec = row.to_vec();
    // P = (1/n) F_f^{-1} S F_c with F symmetric, so P^T = (1/n) F_c S^T F_f^{-1}.
    fine_plan.inverse(&mut spec);
    let mut folded = vec![C64::new(0.0, 0.0); coarse];
    for (k, x) in folded.iter_mut().enumerate() {
        for (bin, w) in spread(k, coarse, fine) {
            if w != 0.0 {
                *x += spec[bin] * w;
            }
        }
    }
    coarse_plan.forward(&mut folded);
    let scale = 1.0 / coarse as f64;
    folded.iter_mut().for_each(|x| *x *= scale);
    folded
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(n: usize, t_of: impl Fn(f64) -> C64) -> Vec<C64> {
        (0..n)
            .map(|j| t_of(2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect()
    }

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let f = |t: f64| C64::new(0.0, 2.0 * t).exp() + C64::new(0.5, 0.0) * C64::new(0.0, -3.0 * t).exp();
        let df = |t: f64| {
            C64::new(0.0, 2.0) * C64::new(0.0, 2.0 * t).exp()
                + C64::new(0.0, -1.5) * C64::new(0.0, -3.0 * t).exp()
        };
        let d = spectral_derivative(&wave(16, f));
        for (a, b) in d.iter().zip(wave(16, df)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_band_limited_data() {
        let f = |t: f64| C64::new(t.cos(), (2.0 * t).sin()) + C64::new(0.0, -4.0 * t).exp();
        for n in [11usize, 12] {
            let fine = trig_interpolate(&wave(n, f), 40);
            for (a, b) in fine.iter().zip(wave(40, f)) {
                assert!((a - b).norm() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn transpose_matches_dense_transpose() {
        for (n, m) in [(8usize, 24usize), (7, 21)] {
            let cp = Spectrum::new(n);
            let fp = Spectrum::new(m);
            let row: Vec<C64> = (0..m).map(|j| C64::new((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
            let got = trig_interpolate_transpose(&row, n, (&cp, &fp));
            for j in 0..n {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                let col = trig_interpolate(&e, m);
                let want: C64 = row.iter().zip(&col).map(|(r, c)| r * c).sum();
                assert!((got[j] - want).norm() < 1e-12);
            }
        }
    }
}
