/// One Richardson step for a quantity sampled at step sizes `h` and `h/ratio`
/// with leading error `O(h^order)`.
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let factor = ratio.powf(order);
    (factor * fine - coarse) / (factor - 1.0)
}

/// Aitken Δ² limit of three consecutive terms; falls back to the last term when
/// the second difference vanishes.
pub fn aitken_limit(a: f64, b: f64, c: f64) -> f64 {
    let denom = (c - b) - (b - a);
    if denom.abs() <= 1e-300 || !denom.is_finite() {
        return c;
    }
    c - (c - b) * (c - b) / denom
}

/// Least-squares line `y = slope x + intercept`; also returns the RMS residual.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_linear_error() {
        let f = |h: f64| 3.0 + 2.0 * h;
        assert!((richardson(f(0.2), f(0.1), 2.0, 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn aitken_on_geometric_sequence() {
        let s = |k: i32| 1.0 + 0.5f64.powi(k);
        assert!((aitken_limit(s(1), s(2), s(3)) - 1.0).abs() < 1e-14);
    }
}
