use crate::C64;

/// Radical inverse of `index` in `base` (van der Corput).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Area-uniform low-discrepancy points in the open unit disk from the base-2/3 Halton pair.
/// Index 1 is the first point, so the sequence never starts at the origin twice.
pub fn halton_disk(count: usize) -> Vec<C64> {
    (1..=count as u64)
        .map(|i| {
            let r = halton(i, 2).sqrt();
            let theta = 2.0 * std::f64::consts::PI * halton(i, 3);
            C64::from_polar(r, theta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((halton(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn disk_points_are_inside() {
        assert!(halton_disk(200).iter().all(|z| z.norm() < 1.0));
    }
}
