use super::table::{SweepResult, SweepRow};
use super::SZEGO_NODES;
use crate::conformal::gamma;
use crate::koebe::CircleDomain;
use crate::numeric::halton_disk;
use crate::{Error, Result, C64};

pub const MAX_COUNTEREXAMPLE_K: usize = 20;
const START_RADIUS: f64 = 0.45;
/// Largest radius as a fraction of the smallest center distance.
const SEPARATION: f64 = 0.4;
const MAX_HALVINGS: usize = 60;
const COVERING_STEP: f64 = 1.0 / 256.0;

/// Domains bounded by `k` small disks at the first `k` low-discrepancy points
/// of the unit disk, radii halved until `γ < 1/2`.
pub fn run_counterexample(k_max: usize) -> Result<SweepResult> {
    if k_max == 0 || k_max > MAX_COUNTEREXAMPLE_K {
        return Err(Error::InvalidSpec(format!("k_max must be in 1..={MAX_COUNTEREXAMPLE_K}, got {k_max}")));
    }
    let mut out = SweepResult::new("counterexample", "k", &["radius", "halvings", "covering_radius"]);
    out.meta("start_radius", START_RADIUS);
    out.meta("covering_grid_step", COVERING_STEP);
    for k in 1..=k_max {
        out.rows.push(counterexample_row(k).unwrap_or_else(|e| SweepRow::failed(k as f64, e)));
    }
    Ok(out)
}

fn counterexample_row(k: usize) -> Result<SweepRow> {
    let centers = halton_disk(k);
    let mut closest = f64::INFINITY;
    for i in 0..k {
        for j in i + 1..k {
            closest = closest.min((centers[i] - centers[j]).norm());
        }
    }
    let mut radius = START_RADIUS.min(SEPARATION * closest);
    for halvings in 0..=MAX_HALVINGS {
        let disks = CircleDomain::new(centers.clone(), vec![radius; k])?;
        let g = gamma(&disks.to_domain()?, SZEGO_NODES)?.value;
        if g < 0.5 {
            return Ok(SweepRow { gamma_szego: Some(g), ..SweepRow::new(k as f64) }
                .with("radius", radius)
                .with("halvings", halvings as f64)
                .with("covering_radius", covering_radius(&centers)));
        }
        radius /= 2.0;
    }
    Err(Error::NonConvergence { iterations: MAX_HALVINGS, residual: radius })
}

/// Upper bound for `sup_{|z| ≤ 1} dist(z, centers)`: the maximum over a square
/// grid of the closed disk and its boundary circle, plus the grid half-diagonal.
pub fn covering_radius(centers: &[C64]) -> f64 {
    let nearest = |z: C64| centers.iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min);
    let m = (1.0 / COVERING_STEP) as i64;
    let mut worst: f64 = 0.0;
    for i in -m..=m {
        for j in -m..=m {
            let z = C64::new(i as f64, j as f64) * COVERING_STEP;
            if z.norm() <= 1.0 {
                worst = worst.max(nearest(z));
            }
        }
    }
    let ring = (2.0 * std::f64::consts::PI / COVERING_STEP) as usize;
    for t in 0..ring {
        worst = worst.max(nearest(C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / ring as f64)));
    }
    worst + COVERING_STEP / std::f64::consts::SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_disk_capacity_is_its_radius() {
        let row = counterexample_row(1).unwrap();
        let (g, r) = (row.gamma_szego.unwrap(), row.get("radius").unwrap());
        assert!((g - r).abs() < 1e-10 && g < 0.5);
    }

    #[test]
    fn covering_radius_of_center_alone() {
        let r = covering_radius(&[C64::new(0.0, 0.0)]);
        assert!((1.0..1.0 + COVERING_STEP).contains(&r), "{r}");
    }

    #[test]
    fn rejects_out_of_range_k() {
        assert!(run_counterexample(0).is_err());
        assert!(run_counterexample(MAX_COUNTEREXAMPLE_K + 1).is_err());
    }
}
