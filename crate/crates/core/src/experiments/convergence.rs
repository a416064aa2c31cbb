use serde::{Deserialize, Serialize};

use super::table::{SweepResult, SweepRow};
use super::tangency::tangent_pair;
use super::{check_ladder, SZEGO_NODES};
use crate::conformal::{ahlfors_solve, AhlforsFunction};
use crate::geometry::{ParamCurve, PlanarDomain};
use crate::koebe::{koebe_eval, koebe_uniformize, CircleDomain, Direction, KoebeMap};
use crate::{Error, Result, C64};

const KOEBE_TOL: f64 = 1e-10;
const KOEBE_MAX_ITER: usize = 50;
/// Comparison grid: spacing and half-extents of the box, and clearance from every boundary.
const GRID_STEP: f64 = 0.25;
const GRID_HALF: (f64, f64) = (5.0, 3.0);
const GRID_MARGIN: f64 = 0.25;

/// Two-component families indexed by `δ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KoebeFamily {
    /// Ellipses with semi-axes `1 + δ` and `1` centered at `±2`, tending to two unit disks.
    Elongated,
    /// Unit disks centered at `±(1 + δ/2)`; every member is already a circle domain.
    Tangent,
}

impl std::str::FromStr for KoebeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elongated" => Ok(KoebeFamily::Elongated),
            "tangent" => Ok(KoebeFamily::Tangent),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?} (expected elongated or tangent)"))),
        }
    }
}

impl std::fmt::Display for KoebeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KoebeFamily::Elongated => "elongated",
            KoebeFamily::Tangent => "tangent",
        })
    }
}

impl KoebeFamily {
    pub fn member(&self, delta: f64) -> Result<PlanarDomain> {
        match self {
            KoebeFamily::Elongated => PlanarDomain::new(vec![
                ParamCurve::ellipse(C64::new(-2.0, 0.0), 1.0 + delta, 1.0, 0.0)?,
                ParamCurve::ellipse(C64::new(2.0, 0.0), 1.0 + delta, 1.0, 0.0)?,
            ]),
            KoebeFamily::Tangent => tangent_pair(1.0, delta)?.to_domain(),
        }
    }
}

struct Member {
    map: KoebeMap,
    circles: CircleDomain,
    ahlfors: AhlforsFunction,
}

/// Distances between the Koebe maps, their inverses and the Ahlfors functions
/// of each family member and those of the smallest-`δ` member, on a fixed grid.
pub fn run_koebe_convergence(family: KoebeFamily, ladder: &[f64]) -> Result<SweepResult> {
    check_ladder(ladder, "delta")?;
    let mut out = SweepResult::new(
        "koebe-convergence",
        "delta",
        &["sup_forward", "sup_inverse", "sup_ahlfors", "iterations", "circularity_residual"],
    );
    out.meta("family", family);
    out.meta("reference_delta", ladder[ladder.len() - 1]);
    out.meta("koebe_tol", KOEBE_TOL);
    out.meta("grid_step", GRID_STEP);
    let domains = ladder.iter().map(|&d| family.member(d)).collect::<Result<Vec<_>>>()?;
    let members: Vec<Result<Member>> = domains
        .iter()
        .map(|d| {
            let (map, circles) = koebe_uniformize(d, KOEBE_TOL, KOEBE_MAX_ITER)?;
            let ahlfors = ahlfors_solve(d, SZEGO_NODES)?;
            Ok(Member { map, circles, ahlfors })
        })
        .collect();
    let reference = match members.last().unwrap() {
        Ok(m) => m,
        Err(e) => {
            out.rows = ladder.iter().map(|&d| SweepRow::failed(d, format!("reference member: {e}"))).collect();
            return Ok(out);
        }
    };
    let points = grid(|z| domains.iter().all(|d| d.contains(z) && d.distance_to_boundary(z) >= GRID_MARGIN));
    let ok_members: Vec<&Member> = members.iter().filter_map(|m| m.as_ref().ok()).collect();
    let image_grid = grid(|w| ok_members.iter().all(|m| circle_clearance(&m.circles, w) >= GRID_MARGIN));
    out.meta("grid_points", points.len());
    out.meta("image_grid_points", image_grid.len());
    for (&delta, member) in ladder.iter().zip(&members) {
        out.rows.push(match member {
            Ok(m) => compare(delta, m, reference, &points, &image_grid).unwrap_or_else(|e| SweepRow::failed(delta, e)),
            Err(e) => SweepRow::failed(delta, e),
        });
    }
    Ok(out)
}

fn compare(delta: f64, m: &Member, reference: &Member, points: &[C64], image_grid: &[C64]) -> Result<SweepRow> {
    let sup = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let fwd = sup(&koebe_eval(&m.map, points, Direction::Forward)?, &koebe_eval(&reference.map, points, Direction::Forward)?);
    let inv = sup(&koebe_eval(&m.map, image_grid, Direction::Inverse)?, &koebe_eval(&reference.map, image_grid, Direction::Inverse)?);
    let fa: Vec<C64> = points.iter().map(|&z| m.ahlfors.eval(z)).collect();
    let fr: Vec<C64> = points.iter().map(|&z| reference.ahlfors.eval(z)).collect();
    Ok(SweepRow { gamma_szego: Some(m.ahlfors.gamma()), ..SweepRow::new(delta) }
        .with("sup_forward", fwd)
        .with("sup_inverse", inv)
        .with("sup_ahlfors", sup(&fa, &fr))
        .with("iterations", m.map.iterations as f64)
        .with("circularity_residual", m.map.residual))
}

fn grid(keep: impl Fn(C64) -> bool) -> Vec<C64> {
    let (nx, ny) = ((GRID_HALF.0 / GRID_STEP) as i64, (GRID_HALF.1 / GRID_STEP) as i64);
    (-ny..=ny)
        .flat_map(|j| (-nx..=nx).map(move |i| C64::new(i as f64 * GRID_STEP, j as f64 * GRID_STEP)))
        .filter(|&z| keep(z))
        .collect()
}

fn circle_clearance(c: &CircleDomain, w: C64) -> f64 {
    c.centers.iter().zip(&c.radii).map(|(z, r)| (w - z).norm() - r).fold(f64::INFINITY, f64::min)
}
