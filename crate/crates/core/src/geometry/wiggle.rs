//! Truncations of the graph `x + i x sin(1/x)` and the sets built from it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{tube_boundary, CurveSpec, PlanarDomain, Scene};
use crate::{Error, Result, C64};

/// Polyline nodes per unit of `u = 1/x`. Nodes sit at `u = π + j/WIGGLE_NODES`,
/// so the paths for successive truncations are nested.
pub const WIGGLE_NODES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WiggleVariant {
    /// Graph piece plus the separate segment `[-i, i]`.
    Thm0,
    /// Graph piece joined to the hook `1/π → 1/π - i → -i → 0`.
    Thm1,
}

impl std::str::FromStr for WiggleVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm0" => Ok(WiggleVariant::Thm0),
            "thm1" => Ok(WiggleVariant::Thm1),
            other => Err(Error::InvalidSpec(format!("unknown variant {other:?} (expected thm0 or thm1)"))),
        }
    }
}

impl std::fmt::Display for WiggleVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WiggleVariant::Thm0 => "thm0",
            WiggleVariant::Thm1 => "thm1",
        })
    }
}

/// Polyline through the graph over `1/(π+k) ≤ x ≤ 1/π`, from the tip at
/// `x = 1/(π+k)` to `1/π`.
pub fn wiggle_path(k: usize) -> Vec<C64> {
    let steps = k * WIGGLE_NODES;
    (0..=steps)
        .rev()
        .map(|j| {
            let u = PI + j as f64 / WIGGLE_NODES as f64;
            let x = 1.0 / u;
            C64::new(x, x * u.sin())
        })
        .collect()
}

/// The hook `1/π → 1/π - i → -i → 0` that closes up the graph in the thm1 variant.
pub fn hook_path() -> Vec<C64> {
    vec![C64::new(1.0 / PI, 0.0), C64::new(1.0 / PI, -1.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)]
}

fn polyline_length(path: &[C64]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Smooth `ε`-fattening of the truncated set for `variant` at level `k`.
///
/// `degree` fixes the trigonometric degree of each boundary curve; `None`
/// picks it adaptively.
pub fn wiggle_scene(k: usize, variant: WiggleVariant, eps: f64, degree: Option<usize>) -> Result<Scene> {
    if k == 0 {
        return Err(Error::InvalidSpec("truncation level k must be at least 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidSpec(format!("fattening must be positive, got {eps}")));
    }
    let samples = degree.map(|d| 2 * (d + 1));
    let tip = 1.0 / (PI + k as f64);
    let graph = wiggle_path(k);
    let arclength = polyline_length(&graph);
    let (sigma, width) = (eps / 2.0, eps);

    let curves = match variant {
        WiggleVariant::Thm0 => {
            if tip <= 2.0 * eps {
                return Err(Error::Geometry(format!(
                    "fattening {eps} merges the graph tip at x = {tip:.6} with the segment [-i, i]"
                )));
            }
            let wiggle = tube_boundary(&[graph], width, sigma, samples)?;
            let segment = vec![C64::new(0.0, -1.0), C64::new(0.0, 1.0)];
            let bar = tube_boundary(&[segment], width, sigma, samples)?;
            vec![wiggle, bar]
        }
        WiggleVariant::Thm1 => {
            let mut path = graph;
            path.extend(hook_path().into_iter().skip(1));
            vec![tube_boundary(&[path], width, sigma, samples)?]
        }
    };
    let specs: Vec<CurveSpec> = curves.iter().map(CurveSpec::trig).collect();
    let domain = PlanarDomain::new(curves).map_err(|e| Error::Geometry(format!("fattened components collide: {e}")))?;
    Ok(Scene {
        name: format!("{variant}_k{k}_eps{eps}"),
        domain,
        specs,
        metadata: Default::default(),
    }
    .with_metadata("variant", variant)
    .with_metadata("k", k)
    .with_metadata("eps", eps)
    .with_metadata("truncation", tip)
    .with_metadata("wiggle_arclength", arclength))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_are_nested_and_truncated_exactly() {
        let a = wiggle_path(1);
        let b = wiggle_path(2);
        assert_eq!(a[0].re, 1.0 / (PI + 1.0));
        assert_eq!(&b[b.len() - a.len()..], &a[..]);
        assert!(polyline_length(&b) > polyline_length(&a));
        assert!((a.last().unwrap() - C64::new(1.0 / PI, 0.0)).norm() < 1e-15);
    }
}
