use std::f64::consts::PI;

use super::table::{SweepResult, SweepRow};
use super::{check_ladder, SZEGO_NODES};
use crate::conformal::{ahlfors_solve, gamma, trace_samples};
use crate::geometry::{hook_path, polyline_distance, wiggle_path, wiggle_scene, Orientation, PlanarDomain, WiggleVariant};
use crate::measures::{gamma_c_lower, jump_measure, DEFAULT_ANGLES, DEFAULT_COLLOC};
use crate::numeric::{least_squares_line, richardson};
use crate::{Error, Result, C64};

pub const MAX_WIGGLE_K: usize = 12;
/// Support nodes for the `γ_c` program are chosen so that their spacing is at most this many fattening widths.
const LP_SPACING_PER_EPS: f64 = 2.0;
const MIN_LP_NODES: usize = 32;

/// `γ` and the certified `γ_c` lower bound of the fattened truncations for
/// `k = 1..=k_max` and every fattening in the ladder, with an `ε → 0` column.
pub fn run_paper_e(variant: WiggleVariant, k_max: usize, eps_ladder: &[f64]) -> Result<SweepResult> {
    if k_max == 0 || k_max > MAX_WIGGLE_K {
        return Err(Error::InvalidSpec(format!("k_max must be in 1..={MAX_WIGGLE_K}, got {k_max}")));
    }
    check_ladder(eps_ladder, "eps")?;
    let mut out = SweepResult::new("paper-e", "k", &["eps", "ratio", "certification", "support_nodes", "gamma_eps0"]);
    out.meta("variant", variant);
    out.meta("szego_start_nodes", SZEGO_NODES);
    out.meta("colloc", DEFAULT_COLLOC);
    out.meta("angles", DEFAULT_ANGLES);
    for k in 1..=k_max {
        let first = out.rows.len();
        for &eps in eps_ladder {
            out.rows.push(paper_row(variant, k, eps).unwrap_or_else(|e| SweepRow::failed(k as f64, e).with("eps", eps)));
        }
        let ok: Vec<usize> = (first..out.rows.len()).filter(|&i| out.rows[i].error.is_none()).collect();
        if let [.., a, b] = ok.as_slice() {
            let (ra, rb) = (&out.rows[*a], &out.rows[*b]);
            let ratio = ra.get("eps").unwrap() / rb.get("eps").unwrap();
            let limit = richardson(ra.gamma_szego.unwrap(), rb.gamma_szego.unwrap(), ratio, 1.0);
            out.rows[*b].set("gamma_eps0", limit);
        }
    }
    Ok(out)
}

/// Support nodes per curve for the `γ_c` program on an `eps`-fattened set.
pub fn lp_support_nodes(domain: &PlanarDomain, eps: f64) -> usize {
    let longest = domain.curves().iter().map(|c| c.length()).fold(0.0, f64::max);
    ((longest / (LP_SPACING_PER_EPS * eps)).ceil() as usize).next_power_of_two().max(MIN_LP_NODES)
}

fn paper_row(variant: WiggleVariant, k: usize, eps: f64) -> Result<SweepRow> {
    let scene = wiggle_scene(k, variant, eps, None)?;
    let g = gamma(&scene.domain, SZEGO_NODES)?;
    let nodes = lp_support_nodes(&scene.domain, eps);
    let c = gamma_c_lower(&scene.domain, nodes, DEFAULT_COLLOC, DEFAULT_ANGLES)?;
    Ok(SweepRow { gamma_szego: Some(g.value), gamma_c_lp: Some(c.value), ..SweepRow::new(k as f64) }
        .with("eps", eps)
        .with("ratio", c.value / g.value)
        .with("certification", c.certification)
        .with("support_nodes", nodes as f64))
}

/// Total variation `V_k` of the boundary-jump measure over the wiggle part of
/// the thm1 truncations. The bounded side carries `f ≡ 0`, so the jump is the
/// exterior trace alone, extrapolated to the boundary from the offsets in `delta_ladder`.
pub fn run_jump_growth(k_max: usize, eps: f64, delta_ladder: &[f64]) -> Result<SweepResult> {
    if k_max == 0 || k_max > MAX_WIGGLE_K {
        return Err(Error::InvalidSpec(format!("k_max must be in 1..={MAX_WIGGLE_K}, got {k_max}")));
    }
    check_ladder(delta_ladder, "delta")?;
    let mut out = SweepResult::new(
        "jump-growth",
        "k",
        &["variation", "wiggle_boundary_length", "min_modulus", "lower_bound", "graph_arclength", "trace_fallbacks", "trace_mismatch"],
    );
    out.meta("eps", eps);
    out.meta("delta_ladder", delta_ladder.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"));
    for k in 1..=k_max {
        out.rows.push(jump_row(k, eps, delta_ladder).unwrap_or_else(|e| SweepRow::failed(k as f64, e)));
    }
    let (ks, vs): (Vec<f64>, Vec<f64>) = out.ok_rows().map(|r| (r.parameter.ln(), r.get("variation").unwrap())).unzip();
    if ks.len() >= 2 {
        let (slope, intercept, rms) = least_squares_line(&ks, &vs);
        out.meta("log_slope", slope);
        out.meta("log_intercept", intercept);
        out.meta("log_fit_rms", rms);
    }
    Ok(out)
}

fn jump_row(k: usize, eps: f64, deltas: &[f64]) -> Result<SweepRow> {
    let scene = wiggle_scene(k, WiggleVariant::Thm1, eps, None)?;
    let curve = &scene.domain.curves()[0];
    let f = ahlfors_solve(&scene.domain, SZEGO_NODES)?;
    // The left normal points inside a counterclockwise curve.
    let outward = if curve.orientation() == Orientation::Positive { -1.0 } else { 1.0 };
    let n = trace_samples(curve);
    let (points, dz, _) = curve.sample(n);
    let params: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let boundary = f.boundary_values_at(0, &params);
    // Near tight concave bends the larger offsets cross the tube; those nodes
    // take the interpolated boundary value instead of the extrapolated trace.
    let (mut fallbacks, mut mismatch) = (0usize, 0.0f64);
    let plus: Vec<C64> = (0..n)
        .map(|j| {
            let normal = C64::new(0.0, outward) * dz[j] / dz[j].norm();
            let values: Option<Vec<C64>> = deltas.iter().map(|&d| f.eval_checked(points[j] + d * normal)).collect();
            match values {
                Some(v) => {
                    let value = extrapolate_to_zero(deltas, &v);
                    mismatch = mismatch.max((value - boundary[j]).norm());
                    value
                }
                None => {
                    fallbacks += 1;
                    boundary[j]
                }
            }
        })
        .collect();
    let mu = jump_measure(&plus, &vec![C64::new(0.0, 0.0); n], curve)?;
    let (graph, hook) = (wiggle_path(k), hook_path());
    let samples = &mu.samples()[0];
    let (mut variation, mut length, mut min_modulus) = (0.0, 0.0, f64::INFINITY);
    for (j, z) in points.iter().enumerate() {
        if polyline_distance(*z, &graph) < polyline_distance(*z, &hook) {
            variation += mu.density()[0][j].norm() * samples.weights[j];
            length += samples.weights[j];
            min_modulus = min_modulus.min(plus[j].norm());
        }
    }
    let graph_arclength = graph.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>();
    Ok(SweepRow { gamma_szego: Some(f.gamma()), ..SweepRow::new(k as f64) }
        .with("variation", variation)
        .with("wiggle_boundary_length", length)
        .with("min_modulus", min_modulus)
        .with("lower_bound", min_modulus * length / (2.0 * PI))
        .with("graph_arclength", graph_arclength)
        .with("trace_fallbacks", fallbacks as f64)
        .with("trace_mismatch", mismatch))
}

/// Value at `h = 0` of the polynomial through `(h_i, v_i)` (Neville's scheme).
pub fn extrapolate_to_zero(h: &[f64], v: &[C64]) -> C64 {
    let mut p = v.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let h = [0.4, 0.2, 0.1];
        let v: Vec<C64> = h.iter().map(|x| C64::new(1.0 + 2.0 * x - x * x, -3.0 * x)).collect();
        let z = extrapolate_to_zero(&h, &v);
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(run_paper_e(WiggleVariant::Thm1, 0, &[0.02]).is_err());
        assert!(run_paper_e(WiggleVariant::Thm1, MAX_WIGGLE_K + 1, &[0.02]).is_err());
        assert!(run_jump_growth(2, 0.02, &[1e-3, 2e-3]).is_err());
    }
}
