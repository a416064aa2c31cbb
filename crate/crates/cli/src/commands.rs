use std::f64::consts::PI;
use std::path::Path;

use ahlfors_core::experiments::{
    run_counterexample, run_jump_growth, run_koebe_convergence, run_paper_e, run_tangency_sweep, SLIT_TOL,
};
use ahlfors_core::geometry::{offset_cycle, read_scene, wiggle_scene, CurveSpec};
use ahlfors_core::measures::solve_capacity_lp;
use ahlfors_core::{
    ahlfors_solve, cauchy_eval, gamma_from_slits, koebe_uniformize, painleve_length_upper, painleve_measure, slit_uniformize,
    AhlforsFunction, CircleDomain, Error, LpConfig, ParamCurve, PlanarDomain, Scene, WiggleVariant, C64,
};

use crate::svg::{Grid, Svg};
use crate::table::{int, num, text, Output, Table};
use crate::{Cli, Command, Failure, Format, GammaMethod, Sweep};

/// Far test points for the Cauchy identity check of Painlevé measures.
const IDENTITY_POINTS: usize = 64;
const CONTOUR_LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Koebe tolerance when a slit map needs circles first.
const SLIT_KOEBE_TOL: f64 = 1e-12;
const SLIT_KOEBE_ITER: usize = 50;

type Outcome<T> = std::result::Result<T, Failure>;

/// Input and argument errors are usage errors; everything else is a solver failure.
fn fail(e: Error) -> Failure {
    match e {
        Error::InvalidSpec(_) | Error::Parse { .. } | Error::Io(_) => Failure::Usage(e.to_string()),
        other => Failure::Solver(other.to_string()),
    }
}

struct Rendered {
    output: Output,
    svg: Option<Svg>,
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let svg = cli.format == Format::Svg;
    if svg && matches!(cli.command, Command::Sweep { .. }) {
        return Err(Failure::Usage("sweeps write csv or json, not svg".into()));
    }
    let rendered = match &cli.command {
        Command::Gamma { scene, nodes, method } => gamma_cmd(&load_scene(&scene.scene)?, *nodes as usize, *method, svg)?,
        Command::Gammac { scene, support_nodes, angles, colloc } => {
            gammac_cmd(&load_scene(&scene.scene)?, *support_nodes as usize, *angles as usize, *colloc as usize, svg)?
        }
        Command::Ahlfors { scene, eval_grid, nodes } => ahlfors_cmd(&load_scene(&scene.scene)?, *eval_grid as usize, *nodes as usize, svg)?,
        Command::Koebe { scene, tol, max_iter } => koebe_cmd(&load_scene(&scene.scene)?, *tol, *max_iter, svg)?,
        Command::Slitmap { scene, tol } => slitmap_cmd(&load_scene(&scene.scene)?, *tol, svg)?,
        Command::Painleve { scene, eps_ladder, nodes } => painleve_cmd(&load_scene(&scene.scene)?, eps_ladder, *nodes as usize, svg)?,
        Command::Sweep { sweep } => Rendered { output: Output::Sweep(sweep_cmd(sweep)?), svg: None },
    };
    let body = match cli.format {
        Format::Csv => rendered.output.to_csv(),
        Format::Json => rendered.output.to_json(),
        Format::Svg => rendered.svg.expect("scene commands draw when asked").finish(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// A scene file, or `wiggle:<variant>:<k>:<eps>` for the built-in sets.
pub fn load_scene(spec: &str) -> Outcome<Scene> {
    if let Some(rest) = spec.strip_prefix("wiggle:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [variant, k, eps] = parts.as_slice() else {
            return Err(Failure::Usage(format!("expected wiggle:<thm0|thm1>:<k>:<eps>, got {spec:?}")));
        };
        let variant: WiggleVariant = variant.parse().map_err(fail)?;
        let k: usize = k.parse().map_err(|_| Failure::Usage(format!("bad k {k:?}")))?;
        let eps: f64 = eps.parse().map_err(|_| Failure::Usage(format!("bad eps {eps:?}")))?;
        return wiggle_scene(k, variant, eps, None).map_err(|e| Failure::Usage(e.to_string()));
    }
    read_scene(Path::new(spec)).map_err(|e| Failure::Usage(e.to_string()))
}

fn scene_table(command: &str, columns: &[&str], scene: &Scene) -> Table {
    let mut t = Table::new(command, columns);
    t.meta("scene", &scene.name);
    t.meta("connectivity", scene.domain.connectivity());
    t
}

fn draw_domain(domain: &PlanarDomain, extra: impl IntoIterator<Item = C64>) -> Svg {
    let outlines: Vec<Vec<C64>> = domain.curves().iter().map(outline).collect();
    let mut svg = Svg::framing(outlines.iter().flatten().copied().chain(extra));
    for o in &outlines {
        svg.polyline(o, true, "black", 1.5);
    }
    svg
}

fn outline(curve: &ParamCurve) -> Vec<C64> {
    curve.sample((4 * curve.coeffs().len()).next_power_of_two().max(256)).0
}

fn bbox(domain: &PlanarDomain) -> (C64, C64) {
    domain.curves().iter().map(ParamCurve::bbox).fold(
        (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), (a, b)| (C64::new(lo.re.min(a.re), lo.im.min(a.im)), C64::new(hi.re.max(b.re), hi.im.max(b.im))),
    )
}

/// Relative change of the last node doubling, floored at rounding level.
fn self_error(f: &AhlforsFunction) -> f64 {
    let h = &f.history;
    let change = if h.len() >= 2 { (h[h.len() - 1].1 - h[h.len() - 2].1).abs() } else { 0.0 };
    change.max(1e-13 * f.gamma())
}

fn gamma_cmd(scene: &Scene, nodes: usize, method: GammaMethod, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table("gamma", &["method", "gamma", "nodes", "error_estimate", "relative_difference"], scene);
    t.meta("nodes", nodes);
    t.meta("method", format!("{method:?}").to_lowercase());
    let mut values = Vec::new();
    let mut szego = None;
    if method != GammaMethod::Slit {
        let f = ahlfors_solve(&scene.domain, nodes).map_err(fail)?;
        for w in &f.warnings {
            eprintln!("warning: {w}");
        }
        values.push(("szego", f.gamma(), f.total_nodes(), self_error(&f)));
        szego = Some(f);
    }
    if method != GammaMethod::Szego {
        let (disks, _) = circles_of(scene, &mut t)?;
        let (_, slits) = slit_uniformize(&disks, SLIT_TOL).map_err(fail)?;
        let g = gamma_from_slits(&slits).value;
        values.push(("slit", g, 0, SLIT_TOL * g));
    }
    let diff = match values.as_slice() {
        [a, b] => (a.1 - b.1).abs() / a.1,
        _ => f64::NAN,
    };
    for (name, g, n, err) in &values {
        t.push(vec![text(*name), num(*g), int(*n), num(*err), num(diff)]);
    }
    let svg = match (want_svg, szego) {
        (true, Some(f)) => Some(contour_drawing(&f, 121)),
        (true, None) => Some(draw_domain(&scene.domain, [])),
        _ => None,
    };
    Ok(Rendered { output: Output::Table(t), svg })
}

/// Circles of a scene made of two circles, or the Koebe image of any two-curve scene.
fn circles_of(scene: &Scene, t: &mut Table) -> Outcome<(CircleDomain, bool)> {
    let given: Option<Vec<(C64, f64)>> = scene
        .specs
        .iter()
        .map(|s| match s {
            CurveSpec::Circle { center, radius } => Some((C64::new(center[0], center[1]), *radius)),
            _ => None,
        })
        .collect();
    if let Some(c) = given {
        let (centers, radii) = c.into_iter().unzip();
        return Ok((CircleDomain::new(centers, radii).map_err(fail)?, false));
    }
    let (map, circles) = koebe_uniformize(&scene.domain, SLIT_KOEBE_TOL, SLIT_KOEBE_ITER).map_err(fail)?;
    t.meta("koebe_iterations", map.iterations);
    t.meta_num("koebe_residual", map.residual);
    Ok((circles, true))
}

fn contour_drawing(f: &AhlforsFunction, n: usize) -> Svg {
    let (lo, hi) = bbox(f.domain());
    let pad = 0.25 * (hi - lo).norm();
    let grid = Grid::covering(lo - C64::new(pad, pad), hi + C64::new(pad, pad), n);
    let values: Vec<Option<f64>> = grid.points().iter().map(|z| f.eval_checked(*z).map(|v| v.norm())).collect();
    let mut svg = draw_domain(f.domain(), [grid.lo, grid.hi]);
    svg.contours(&grid, &values, &CONTOUR_LEVELS, "steelblue");
    svg
}

fn gammac_cmd(scene: &Scene, support: usize, angles: usize, colloc: usize, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table(
        "gammac",
        &["method", "value", "lp_value", "observed_sup", "certification", "rounds", "ratio_to_gamma"],
        scene,
    );
    t.meta("support_nodes", support);
    t.meta("angles", angles);
    t.meta("colloc", colloc);
    let reference = ahlfors_solve(&scene.domain, 64).map_err(fail)?.gamma();
    t.meta_num("gamma_szego", reference);
    let complex = solve_capacity_lp(&scene.domain, &LpConfig::new(support, colloc, angles, false)).map_err(fail)?;
    let positive = solve_capacity_lp(&scene.domain, &LpConfig::new(support, colloc, angles, true)).map_err(fail)?;
    for w in complex.warnings.iter().chain(&positive.warnings) {
        eprintln!("warning: {w}");
    }
    // A certified positive measure is also admissible for the complex program.
    let best = complex.estimate.value.max(positive.estimate.value);
    for (name, b, value) in [("gamma_c_lp", &complex, best), ("gamma_plus_lp", &positive, positive.estimate.value)] {
        t.push(vec![
            text(name),
            num(value),
            num(b.lp_value),
            num(b.observed_sup),
            num(b.estimate.certification),
            int(b.rounds),
            num(value / reference),
        ]);
    }
    let svg = want_svg.then(|| draw_domain(&scene.domain, []));
    Ok(Rendered { output: Output::Table(t), svg })
}

fn ahlfors_cmd(scene: &Scene, n: usize, nodes: usize, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table("ahlfors", &["x", "y", "re", "im", "abs"], scene);
    t.meta("eval_grid", n);
    t.meta("nodes", nodes);
    let f = ahlfors_solve(&scene.domain, nodes).map_err(fail)?;
    t.meta_num("gamma", f.gamma());
    t.meta("total_nodes", f.total_nodes());
    let (lo, hi) = bbox(&scene.domain);
    let pad = 0.25 * (hi - lo).norm();
    let grid = Grid::covering(lo - C64::new(pad, pad), hi + C64::new(pad, pad), n);
    let mut values = Vec::new();
    for z in grid.points() {
        let v = f.eval_checked(z);
        if let Some(w) = v {
            t.push(vec![num(z.re), num(z.im), num(w.re), num(w.im), num(w.norm())]);
        }
        values.push(v.map(|w| w.norm()));
    }
    let svg = want_svg.then(|| {
        let mut svg = draw_domain(&scene.domain, [grid.lo, grid.hi]);
        svg.contours(&grid, &values, &CONTOUR_LEVELS, "steelblue");
        svg
    });
    Ok(Rendered { output: Output::Table(t), svg })
}

fn koebe_cmd(scene: &Scene, tol: f64, max_iter: usize, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table("koebe", &["curve", "center_x", "center_y", "radius"], scene);
    t.meta_num("tol", tol);
    t.meta("max_iter", max_iter);
    let (map, circles) = koebe_uniformize(&scene.domain, tol, max_iter).map_err(fail)?;
    for w in &map.warnings {
        eprintln!("warning: {w}");
    }
    t.meta("iterations", map.iterations);
    t.meta_num("residual", map.residual);
    t.meta_num("normalization_residual", map.normalization_residual);
    for (i, (c, r)) in circles.centers.iter().zip(&circles.radii).enumerate() {
        t.push(vec![int(i), num(c.re), num(c.im), num(*r)]);
    }
    let svg = want_svg.then(|| {
        let reach = circles.centers.iter().zip(&circles.radii).flat_map(|(c, r)| [c - C64::new(*r, *r), c + C64::new(*r, *r)]);
        let mut svg = draw_domain(&scene.domain, reach.collect::<Vec<_>>());
        for (c, r) in circles.centers.iter().zip(&circles.radii) {
            svg.circle(*c, *r, "steelblue");
        }
        svg
    });
    Ok(Rendered { output: Output::Table(t), svg })
}

fn slitmap_cmd(scene: &Scene, tol: f64, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table("slitmap", &["slit", "lo", "hi", "length"], scene);
    t.meta_num("tol", tol);
    let (disks, via_koebe) = circles_of(scene, &mut t)?;
    t.meta("via_koebe", via_koebe);
    let (_, slits) = slit_uniformize(&disks, tol).map_err(fail)?;
    t.meta_num("height", slits.height);
    t.meta_num("gap", slits.gap());
    t.meta_num("gamma", gamma_from_slits(&slits).value);
    for (i, s) in slits.intervals.iter().enumerate() {
        t.push(vec![int(i), num(s.lo), num(s.hi), num(s.length())]);
    }
    let svg = want_svg.then(|| {
        let y = slits.height;
        let ends: Vec<C64> = slits.intervals.iter().flat_map(|s| [C64::new(s.lo, y), C64::new(s.hi, y)]).collect();
        let mut svg = draw_domain(&scene.domain, ends.clone());
        for pair in ends.chunks_exact(2) {
            svg.polyline(pair, false, "crimson", 2.5);
        }
        svg
    });
    Ok(Rendered { output: Output::Table(t), svg })
}

fn painleve_cmd(scene: &Scene, ladder: &[f64], nodes: usize, want_svg: bool) -> Outcome<Rendered> {
    let mut t = scene_table(
        "painleve",
        &["eps", "cycle_length", "total_variation", "bound", "mass_re", "mass_im", "identity_error", "error"],
        scene,
    );
    t.meta("eps_ladder", ladder.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"));
    t.meta("nodes", nodes);
    let length = painleve_length_upper(&scene.domain, ladder).map_err(fail)?;
    t.meta_num("painleve_length_upper", length);
    let f = ahlfors_solve(&scene.domain, nodes).map_err(fail)?;
    t.meta_num("gamma", f.gamma());
    let mut cycles = Vec::new();
    for &eps in ladder {
        let row = offset_cycle(&scene.domain, eps).and_then(|cycle| {
            let mu = painleve_measure(&f, &cycle)?;
            let (center, radius) = far_circle(&cycle.curves);
            let mut identity: f64 = 0.0;
            for j in 0..IDENTITY_POINTS {
                let z = center + C64::from_polar(radius, 2.0 * PI * j as f64 / IDENTITY_POINTS as f64);
                identity = identity.max((cauchy_eval(&mu, z)? - f.eval(z)).norm());
            }
            let mass = mu.mass();
            let row = vec![
                num(eps),
                num(cycle.total_length),
                num(mu.total_variation()),
                num(cycle.total_length / (2.0 * PI)),
                num(mass.re),
                num(mass.im),
                num(identity),
                text(""),
            ];
            cycles.push(cycle);
            Ok(row)
        });
        t.push(row.unwrap_or_else(|e| {
            let mut r = vec![num(eps)];
            r.extend(std::iter::repeat_n(num(f64::NAN), 6));
            r.push(text(e.to_string()));
            r
        }));
    }
    let svg = want_svg.then(|| {
        let outlines: Vec<Vec<C64>> = cycles.iter().flat_map(|c| c.curves.iter().map(outline)).collect();
        let mut svg = draw_domain(&scene.domain, outlines.iter().flatten().copied().collect::<Vec<_>>());
        for o in &outlines {
            svg.polyline(o, true, "darkorange", 1.0);
        }
        svg
    });
    Ok(Rendered { output: Output::Table(t), svg })
}

/// Circle about the cycle's bounding-box center at twice its farthest reach.
fn far_circle(curves: &[ParamCurve]) -> (C64, f64) {
    let points: Vec<C64> = curves.iter().flat_map(|c| c.polygon().to_vec()).collect();
    let (lo, hi) = points.iter().fold(
        (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), z| (C64::new(lo.re.min(z.re), lo.im.min(z.im)), C64::new(hi.re.max(z.re), hi.im.max(z.im))),
    );
    let center = (lo + hi) / 2.0;
    let reach = points.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    (center, 2.0 * reach)
}

fn sweep_cmd(sweep: &Sweep) -> Outcome<ahlfors_core::experiments::SweepResult> {
    let out = match sweep {
        Sweep::Tangency { gaps, radius } => run_tangency_sweep(gaps, *radius),
        Sweep::PaperE { variant, k_max, eps_ladder } => run_paper_e(*variant, *k_max, eps_ladder),
        Sweep::JumpGrowth { k_max, eps, deltas } => run_jump_growth(*k_max, *eps, deltas),
        Sweep::Counterexample { k_max } => run_counterexample(*k_max),
        Sweep::KoebeConvergence { family, deltas } => run_koebe_convergence(*family, deltas),
    };
    out.map_err(fail)
}
