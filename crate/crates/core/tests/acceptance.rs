//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! (visible with `--nocapture`) and fails when its criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ahlfors_core::experiments::{
    lp_support_nodes, run_counterexample, run_jump_growth, run_koebe_convergence, run_paper_e, run_tangency_sweep, KoebeFamily,
    SweepResult, DEFAULT_DELTA_LADDER, DEFAULT_GAPS, DEFAULT_KOEBE_LADDER,
};
use ahlfors_core::geometry::{offset_cycle, wiggle_scene};
use ahlfors_core::numeric::halton;
use ahlfors_core::{
    ahlfors_solve, cauchy_eval, gamma, gamma_c_lower, gamma_from_slits, gamma_plus_lower, koebe_uniformize, painleve_measure,
    slit_uniformize, CircleDomain, Cycle, Interval, ParamCurve, PlanarDomain, SlitDomain, WiggleVariant, C64,
};

fn report(n: usize, name: &str, checks: &[(bool, String)]) {
    let pass = checks.iter().all(|(ok, _)| *ok);
    println!("criterion {n} ({name}): {}", if pass { "PASS" } else { "FAIL" });
    for (ok, detail) in checks {
        println!("    [{}] {detail}", if *ok { "ok" } else { "failed" });
    }
    assert!(pass, "criterion {n} ({name}) failed");
}

fn disk(c: C64, r: f64) -> ParamCurve {
    ParamCurve::circle(c, r).unwrap()
}

fn two_disks(c: f64) -> CircleDomain {
    CircleDomain::new(vec![C64::new(-c, 0.0), C64::new(c, 0.0)], vec![1.0, 1.0]).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// `count` points in the annulus `r_min ≤ |z| ≤ r_max` about `center`.
fn far_points(center: C64, r_min: f64, r_max: f64, count: usize) -> Vec<C64> {
    (1..=count as u64)
        .map(|i| center + C64::from_polar(r_min + (r_max - r_min) * halton(i, 2), 2.0 * PI * halton(i, 3)))
        .collect()
}

fn column(out: &SweepResult, name: &str) -> Vec<f64> {
    out.ok_rows().map(|r| r.get(name).unwrap()).collect()
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn criterion_01_disk_exactness() {
    let mut checks = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let d = PlanarDomain::new(vec![disk(C64::new(0.3, -0.2), r)]).unwrap();
        let (g, t) = timed(|| gamma(&d, 128).unwrap().value);
        checks.push(((g - r).abs() <= 1e-10, format!("r={r}: gamma={g:.15} error={:.2e}", (g - r).abs())));
        checks.push((t < Duration::from_secs(1), format!("r={r}: {t:?} < 1s")));
    }
    report(1, "disk exactness", &checks);
}

#[test]
fn criterion_02_ellipse_capacity() {
    let d = PlanarDomain::new(vec![ParamCurve::ellipse(C64::new(0.0, 0.0), 2.0, 1.0, 0.0).unwrap()]).unwrap();
    let (est, t) = timed(|| gamma(&d, 64).unwrap());
    report(
        2,
        "ellipse capacity",
        &[
            ((est.value - 1.5).abs() <= 1e-6, format!("gamma={:.12} error={:.2e}", est.value, (est.value - 1.5).abs())),
            (est.nodes <= 512, format!("{} nodes <= 512", est.nodes)),
            (t < Duration::from_secs(5), format!("{t:?} < 5s")),
        ],
    );
}

#[test]
fn criterion_03_quarter_length() {
    let apart = SlitDomain::new(0.0, vec![Interval::new(-2.0, -1.0).unwrap(), Interval::new(1.0, 2.0).unwrap()]).unwrap();
    let touching = SlitDomain::new(0.0, vec![Interval::new(-2.0, 0.0).unwrap(), Interval::new(0.0, 2.0).unwrap()]).unwrap();
    let (a, b) = (gamma_from_slits(&apart).value, gamma_from_slits(&touching).value);
    report(
        3,
        "quarter-length rule",
        &[(a == 0.5, format!("[-2,-1]u[1,2] -> {a}")), (b == 1.0, format!("[-2,0]u[0,2] -> {b}"))],
    );
}

#[test]
fn criterion_04_cross_method_two_disks() {
    let mut checks = Vec::new();
    let (_, t) = timed(|| {
        for c in [1.5, 2.0, 3.0, 5.0] {
            let disks = two_disks(c);
            let szego = gamma(&disks.to_domain().unwrap(), 64).unwrap().value;
            let (_, slits) = slit_uniformize(&disks, 1e-9).unwrap();
            let slit = gamma_from_slits(&slits).value;
            let rel = (szego - slit).abs() / szego;
            checks.push((rel <= 1e-5, format!("c={c}: szego={szego:.12} slit={slit:.12} rel={rel:.2e}")));
        }
    });
    checks.push((t < Duration::from_secs(30), format!("total {t:?} < 30s")));
    report(4, "cross-method two disks", &checks);
}

#[test]
fn criterion_05_tangency_convergence() {
    let out = run_tangency_sweep(&DEFAULT_GAPS, 1.0).unwrap();
    let rows: Vec<_> = out.rows.iter().filter(|r| r.parameter > 0.0).collect();
    let gammas: Vec<f64> = rows.iter().map(|r| r.gamma_szego.unwrap()).collect();
    let steps: Vec<f64> = gammas.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last_gap = rows.last().unwrap().get("slit_gap").unwrap();
    report(
        5,
        "tangency convergence",
        &[
            (rows.len() == DEFAULT_GAPS.len() && rows.iter().all(|r| r.error.is_none()), format!("{} rows solved", rows.len())),
            (strictly_decreasing(&steps), format!("successive |dgamma| {}", sci(&steps))),
            (last_gap < 1e-3, format!("slit gap at smallest gap {last_gap:.3e} < 1e-3")),
        ],
    );
}

#[test]
fn criterion_06_painleve_measure() {
    let mut checks = Vec::new();
    let unit = PlanarDomain::new(vec![disk(C64::new(0.0, 0.0), 1.0)]).unwrap();
    let f = ahlfors_solve(&unit, 64).unwrap();
    let mu = painleve_measure(&f, &Cycle::new(vec![disk(C64::new(0.0, 0.0), 2.0)])).unwrap();
    let tv = mu.total_variation();
    checks.push((tv <= 2.0 + 1e-8, format!("unit disk, |z|=2: total variation {tv:.12} <= 2")));
    let err = far_points(C64::new(0.0, 0.0), 3.0, 10.0, 100)
        .into_iter()
        .map(|z| (cauchy_eval(&mu, z).unwrap() - f.eval(z)).norm())
        .fold(0.0, f64::max);
    checks.push((err <= 1e-6, format!("unit disk: sup |C mu - f| = {err:.2e} at 100 far points")));

    let pair = two_disks(3.0).to_domain().unwrap();
    let f = ahlfors_solve(&pair, 64).unwrap();
    let cycle = offset_cycle(&pair, 0.25).unwrap();
    let mu = painleve_measure(&f, &cycle).unwrap();
    let bound = cycle.total_length / (2.0 * PI);
    let tv = mu.total_variation();
    checks.push((tv <= bound + 1e-8, format!("two disks, eps=0.25: total variation {tv:.6} <= {bound:.6}")));
    let err = far_points(C64::new(0.0, 0.0), 6.0, 20.0, 100)
        .into_iter()
        .map(|z| (cauchy_eval(&mu, z).unwrap() - f.eval(z)).norm())
        .fold(0.0, f64::max);
    checks.push((err <= 1e-6, format!("two disks: sup |C mu - f| = {err:.2e} at 100 far points")));
    report(6, "Painleve measure", &checks);
}

#[test]
fn criterion_07_gamma_c_numerics() {
    let thm1 = wiggle_scene(3, WiggleVariant::Thm1, 0.02, None).unwrap();
    let scenes = [
        ("unit disk", PlanarDomain::new(vec![disk(C64::new(0.0, 0.0), 1.0)]).unwrap(), 32),
        ("two disks c=3", two_disks(3.0).to_domain().unwrap(), 32),
        ("thm1 k=3 eps=0.02", thm1.domain.clone(), lp_support_nodes(&thm1.domain, 0.02)),
    ];
    let mut checks = Vec::new();
    for (name, d, nodes) in &scenes {
        let g = gamma(d, 64).unwrap().value;
        let c = gamma_c_lower(d, *nodes, 4, 32).unwrap().value;
        let p = gamma_plus_lower(d, *nodes, 4, 32).unwrap().value;
        checks.push((c >= 0.95 * g, format!("{name}: gamma_c={c:.6} >= 0.95 gamma ({:.4} of gamma={g:.6})", c / g)));
        checks.push((c <= g + 1e-4, format!("{name}: gamma_c <= gamma + 1e-4")));
        checks.push((p <= c + 1e-8, format!("{name}: gamma_plus={p:.6} <= gamma_c + 1e-8")));
    }
    report(7, "gamma_c numerics", &checks);
}

#[test]
fn criterion_08_koebe_suite() {
    let circles = two_disks(2.0).to_domain().unwrap();
    let (id, _) = koebe_uniformize(&circles, 1e-10, 50).unwrap();
    let ellipses = PlanarDomain::new(vec![
        ParamCurve::ellipse(C64::new(-2.0, 0.0), 1.2, 1.0, 0.0).unwrap(),
        ParamCurve::ellipse(C64::new(2.0, 0.0), 1.2, 1.0, 0.0).unwrap(),
    ])
    .unwrap();
    let (map, target) = koebe_uniformize(&ellipses, 1e-10, 50).unwrap();
    let before = gamma(&ellipses, 64).unwrap().value;
    let after = gamma(&target.to_domain().unwrap(), 64).unwrap().value;
    let rel = (before - after).abs() / before;
    report(
        8,
        "Koebe suite",
        &[
            (id.residual <= 1e-12 && id.iterations == 0, format!("circle domain: residual {:.2e}, {} iterations", id.residual, id.iterations)),
            (map.residual <= 1e-8 && map.iterations <= 50, format!("two ellipses: residual {:.2e} in {} iterations", map.residual, map.iterations)),
            (rel <= 1e-5, format!("gamma before {before:.12}, after {after:.12}, rel {rel:.2e}")),
        ],
    );
}

#[test]
fn criterion_09_convergence_suites() {
    let out = run_koebe_convergence(KoebeFamily::Elongated, &DEFAULT_KOEBE_LADDER).unwrap();
    let mut checks = vec![(out.ok_rows().count() == DEFAULT_KOEBE_LADDER.len(), format!("{} of {} rows solved", out.ok_rows().count(), DEFAULT_KOEBE_LADDER.len()))];
    for name in ["sup_forward", "sup_inverse", "sup_ahlfors"] {
        let v = column(&out, name);
        checks.push((strictly_decreasing(&v), format!("{name}: {}", sci(&v))));
    }
    report(9, "convergence suites", &checks);
}

#[test]
fn criterion_10_wiggle_set_suites() {
    let mut checks = Vec::new();

    let sweep = run_paper_e(WiggleVariant::Thm1, 6, &[0.02]).unwrap();
    let rows: Vec<_> = sweep.ok_rows().collect();
    let gammas: Vec<f64> = rows.iter().map(|r| r.gamma_szego.unwrap()).collect();
    let steps: Vec<f64> = gammas.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.get("ratio").unwrap()).collect();
    checks.push((rows.len() == 6, format!("paper-e: {} of 6 rows solved", rows.len())));
    checks.push((steps.iter().all(|s| *s >= 0.0), format!("paper-e: gamma {gammas:.6?} nondecreasing")));
    checks.push((strictly_decreasing(&steps), format!("paper-e: increments {} decreasing", sci(&steps))));
    checks.push((ratios.iter().all(|r| *r >= 0.95), format!("paper-e: gamma_c/gamma {ratios:.4?} >= 0.95")));

    let jump = run_jump_growth(6, 0.02, &DEFAULT_DELTA_LADDER).unwrap();
    let v = column(&jump, "variation");
    let slope: f64 = jump.meta["log_slope"].parse().unwrap();
    checks.push((v.len() == 6 && v.windows(2).all(|w| w[1] > w[0]), format!("jump-growth: V_k {v:.4?} strictly increasing")));
    checks.push((slope > 0.0, format!("jump-growth: slope against log k {slope:.4} (rms {})", jump.meta["log_fit_rms"])));

    let counter = run_counterexample(20).unwrap();
    let below: Vec<f64> = counter.rows.iter().filter_map(|r| r.gamma_szego).collect();
    checks.push((below.len() == 20 && below.iter().all(|g| *g < 0.5), format!("counterexample: max gamma {:.4} < 0.5 over {} rows", below.iter().fold(0.0f64, |a, b| a.max(*b)), below.len())));
    let cover = counter.rows.last().and_then(|r| r.get("covering_radius")).unwrap_or(f64::NAN);
    checks.push((cover < 0.3, format!("counterexample: covering radius at k=20 {cover:.4} < 0.3")));

    report(10, "wiggle-set suites", &checks);
}
