use std::f64::consts::PI;
use std::fmt::Write as _;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};

use super::density::{CurveSamples, DensityMeasure};
use super::limits::{BoundaryLimits, Limit};
use crate::conformal::{ahlfors_solve, CapacityEstimate, Method};
use crate::geometry::{Orientation, ParamCurve, PlanarDomain};
use crate::numeric::halton;
use crate::{Error, Result, C64};

pub const DEFAULT_ANGLES: usize = 32;
/// Constraint points per support node on each side of the support.
pub const DEFAULT_COLLOC: usize = 4;
/// Highest modulation frequency of the complex density family.
pub const DEFAULT_MODES: usize = 4;
/// Node cap per curve for the nonnegative family.
pub const MAX_POSITIVE_NODES: usize = 128;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_ROUNDS: usize = 400;
const RHS_JITTER: f64 = 1e-7;
const COEFF_FLOOR: f64 = 1e-12;
const AHLFORS_START_NODES: usize = 64;

/// Settings of the `γ_c` / `γ₊` linear programs.
#[derive(Debug, Clone)]
pub struct LpConfig {
    /// Density nodes per boundary curve (rounded up to even).
    pub support_nodes: usize,
    pub colloc: usize,
    pub angles: usize,
    /// Complex family: `ρ = ρ_f Σ_{|k| ≤ modes} c_k e^{ikt}` per curve, where `ρ_f`
    /// is the boundary density of the Ahlfors function.
    pub modes: usize,
    /// Restrict to nonnegative node densities (`γ₊`).
    pub positive: bool,
    /// Keep the final constraint rows for [`LpBound::dump`].
    pub keep_rows: bool,
}

impl LpConfig {
    pub fn new(support_nodes: usize, colloc: usize, angles: usize, positive: bool) -> Self {
        Self { support_nodes, colloc, angles, modes: DEFAULT_MODES, positive, keep_rows: false }
    }
}

/// Outcome of a capacity linear program after certification.
#[derive(Debug, Clone)]
pub struct LpBound {
    pub estimate: CapacityEstimate,
    /// Rescaled measure; its Cauchy transform is bounded by 1 on the checked sets.
    pub measure: DensityMeasure,
    pub lp_value: f64,
    /// Largest `|Cμ|` seen by the certification before rescaling.
    pub observed_sup: f64,
    pub rounds: usize,
    pub rows: usize,
    pub warnings: Vec<String>,
    objective: Vec<f64>,
    kept: Vec<(Vec<f64>, f64)>,
}

impl LpBound {
    /// Text form of the final program: an `objective` line, a `rows` count, then
    /// one `coefficients <= rhs` line per constraint (maximization).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "objective {}", join(&self.objective));
        let _ = writeln!(out, "rows {}", self.kept.len());
        for (row, rhs) in &self.kept {
            let _ = writeln!(out, "{} <= {rhs}", join(row));
        }
        out
    }
}

/// Densities spanned by the LP variables.
enum Family {
    /// One variable per support node.
    Nodes,
    /// `base · e^{ikt}` per curve and frequency, with both limits tabulated on the fine grid.
    Modulated { modes: usize, base: Vec<Vec<C64>>, outer: Vec<Vec<C64>>, inner: Vec<Vec<C64>> },
}

impl Family {
    fn modulated(limits: &BoundaryLimits, base: Vec<Vec<C64>>, modes: usize) -> Self {
        let zero: Vec<Vec<C64>> = base.iter().map(|b| vec![C64::new(0.0, 0.0); b.len()]).collect();
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        for b in 0..base.len() {
            for k in -(modes as i64)..=modes as i64 {
                let mut rho = zero.clone();
                rho[b] = modulate(&base[b], k);
                let (o, i) = limits.values(&rho);
                outer.push(o);
                inner.push(i);
            }
        }
        Family::Modulated { modes, base, outer, inner }
    }

    fn density(&self, x: &[C64], counts: &[usize]) -> Vec<Vec<C64>> {
        match self {
            Family::Nodes => split(x, counts),
            Family::Modulated { modes, base, .. } => {
                let width = 2 * modes + 1;
                base.iter()
                    .enumerate()
                    .map(|(b, rho)| {
                        let mut out = vec![C64::new(0.0, 0.0); rho.len()];
                        for (slot, k) in (-(*modes as i64)..=*modes as i64).enumerate() {
                            let c = x[b * width + slot];
                            for (o, v) in out.iter_mut().zip(modulate(rho, k)) {
                                *o += c * v;
                            }
                        }
                        out
                    })
                    .collect()
            }
        }
    }

    fn row(&self, limits: &BoundaryLimits, i: usize, side: Limit) -> Vec<C64> {
        match self {
            Family::Nodes => limits.row(i, side).concat(),
            Family::Modulated { outer, inner, .. } => {
                let table = if side == Limit::Outer { outer } else { inner };
                table.iter().map(|v| v[i]).collect()
            }
        }
    }

    fn mass(&self, limits: &BoundaryLimits) -> Vec<C64> {
        let per_node = limits.mass_row();
        match self {
            Family::Nodes => per_node.concat(),
            Family::Modulated { modes, base, .. } => base
                .iter()
                .zip(&per_node)
                .flat_map(|(rho, m)| {
                    (-(*modes as i64)..=*modes as i64)
                        .map(|k| modulate(rho, k).iter().zip(m).map(|(r, w)| r * w).sum::<C64>())
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }
}

fn modulate(rho: &[C64], k: i64) -> Vec<C64> {
    let n = rho.len() as f64;
    rho.iter().enumerate().map(|(j, r)| r * C64::from_polar(1.0, 2.0 * PI * k as f64 * j as f64 / n)).collect()
}

/// `(1/2πi) f T` at the support nodes: the density whose Cauchy transform is
/// `-f` off the support and vanishes inside the curves.
fn ahlfors_density(domain: &PlanarDomain, curves: &[ParamCurve], n: usize) -> Result<Vec<Vec<C64>>> {
    let f = ahlfors_solve(domain, AHLFORS_START_NODES)?;
    Ok(curves
        .iter()
        .zip(domain.curves())
        .enumerate()
        .map(|(b, (oriented, original))| {
            let flip = if oriented.orientation() == original.orientation() { 1.0 } else { -1.0 };
            let params: Vec<f64> = (0..n).map(|j| flip * 2.0 * PI * j as f64 / n as f64).collect();
            let values = f.boundary_values_at(b, &params);
            let tangents = CurveSamples::new(oriented, n).tangents;
            values.iter().zip(&tangents).map(|(v, t)| v * t / C64::new(0.0, 2.0 * PI)).collect()
        })
        .collect())
}

struct Program {
    problem: Problem,
    vars: Vec<(Variable, Option<Variable>)>,
    positive: bool,
    /// Solver variables are `scale` times the LP variables and boxed to `[-1, 1]`.
    scale: f64,
    added: usize,
}

impl Program {
    fn new(mass: &[C64], positive: bool, scale: f64) -> Self {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let top = mass.iter().map(|m| m.re.abs().max(m.im.abs())).fold(0.0, f64::max);
        let mass: Vec<C64> = mass.iter().map(|m| m / top).collect();
        let vars = mass
            .iter()
            .map(|m| {
                if positive {
                    (problem.add_var(m.re, (0.0, 1.0)), None)
                } else {
                    (problem.add_var(m.re, (-1.0, 1.0)), Some(problem.add_var(-m.im, (-1.0, 1.0))))
                }
            })
            .collect();
        Self { problem, vars, positive, scale, added: 0 }
    }

    /// Real coefficients of `Re(e^{-iθ} Σ r_k x_k)`.
    fn coefficients(&self, row: &[C64], theta: f64) -> Vec<f64> {
        let rot = C64::from_polar(1.0, -theta);
        let mut out = Vec::with_capacity(if self.positive { row.len() } else { 2 * row.len() });
        for r in row {
            out.push((rot * r).re);
        }
        if !self.positive {
            for r in row {
                out.push(-(rot * r).im);
            }
        }
        out
    }

    /// Adds `coeffs · x ≤ 1`, normalized to unit largest coefficient in the solver variables.
    fn add(&mut self, coeffs: &[f64]) {
        let top = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max) / self.scale;
        let scaled: Vec<f64> = coeffs
            .iter()
            .map(|c| c / (self.scale * top))
            .map(|c| if c.abs() < COEFF_FLOOR { 0.0 } else { c })
            .collect();
        let expr = self.expr(&scaled);
        // Tiny distinct tightenings break the exact degeneracy of symmetric scenes.
        self.added += 1;
        let jitter = 1.0 - RHS_JITTER * halton(self.added as u64, 2);
        self.problem.add_constraint(expr, ComparisonOp::Le, jitter / top);
    }

    fn expr(&self, coeffs: &[f64]) -> Vec<(Variable, f64)> {
        let n = self.vars.len();
        let mut expr: Vec<(Variable, f64)> = self.vars.iter().zip(coeffs).map(|((x, _), c)| (*x, *c)).collect();
        if !self.positive {
            expr.extend(self.vars.iter().zip(&coeffs[n..]).map(|((_, y), c)| (y.unwrap(), *c)));
        }
        expr
    }

    fn solution(&self, sol: &Solution) -> Vec<C64> {
        self.vars
            .iter()
            .map(|(x, y)| C64::new(sol[*x], y.map(|y| sol[y]).unwrap_or(0.0)) / self.scale)
            .collect()
    }
}

fn split(flat: &[C64], counts: &[usize]) -> Vec<Vec<C64>> {
    let mut at = 0;
    counts
        .iter()
        .map(|n| {
            let block = flat[at..at + n].to_vec();
            at += n;
            block
        })
        .collect()
}

fn lp_error(e: impl std::fmt::Display) -> Error {
    Error::Solver(e.to_string())
}

/// Maximize `Re μ(E)` over boundary densities subject to `Re(e^{-iθ_l} Cμ) ≤ 1`
/// at both one-sided limits on an upsampled grid, adding violated rows until
/// none remain, then certify and rescale.
pub fn solve_capacity_lp(domain: &PlanarDomain, config: &LpConfig) -> Result<LpBound> {
    if config.angles < 8 {
        return Err(Error::InvalidSpec(format!("need at least 8 angles, got {}", config.angles)));
    }
    if config.colloc < 1 || config.support_nodes < 8 {
        return Err(Error::InvalidSpec("need at least 8 support nodes and one collocation point per node".into()));
    }
    let mut n = config.support_nodes + config.support_nodes % 2;
    if config.positive {
        n = n.min(MAX_POSITIVE_NODES);
    }
    let curves: Vec<ParamCurve> = domain.curves().iter().map(|c| c.oriented(Orientation::Positive)).collect();
    let counts = vec![n; curves.len()];
    let limits = BoundaryLimits::new(&curves, &counts, config.colloc);
    let (family, scale) = if config.positive {
        // |ρ| ≤ 1/π follows from |C₊|, |C₋| ≤ 1 since 2πi g = C₋ - C₊.
        (Family::Nodes, PI)
    } else {
        let base = ahlfors_density(domain, &curves, n)?;
        (Family::modulated(&limits, base, config.modes), 0.25)
    };
    let mass = family.mass(&limits);
    let mut program = Program::new(&mass, config.positive, scale);
    let theta = |l: usize| 2.0 * PI * l as f64 / config.angles as f64;
    let row = |program: &Program, i: usize, side: Limit, l: usize| program.coefficients(&family.row(&limits, i, side), theta(l));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let quarter = config.angles / 4;
    for k in 0..limits.len() / config.colloc {
        for side in [Limit::Outer, Limit::Inner] {
            for q in 0..4 {
                rows.push(row(&program, k * config.colloc, side, q * quarter));
            }
        }
    }
    for r in &rows {
        program.add(r);
    }
    let solve = |program: &Program| -> Result<Solution> {
        program.problem.solve().map_err(lp_error)?.into_solution().map_err(|_| Error::Solver("LP interrupted".into()))
    };
    let mut sol = solve(&program)?;
    let mut rounds = 0;
    let mut warnings = Vec::new();
    let batch = (limits.len() / 4).max(32);
    loop {
        rounds += 1;
        let rho = family.density(&program.solution(&sol), &counts);
        let (outer, inner) = limits.values(&rho);
        let mut violated: Vec<(f64, usize, Limit, usize)> = Vec::new();
        for (side, vals) in [(Limit::Outer, &outer), (Limit::Inner, &inner)] {
            let excess: Vec<(f64, usize)> = vals
                .iter()
                .map(|v| {
                    let l = ((v.arg() / (2.0 * PI / config.angles as f64)).round() as i64).rem_euclid(config.angles as i64) as usize;
                    ((C64::from_polar(1.0, -theta(l)) * v).re - 1.0, l)
                })
                .collect();
            // Only local maxima along each curve: neighbouring rows are nearly parallel.
            for (i, &(e, l)) in excess.iter().enumerate() {
                let (b, k) = limits.locate(i);
                let len = counts[b] * config.colloc;
                let at = |k: usize| excess[limits.offset(b) + k].0;
                if e > FEASIBILITY_TOL && e >= at((k + len - 1) % len) && e >= at((k + 1) % len) {
                    violated.push((e, i, side, l));
                }
            }
        }
        if violated.is_empty() {
            break;
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0));
        if rounds >= MAX_ROUNDS {
            warnings.push(format!("row generation stopped after {rounds} rounds with excess {:.3e}", violated[0].0));
            break;
        }
        for &(_, i, side, l) in violated.iter().take(batch) {
            let r = row(&program, i, side, l);
            program.add(&r);
            rows.push(r);
        }
        match solve(&program) {
            Ok(next) => sol = next,
            Err(e) => {
                // Any density certifies after rescaling, so keep the last iterate.
                warnings.push(format!("{e} after {rounds} rounds; certifying the last solution"));
                break;
            }
        }
    }
    let x = program.solution(&sol);
    let lp_value: f64 = mass.iter().zip(&x).map(|(m, r)| (m * r).re).sum();
    let blocks = family.density(&x, &counts);
    let observed_sup = certify(domain, &curves, &counts, &blocks, config.colloc)?;
    let s = observed_sup.max(1.0);
    let measure = DensityMeasure::new(curves, blocks)?.scaled(C64::new(1.0 / s, 0.0));
    let objective = program.coefficients(&mass, 0.0);
    Ok(LpBound {
        estimate: CapacityEstimate {
            value: lp_value / s,
            method: if config.positive { Method::GammaPlusLp } else { Method::GammaCLp },
            nodes: n * domain.curves().len(),
            certification: 1.0 / s,
        },
        measure,
        lp_value,
        observed_sup,
        rounds,
        rows: rows.len(),
        warnings,
        objective,
        kept: if config.keep_rows { rows.into_iter().map(|r| (r, 1.0)).collect() } else { Vec::new() },
    })
}

/// Largest `|Cμ|` over both one-sided limits on a grid twice as fine as the
/// constraints, and over exterior contours one and two node spacings out.
fn certify(domain: &PlanarDomain, curves: &[ParamCurve], counts: &[usize], rho: &[Vec<C64>], colloc: usize) -> Result<f64> {
    let fine = BoundaryLimits::new(curves, counts, 2 * colloc);
    let (outer, inner) = fine.values(rho);
    let mut sup = outer.iter().chain(&inner).map(|v| v.norm()).fold(0.0, f64::max);
    let mu = DensityMeasure::new(curves.to_vec(), rho.to_vec())?;
    for (curve, &n) in curves.iter().zip(counts) {
        let h = CurveSamples::new(curve, n).spacing();
        let s = CurveSamples::new(curve, 4 * n);
        for (p, t) in s.points.iter().zip(&s.tangents) {
            for d in [h, 2.0 * h] {
                let z = p + C64::new(0.0, -d) * t;
                if !domain.contains(z) || domain.distance_to_boundary(z) < 0.5 * d {
                    continue;
                }
                if let Ok(v) = mu.cauchy(z) {
                    sup = sup.max(v.norm());
                }
            }
        }
    }
    Ok(sup)
}

/// Certified lower bound for `γ_c`: the better of the complex family and the
/// nonnegative family, since a certified positive measure is admissible too.
pub fn gamma_c_lower(domain: &PlanarDomain, support_nodes: usize, colloc: usize, angles: usize) -> Result<CapacityEstimate> {
    let complex = solve_capacity_lp(domain, &LpConfig::new(support_nodes, colloc, angles, false))?.estimate;
    let positive = gamma_plus_lower(domain, support_nodes, colloc, angles)?;
    Ok(if positive.value > complex.value { CapacityEstimate { method: Method::GammaCLp, ..positive } } else { complex })
}

/// Certified lower bound for `γ₊` from nonnegative boundary densities.
pub fn gamma_plus_lower(domain: &PlanarDomain, support_nodes: usize, colloc: usize, angles: usize) -> Result<CapacityEstimate> {
    solve_capacity_lp(domain, &LpConfig::new(support_nodes, colloc, angles, true)).map(|b| b.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::gamma;

    fn disk() -> PlanarDomain {
        PlanarDomain::new(vec![ParamCurve::circle(C64::new(0.0, 0.0), 1.0).unwrap()]).unwrap()
    }

    fn ellipse(scale: f64) -> PlanarDomain {
        PlanarDomain::new(vec![ParamCurve::ellipse(C64::new(0.0, 0.0), 2.0 * scale, scale, 0.3).unwrap()]).unwrap()
    }

    #[test]
    fn unit_disk_bounds() {
        let c = gamma_c_lower(&disk(), 32, 4, 32).unwrap();
        let p = gamma_plus_lower(&disk(), 32, 4, 32).unwrap();
        assert!(c.value >= 0.99 && c.value <= 1.0 + 1e-4, "{c:?}");
        assert!(p.value >= 0.99 && p.value <= 1.0 + 1e-4, "{p:?}");
        assert!(p.value <= c.value + 1e-8);
        assert_eq!(c.method, Method::GammaCLp);
        assert_eq!(p.method, Method::GammaPlusLp);
        assert!(c.certification > 0.0 && c.certification <= 1.0);
    }

    #[test]
    fn complex_family_on_ellipse_is_certified_and_scales() {
        let g = gamma(&ellipse(1.0), 64).unwrap().value;
        let one = solve_capacity_lp(&ellipse(1.0), &LpConfig::new(32, 4, 32, false)).unwrap();
        let two = solve_capacity_lp(&ellipse(2.0), &LpConfig::new(32, 4, 32, false)).unwrap();
        assert!(one.estimate.value >= 0.99 * g && one.estimate.value <= g + 1e-4, "{:?}", one.estimate);
        assert!((two.estimate.value / one.estimate.value - 2.0).abs() < 2e-8, "{} {}", one.estimate.value, two.estimate.value);
        // The rescaled measure is admissible on an exterior contour.
        let far = one.measure.cauchy(C64::new(0.0, 3.0)).unwrap();
        assert!(far.norm() <= 1.0 + 1e-9);
        assert!((one.measure.mass().re - one.estimate.value).abs() < 1e-9);
    }

    #[test]
    fn dump_lists_kept_rows() {
        let mut config = LpConfig::new(16, 2, 8, true);
        config.keep_rows = true;
        let b = solve_capacity_lp(&disk(), &config).unwrap();
        let text = b.dump();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("objective "));
        assert_eq!(lines.next().unwrap(), format!("rows {}", b.rows));
        assert_eq!(lines.count(), b.rows);
    }

    #[test]
    fn rejects_too_few_angles() {
        assert!(matches!(gamma_c_lower(&disk(), 32, 4, 4), Err(Error::InvalidSpec(_))));
    }
}
