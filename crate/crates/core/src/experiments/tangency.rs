use super::table::{SweepResult, SweepRow};
use super::{check_ladder, SLIT_TOL, SZEGO_NODES};
use crate::conformal::gamma;
use crate::koebe::CircleDomain;
use crate::numeric::richardson;
use crate::slit::{gamma_from_slits, slit_uniformize};
use crate::{Result, C64};

/// Gap of the nearly tangent configuration whose merged slit serves as the limit reference.
const REFERENCE_GAP: f64 = 1e-6;

/// Disks of radius `r` centered at `±(r + gap/2)`.
pub fn tangent_pair(r: f64, gap: f64) -> Result<CircleDomain> {
    let c = r + gap / 2.0;
    CircleDomain::new(vec![C64::new(-c, 0.0), C64::new(c, 0.0)], vec![r, r])
}

/// Capacity of two disks as their gap closes, by the Szegő and slit routes,
/// with a final `δ → 0` extrapolation row.
pub fn run_tangency_sweep(gaps: &[f64], r: f64) -> Result<SweepResult> {
    check_ladder(gaps, "gap")?;
    let mut out = SweepResult::new("tangency", "gap", &["slit_gap", "relative_difference", "reference"]);
    out.meta("radius", r);
    out.meta("szego_start_nodes", SZEGO_NODES);
    for &gap in gaps {
        out.rows.push(tangency_row(r, gap).unwrap_or_else(|e| SweepRow::failed(gap, e)));
    }
    let mut last = SweepRow::new(0.0);
    let ok: Vec<&SweepRow> = out.ok_rows().collect();
    if let [.., a, b] = ok.as_slice() {
        let ratio = a.parameter / b.parameter;
        last.gamma_szego = a.gamma_szego.zip(b.gamma_szego).map(|(x, y)| richardson(x, y, ratio, 1.0));
        last.gamma_slit = a.gamma_slit.zip(b.gamma_slit).map(|(x, y)| richardson(x, y, ratio, 1.0));
    }
    match tangent_pair(r, REFERENCE_GAP * r).and_then(|d| slit_uniformize(&d, SLIT_TOL)) {
        Ok((_, slits)) => {
            let span = slits.intervals.last().unwrap().hi - slits.intervals[0].lo;
            last.set("reference", span / 4.0);
            last.set("slit_gap", slits.gap());
        }
        Err(e) => last.error = Some(e.to_string()),
    }
    out.rows.push(last);
    Ok(out)
}

fn tangency_row(r: f64, gap: f64) -> Result<SweepRow> {
    let disks = tangent_pair(r, gap)?;
    let szego = gamma(&disks.to_domain()?, SZEGO_NODES)?.value;
    let (_, slits) = slit_uniformize(&disks, SLIT_TOL)?;
    let slit = gamma_from_slits(&slits).value;
    Ok(SweepRow { gamma_szego: Some(szego), gamma_slit: Some(slit), ..SweepRow::new(gap) }
        .with("slit_gap", slits.gap())
        .with("relative_difference", (szego - slit).abs() / szego))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_separated_pair_agrees_across_methods() {
        let row = tangency_row(1.0, 4.0).unwrap();
        assert!(row.get("relative_difference").unwrap() < 1e-5);
        let g = row.gamma_szego.unwrap();
        // Two disjoint unit disks: more than one alone, less than the enclosing disk.
        assert!(g > 1.0 && g < 4.0, "{g}");
    }

    #[test]
    fn sweep_appends_extrapolated_row() {
        let out = run_tangency_sweep(&[0.2, 0.1], 1.0).unwrap();
        assert_eq!(out.rows.len(), 3);
        let last = out.rows.last().unwrap();
        assert_eq!(last.parameter, 0.0);
        let (x, reference) = (last.gamma_szego.unwrap(), last.get("reference").unwrap());
        assert!((x - reference).abs() / reference < 1e-2, "{x} vs {reference}");
        assert!(out.rows[0].gamma_szego.unwrap() > out.rows[1].gamma_szego.unwrap());
    }

    #[test]
    fn rejects_increasing_gaps() {
        assert!(run_tangency_sweep(&[0.1, 0.2], 1.0).is_err());
    }
}
