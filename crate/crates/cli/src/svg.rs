use std::fmt::Write as _;

use ahlfors_core::C64;

const SIZE: f64 = 800.0;

/// Static drawing in plane coordinates, flipped so that `y` points up.
pub struct Svg {
    min: C64,
    max: C64,
    scale: f64,
    body: String,
}

impl Svg {
    /// Canvas framing `points` with a 5% margin.
    pub fn framing(points: impl IntoIterator<Item = C64>) -> Self {
        let (mut min, mut max) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            min = C64::new(min.re.min(p.re), min.im.min(p.im));
            max = C64::new(max.re.max(p.re), max.im.max(p.im));
        }
        if !(min.re.is_finite() && max.re.is_finite()) {
            (min, max) = (C64::new(-1.0, -1.0), C64::new(1.0, 1.0));
        }
        let pad = 0.05 * (max.re - min.re).max(max.im - min.im).max(1e-9);
        let (min, max) = (min - C64::new(pad, pad), max + C64::new(pad, pad));
        let scale = SIZE / (max.re - min.re).max(max.im - min.im);
        Self { min, max, scale, body: String::new() }
    }

    fn xy(&self, z: C64) -> (f64, f64) {
        ((z.re - self.min.re) * self.scale, (self.max.im - z.im) * self.scale)
    }

    pub fn polyline(&mut self, points: &[C64], closed: bool, stroke: &str, width: f64) {
        let Some(first) = points.first() else { return };
        let (x, y) = self.xy(*first);
        let mut d = format!("M{x:.2} {y:.2}");
        for p in &points[1..] {
            let (x, y) = self.xy(*p);
            let _ = write!(d, " L{x:.2} {y:.2}");
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(self.body, r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#);
    }

    pub fn circle(&mut self, center: C64, radius: f64, stroke: &str) {
        let (x, y) = self.xy(center);
        let r = radius * self.scale;
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#);
    }

    /// Level lines of a field sampled on `grid` (row-major, `nx` columns),
    /// by marching squares. Cells touching a missing value are skipped.
    pub fn contours(&mut self, grid: &Grid, values: &[Option<f64>], levels: &[f64], stroke: &str) {
        let mut d = String::new();
        let at = |i: usize, j: usize| values[j * grid.nx + i];
        for j in 0..grid.ny - 1 {
            for i in 0..grid.nx - 1 {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let Some(v) = corners.iter().map(|&(a, b)| at(a, b)).collect::<Option<Vec<f64>>>() else { continue };
                for &level in levels {
                    let mut hits = Vec::with_capacity(4);
                    for e in 0..4 {
                        let (a, b) = (e, (e + 1) % 4);
                        if (v[a] < level) != (v[b] < level) {
                            let t = (level - v[a]) / (v[b] - v[a]);
                            let (pa, pb) = (grid.point(corners[a].0, corners[a].1), grid.point(corners[b].0, corners[b].1));
                            hits.push(pa + (pb - pa) * t);
                        }
                    }
                    for pair in hits.chunks_exact(2) {
                        let ((x0, y0), (x1, y1)) = (self.xy(pair[0]), self.xy(pair[1]));
                        let _ = write!(d, "M{x0:.2} {y0:.2} L{x1:.2} {y1:.2} ");
                    }
                }
            }
        }
        if !d.is_empty() {
            let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="0.8"/>"#, d.trim_end());
        }
    }

    pub fn finish(self) -> String {
        let w = (self.max.re - self.min.re) * self.scale;
        let h = (self.max.im - self.min.im) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Uniform `nx × ny` grid over a box.
pub struct Grid {
    pub lo: C64,
    pub hi: C64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Square-celled grid with `n` points along the longer side of the box.
    pub fn covering(lo: C64, hi: C64, n: usize) -> Self {
        let (w, h) = (hi.re - lo.re, hi.im - lo.im);
        let step = w.max(h) / (n - 1) as f64;
        Self { lo, hi, nx: ((w / step).round() as usize + 1).max(2), ny: ((h / step).round() as usize + 1).max(2) }
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.lo.re + (self.hi.re - self.lo.re) * i as f64 / (self.nx - 1) as f64,
            self.lo.im + (self.hi.im - self.lo.im) * j as f64 / (self.ny - 1) as f64,
        )
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j))).map(|(i, j)| self.point(i, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_contour_is_drawn() {
        let grid = Grid::covering(C64::new(-1.0, -1.0), C64::new(1.0, 1.0), 21);
        let values: Vec<Option<f64>> = grid.points().iter().map(|z| Some(z.norm())).collect();
        let mut svg = Svg::framing([grid.lo, grid.hi]);
        svg.contours(&grid, &values, &[0.5], "red");
        let out = svg.finish();
        assert!(out.starts_with("<svg") && out.contains("stroke=\"red\""));
    }
}
