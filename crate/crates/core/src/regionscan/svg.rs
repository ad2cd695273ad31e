use std::collections::BTreeMap;
use std::io::{self, Write};

use super::{Classification, RegionGrid};

/// Rendering options for [`emit_svg`].
#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub feasible_fill: String,
    pub necessary_stroke: String,
    pub title: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 480.0,
            height: 480.0,
            margin: 56.0,
            feasible_fill: "#a0a0a0".to_string(),
            necessary_stroke: "#000000".to_string(),
            title: true,
        }
    }
}

/// Cell edges along one axis: midpoints between samples, clamped to the
/// first and last sample.
fn edges(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(values[0]);
    e.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    e.push(values[n - 1]);
    e
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    s_min: f64,
    s_max: f64,
    sp_min: f64,
    sp_max: f64,
}

impl Frame {
    fn x(&self, s: f64) -> f64 {
        self.x0 + (s - self.s_min) / (self.s_max - self.s_min) * self.w
    }

    fn y(&self, sp: f64) -> f64 {
        self.y0 + self.h - (sp - self.sp_min) / (self.sp_max - self.sp_min) * self.h
    }
}

/// Feasible cells merged into rectangles `(i0, i1, j0, j1)`, half-open.
fn feasible_rectangles(grid: &RegionGrid) -> Vec<(usize, usize, usize, usize)> {
    let (ns, nsp) = (grid.s_values.len(), grid.s_prime_values.len());
    let runs = |i: usize| {
        let mut out = Vec::new();
        let mut j = 0;
        while j < nsp {
            if grid.cell(i, j).classification == Classification::Feasible {
                let start = j;
                while j < nsp && grid.cell(i, j).classification == Classification::Feasible {
                    j += 1;
                }
                out.push((start, j));
            } else {
                j += 1;
            }
        }
        out
    };
    let mut rects = Vec::new();
    let mut open: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..=ns {
        let current = if i < ns { runs(i) } else { Vec::new() };
        let closed: Vec<(usize, usize)> = open.keys().filter(|k| !current.contains(k)).copied().collect();
        for run in closed {
            let start = open.remove(&run).unwrap();
            rects.push((start, i, run.0, run.1));
        }
        for run in current {
            open.entry(run).or_insert(i);
        }
    }
    rects.sort();
    rects
}

/// Boundary of the necessary region as merged axis-aligned segments in
/// cell-edge index space: `(i0, j0, i1, j1)`.
fn necessary_boundary(grid: &RegionGrid) -> Vec<(usize, usize, usize, usize)> {
    let (ns, nsp) = (grid.s_values.len(), grid.s_prime_values.len());
    let inside = |i: isize, j: isize| {
        i >= 0
            && j >= 0
            && (i as usize) < ns
            && (j as usize) < nsp
            && grid.cell(i as usize, j as usize).classification.is_necessary()
    };
    let mut segments = Vec::new();
    // Vertical edges at s-edge index i, spanning s'-cells j..j+1.
    for i in 0..=ns as isize {
        let mut j = 0isize;
        while j < nsp as isize {
            if inside(i - 1, j) != inside(i, j) {
                let start = j;
                let left = inside(i - 1, j);
                while j < nsp as isize && inside(i - 1, j) != inside(i, j) && inside(i - 1, j) == left {
                    j += 1;
                }
                segments.push((i as usize, start as usize, i as usize, j as usize));
            } else {
                j += 1;
            }
        }
    }
    // Horizontal edges at s'-edge index j, spanning s-cells i..i+1.
    for j in 0..=nsp as isize {
        let mut i = 0isize;
        while i < ns as isize {
            if inside(i, j - 1) != inside(i, j) {
                let start = i;
                let below = inside(i, j - 1);
                while i < ns as isize && inside(i, j - 1) != inside(i, j) && inside(i, j - 1) == below {
                    i += 1;
                }
                segments.push((start as usize, j as usize, i as usize, j as usize));
            } else {
                i += 1;
            }
        }
    }
    segments
}

fn ticks(min: f64, max: f64) -> Vec<f64> {
    let step = if max - min > 1.5 { 0.5 } else { 0.25 };
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-12 {
        out.push(t);
        t += step;
    }
    out
}

/// Renders one grid: feasible cells filled, the necessary region outlined
/// with a dotted line, axes labelled `s` and `s′`.
pub fn emit_svg<W: Write>(grid: &RegionGrid, style: &SvgStyle, mut out: W) -> io::Result<()> {
    let se = edges(&grid.s_values);
    let spe = edges(&grid.s_prime_values);
    let m = style.margin;
    let frame = Frame {
        x0: m,
        y0: m * 0.5,
        w: style.width - 1.5 * m,
        h: style.height - 1.5 * m,
        s_min: se[0],
        s_max: *se.last().unwrap(),
        sp_min: spe[0],
        sp_max: *spe.last().unwrap(),
    };

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    )?;
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        style.width, style.height
    )?;
    if style.title {
        writeln!(out, r#"<title>V = {}, u = {}</title>"#, grid.v, grid.u)?;
    }

    writeln!(out, r#"<g id="feasible" fill="{}" stroke="none">"#, style.feasible_fill)?;
    for (i0, i1, j0, j1) in feasible_rectangles(grid) {
        let (xa, xb) = (frame.x(se[i0]), frame.x(se[i1]));
        let (ya, yb) = (frame.y(spe[j1]), frame.y(spe[j0]));
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            xa,
            ya,
            xb - xa,
            yb - ya
        )?;
    }
    writeln!(out, "</g>")?;

    let segments = necessary_boundary(grid);
    if !segments.is_empty() {
        write!(
            out,
            r#"<path id="necessary" fill="none" stroke="{}" stroke-width="1.2" stroke-dasharray="2,3" d=""#,
            style.necessary_stroke
        )?;
        for (k, (i0, j0, i1, j1)) in segments.into_iter().enumerate() {
            if k > 0 {
                write!(out, " ")?;
            }
            write!(
                out,
                "M{:.2} {:.2}L{:.2} {:.2}",
                frame.x(se[i0]),
                frame.y(spe[j0]),
                frame.x(se[i1]),
                frame.y(spe[j1])
            )?;
        }
        writeln!(out, r#""/>"#)?;
    }

    // Axes.
    writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        frame.x0, frame.y0, frame.w, frame.h
    )?;
    writeln!(out, r#"<g font-family="sans-serif" font-size="12" fill="black">"#)?;
    let bottom = frame.y0 + frame.h;
    for t in ticks(frame.s_min, frame.s_max) {
        let x = frame.x(t);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 4.0
        )?;
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            bottom + 17.0
        )?;
    }
    for t in ticks(frame.sp_min, frame.sp_max) {
        let y = frame.y(t);
        writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
            frame.x0 - 4.0,
            frame.x0
        )?;
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            frame.x0 - 7.0,
            y + 4.0
        )?;
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-style="italic">s</text>"#,
        frame.x0 + frame.w / 2.0,
        bottom + 34.0
    )?;
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-style="italic">s′</text>"#,
        frame.x0 - 36.0,
        frame.y0 + frame.h / 2.0
    )?;
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regionscan::RegionCell;

    fn uniform(class: impl Fn(usize, usize) -> Classification, n: usize) -> RegionGrid {
        let vals: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let mut cells = Vec::new();
        for (i, &s) in vals.iter().enumerate() {
            for (j, &sp) in vals.iter().enumerate() {
                let c = class(i, j);
                let gamma = (c == Classification::Feasible).then_some((0.0, 0.1));
                cells.push(RegionCell {
                    s,
                    s_prime: sp,
                    classification: c,
                    gamma,
                });
            }
        }
        RegionGrid {
            v: 0.5,
            u: 0.0,
            s_values: vals.clone(),
            s_prime_values: vals,
            cells,
        }
    }

    fn render(grid: &RegionGrid) -> String {
        let mut buf = Vec::new();
        emit_svg(grid, &SvgStyle::default(), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn full_grid_is_one_rectangle() {
        let grid = uniform(|_, _| Classification::Feasible, 9);
        assert_eq!(feasible_rectangles(&grid), vec![(0, 9, 0, 9)]);
        let svg = render(&grid);
        let feasible = svg
            .split(r#"<g id="feasible""#)
            .nth(1)
            .unwrap()
            .split("</g>")
            .next()
            .unwrap();
        assert_eq!(feasible.matches("<rect").count(), 1);
        // Outline is the plot frame: four merged segments.
        assert_eq!(necessary_boundary(&grid).len(), 4);
    }

    #[test]
    fn empty_feasible_set_still_has_axes_and_outline() {
        let grid = uniform(
            |i, j| {
                if i + j < 6 {
                    Classification::NecessaryOnly
                } else {
                    Classification::Outside
                }
            },
            9,
        );
        let svg = render(&grid);
        assert!(feasible_rectangles(&grid).is_empty());
        assert!(svg.contains(r#"id="necessary""#));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(">s</text>") && svg.contains(">s′</text>"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn rectangles_cover_exactly_the_feasible_cells() {
        let class = |i: usize, j: usize| {
            if j <= i.min(10 - i) && j > 0 {
                Classification::Feasible
            } else {
                Classification::NecessaryOnly
            }
        };
        let grid = uniform(class, 11);
        let mut covered = [false; 121];
        for (i0, i1, j0, j1) in feasible_rectangles(&grid) {
            for i in i0..i1 {
                for j in j0..j1 {
                    assert!(!covered[i * 11 + j], "overlap");
                    covered[i * 11 + j] = true;
                }
            }
        }
        for i in 0..11 {
            for j in 0..11 {
                assert_eq!(covered[i * 11 + j], class(i, j) == Classification::Feasible);
            }
        }
    }
}
