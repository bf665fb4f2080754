//! Static SVG rendering of one- and two-variable decompositions.

use std::fmt::Write;

use num_rational::BigRational;
use thiserror::Error;

use super::{CADResult, Cell, Coord, Point};
use crate::formulation::Problem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlotError {
    #[error("can only plot problems in one or two variables, this one has {0}")]
    Dimension(usize),
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const GRID: usize = 24;

fn colour(truth: &[bool]) -> String {
    const PALETTE: [&str; 7] = ["#e4572e", "#4c9f70", "#3f88c5", "#f2a541", "#8e6c8a", "#17bebb", "#c5d86d"];
    let bits = truth.iter().enumerate().fold(0usize, |acc, (i, &t)| acc | (usize::from(t) << i));
    if bits == 0 {
        "#eeeeee".to_string()
    } else {
        PALETTE[(bits - 1) % PALETTE.len()].to_string()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let span = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (-1.0, 1.0)
            } else if hi - lo < 1e-9 {
                (lo - 1.0, hi + 1.0)
            } else {
                let m = 0.1 * (hi - lo);
                (lo - m, hi + m)
            }
        };
        let (x0, x1) = span(xs);
        let (y0, y1) = span(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        (x - self.x0) / (self.x1 - self.x0) * W
    }

    fn py(&self, y: f64) -> f64 {
        H - (y - self.y0) / (self.y1 - self.y0) * H
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Roots of the stack over `x`, as floats, or `None` if the count differs
/// from `want`.
fn roots_at(res: &CADResult, prefix: &[usize], x: f64, want: usize) -> Option<Vec<f64>> {
    let st = res.stacks.get(prefix)?;
    let mut p = Point::new(2);
    p.push(Coord::Rat(rat(x)));
    let r = p.stack_roots(&st.polys);
    (r.len() == want).then(|| r.iter().map(Coord::to_f64).collect())
}

fn index_attr(c: &Cell) -> String {
    c.index.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Render cells coloured by truth vector; sections are stroked.
pub fn plot_svg(res: &CADResult, prob: &Problem) -> Result<String, PlotError> {
    let n = res.nvars;
    if n > 2 || n == 0 {
        return Err(PlotError::Dimension(n));
    }
    let line: Vec<f64> = res.stacks.get(&Vec::new()).map(|s| s.roots.iter().map(Coord::to_f64).collect()).unwrap_or_default();
    let mut ys: Vec<f64> = Vec::new();
    if n == 2 {
        for (k, st) in &res.stacks {
            if k.len() == 1 {
                ys.extend(st.roots.iter().map(Coord::to_f64));
            }
        }
    }
    let mut f = Frame::fit(&line, &ys);
    if n == 1 {
        f.y0 = -1.0;
        f.y1 = 1.0;
    }
    // outer sectors extend to the frame; x bounds of the i-th first-level cell
    let xb = |i: usize| -> (f64, f64) {
        let s = (i - 1) / 2;
        let lo = if s == 0 { f.x0 } else { line[s - 1] };
        let hi = if s == line.len() { f.x1 } else { line[s] };
        (lo, hi)
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let names = prob.order.names();
    let _ = writeln!(out, "<title>{}</title>", names.join(", "));
    let mut cells: Vec<&Cell> = res.cells.iter().collect();
    // draw regions first, then curves, then points
    cells.sort_by_key(|c| std::cmp::Reverse(c.dimension()));
    for c in cells {
        let col = colour(&c.truth);
        let id = index_attr(c);
        let i = c.index[0];
        if n == 1 {
            if i % 2 == 1 {
                let (a, b) = xb(i);
                let _ = writeln!(out, r#"<rect class="cell" data-index="{id}" x="{:.2}" y="{:.2}" width="{:.2}" height="20" fill="{col}"/>"#, f.px(a), H / 2.0 - 10.0, f.px(b) - f.px(a));
            } else {
                let x = c.sample[0].to_f64();
                let _ = writeln!(out, r#"<circle class="cell" data-index="{id}" cx="{:.2}" cy="{:.2}" r="4" fill="{col}" stroke="black"/>"#, f.px(x), H / 2.0);
            }
            continue;
        }
        let j = c.index[1];
        let m = res.stacks.get(&c.index[..1]).map_or(0, |s| s.roots.len());
        if i % 2 == 1 {
            let (a, b) = xb(i);
            let xs: Vec<f64> = (1..GRID).map(|t| a + (b - a) * t as f64 / GRID as f64).collect();
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for &x in &xs {
                let Some(r) = roots_at(res, &c.index[..1], x, m) else { continue };
                let s = (j - 1) / 2;
                if j % 2 == 1 {
                    lower.push((x, if s == 0 { f.y0 } else { r[s - 1] }));
                    upper.push((x, if s == m { f.y1 } else { r[s] }));
                } else {
                    lower.push((x, r[j / 2 - 1]));
                }
            }
            if j % 2 == 1 {
                let pts: Vec<String> = lower
                    .iter()
                    .chain(upper.iter().rev())
                    .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y.clamp(f.y0, f.y1))))
                    .collect();
                let _ = writeln!(out, r#"<polygon class="cell" data-index="{id}" points="{}" fill="{col}" stroke="none"/>"#, pts.join(" "));
            } else {
                let pts: Vec<String> = lower.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
                let _ = writeln!(out, r#"<polyline class="cell" data-index="{id}" points="{}" fill="none" stroke="{col}" stroke-width="3"/>"#, pts.join(" "));
            }
        } else {
            let x = c.sample[0].to_f64();
            let ys: Vec<f64> = res.stacks.get(&c.index[..1]).map(|s| s.roots.iter().map(Coord::to_f64).collect()).unwrap_or_default();
            if j % 2 == 1 {
                let s = (j - 1) / 2;
                let lo = if s == 0 { f.y0 } else { ys[s - 1] };
                let hi = if s == ys.len() { f.y1 } else { ys[s] };
                let _ = writeln!(out, r#"<line class="cell" data-index="{id}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{col}" stroke-width="2"/>"#, f.px(x), f.py(lo), f.px(x), f.py(hi));
            } else {
                let y = c.sample[1].to_f64();
                let _ = writeln!(out, r#"<circle class="cell" data-index="{id}" cx="{:.2}" cy="{:.2}" r="3.5" fill="{col}" stroke="black"/>"#, f.px(x), f.py(y));
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
