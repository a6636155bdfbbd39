//! Marching-squares contour extraction and SVG output.

use std::collections::HashMap;
use std::fmt::Write;

use vlab_core::format::fmt_sig;
use vlab_core::FieldGrid64;

/// Significant digits of every coordinate written to SVG.
pub const SVG_DIGITS: usize = 6;
const WIDTH: f64 = 800.0;
const THIN: f64 = 0.6;
const THICK: f64 = 2.2;

/// A point vortex drawn on top of the contours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub strength: f64,
}

/// Grid edge: `(0, i, j)` joins nodes `(i, j)` and `(i + 1, j)`,
/// `(1, i, j)` joins `(i, j)` and `(i, j + 1)`.
type EdgeKey = (u8, usize, usize);

fn edge_point(grid: &FieldGrid64, key: EdgeKey, level: f64) -> [f64; 2] {
    let (kind, i, j) = key;
    let (i2, j2) = if kind == 0 { (i + 1, j) } else { (i, j + 1) };
    let (va, vb) = (grid.value(i, j), grid.value(i2, j2));
    let t = (level - va) / (vb - va);
    let (xa, ya) = (grid.x(i), grid.y(j));
    let (xb, yb) = (grid.x(i2), grid.y(j2));
    [xa + t * (xb - xa), ya + t * (yb - ya)]
}

fn cell_segments(grid: &FieldGrid64, i: usize, j: usize, level: f64, out: &mut Vec<(EdgeKey, EdgeKey)>) {
    let v = [
        grid.value(i, j),
        grid.value(i + 1, j),
        grid.value(i + 1, j + 1),
        grid.value(i, j + 1),
    ];
    if v.iter().any(|x| !x.is_finite()) {
        return;
    }
    let above = v.map(|x| x >= level);
    // bottom, right, top, left; edge e joins corners e and e + 1
    let edges: [EdgeKey; 4] = [(0, i, j), (1, i + 1, j), (0, i, j + 1), (1, i, j)];
    let crossed: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
    match crossed.len() {
        2 => out.push((edges[crossed[0]], edges[crossed[1]])),
        4 => {
            // saddle cell: the centre value decides which diagonal connects
            let centre = v.iter().sum::<f64>() / 4.0 >= level;
            if centre == above[0] {
                out.push((edges[0], edges[1]));
                out.push((edges[2], edges[3]));
            } else {
                out.push((edges[3], edges[0]));
                out.push((edges[1], edges[2]));
            }
        }
        _ => {}
    }
}

/// Polylines of the level set `value = level`; closed loops repeat their
/// first point. Cells touching a masked node are skipped.
pub fn contour_lines(grid: &FieldGrid64, level: f64) -> Vec<Vec<[f64; 2]>> {
    if grid.nx < 2 || grid.ny < 2 || !level.is_finite() {
        return Vec::new();
    }
    let mut segs = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            cell_segments(grid, i, j, level, &mut segs);
        }
    }
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segs.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut keys = Vec::new();
        let mut cur = start;
        while let Some(&s) = adjacency[&cur].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let (a, b) = segs[s];
            cur = if a == cur { b } else { a };
            keys.push(cur);
        }
        keys
    };
    let mut lines = Vec::new();
    for s in 0..segs.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segs[s];
        let forward = walk(b, &mut used);
        let closed = forward.last() == Some(&a);
        let mut keys = if closed { Vec::new() } else { walk(a, &mut used) };
        keys.reverse();
        keys.push(a);
        keys.push(b);
        keys.extend(forward);
        lines.push(keys.into_iter().map(|k| edge_point(grid, k, level)).collect());
    }
    lines
}

/// `count` levels evenly spaced between the 2nd and 98th percentiles of
/// the unmasked values; the logarithmic spikes at vortices are excluded.
pub fn auto_levels(grid: &FieldGrid64, count: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = grid.values.iter().copied().filter(|v| v.is_finite()).collect();
    if vals.is_empty() || count == 0 {
        return Vec::new();
    }
    vals.sort_by(f64::total_cmp);
    let pick = |q: f64| vals[((vals.len() - 1) as f64 * q).round() as usize];
    let (lo, hi) = (pick(0.02), pick(0.98));
    if !(hi > lo) {
        return Vec::new();
    }
    (0..count).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64).collect()
}

struct Frame {
    x_min: f64,
    y_max: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(grid: &FieldGrid64) -> Self {
        let w = &grid.window;
        let scale = WIDTH / (w.x_max - w.x_min);
        Self { x_min: w.x_min, y_max: w.y_max, scale, height: (w.y_max - w.y_min) * scale }
    }

    fn map(&self, p: [f64; 2]) -> (String, String) {
        (
            fmt_sig((p[0] - self.x_min) * self.scale, SVG_DIGITS),
            fmt_sig((self.y_max - p[1]) * self.scale, SVG_DIGITS),
        )
    }
}

fn write_lines(svg: &mut String, frame: &Frame, lines: &[Vec<[f64; 2]>]) {
    for line in lines {
        svg.push_str("<polyline points=\"");
        for (k, p) in line.iter().enumerate() {
            let (x, y) = frame.map(*p);
            if k > 0 {
                svg.push(' ');
            }
            let _ = write!(svg, "{x},{y}");
        }
        svg.push_str("\"/>\n");
    }
}

/// A thick contour level, optionally restricted to the polylines passing
/// through one of `through` (saddle positions).
#[derive(Debug, Clone, PartialEq)]
pub struct Highlight {
    pub level: f64,
    pub through: Vec<[f64; 2]>,
}

/// SVG contour plot of `grid`: `levels` drawn thin, `highlight_levels`
/// (saddle levels) thick, vortices as filled dots, red for positive and
/// blue for negative circulation.
pub fn render_contours(grid: &FieldGrid64, levels: &[f64], highlight_levels: &[f64], markers: &[Marker]) -> String {
    let highlights: Vec<Highlight> = highlight_levels
        .iter()
        .map(|&level| Highlight { level, through: Vec::new() })
        .collect();
    render_figure(grid, levels, &highlights, markers)
}

/// As [`render_contours`]; a highlight with anchor points keeps only the
/// polylines that come within two grid cells of an anchor.
pub fn render_figure(grid: &FieldGrid64, levels: &[f64], highlights: &[Highlight], markers: &[Marker]) -> String {
    let frame = Frame::new(grid);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = fmt_sig(WIDTH, SVG_DIGITS),
        h = fmt_sig(frame.height, SVG_DIGITS)
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(svg, "<g class=\"levels\" fill=\"none\" stroke=\"#34495e\" stroke-width=\"{THIN}\">");
    for &level in levels {
        write_lines(&mut svg, &frame, &contour_lines(grid, level));
    }
    svg.push_str("</g>\n");
    let _ = writeln!(svg, "<g class=\"separatrices\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{THICK}\">");
    let reach = 2.0 * grid.dx().hypot(grid.dy());
    for hl in highlights {
        let mut lines = contour_lines(grid, hl.level);
        if !hl.through.is_empty() {
            lines.retain(|line| {
                line.iter()
                    .any(|p| hl.through.iter().any(|a| (p[0] - a[0]).hypot(p[1] - a[1]) < reach))
            });
        }
        write_lines(&mut svg, &frame, &lines);
    }
    svg.push_str("</g>\n<g class=\"vortices\">\n");
    let w = &grid.window;
    for m in markers {
        if m.x < w.x_min || m.x > w.x_max || m.y < w.y_min || m.y > w.y_max {
            continue;
        }
        let (x, y) = frame.map([m.x, m.y]);
        let fill = if m.strength > 0.0 { "#c0392b" } else { "#2c5aa0" };
        let _ = writeln!(svg, "<circle cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"{fill}\"/>");
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use vlab_core::field::{sample_grid, GridSample, Resolution, Window};

    fn grid(f: impl Fn(f64, f64) -> f64 + Sync) -> FieldGrid64 {
        let w = Window::new(0.0, 1.0, 0.0, 1.0).unwrap();
        sample_grid(w, Resolution::new(11, 11).unwrap(), |z| GridSample::Scalar(f(z.re, z.im)))
    }

    #[test]
    fn constant_grid_has_no_contours() {
        let g = grid(|_, _| 2.0);
        for level in [1.0, 2.0, 3.0] {
            assert!(contour_lines(&g, level).is_empty());
        }
        let svg = render_contours(&g, &[2.0], &[2.0], &[]);
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn linear_ramp_gives_one_straight_line() {
        let g = grid(|x, y| 0.3 * x + 0.7 * y);
        let lines = contour_lines(&g, 0.41);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert!(line.len() > 2);
        for p in line {
            assert!((0.3 * p[0] + 0.7 * p[1] - 0.41).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_is_one_closed_loop() {
        let g = grid(|x, y| (x - 0.5).powi(2) + (y - 0.5).powi(2));
        let lines = contour_lines(&g, 0.09);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].first(), lines[0].last());
    }

    #[test]
    fn saddle_cells_split_into_two_branches() {
        let g = grid(|x, y| (x - 0.55) * (y - 0.55));
        assert_eq!(contour_lines(&g, 0.01).len(), 2);
    }

    #[test]
    fn masked_cells_are_skipped() {
        let g = grid(|x, _| if x > 0.45 && x < 0.55 { f64::NAN } else { x });
        assert!(contour_lines(&g, 0.5).is_empty());
        assert_eq!(contour_lines(&g, 0.2).len(), 1);
    }

    #[test]
    fn svg_marks_vortices_by_sign_and_highlights() {
        let g = grid(|x, _| x);
        let markers = [
            Marker { x: 0.25, y: 0.5, strength: 1.0 },
            Marker { x: 0.75, y: 0.5, strength: -1.0 },
            Marker { x: 3.0, y: 0.5, strength: 1.0 },
        ];
        let svg = render_contours(&g, &[0.2], &[0.6], &markers);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("#c0392b") && svg.contains("#2c5aa0"));
        let thick = svg.split("class=\"separatrices\"").nth(1).unwrap();
        assert_eq!(thick.matches("<polyline").count(), 1);
        assert_eq!(svg, render_contours(&g, &[0.2], &[0.6], &markers));
    }

    #[test]
    fn anchored_highlight_keeps_lines_through_the_anchor() {
        // two parallel level lines x = 0.25 and x = 0.75 of |x - 1/2|
        let g = grid(|x, _| (x - 0.5).abs());
        assert_eq!(contour_lines(&g, 0.25).len(), 2);
        let hl = [Highlight { level: 0.25, through: vec![[0.75, 0.5]] }];
        let svg = render_figure(&g, &[], &hl, &[]);
        let thick = svg.split("class=\"separatrices\"").nth(1).unwrap();
        assert_eq!(thick.matches("<polyline").count(), 1);
        assert!(thick.contains("600,"));
    }

    #[test]
    fn auto_levels_span_the_bulk() {
        let g = grid(|x, _| x);
        let l = auto_levels(&g, 4);
        assert_eq!(l.len(), 4);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert!(auto_levels(&grid(|_, _| 1.0), 4).is_empty());
    }
}
