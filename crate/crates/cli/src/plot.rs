//! Minimal SVG rendering: line charts and heatmaps.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] =
    ["#1f3b99", "#d1495b", "#2e8b57", "#e09f3e", "#6a4c93", "#000000", "#00798c", "#8d6e63"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dotted,
    Dashed,
}

impl Stroke {
    fn dasharray(self) -> &'static str {
        match self {
            Stroke::Solid => "",
            Stroke::Dotted => " stroke-dasharray=\"2,3\"",
            Stroke::Dashed => " stroke-dasharray=\"7,4\"",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub stroke: Stroke,
}

#[derive(Debug, Clone, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub curves: Vec<Curve>,
    /// Horizontal reference lines.
    pub h_lines: Vec<(String, f64)>,
    /// Vertical reference lines.
    pub v_lines: Vec<(String, f64)>,
    pub log_y: bool,
}

struct Scale {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    log: bool,
}

impl Scale {
    fn new(lo: f64, hi: f64, a: f64, b: f64, log: bool) -> Self {
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { lo, hi, a, b, log }
    }

    fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            return (a..=b).map(|e| 10f64.powi(e)).filter(|t| self.contains(*t)).collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(raw);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }

    fn contains(&self, v: f64) -> bool {
        let v = if self.log { v.log10() } else { v };
        v >= self.lo - 1e-9 && v <= self.hi + 1e-9
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, xs: &Scale, ys: &Scale, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        x1 - x0,
        y0 - y1
    );
    for t in xs.ticks() {
        let x = xs.map(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{y0}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>\
             <text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            y0 + 5.0,
            y0 + 18.0,
            fmt_tick(t)
        );
    }
    for t in ys.ticks() {
        let y = ys.map(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{x0}\" y2=\"{y:.2}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text transform=\"translate(18,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn finite_range(values: impl Iterator<Item = f64>, log: bool) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite() && (!log || *v > 0.0))
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

impl LineChart {
    pub fn render(&self) -> String {
        let mut svg = String::new();
        header(&mut svg, &self.title);
        let xr = finite_range(
            self.curves
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.0))
                .chain(self.v_lines.iter().map(|l| l.1)),
            false,
        )
        .unwrap_or((0.0, 1.0));
        let yr = finite_range(
            self.curves
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.1))
                .chain(self.h_lines.iter().map(|l| l.1)),
            self.log_y,
        )
        .unwrap_or((0.0, 1.0));
        let pad = if self.log_y { 0.0 } else { 0.05 * (yr.1 - yr.0) };
        let xs = Scale::new(xr.0, xr.1, LEFT, WIDTH - RIGHT, false);
        let ys = Scale::new(yr.0 - pad, yr.1 + pad, HEIGHT - BOTTOM, TOP, self.log_y);
        axes(&mut svg, &xs, &ys, &self.x_label, &self.y_label);

        for (label, y) in &self.h_lines {
            let y = ys.map(*y);
            let _ = writeln!(
                svg,
                "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"gray\" \
                 stroke-dasharray=\"5,4\"><title>{}</title></line>",
                WIDTH - RIGHT,
                escape(label)
            );
        }
        for (label, x) in &self.v_lines {
            let x = xs.map(*x);
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"green\" \
                 stroke-dasharray=\"2,3\"><title>{}</title></line>",
                HEIGHT - BOTTOM,
                escape(label)
            );
        }
        for (k, c) in self.curves.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            // break the path at undefined values
            let mut d = String::new();
            let mut pen_down = false;
            for &(x, y) in &c.points {
                if !y.is_finite() || (self.log_y && y <= 0.0) {
                    pen_down = false;
                    continue;
                }
                let cmd = if pen_down { 'L' } else { 'M' };
                let _ = write!(d, "{cmd}{:.2},{:.2} ", xs.map(x), ys.map(y));
                pen_down = true;
            }
            let _ = writeln!(
                svg,
                "<path d=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.6\"{}/>",
                d.trim_end(),
                c.stroke.dasharray()
            );
            let ly = TOP + 14.0 + 18.0 * k as f64;
            let lx = WIDTH - RIGHT + 12.0;
            let _ = writeln!(
                svg,
                "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" \
                 stroke-width=\"1.6\"{}/><text x=\"{}\" y=\"{}\">{}</text>",
                lx + 22.0,
                c.stroke.dasharray(),
                lx + 28.0,
                ly + 4.0,
                escape(&c.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[derive(Debug, Clone, Default)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major, `values[j][i]` at `(xs[i], ys[j])`.
    pub values: Vec<Vec<f64>>,
}

/// Perceptually ordered blue → yellow ramp.
fn colour(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let k = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Cell edges centred on the sample points.
fn edges(v: &[f64]) -> Vec<f64> {
    if v.len() == 1 {
        return vec![v[0] - 0.5, v[0] + 0.5];
    }
    let mut e = vec![v[0] - 0.5 * (v[1] - v[0])];
    e.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let n = v.len();
    e.push(v[n - 1] + 0.5 * (v[n - 1] - v[n - 2]));
    e
}

impl Heatmap {
    pub fn render(&self) -> String {
        let mut svg = String::new();
        header(&mut svg, &self.title);
        let (ex, ey) = (edges(&self.xs), edges(&self.ys));
        let xs = Scale::new(ex[0], *ex.last().unwrap(), LEFT, WIDTH - RIGHT, false);
        let ys = Scale::new(ey[0], *ey.last().unwrap(), HEIGHT - BOTTOM, TOP, false);
        let (lo, hi) =
            finite_range(self.values.iter().flatten().copied(), false).unwrap_or((0.0, 1.0));
        let span = if hi > lo { hi - lo } else { 1.0 };
        for (j, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                let fill = if v.is_finite() { colour((v - lo) / span) } else { "#cccccc".into() };
                let (x0, x1) = (xs.map(ex[i]), xs.map(ex[i + 1]));
                let (y0, y1) = (ys.map(ey[j + 1]), ys.map(ey[j]));
                let _ = writeln!(
                    svg,
                    "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                    x1 - x0 + 0.3,
                    y1 - y0 + 0.3
                );
            }
        }
        axes(&mut svg, &xs, &ys, &self.x_label, &self.y_label);
        let bx = WIDTH - RIGHT + 20.0;
        let (by0, by1) = (HEIGHT - BOTTOM, TOP);
        let steps = 40;
        for k in 0..steps {
            let t0 = k as f64 / steps as f64;
            let y = by0 + (by1 - by0) * (k + 1) as f64 / steps as f64;
            let _ = writeln!(
                svg,
                "<rect x=\"{bx}\" y=\"{y:.2}\" width=\"16\" height=\"{:.2}\" fill=\"{}\"/>",
                (by0 - by1) / steps as f64 + 0.3,
                colour(t0 + 0.5 / steps as f64)
            );
        }
        for (t, v) in [(0.0, lo), (0.5, 0.5 * (lo + hi)), (1.0, hi)] {
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{:.2}\">{}</text>",
                bx + 22.0,
                by0 + (by1 - by0) * t + 4.0,
                fmt_tick((v * 1e4).round() / 1e4)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}
