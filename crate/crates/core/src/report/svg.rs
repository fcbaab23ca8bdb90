//! Minimal standalone SVG output: a drawing surface plus the three chart
//! kinds the reports need.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new() }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="#333" stroke-width="0.5"/>"##
        );
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}" stroke="#222" stroke-width="1"/>"##
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="1.2"/>"##
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r##"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r##"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{}</text>"##,
            escape(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Maps data values onto a pixel interval.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (lo, hi) = if (hi - lo).abs() < 1e-12 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
        Scale { lo, hi, from, to }
    }

    fn at(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn bounds(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;

fn axes(svg: &mut Svg, title: &str, w: f64, h: f64, y: Scale, x_label: &str, y_label: &str) {
    svg.text(w / 2.0, 22.0, 14.0, "middle", title);
    svg.line(LEFT, TOP, LEFT, h - 50.0, "#000");
    svg.line(LEFT, h - 50.0, w - 20.0, h - 50.0, "#000");
    for k in 0..=4 {
        let v = y.lo + (y.hi - y.lo) * k as f64 / 4.0;
        let py = y.at(v);
        svg.line(LEFT - 4.0, py, LEFT, py, "#000");
        svg.text(LEFT - 6.0, py + 4.0, 10.0, "end", &format!("{v:.1}"));
    }
    svg.text(w / 2.0, h - 12.0, 12.0, "middle", x_label);
    svg.text(14.0, TOP - 10.0, 12.0, "start", y_label);
}

/// One bar group per column; bars show `mean` with `± err` whiskers.
pub fn bar_chart(title: &str, groups: &[String], series: &[(String, Vec<Option<(f64, f64)>>)]) -> String {
    let (w, h) = (140.0 + 90.0 * groups.len().max(1) as f64 * series.len().max(1) as f64 / 2.0, 380.0);
    let w = w.max(420.0);
    let mut svg = Svg::new(w, h);
    let values = series
        .iter()
        .flat_map(|(_, v)| v.iter().flatten().flat_map(|&(m, e)| [m - e, m + e]))
        .chain([0.0]);
    let (lo, hi) = bounds(values);
    let y = Scale::new(lo, hi, h - 50.0, TOP);
    axes(&mut svg, title, w, h, y, "config", "mean reward");
    let zero = y.at(0.0);
    svg.line(LEFT, zero, w - 20.0, zero, "#888");
    let group_w = (w - LEFT - 30.0) / groups.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (g, name) in groups.iter().enumerate() {
        let gx = LEFT + 10.0 + g as f64 * group_w;
        svg.text(gx + group_w * 0.4, h - 36.0, 11.0, "middle", name);
        for (s, (_, vals)) in series.iter().enumerate() {
            let Some((m, e)) = vals.get(g).copied().flatten() else { continue };
            let x = gx + s as f64 * bar_w;
            let (top, bottom) = if m >= 0.0 { (y.at(m), zero) } else { (zero, y.at(m)) };
            svg.rect(x, top, bar_w * 0.9, (bottom - top).max(0.5), color(s));
            let cx = x + bar_w * 0.45;
            svg.line(cx, y.at(m - e), cx, y.at(m + e), "#000");
            svg.line(cx - 3.0, y.at(m + e), cx + 3.0, y.at(m + e), "#000");
            svg.line(cx - 3.0, y.at(m - e), cx + 3.0, y.at(m - e), "#000");
        }
    }
    legend(&mut svg, w, series.iter().map(|s| s.0.as_str()));
    svg.finish()
}

fn legend<'a>(svg: &mut Svg, w: f64, names: impl Iterator<Item = &'a str>) {
    for (i, name) in names.enumerate() {
        let y = TOP + 14.0 * i as f64;
        svg.rect(w - 130.0, y - 8.0, 9.0, 9.0, color(i));
        svg.text(w - 116.0, y, 10.0, "start", name);
    }
}

/// Labelled points, e.g. activity share against reward.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[(String, f64, f64)]) -> String {
    let (w, h) = (520.0, 380.0);
    let mut svg = Svg::new(w, h);
    let (xlo, xhi) = bounds(points.iter().map(|p| p.1));
    let (ylo, yhi) = bounds(points.iter().map(|p| p.2));
    let (xlo, xhi) = if xlo.is_finite() { (xlo, xhi) } else { (0.0, 1.0) };
    let (ylo, yhi) = if ylo.is_finite() { (ylo, yhi) } else { (0.0, 1.0) };
    let pad_x = ((xhi - xlo) * 0.1).max(1e-3);
    let pad_y = ((yhi - ylo) * 0.1).max(1e-3);
    let x = Scale::new(xlo - pad_x, xhi + pad_x, LEFT, w - 20.0);
    let y = Scale::new(ylo - pad_y, yhi + pad_y, h - 50.0, TOP);
    axes(&mut svg, title, w, h, y, x_label, y_label);
    for (i, (label, px, py)) in points.iter().enumerate() {
        svg.circle(x.at(*px), y.at(*py), 4.5, color(i));
        svg.text(x.at(*px) + 7.0, y.at(*py) - 5.0, 10.0, "start", label);
    }
    svg.finish()
}

/// One polyline per named series over a shared step axis.
pub fn line_chart(title: &str, series: &[(String, Vec<(usize, f64)>)]) -> String {
    let (w, h) = (620.0, 380.0);
    let mut svg = Svg::new(w, h);
    let max_t = series.iter().flat_map(|s| s.1.iter().map(|p| p.0)).max().unwrap_or(1);
    let x = Scale::new(0.0, max_t as f64, LEFT, w - 140.0);
    let (lo, hi) = bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let y = Scale::new(lo, hi, h - 50.0, TOP);
    axes(&mut svg, title, w, h, y, "step", "mean reward per step");
    for (i, (_, pts)) in series.iter().enumerate() {
        let mapped: Vec<(f64, f64)> = pts.iter().map(|&(t, v)| (x.at(t as f64), y.at(v))).collect();
        svg.polyline(&mapped, color(i));
    }
    legend(&mut svg, w, series.iter().map(|s| s.0.as_str()));
    svg.finish()
}
