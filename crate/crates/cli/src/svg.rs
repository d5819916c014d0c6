//! Minimal SVG scatter/line charts.

use std::fmt::Write;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Markers { radius: f64 },
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub color: &'static str,
}

/// Vertical reference line with a label at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Compact tick label.
fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e6).contains(&a) {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:e}")
    }
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    let mults: &[f64] = if b - a <= 2 { &[1.0, 2.0, 5.0] } else { &[1.0] };
    let mut out = Vec::new();
    for e in a..=b {
        for &k in mults {
            let v = k * 10f64.powi(e);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                out.push(v);
            }
        }
    }
    out
}

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(scale: Scale, range: (f64, f64), px_lo: f64, px_hi: f64) -> Self {
        Self {
            scale,
            lo: range.0,
            hi: range.1,
            px_lo,
            px_hi,
        }
    }

    fn fwd(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }

    fn map(&self, v: f64) -> f64 {
        let (a, b) = (self.fwd(self.lo), self.fwd(self.hi));
        self.px_lo + (self.fwd(v) - a) / (b - a) * (self.px_hi - self.px_lo)
    }

    fn contains(&self, v: f64) -> bool {
        v.is_finite() && v >= self.lo && v <= self.hi && (self.scale == Scale::Linear || v > 0.0)
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => linear_ticks(self.lo, self.hi),
            Scale::Log => log_ticks(self.lo, self.hi),
        }
    }
}

/// Data range over the usable points, padded by 4% (multiplicatively on a
/// log axis).
fn auto_range(values: impl Iterator<Item = f64>, scale: Scale) -> (f64, f64) {
    let usable: Vec<f64> = values
        .filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0))
        .collect();
    let lo = usable.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = usable.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return if scale == Scale::Log { (1.0, 10.0) } else { (0.0, 1.0) };
    }
    match scale {
        Scale::Linear => {
            let pad = if hi > lo { 0.04 * (hi - lo) } else { 0.5_f64.max(0.1 * lo.abs()) };
            (lo - pad, hi + pad)
        }
        Scale::Log => {
            let f = if hi > lo { (hi / lo).powf(0.04) } else { 2.0 };
            (lo / f, hi * f)
        }
    }
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            x_range: None,
            y_range: None,
            series: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let xr = self.x_range.unwrap_or_else(|| {
            auto_range(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.x_scale)
        });
        let yr = self.y_range.unwrap_or_else(|| {
            auto_range(
                self.series
                    .iter()
                    .flat_map(|s| s.points.iter().filter(|p| xr.0 <= p.0 && p.0 <= xr.1).map(|p| p.1)),
                self.y_scale,
            )
        });
        let x = Axis::new(self.x_scale, xr, LEFT, WIDTH - RIGHT);
        let y = Axis::new(self.y_scale, yr, HEIGHT - BOTTOM, TOP);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="26" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Grid and ticks.
        for t in x.ticks() {
            let px = x.map(t);
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#e4e4e4"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                HEIGHT - BOTTOM,
                HEIGHT - BOTTOM + 18.0,
                tick_label(t)
            );
        }
        for t in y.ticks() {
            let py = y.map(t);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e4e4e4"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                WIDTH - RIGHT,
                LEFT - 6.0,
                py + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            WIDTH - LEFT - RIGHT,
            HEIGHT - TOP - BOTTOM
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            HEIGHT - 22.0,
            escape(&self.x_label)
        );
        let cy = (TOP + HEIGHT - BOTTOM) / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="20" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 20 {cy:.2})">{}</text>"#,
            escape(&self.y_label)
        );

        for m in self.markers.iter().filter(|m| x.contains(m.x)) {
            let px = x.map(m.x);
            let _ = writeln!(
                s,
                r##"<line class="marker" x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#c0392b" stroke-dasharray="4 3"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" fill="#c0392b" font-size="10">{}</text>"##,
                HEIGHT - BOTTOM,
                TOP - 4.0,
                escape(&m.label)
            );
        }

        for series in &self.series {
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .copied()
                .filter(|&(a, b)| x.contains(a) && y.contains(b))
                .collect();
            let _ = writeln!(s, r#"<g class="series" data-name="{}">"#, escape(&series.name));
            match series.style {
                Style::Markers { radius } => {
                    for (a, b) in pts {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{}"/>"#,
                            x.map(a),
                            y.map(b),
                            series.color
                        );
                    }
                }
                Style::Line => {
                    let path: Vec<String> = pts
                        .iter()
                        .map(|&(a, b)| format!("{:.2},{:.2}", x.map(a), y.map(b)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                        path.join(" "),
                        series.color
                    );
                }
            }
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        s
    }
}
