//! Minimal SVG line and box plots. Presentational only.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

pub struct Line<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

fn extent(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_labels(s: &mut String, x: (f64, f64), y: (f64, f64)) {
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="11" font-family="sans-serif">{:.3}</text>"#,
        H - PAD + 16.0,
        x.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif" text-anchor="end">{:.3}</text>"#,
        W - PAD,
        H - PAD + 16.0,
        x.1
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif" text-anchor="end">{:.3e}</text>"#,
        PAD - 4.0,
        H - PAD,
        y.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif" text-anchor="end">{:.3e}</text>"#,
        PAD - 4.0,
        PAD + 10.0,
        y.1
    );
}

pub fn line_plot(title: &str, lines: &[Line<'_>]) -> String {
    let x = extent(lines.iter().flat_map(|l| l.xs.iter().copied()));
    let y = extent(lines.iter().flat_map(|l| l.ys.iter().copied()));
    let px = |v: f64| PAD + (v - x.0) / (x.1 - x.0) * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - (v - y.0) / (y.1 - y.0) * (H - 2.0 * PAD);
    let mut s = header(title);
    axis_labels(&mut s, x, y);
    for (i, l) in lines.iter().enumerate() {
        let pts: Vec<String> =
            l.xs.iter()
                .zip(l.ys)
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b)))
                .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            l.color,
            pts.join(" ")
        );
        let ly = PAD + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" font-family="sans-serif" fill="{}">{}</text>"#,
            W - PAD - 140.0,
            l.color,
            escape(l.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One box per group from `[min, q25, median, q75, max]`, with a dashed
/// reference line at `reference`.
pub fn box_plot(title: &str, groups: &[(&str, [f64; 5])], reference: f64) -> String {
    let y = extent(groups.iter().flat_map(|g| g.1.iter().copied()).chain(std::iter::once(reference)));
    let py = |v: f64| H - PAD - (v - y.0) / (y.1 - y.0) * (H - 2.0 * PAD);
    let mut s = header(title);
    axis_labels(&mut s, (0.0, groups.len() as f64), y);
    let slot = (W - 2.0 * PAD) / groups.len().max(1) as f64;
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" x2="{}" y1="{r:.2}" y2="{r:.2}" stroke="red" stroke-dasharray="4 3"/>"#,
        W - PAD,
        r = py(reference)
    );
    for (i, (label, q)) in groups.iter().enumerate() {
        let cx = PAD + slot * (i as f64 + 0.5);
        let half = slot * 0.2;
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" x2="{cx:.2}" y1="{:.2}" y2="{:.2}" stroke="black"/>"#,
            py(q[0]),
            py(q[4])
        );
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="lightsteelblue" stroke="black"/>"#,
            cx - half,
            py(q[3]),
            2.0 * half,
            (py(q[1]) - py(q[3])).max(0.5)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" x2="{:.2}" y1="{m:.2}" y2="{m:.2}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            cx + half,
            m = py(q[2])
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{}" font-size="12" font-family="sans-serif" text-anchor="middle">{}</text>"#,
            H - PAD + 30.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
