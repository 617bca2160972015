//! Static SVG box plots: one box per configuration (median, quartiles,
//! whiskers at 1.5·IQR, outlier dots).

/// Five-number summary plus outliers for one box.
struct BoxStats {
    q1: f64,
    median: f64,
    q3: f64,
    whisker_lo: f64,
    whisker_hi: f64,
    outliers: Vec<f64>,
}

/// Linear-interpolation quantile over a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn box_stats(values: &[f64]) -> BoxStats {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_lo = q1 - 1.5 * iqr;
    let fence_hi = q3 + 1.5 * iqr;
    let whisker_lo = sorted
        .iter()
        .copied()
        .find(|&v| v >= fence_lo)
        .unwrap_or(q1);
    let whisker_hi = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= fence_hi)
        .unwrap_or(q3);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < fence_lo || v > fence_hi)
        .collect();
    BoxStats {
        q1,
        median,
        q3,
        whisker_lo,
        whisker_hi,
        outliers,
    }
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render one box plot per (label, values) group, in input order.
pub fn render_box_plot(groups: &[(String, Vec<f64>)], title: &str, y_label: &str) -> String {
    const LEFT: f64 = 70.0;
    const TOP: f64 = 50.0;
    const BOX_SLOT: f64 = 58.0;
    const BOX_WIDTH: f64 = 34.0;
    const PLOT_H: f64 = 360.0;
    const BOTTOM_PAD: f64 = 110.0;

    let n = groups.len();
    let width = LEFT + n as f64 * BOX_SLOT + 40.0;
    let height = TOP + PLOT_H + BOTTOM_PAD;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, values) in groups {
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = (hi - lo) * 0.07;
    let (lo, hi) = (lo - pad, hi + pad);
    let y = |v: f64| TOP + PLOT_H * (1.0 - (v - lo) / (hi - lo));

    let mut out = String::new();
    out.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    out.push('\n');
    out.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        width / 2.0,
        esc(title)
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0,
        esc(y_label)
    ));
    out.push('\n');

    // y axis with ticks
    out.push_str(&format!(
        r#"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="black"/>"#,
        TOP + PLOT_H
    ));
    out.push('\n');
    for t in 0..=5 {
        let v = lo + (hi - lo) * t as f64 / 5.0;
        let ty = y(v);
        out.push_str(&format!(
            r#"<line x1="{:.1}" y1="{ty:.1}" x2="{LEFT:.1}" y2="{ty:.1}" stroke="black"/>"#,
            LEFT - 5.0
        ));
        out.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.3}</text>"#,
            LEFT - 8.0,
            ty + 4.0
        ));
        out.push('\n');
    }

    for (i, (label, values)) in groups.iter().enumerate() {
        let cx = LEFT + (i as f64 + 0.5) * BOX_SLOT;
        let half = BOX_WIDTH / 2.0;
        if values.is_empty() {
            continue;
        }
        let s = box_stats(values);
        // whisker stems and caps
        out.push_str(&format!(
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(s.whisker_hi),
            y(s.q3)
        ));
        out.push_str(&format!(
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(s.q1),
            y(s.whisker_lo)
        ));
        for w in [s.whisker_lo, s.whisker_hi] {
            out.push_str(&format!(
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
                cx - half / 2.0,
                y(w),
                cx + half / 2.0,
                y(w)
            ));
        }
        // box and median
        out.push_str(&format!(
            r##"<rect x="{:.1}" y="{:.1}" width="{BOX_WIDTH:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            cx - half,
            y(s.q3),
            (y(s.q1) - y(s.q3)).max(0.5)
        ));
        out.push_str(&format!(
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="1.6"/>"#,
            cx - half,
            y(s.median),
            cx + half,
            y(s.median)
        ));
        for &o in &s.outliers {
            out.push_str(&format!(
                r#"<circle cx="{cx:.1}" cy="{:.1}" r="2.4" fill="none" stroke="black"/>"#,
                y(o)
            ));
        }
        out.push('\n');
        // x label, angled
        let lx = cx;
        let ly = TOP + PLOT_H + 14.0;
        out.push_str(&format!(
            r#"<text x="{lx:.1}" y="{ly:.1}" font-family="sans-serif" font-size="10" text-anchor="end" transform="rotate(-45 {lx:.1} {ly:.1})">{}</text>"#,
            esc(label)
        ));
        out.push('\n');
    }

    out.push_str("</svg>\n");
    out
}
