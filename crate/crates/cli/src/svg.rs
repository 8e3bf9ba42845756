//! Bar chart of a confidence mass function, written by hand so the bytes
//! depend only on the numbers.

use std::fmt::Write as _;

use mtcherry_core::PmfRow;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn num(x: f64) -> String {
    let text = format!("{x:.2}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    if text == "-0" {
        "0".to_string()
    } else {
        text.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// One bar per value with the cumulative percentage printed above it.
pub fn pmf_chart(rows: &[PmfRow], title: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = TOP + plot_h;
    let peak = rows.iter().map(|r| r.mass).fold(0.0, f64::max);
    let scale = if peak > 0.0 { plot_h / peak } else { 0.0 };
    let slot = plot_w / rows.len().max(1) as f64;
    let bar_w = slot * 0.8;
    let label_every = rows.len().div_ceil(40).max(1);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        num(WIDTH / 2.0),
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="#000" stroke-width="1"/>"##,
        l = num(LEFT),
        r = num(WIDTH - RIGHT),
        b = num(base)
    );
    for (i, row) in rows.iter().enumerate() {
        let mass = row.mass.max(0.0);
        let h = mass * scale;
        let x = LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
        let cx = x + bar_w / 2.0;
        let _ = writeln!(
            s,
            r##"<rect class="bar" x="{}" y="{}" width="{}" height="{}" fill="#4a6fa5"/>"##,
            num(x),
            num(base - h),
            num(bar_w),
            num(h)
        );
        if i % label_every == 0 || i + 1 == rows.len() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}%</text>"#,
                num(cx),
                num(base - h - 6.0),
                num_percent(row.cumulative)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
                num(cx),
                num(base + 16.0),
                row.value
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">number of true hypotheses</text>"#,
        num(LEFT + plot_w / 2.0),
        num(HEIGHT - 18.0)
    );
    s.push_str("</svg>\n");
    s
}

fn num_percent(cumulative: f64) -> String {
    format!("{:.1}", (cumulative * 100.0).clamp(0.0, 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<PmfRow> {
        [
            (0, 0.70, 0.70),
            (1, 0.26, 0.96),
            (2, 0.01, 0.97),
            (3, 0.03, 1.0),
        ]
        .into_iter()
        .map(|(value, mass, cumulative)| PmfRow {
            value,
            mass,
            cumulative,
        })
        .collect()
    }

    #[test]
    fn one_bar_per_value() {
        let svg = pmf_chart(&rows(), "profile");
        assert_eq!(svg.matches(r#"class="bar""#).count(), 4);
        assert!(svg.contains(">96.0%<"));
        assert!(svg.contains(">100.0%<"));
        assert!(svg.contains(r#"viewBox="0 0 800 500""#));
        assert!(!svg.to_lowercase().contains("posterior"));
    }

    #[test]
    fn tallest_bar_fills_plot() {
        let svg = pmf_chart(&rows(), "t");
        assert!(svg.contains(r#"y="50" width="#));
    }

    #[test]
    fn escapes_title() {
        assert!(pmf_chart(&rows(), "a<b & c").contains("a&lt;b &amp; c"));
    }

    #[test]
    fn formatting() {
        assert_eq!(num(12.0), "12");
        assert_eq!(num(12.345), "12.35");
        assert_eq!(num(-0.001), "0");
        assert_eq!(num_percent(0.9649), "96.5");
    }
}
