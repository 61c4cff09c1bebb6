//! Scatter plot of a view as SVG text.

use std::fmt::Write;

use lensrank::dataset::View2D;

pub const SIZE: f64 = 800.0;
pub const MARGIN: f64 = 40.0;
pub const RADIUS: f64 = 3.0;

pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders a normalized view. Points are drawn in row order; the legend lists
/// one swatch per class name, coloured by class index.
pub fn render_svg(view: &View2D, x_label: &str, y_label: &str, class_names: &[String]) -> String {
    let span = SIZE - 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (lo, hi) = (MARGIN, SIZE - MARGIN);
    let _ = writeln!(s, r#"<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{hi}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{lo}" y1="{lo}" x2="{lo}" y2="{hi}" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        SIZE / 2.0,
        SIZE - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="16" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 16 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    );
    for (p, &l) in view.points.iter().zip(&view.labels) {
        let cx = MARGIN + p[0] * span;
        let cy = SIZE - MARGIN - p[1] * span;
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="{}"/>"#,
            PALETTE[l % PALETTE.len()]
        );
    }
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, name) in class_names.iter().enumerate() {
        let y = MARGIN + 8.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}" font-size="12">{}</text></g>"#,
            SIZE - MARGIN - 120.0,
            y,
            PALETTE[i % PALETTE.len()],
            SIZE - MARGIN - 104.0,
            y + 9.0,
            escape(name)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view() -> View2D {
        View2D::from_points(vec![[0.0, 0.0], [1.0, 1.0], [0.5, 0.25]], vec![0, 1, 0]).unwrap()
    }

    #[test]
    fn one_circle_per_point_and_corners_map_to_margins() {
        let svg = render_svg(&view(), "a", "b", &["p".into(), "q".into()]);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains(r#"cx="40.00" cy="760.00""#));
        assert!(svg.contains(r#"cx="760.00" cy="40.00""#));
        assert_eq!(svg.matches("legend-entry").count(), 2);
    }

    #[test]
    fn labels_are_escaped() {
        let svg = render_svg(&view(), "a<b", "x & y", &["\"c\"".into()]);
        assert!(svg.contains("a&lt;b") && svg.contains("x &amp; y") && svg.contains("&quot;c&quot;"));
    }

    #[test]
    fn palette_colours_are_distinct_hex() {
        let mut seen = std::collections::BTreeSet::new();
        for c in PALETTE {
            assert!(c.len() == 7 && c.starts_with('#') && c[1..].chars().all(|h| h.is_ascii_hexdigit()));
            assert!(seen.insert(c));
        }
    }
}
