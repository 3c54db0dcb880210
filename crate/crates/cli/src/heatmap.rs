//! SVG rendering of a fingerprint: strict lower triangle only, linear color
//! scale from 0 (white) to 1 (dark blue).

use std::fmt::Write;

use anyhow::{bail, Result};

const CELL: f64 = 28.0;
const MARGIN: f64 = 56.0;

fn color(v: f64) -> String {
    let t = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders rows `1..P` against columns `0..P-1` of a `P × P` matrix. Tick
/// labels therefore start at `labels[1]` on the vertical axis and at
/// `labels[0]` on the horizontal one.
pub fn render_heatmap(matrix: &[Vec<f64>], labels: &[String]) -> Result<String> {
    let p = matrix.len();
    if matrix.iter().any(|r| r.len() != p) {
        bail!("heatmap needs a square matrix");
    }
    if p < 2 {
        bail!("heatmap needs at least a 2 x 2 matrix");
    }
    if labels.len() != p {
        bail!("{} labels for a {p} x {p} matrix", labels.len());
    }
    let cells = (p - 1) as f64;
    let width = MARGIN * 2.0 + cells * CELL + 40.0;
    let height = MARGIN * 2.0 + cells * CELL;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#)?;
    for i in 1..p {
        let y = MARGIN + (i - 1) as f64 * CELL;
        for j in 0..i {
            let x = MARGIN + j as f64 * CELL;
            let v = matrix[i][j];
            writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>{} / {}: {v:.4}</title></rect>"#,
                color(v),
                escape(&labels[i]),
                escape(&labels[j]),
            )?;
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            y + CELL * 0.65,
            escape(&labels[i])
        )?;
    }
    for j in 0..p - 1 {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN + (j as f64 + 0.5) * CELL,
            MARGIN + cells * CELL + 16.0,
            escape(&labels[j])
        )?;
    }
    // Color bar.
    let bar_x = MARGIN + cells * CELL + 16.0;
    let steps = 20;
    for k in 0..steps {
        let v = 1.0 - k as f64 / steps as f64;
        let y = MARGIN + k as f64 * cells * CELL / steps as f64;
        writeln!(
            s,
            r#"<rect x="{bar_x}" y="{y}" width="10" height="{}" fill="{}"/>"#,
            cells * CELL / steps as f64 + 0.5,
            color(v)
        )?;
    }
    writeln!(s, r#"<text x="{}" y="{}">1</text>"#, bar_x + 13.0, MARGIN + 8.0)?;
    writeln!(s, r#"<text x="{}" y="{}">0</text>"#, bar_x + 13.0, MARGIN + cells * CELL)?;
    s.push_str("</svg>\n");
    Ok(s)
}
