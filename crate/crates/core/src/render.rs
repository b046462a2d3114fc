//! Self-contained SVG heatmaps for local distance series and segment
//! comparison matrices. Cells are shaded on a linear scale from 0 (white) to
//! the maximum value present (dark), annotated with three-decimal values.
//! Output bytes are a pure function of the input.

use crate::pipeline::{MatrixReport, SeriesReport};

const CELL_W: usize = 64;
const CELL_H: usize = 36;
const DARK: (f64, f64, f64) = (8.0, 48.0, 107.0);

fn shade(value: f64, max: f64) -> (String, &'static str) {
    let t = if max > 0.0 {
        (value / max).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let channel = |dark: f64| (255.0 + t * (dark - 255.0)).round() as u8;
    let fill = format!(
        "#{:02x}{:02x}{:02x}",
        channel(DARK.0),
        channel(DARK.1),
        channel(DARK.2)
    );
    let text = if t > 0.5 { "#ffffff" } else { "#1a1a1a" };
    (fill, text)
}

fn svg_open(width: usize, height: usize) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"11\">\n"
    )
}

fn cell(x: usize, y: usize, value: f64, max: f64) -> String {
    let (fill, text) = shade(value, max);
    format!(
        "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL_W}\" height=\"{CELL_H}\" fill=\"{fill}\" stroke=\"#999999\"/>\n\
         <text x=\"{tx}\" y=\"{ty}\" fill=\"{text}\" text-anchor=\"middle\">{value:.3}</text>\n",
        tx = x + CELL_W / 2,
        ty = y + CELL_H / 2 + 4,
    )
}

/// A 1-by-n strip in index order, one cell per series entry.
pub fn render_series_heatmap(series: &SeriesReport) -> String {
    let n = series.entries.len();
    let margin = 8;
    let title_h = 20;
    let label_h = 18;
    let width = margin * 2 + n.max(1) * CELL_W;
    let height = margin * 2 + title_h + CELL_H + label_h;
    let max = series
        .entries
        .iter()
        .map(|e| e.ldist)
        .fold(0.0_f64, f64::max);

    let mut svg = svg_open(width, height);
    svg.push_str(&format!(
        "<text x=\"{margin}\" y=\"{y}\" fill=\"#1a1a1a\">ldist, w = {w}</text>\n",
        y = margin + 12,
        w = series.window
    ));
    for (k, entry) in series.entries.iter().enumerate() {
        let x = margin + k * CELL_W;
        let y = margin + title_h;
        svg.push_str(&cell(x, y, entry.ldist, max));
        svg.push_str(&format!(
            "<text x=\"{tx}\" y=\"{ty}\" fill=\"#555555\" text-anchor=\"middle\" font-size=\"10\">i={i}</text>\n",
            tx = x + CELL_W / 2,
            ty = y + CELL_H + 13,
            i = entry.i
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// An n-by-n heatmap with segment labels on both axes.
pub fn render_matrix_heatmap(matrix: &MatrixReport) -> String {
    let n = matrix.values.len();
    let margin = 8;
    let label_w = 64;
    let label_h = 20;
    let width = margin * 2 + label_w + n.max(1) * CELL_W;
    let height = margin * 2 + label_h + n.max(1) * CELL_H;
    let max = matrix
        .values
        .iter()
        .flatten()
        .copied()
        .fold(0.0_f64, f64::max);

    let mut svg = svg_open(width, height);
    for (j, label) in matrix.labels.iter().enumerate() {
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" fill=\"#1a1a1a\" text-anchor=\"middle\">{label}</text>\n",
            x = margin + label_w + j * CELL_W + CELL_W / 2,
            y = margin + 14,
        ));
    }
    for (i, row) in matrix.values.iter().enumerate() {
        let y = margin + label_h + i * CELL_H;
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{ty}\" fill=\"#1a1a1a\" text-anchor=\"end\">{label}</text>\n",
            x = margin + label_w - 6,
            ty = y + CELL_H / 2 + 4,
            label = matrix.labels[i],
        ));
        for (j, &value) in row.iter().enumerate() {
            svg.push_str(&cell(margin + label_w + j * CELL_W, y, value, max));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
