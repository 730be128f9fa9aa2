//! Tiny dependency-free SVG output: line plots of matrix columns and a
//! grayscale heatmap. Enough for quick visual inspection, nothing more.

use curveres::matcore::Matrix;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        // Flat or empty data: open a unit window so the division below is safe.
        hi = lo + 1.0;
    }
    (lo, hi)
}

/// One polyline per column of `ys`, legend from `names`.
pub fn line_plot(xs: &[f64], ys: &Matrix, names: &[String]) -> String {
    let (x_lo, x_hi) = span(xs.iter().copied());
    let (y_lo, y_hi) = span(ys.data().iter().copied());
    let to_x = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let to_y = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    out.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    for j in 0..ys.cols() {
        let color = PALETTE[j % PALETTE.len()];
        let points: Vec<String> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| format!("{:.2},{:.2}", to_x(x), to_y(ys[(i, j)])))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        if let Some(name) = names.get(j) {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"12\">{name}</text>\n",
                WIDTH - MARGIN - 120.0,
                MARGIN + 16.0 * (j + 1) as f64
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Grayscale cell map of a value grid, downsampled to at most 200 cells per
/// axis so huge grids stay small on disk.
pub fn heatmap(values: &Matrix) -> String {
    let (lo, hi) = span(values.data().iter().copied());
    let max_cells = 200;
    let step_i = values.rows().div_ceil(max_cells);
    let step_j = values.cols().div_ceil(max_cells);
    let ni = values.rows().div_ceil(step_i);
    let nj = values.cols().div_ceil(step_j);
    let cell_w = (WIDTH - 2.0 * MARGIN) / nj as f64;
    let cell_h = (HEIGHT - 2.0 * MARGIN) / ni as f64;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for bi in 0..ni {
        for bj in 0..nj {
            let v = values[(bi * step_i, bj * step_j)];
            let shade = (255.0 * (1.0 - (v - lo) / (hi - lo))).round() as u8;
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({shade},{shade},{shade})\"/>\n",
                MARGIN + bj as f64 * cell_w,
                MARGIN + bi as f64 * cell_h,
                cell_w + 0.5,
                cell_h + 0.5,
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}
