//! Plots of piecewise-linear curves. The knots are exact; only the drawing
//! is approximate.

use padic_radii::PLFun;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 24.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn render(title: &str, curves: &[PLFun]) -> String {
    let pts: Vec<Vec<(f64, f64)>> =
        curves.iter().map(|f| f.knots().iter().map(|(x, y)| (x.to_f64(), y.to_f64())).collect()).collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.iter().all(Vec::is_empty) {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<title>{}</title>\n",
        escape(title)
    );
    out.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    for (i, curve) in pts.iter().enumerate() {
        let coords: Vec<String> = curve.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            COLORS[i % COLORS.len()],
            coords.join(" ")
        ));
    }
    out.push_str(&format!(
        "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"10\">x: [{x0:.4}, {x1:.4}]  y: [{y0:.4}, {y1:.4}]</text>\n</svg>\n",
        HEIGHT - 6.0
    ));
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
