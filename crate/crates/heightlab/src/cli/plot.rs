//! Minimal self-contained SVG output: log-log scatter with axis labels, no
//! external renderer needed.

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

/// Log-log scatter of (x, y) points with per-point labels. Points with
/// nonpositive coordinates are skipped (they have no log-log position).
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64, String)]) -> String {
    let usable: Vec<&(f64, f64, String)> =
        points.iter().filter(|(x, y, _)| *x > 0.0 && *y > 0.0).collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"11\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\" stroke=\"none\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{PAD}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        H - PAD,
        W - PAD / 2.0
    ));
    svg.push_str(&format!(
        "<line x1=\"{PAD}\" y1=\"{}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>\n",
        PAD / 2.0,
        H - PAD
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        H - 10.0,
        escape(xlabel)
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    ));
    if !usable.is_empty() {
        let lx: Vec<f64> = usable.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
        let (x0, x1) = span(&lx);
        let (y0, y1) = span(&ly);
        for (i, p) in usable.iter().enumerate() {
            let px = PAD + (lx[i] - x0) / (x1 - x0) * (W - 1.5 * PAD);
            let py = (H - PAD) - (ly[i] - y0) / (y1 - y0) * (H - 1.5 * PAD);
            svg.push_str(&format!(
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3.5\" fill=\"steelblue\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                px + 6.0,
                py - 6.0,
                escape(&p.2)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
