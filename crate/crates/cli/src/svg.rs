//! SVG rendering of fields and geodesics: a heatmap rect per vertex through
//! a fixed blue-white-red ramp, geodesics as polylines.

use lfpp_core::gff::GaussianField;
use lfpp_core::lattice::{GridBox, LatticePath};

const CELL: i64 = 8;

/// Linear blue (#2166ac) -> white (#f7f7f7) -> red (#b2182b) ramp over the
/// field's observed range.
fn ramp(t: f64) -> String {
    let lerp =
        |a: u8, b: u8, s: f64| -> u8 { (a as f64 + (b as f64 - a as f64) * s).round() as u8 };
    let (lo, mid, hi) = ((0x21, 0x66, 0xac), (0xf7, 0xf7, 0xf7), (0xb2, 0x18, 0x2b));
    let (r, g, b) = if t < 0.5 {
        let s = t * 2.0;
        (
            lerp(lo.0, mid.0, s),
            lerp(lo.1, mid.1, s),
            lerp(lo.2, mid.2, s),
        )
    } else {
        let s = (t - 0.5) * 2.0;
        (
            lerp(mid.0, hi.0, s),
            lerp(mid.1, hi.1, s),
            lerp(mid.2, hi.2, s),
        )
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Renders the field over `area` with an optional geodesic overlay.
pub fn render_field(
    area: &GridBox,
    field: &GaussianField,
    geodesic: Option<&LatticePath>,
) -> String {
    let w = area.width * CELL;
    let h = area.height * CELL;
    let values: Vec<f64> = area.vertices().map(|p| field.value(p)).collect();
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (idx, p) in area.vertices().enumerate() {
        let t = (values[idx] - vmin) / span;
        // SVG y axis points down; flip so larger y draws higher.
        let x = (p.x - area.x0) * CELL;
        let y = (area.y1() - 1 - p.y) * CELL;
        out.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\"/>\n",
            ramp(t)
        ));
    }
    out.push_str("</g>\n");
    if let Some(path) = geodesic {
        let pts: Vec<String> = path
            .vertices()
            .iter()
            .map(|p| {
                let x = (p.x - area.x0) * CELL + CELL / 2;
                let y = (area.y1() - 1 - p.y) * CELL + CELL / 2;
                format!("{x},{y}")
            })
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}
