//! Minimal SVG rendering for polygons and rotation-set clouds.
//! Presentation only; nothing parses these files back.

use rotset::torus::RotationEstimate;
use rotset::{exact::format_rat, PolygonTag, RationalPolygon};

const W: f64 = 640.0;
const H: f64 = 640.0;
const PAD: f64 = 60.0;

struct Frame {
    min: (f64, f64),
    scale: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let mut min = (f64::INFINITY, f64::INFINITY);
        let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            min = (min.0.min(x), min.1.min(y));
            max = (max.0.max(x), max.1.max(y));
        }
        let span = (max.0 - min.0).max(max.1 - min.1).max(1e-9);
        Frame { min, scale: (W - 2.0 * PAD) / span }
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        // y grows upward in the plane, downward in SVG.
        (
            PAD + (p.0 - self.min.0) * self.scale,
            H - PAD - (p.1 - self.min.1) * self.scale,
        )
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Renders a rational polygon with `p/q` vertex labels.
pub fn polygon_svg(poly: &RationalPolygon) -> String {
    let pts: Vec<(f64, f64)> = poly.vertices().iter().map(|v| v.to_f64()).collect();
    let frame = Frame::fit(&pts);
    let mut out = header();
    match poly.tag {
        PolygonTag::Point => {}
        _ => {
            let path: Vec<String> = pts
                .iter()
                .map(|&p| {
                    let (x, y) = frame.map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let closed = matches!(poly.tag, PolygonTag::Polygon);
            out.push_str(&format!(
                "<{} points=\"{}\" fill=\"{}\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
                if closed { "polygon" } else { "polyline" },
                path.join(" "),
                if closed { "#1f77b422" } else { "none" },
            ));
        }
    }
    for (v, &p) in poly.vertices().iter().zip(&pts) {
        let (x, y) = frame.map(p);
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#d62728\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" font-family=\"monospace\">({}, {})</text>\n",
            x + 8.0,
            y - 8.0,
            format_rat(&v.x),
            format_rat(&v.y),
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Renders the displacement-average cloud with its approximate hull.
pub fn cloud_svg(est: &RotationEstimate) -> String {
    let pts: Vec<(f64, f64)> = est.points.iter().map(|p| p.phi).collect();
    let frame = Frame::fit(&pts);
    let mut out = header();
    if est.hull.len() >= 2 {
        let path: Vec<String> = est
            .hull
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
    }
    for &p in &pts {
        let (x, y) = frame.map(p);
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}
