//! Minimal SVG emission: curves, dipole quivers, region area labels,
//! trajectory frames.

use crate::curve::CurveFamily;
use crate::dipole::TrajectoryRecord;
use crate::vec2::{self, Vec2};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Frame {
    min: Vec2,
    max: Vec2,
    scale: f64,
}

impl Frame {
    fn around(points: impl Iterator<Item = Vec2>) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        let extent = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        let margin = 0.08 * extent;
        min = [min[0] - margin, min[1] - margin];
        max = [max[0] + margin, max[1] + margin];
        let scale = 640.0 / (max[0] - min[0]).max(max[1] - min[1]);
        Self { min, max, scale }
    }

    fn map(&self, p: Vec2) -> Vec2 {
        // Flip y so the mathematical orientation reads correctly.
        [
            (p[0] - self.min[0]) * self.scale,
            (self.max[1] - p[1]) * self.scale,
        ]
    }

    fn size(&self) -> Vec2 {
        [
            (self.max[0] - self.min[0]) * self.scale,
            (self.max[1] - self.min[1]) * self.scale,
        ]
    }
}

fn path_for(frame: &Frame, nodes: &[Vec2]) -> String {
    let mut d = String::new();
    for (i, p) in nodes.iter().enumerate() {
        let q = frame.map(*p);
        d.push_str(&format!(
            "{}{:.3} {:.3} ",
            if i == 0 { "M" } else { "L" },
            q[0],
            q[1]
        ));
    }
    d.push('Z');
    d
}

/// Render a curve family, optional per-curve dipole vectors, and optional
/// region area labels.
pub fn render_scene(
    family: &CurveFamily,
    dipoles: &[(usize, Vec<Vec2>)],
    label_regions: bool,
) -> String {
    let frame = Frame::around(
        family
            .curves()
            .iter()
            .flat_map(|c| c.nodes().iter().copied()),
    );
    let size = frame.size();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.1} {:.1}\">\n",
        size[0], size[1]
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, curve) in family.curves().iter().enumerate() {
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            path_for(&frame, curve.nodes()),
            PALETTE[i % PALETTE.len()]
        ));
    }
    for (curve_idx, u) in dipoles {
        let curve = &family.curves()[*curve_idx];
        let stride = (curve.n() / 48).max(1);
        let arrow_scale = 0.35
            / u.iter()
                .map(|v| vec2::norm(*v))
                .fold(0.0_f64, f64::max)
                .max(1e-9);
        for (i, (p, v)) in curve.nodes().iter().zip(u).enumerate() {
            if i % stride != 0 {
                continue;
            }
            let a = frame.map(*p);
            let tip = frame.map(vec2::add(*p, vec2::scale(*v, arrow_scale)));
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                 stroke=\"#444\" stroke-width=\"0.8\" marker-end=\"none\"/>\n",
                a[0], a[1], tip[0], tip[1]
            ));
            // small arrowhead
            let dir = vec2::sub(tip, a);
            let n = vec2::norm(dir).max(1e-9);
            let d = vec2::scale(dir, 4.0 / n);
            let left = [tip[0] - d[0] - d[1] * 0.5, tip[1] - d[1] + d[0] * 0.5];
            let right = [tip[0] - d[0] + d[1] * 0.5, tip[1] - d[1] - d[0] * 0.5];
            out.push_str(&format!(
                "<path d=\"M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2} Z\" fill=\"#444\"/>\n",
                tip[0], tip[1], left[0], left[1], right[0], right[1]
            ));
        }
    }
    if label_regions {
        if let Ok(dec) = family.region_areas() {
            for region in &dec.regions {
                let Some(area) = region.area else { continue };
                let Some(&outer) = region.boundary.first() else {
                    continue;
                };
                let curve = &family.curves()[outer];
                let centroid = curve.nodes().iter().fold([0.0, 0.0], |acc, p| {
                    [
                        acc[0] + p[0] / curve.n() as f64,
                        acc[1] + p[1] / curve.n() as f64,
                    ]
                });
                // Place the label between the boundary and the centroid so
                // nested labels do not collide.
                let anchor = vec2::add(
                    vec2::scale(centroid, 0.35),
                    vec2::scale(curve.nodes()[0], 0.65),
                );
                let q = frame.map(anchor);
                out.push_str(&format!(
                    "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" fill=\"#222\">{:.4}</text>\n",
                    q[0], q[1], area
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Overlay sampled trajectory frames with an opacity ramp.
pub fn render_trajectory(rec: &TrajectoryRecord, max_frames: usize) -> String {
    let frame = Frame::around(
        rec.samples
            .iter()
            .flat_map(|s| s.curve.nodes().iter().copied()),
    );
    let size = frame.size();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.1} {:.1}\">\n",
        size[0], size[1]
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let stride = (rec.samples.len() / max_frames.max(1)).max(1);
    let shown: Vec<_> = rec.samples.iter().step_by(stride).collect();
    let count = shown.len().max(1);
    for (k, s) in shown.iter().enumerate() {
        let opacity = 0.15 + 0.85 * (k as f64 + 1.0) / count as f64;
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" \
             opacity=\"{opacity:.3}\"/>\n",
            path_for(&frame, s.curve.nodes()),
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DiscreteCurve;

    #[test]
    fn scene_svg_contains_paths_and_labels() {
        let fam = CurveFamily::new(vec![
            DiscreteCurve::circle([0.0, 0.0], 2.0, 32),
            DiscreteCurve::circle([0.0, 0.0], 1.0, 32),
        ])
        .unwrap();
        let svg = render_scene(&fam, &[], true);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("<text"));
    }

    #[test]
    fn quivers_rendered() {
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, 64);
        let u: Vec<Vec2> = c.nodes().to_vec();
        let fam = CurveFamily::single(c);
        let svg = render_scene(&fam, &[(0, u)], false);
        assert!(svg.contains("<line"));
    }
}
