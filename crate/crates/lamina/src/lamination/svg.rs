//! SVG rendering of laminations as hyperbolic geodesics.
//!
//! A leaf between unit vectors p and q lies on the circle orthogonal to
//! the unit circle through p and q. Inside leaves are its arc within the
//! disk; outside leaves are the complementary arc.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use super::{Lamination, Leaf, Side};

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Pixel radius of the unit circle.
    pub radius: f64,
    /// Extra canvas around the circle, as a multiple of the radius.
    pub margin: f64,
    pub stroke_width: f64,
    pub color_by_depth: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { radius: 200.0, margin: 0.6, stroke_width: 1.0, color_by_depth: true }
    }
}

const PALETTE: [&str; 6] = ["#1f3b73", "#2a7f62", "#b5651d", "#8e3b8e", "#c0392b", "#5d6d7e"];

fn color(leaf: &Leaf, opts: &SvgOptions) -> &'static str {
    if opts.color_by_depth {
        PALETTE[leaf.depth as usize % PALETTE.len()]
    } else {
        "#000000"
    }
}

struct Canvas {
    center: f64,
    radius: f64,
}

impl Canvas {
    /// Screen point of angle t (in turns) scaled by `r`; y grows downward.
    fn point(&self, t: f64, r: f64) -> (f64, f64) {
        (self.center + self.radius * r * (TAU * t).cos(), self.center - self.radius * r * (TAU * t).sin())
    }
}

fn geodesic_path(leaf: &Leaf, canvas: &Canvas) -> String {
    let (a, b) = (leaf.chord.lo().to_f64(), leaf.chord.hi().to_f64());
    let p = canvas.point(a, 1.0);
    let q = canvas.point(b, 1.0);
    if leaf.chord.is_diameter() {
        return match leaf.side {
            Side::Inside => format!("M {:.3} {:.3} L {:.3} {:.3}", p.0, p.1, q.0, q.1),
            Side::Outside => {
                let far = 4.0;
                let pf = canvas.point(a, far);
                let qf = canvas.point(b, far);
                format!(
                    "M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}",
                    p.0, p.1, pf.0, pf.1, q.0, q.1, qf.0, qf.1
                )
            }
        };
    }
    let delta = TAU * (b - a);
    let half = delta / 2.0;
    let r = canvas.radius * half.tan().abs();
    let mid = (a + b) / 2.0;
    // The orthogonal circle is centred on the ray through the arc midpoint.
    let dir = if b - a < 0.5 { mid } else { mid + 0.5 };
    let c = canvas.point(dir, 1.0 / half.cos().abs());
    let cross = (p.0 - c.0) * (q.1 - c.1) - (p.1 - c.1) * (q.0 - c.0);
    let minor_sweep = u8::from(cross > 0.0);
    let (large, sweep) = match leaf.side {
        Side::Inside => (0, minor_sweep),
        Side::Outside => (1, 1 - minor_sweep),
    };
    format!("M {:.3} {:.3} A {r:.3} {r:.3} 0 {large} {sweep} {:.3} {:.3}", p.0, p.1, q.0, q.1)
}

/// Deterministic SVG 1.1 document with one `<path>` per leaf.
pub fn render_svg(lam: &Lamination, opts: &SvgOptions) -> String {
    let size = 2.0 * opts.radius * (1.0 + opts.margin);
    let canvas = Canvas { center: size / 2.0, radius: opts.radius };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.3} {size:.3}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r##"<circle cx="{c:.3}" cy="{c:.3}" r="{r:.3}" fill="none" stroke="#000000" stroke-width="{w:.3}"/>"##,
        c = canvas.center,
        r = opts.radius,
        w = opts.stroke_width * 1.5
    );
    for (side, id) in [(Side::Inside, "inside"), (Side::Outside, "outside")] {
        let leaves: Vec<Leaf> = lam.leaves().filter(|l| l.side == side).collect();
        if leaves.is_empty() {
            continue;
        }
        let _ = writeln!(out, r#"<g id="{id}" fill="none" stroke-width="{:.3}">"#, opts.stroke_width);
        for leaf in &leaves {
            let _ = writeln!(out, r#"<path d="{}" stroke="{}"/>"#, geodesic_path(leaf, &canvas), color(leaf, opts));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::{build_2l, Chord, LamKind};
    use super::*;
    use crate::angle::CircleAngle;

    #[test]
    fn empty_document_has_only_the_circle() {
        let svg = render_svg(&Lamination::new(LamKind::Custom, None, 0), &SvgOptions::default());
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("<path"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn diameter_is_a_straight_line() {
        let mut lam = Lamination::new(LamKind::Custom, None, 0);
        lam.insert(Chord::frac(1, 4, 3, 4), Side::Inside, 0);
        let svg = render_svg(&lam, &SvgOptions::default());
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains(" L ") && !svg.contains(" A "));
    }

    #[test]
    fn path_count_matches_leaves_and_output_is_stable() {
        let lam = build_2l(&CircleAngle::frac(1, 2), 4).unwrap();
        let opts = SvgOptions::default();
        let svg = render_svg(&lam, &opts);
        assert_eq!(svg.matches("<path").count(), lam.len());
        assert!(svg.contains(r#"id="inside""#) && svg.contains(r#"id="outside""#));
        assert_eq!(svg, render_svg(&lam, &opts));
    }

    #[test]
    fn inside_arc_bulges_toward_the_centre() {
        // Leaf {0, 1/4}: the geodesic midpoint sits at radius √2 − 1 on the ray at 1/8.
        let canvas = Canvas { center: 0.0, radius: 1.0 };
        let leaf = Leaf::new(Chord::frac(0, 1, 1, 4), Side::Inside, 0);
        let d = geodesic_path(&leaf, &canvas);
        // From (1, 0) to (0, −1) in screen coordinates, turning positively about (1, −1).
        assert!(d.ends_with("A 1.000 1.000 0 0 1 0.000 -1.000"), "{d}");
        let outside = geodesic_path(&Leaf::new(Chord::frac(0, 1, 1, 4), Side::Outside, 0), &canvas);
        assert!(outside.ends_with("A 1.000 1.000 0 1 0 0.000 -1.000"), "{outside}");
    }
}
