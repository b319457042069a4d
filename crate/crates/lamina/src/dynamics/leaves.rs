//! Ray leaves of an exterior map and their circle coordinates.
//!
//! The critical value −a lies on R_∞(θ₀) at potential s_c. The part of that
//! ray below −a pulls back under f to the two rays leaving −1, and further
//! pullbacks give the ray pairs at every iterated preimage of −1. Landing
//! points are converted to circle coordinates with the conjugacy ψ from the
//! Julia set to the circle satisfying ψ∘f = −2ψ and ψ(ω) = 0, where ω is the
//! landing point of R_∞(0).

use super::green::{circle_distance, critical_value_angle};
use super::rays::{trace_ray_turns, RayBase};
use super::{boettcher_radius, f, fixed_points, green, SpherePoint, C64};
use crate::error::{Error, Result};
use crate::lamination::Side;

/// The boundary polyline has 2^BOUNDARY_LEVELS vertices.
pub const BOUNDARY_LEVELS: u32 = 12;
/// Potential at which traced rays stop and their last point is taken as the landing point.
const LANDING_POTENTIAL: f64 = 1e-6;
const STEPS: u32 = 8;
const CHORD_STEPS: u32 = 32;

/// Vertices ψ⁻¹(k/2ᴷ), built by inverse iteration from ω and −2 − ω.
#[derive(Clone, Debug)]
pub struct BoundaryCoordinate {
    pub omega: C64,
    pub points: Vec<C64>,
}

fn cross(u: C64, v: C64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn preimages(a: C64, w: C64) -> [C64; 2] {
    let r = (C64::new(1.0, 0.0) + a / w).sqrt();
    [r - 1.0, -r - 1.0]
}

impl BoundaryCoordinate {
    pub fn build(a: C64) -> Result<Self> {
        let ray = trace_ray_turns(a, RayBase::Infinity, 0.0, 4.0, LANDING_POTENTIAL, STEPS)?;
        let (land, _) = ray.landing().ok_or_else(|| Error::numeric("empty trace of R_∞(0)"))?;
        let omega = fixed_points(a)?
            .into_iter()
            .min_by(|p, q| (p - land).norm().total_cmp(&(q - land).norm()))
            .expect("three fixed points");
        if (omega - land).norm() > 1e-2 * (1.0 + omega.norm()) {
            return Err(Error::numeric(format!("R_∞(0) lands at {land}, away from every fixed point")));
        }
        let n = 1usize << BOUNDARY_LEVELS;
        let mut pts = vec![C64::new(f64::NAN, 0.0); n];
        pts[0] = omega;
        pts[n / 2] = -omega - 2.0;
        // The quarter points fix the orientation. Rays R_0(θ) are labelled so that f
        // maps R_0(θ) onto R_∞(θ); near 0 that labelling runs clockwise, and
        // ψ follows it, so 0, 1/4, 1/2 run clockwise around the basin of 0.
        let [p, q] = preimages(a, pts[n / 2]);
        let cw = |z: C64| cross(z - pts[0], pts[n / 2] - z) < 0.0;
        let (quarter, three) = if cw(p) { (p, q) } else { (q, p) };
        pts[n / 4] = quarter;
        pts[3 * n / 4] = three;
        for level in 3..=BOUNDARY_LEVELS {
            let step = n >> level;
            for j in (step..n).step_by(2 * step) {
                let image = (n - (2 * j) % n) % n;
                // f maps the arc from j − step to j onto the arc between their images;
                // continue the inverse branch along that chord.
                let from = (n - (2 * (j - step)) % n) % n;
                let (w0, w1) = (pts[from], pts[image]);
                let mut z = pts[j - step];
                for k in 1..=CHORD_STEPS {
                    let w = w0 + (w1 - w0) * (k as f64 / CHORD_STEPS as f64);
                    let [p, q] = preimages(a, w);
                    z = if (p - z).norm() <= (q - z).norm() { p } else { q };
                }
                pts[j] = z;
            }
        }
        let coord = BoundaryCoordinate { omega, points: pts };
        let w = coord.winding(C64::new(-1.0, 0.0));
        if w != -1 {
            return Err(Error::numeric(format!("boundary polyline winds {w} times around −1")));
        }
        Ok(coord)
    }

    pub fn winding(&self, about: C64) -> i64 {
        let n = self.points.len();
        let total: f64 = (0..n).map(|k| ((self.points[(k + 1) % n] - about) / (self.points[k] - about)).arg()).sum();
        (total / std::f64::consts::TAU).round() as i64
    }

    /// Circle coordinate of the polyline point nearest z, and the distance to it.
    pub fn coordinate(&self, z: C64) -> (f64, f64) {
        let n = self.points.len();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..n {
            let (p, q) = (self.points[k], self.points[(k + 1) % n]);
            let d = q - p;
            let u = if d.norm_sqr() > 0.0 { (((z - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
            let dist = (z - (p + d * u)).norm();
            if dist < best.0 {
                best = (dist, (k as f64 + u) / n as f64);
            }
        }
        (best.1.rem_euclid(1.0), best.0)
    }

    /// Mean vertex spacing.
    pub fn spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| (self.points[(k + 1) % n] - self.points[k]).norm()).sum::<f64>() / n as f64
    }
}

#[derive(Clone, Debug)]
pub struct RayLeaf {
    pub depth: u32,
    pub side: Side,
    /// The iterated preimage of −1 the two rays leave from.
    pub center: C64,
    pub landing: [C64; 2],
    /// Circle coordinates of the landing points; `None` when unresolved.
    pub angles: Option<(f64, f64)>,
    /// Distance from the landing points to the boundary polyline.
    pub offset: f64,
}

#[derive(Clone, Debug)]
pub struct RayLeafReport {
    pub theta0: f64,
    pub critical_potential: f64,
    pub boundary: BoundaryCoordinate,
    pub leaves: Vec<RayLeaf>,
}

impl RayLeafReport {
    pub fn unresolved(&self) -> usize {
        self.leaves.iter().filter(|l| l.angles.is_none()).count()
    }
}

/// Angle of the critical value's ray, chosen among the 2ⁿ candidates by
/// tracing each down to the critical potential.
fn critical_ray_angle(a: C64) -> Result<(f64, f64)> {
    let (s_c, base) = critical_value_angle(a, 0.0)?;
    let r0 = boettcher_radius(a);
    let mut n = 0;
    let mut z = -a;
    while z.norm() <= r0 {
        z = f(a, f(a, z));
        n += 1;
    }
    let scale = 2f64.powi(n);
    let mut best = (f64::INFINITY, base);
    for k in 0..(1u32 << n) {
        let cand = (base + k as f64 / scale).rem_euclid(1.0);
        if let Ok(path) = trace_ray_turns(a, RayBase::Infinity, cand, s_c * 4.0 + 4.0, s_c, STEPS) {
            if let Some((end, _)) = path.landing() {
                let d = (end + a).norm();
                if d < best.0 {
                    best = (d, cand);
                }
            }
        }
    }
    if best.0 > 1e-6 * (1.0 + a.norm()) {
        return Err(Error::numeric(format!("no candidate ray reaches the critical value of a = {a}")));
    }
    Ok((s_c, best.1))
}

/// Follows the preimage branch of every point of `curve` continuously, starting at `start`.
fn pull_back(a: C64, curve: &[C64], start: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(curve.len());
    let mut prev = start;
    for (i, &w) in curve.iter().enumerate() {
        let z = if i == 0 {
            start
        } else {
            let [p, q] = preimages(a, w);
            if (p - prev).norm() <= (q - prev).norm() {
                p
            } else {
                q
            }
        };
        out.push(z);
        prev = z;
    }
    out
}

/// Ray leaves at the iterated preimages of −1 up to `depth`, with circle
/// coordinates of their landing points.
pub fn ray_leaf_endpoints(a: C64, depth: u32) -> Result<RayLeafReport> {
    super::param(a)?;
    let (s_c, theta0) = critical_ray_angle(a)?;
    ray_leaf_endpoints_at(a, theta0, s_c, depth)
}

fn ray_leaf_endpoints_at(a: C64, theta0: f64, s_c: f64, depth: u32) -> Result<RayLeafReport> {
    let boundary = BoundaryCoordinate::build(a)?;
    let ray = trace_ray_turns(a, RayBase::Infinity, theta0, s_c, LANDING_POTENTIAL, STEPS)?;
    if ray.end != super::rays::RayEnd::Reached {
        return Err(Error::numeric(format!("R_∞({theta0}) stopped early: {:?}", ray.end)));
    }
    let mut segment = vec![-a];
    segment.extend(ray.points.iter().filter(|p| p.s < s_c).map(|p| p.z));
    if segment.len() < 3 || (segment[1] + a).norm() > 0.1 * (1.0 + a.norm()) {
        return Err(Error::numeric("traced ray does not start at the critical value"));
    }

    // Two rays leave −1; their square-root branches start with opposite signs.
    let minus_one = C64::new(-1.0, 0.0);
    let r1 = ((segment[1] + a) / segment[1]).sqrt();
    let mut level: Vec<(C64, [Vec<C64>; 2])> = vec![(
        minus_one,
        [1.0, -1.0].map(|sign| {
            let mut curve = pull_back(a, &segment[1..], minus_one + r1 * sign);
            curve.insert(0, minus_one);
            curve
        }),
    )];
    let spacing = boundary.spacing();
    let mut leaves = Vec::new();
    for d in 0..=depth {
        for (center, curves) in &level {
            let g = green(a, SpherePoint::Finite(*center), 4000)?;
            let side = if g < 0.0 { Side::Inside } else { Side::Outside };
            let landing = [curves[0][curves[0].len() - 1], curves[1][curves[1].len() - 1]];
            let (t0, e0) = boundary.coordinate(landing[0]);
            let (t1, e1) = boundary.coordinate(landing[1]);
            let offset = e0.max(e1);
            let angles = (offset <= 4.0 * spacing && circle_distance(t0, t1) > 1e-9).then_some((t0, t1));
            leaves.push(RayLeaf { depth: d, side, center: *center, landing, angles, offset });
        }
        if d == depth {
            break;
        }
        level = level
            .iter()
            .flat_map(|(center, curves)| {
                preimages(a, *center).map(|c| (c, [pull_back(a, &curves[0], c), pull_back(a, &curves[1], c)]))
            })
            .collect();
    }
    Ok(RayLeafReport { theta0, critical_potential: s_c, boundary, leaves })
}

#[cfg(test)]
mod tests {
    use super::super::trace_parameter_ray;
    use super::*;
    use crate::angle::CircleAngle;

    fn exterior_parameter(s: f64) -> C64 {
        let path = trace_parameter_ray(&CircleAngle::frac(1, 6), 8.0, s, 4).unwrap();
        path.points.last().unwrap().z
    }

    #[test]
    fn boundary_coordinate_is_equivariant() {
        let a = exterior_parameter(1.0);
        let b = BoundaryCoordinate::build(a).unwrap();
        let n = b.points.len();
        for k in (0..n).step_by(37) {
            let image = f(a, b.points[k]);
            let want = (n - (2 * k) % n) % n;
            assert!((image - b.points[want]).norm() < 1e-9 * (1.0 + image.norm()));
        }
        assert_eq!(b.winding(C64::new(0.0, 0.0)), -1);
    }

    #[test]
    fn boundary_coordinate_follows_zero_ray_order() {
        let a = exterior_parameter(1.0);
        let b = BoundaryCoordinate::build(a).unwrap();
        let mut coords = Vec::new();
        for k in 0..8 {
            let ray = trace_ray_turns(a, RayBase::Zero, k as f64 / 8.0, 4.0, LANDING_POTENTIAL, STEPS).unwrap();
            if ray.end == super::super::rays::RayEnd::Reached {
                let (t, d) = b.coordinate(ray.landing().unwrap().0);
                assert!(d < 0.05, "ray {k}/8 lands {d} away from the boundary");
                coords.push(t);
            }
        }
        assert!(coords.len() >= 6, "{coords:?}");
        assert!(coords[0] < 1e-3 || coords[0] > 1.0 - 1e-3, "{coords:?}");
        // Cyclically increasing: the positive gaps sum to exactly one turn.
        let turns: f64 = (0..coords.len()).map(|i| (coords[(i + 1) % coords.len()] - coords[i]).rem_euclid(1.0)).sum();
        assert!((turns - 1.0).abs() < 1e-9, "{coords:?}");
    }

    #[test]
    fn critical_leaf_spans_half_the_circle() {
        let a = exterior_parameter(1.0);
        let rep = ray_leaf_endpoints(a, 0).unwrap();
        assert!((rep.theta0 - 1.0 / 6.0).abs() < 1e-9, "{}", rep.theta0);
        assert_eq!(rep.leaves.len(), 1);
        let leaf = &rep.leaves[0];
        assert_eq!(leaf.side, Side::Inside);
        let (t0, t1) = leaf.angles.expect("resolved");
        assert!((circle_distance(t0, t1) - 0.5).abs() < 1e-3, "{t0} {t1}");
    }
}
