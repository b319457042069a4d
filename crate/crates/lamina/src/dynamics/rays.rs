//! Dynamical and parameter rays by potential continuation with Newton
//! correction.
//!
//! A point z at potential s on R_∞(θ) solves log φ(f²ⁿ(z)) = 2ⁿ(s + 2πiθ)
//! modulo 2πi, with n large enough that f²ⁿ(z) is inside the region where
//! the product formula for φ converges. Rays based at 0 are the preimages
//! near 0: z ∈ R₀(θ) at potential −s iff f(z) ∈ R_∞(θ) at potential s.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use super::green::log_boettcher;
use super::{boettcher_inverse, boettcher_radius, df, df_da, f, green, precritical_distance, SpherePoint, C64};
use crate::angle::CircleAngle;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RayBase {
    Zero,
    Infinity,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RayPoint {
    /// Potential magnitude; the signed Green value is −s for rays based at 0.
    pub s: f64,
    pub z: C64,
    pub residual: f64,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum RayEnd {
    Reached,
    Crash { potential: f64, point: C64 },
    Stalled { potential: f64 },
}

#[derive(Clone, Debug)]
pub struct RayPath {
    pub points: Vec<RayPoint>,
    pub end: RayEnd,
}

impl RayPath {
    /// The last accepted point with an error bar from the final step length.
    pub fn landing(&self) -> Option<(C64, f64)> {
        match self.points.as_slice() {
            [] => None,
            [p] => Some((p.z, f64::INFINITY)),
            [.., p, q] => Some((q.z, (q.z - p.z).norm())),
        }
    }

    pub fn into_result(self) -> Result<RayPath> {
        match self.end {
            RayEnd::Reached => Ok(self),
            RayEnd::Crash { potential, point } => Err(Error::RayCrash { potential, point }),
            RayEnd::Stalled { potential } => Err(Error::NonConvergence { last_potential: potential }),
        }
    }

    /// One "s,re,im,residual" line per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{:e}", p.s, p.z.re, p.z.im, p.residual);
        }
        out
    }
}

/// Accepted-point residual bound for dynamical rays.
const DYN_TOL: f64 = 1e-9;
/// Accepted-point residual bound for parameter rays.
const PARAM_TOL: f64 = 1e-8;
/// Largest potential step, so continuation cannot hop between the 2ⁿ
/// solutions of the target equation.
const MAX_DS: f64 = 0.125;
/// Pre-critical levels are probed at relative height CRASH_GAP above the level.
const CRASH_GAP: f64 = 1e-10;
/// A probe closer than this (relative) to a pre-critical point is a crash.
const CRASH_DIST: f64 = 1e-3;
/// Continuation gives up once the potential step falls below this fraction of s.
const MIN_STEP: f64 = 1e-13;

/// Number of doublings n so that e^{2ⁿ s} is far outside the Böttcher radius.
fn depth_for(s: f64, r0: f64, n_min: u32) -> u32 {
    let target = r0.ln() + 8.0;
    let mut n = n_min;
    while s * 2f64.powi(n as i32) < target && n < 60 {
        n += 1;
    }
    n
}

/// 2ⁿ(s + 2πiθ) reduced modulo 2πi, given frac(2ⁿθ).
fn target_log(angle: &dyn Fn(u32) -> f64, s: f64, n: u32) -> C64 {
    C64::new(s * 2f64.powi(n as i32), TAU * angle(n))
}

fn wrap(mut d: C64) -> C64 {
    d.im -= TAU * (d.im / TAU).round();
    if d.im <= -PI {
        d.im += TAU;
    }
    d
}

/// Residual and logarithmic derivative of log φ(Z) − target at one unknown.
type Eval<'a> = dyn Fn(C64, f64) -> Option<(C64, C64)> + 'a;

/// Newton iteration on a logarithmic residual. Returns the root and |residual|.
///
/// Residuals are divided by 2ⁿ, so they measure the error in s + 2πiθ itself.
fn newton(mut x: C64, s: f64, eval: &Eval<'_>, max_step: f64) -> Option<(C64, f64)> {
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let (d, dlog) = eval(x, s)?;
        let r = d.norm();
        if r < 1e-13 || (r < DYN_TOL.min(PARAM_TOL) * 1e-2 && r >= best * 0.5) {
            return Some((x, r));
        }
        best = best.min(r);
        if dlog.norm() == 0.0 {
            return None;
        }
        let mut step = d / dlog;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        x -= step;
    }
    let (d, _) = eval(x, s)?;
    Some((x, d.norm()))
}

/// Shared continuation driver from `s_start` (with solution `x0`) down to
/// `s_to`, recording points at or below `s_from`.
#[allow(clippy::too_many_arguments)]
fn continue_down(
    x0: C64,
    s_start: f64,
    s_from: f64,
    s_to: f64,
    steps: u32,
    tol: f64,
    eval: &Eval<'_>,
    barrier: &dyn Fn(f64, f64) -> Option<f64>,
    crash: &dyn Fn(C64, f64) -> Option<C64>,
) -> RayPath {
    let ratio = 2f64.powf(-1.0 / steps.max(1) as f64);
    let mut points = Vec::new();
    let (mut s, mut x) = (s_start, x0);
    let mut prev: Option<(f64, C64)> = None;
    if s <= s_from {
        points.push(RayPoint { s, z: x, residual: eval(x, s).map_or(f64::NAN, |(d, _)| d.norm()) });
    }
    let cap = |s: f64| (s * (1.0 - ratio)).min(MAX_DS);
    let mut ds = cap(s);
    while s > s_to {
        let mut s_next = (s - ds).max(s_to);
        // Stop just above a pre-critical level to test for a crash there.
        let level = barrier(s_next, s).map(|l| l * (1.0 + CRASH_GAP)).filter(|&l| l < s);
        if let Some(l) = level {
            s_next = s_next.max(l);
        }
        // Speed |dx/ds| from the last step; near ∞ the ray moves like e^s.
        let (guess, speed) = match prev {
            Some((sp, xp)) => (x + (x - xp) * ((s - s_next) / (sp - s)), (x - xp).norm() / (sp - s)),
            None => (x, 2.0 * (1.0 + x.norm())),
        };
        let reach = 4.0 * speed * (s - s_next) + 1e-14 * (1.0 + x.norm());
        let accepted = newton(guess, s_next, eval, reach).filter(|&(y, r)| r < tol && (y - x).norm() <= reach);
        match accepted {
            Some((y, r)) => {
                prev = Some((s, x));
                s = s_next;
                x = y;
                if s <= s_from {
                    points.push(RayPoint { s, z: x, residual: r });
                }
                if level == Some(s) {
                    if let Some(point) = crash(x, s) {
                        return RayPath { points, end: RayEnd::Crash { potential: s, point } };
                    }
                }
                ds = (ds * 1.5).min(cap(s));
            }
            None => {
                ds /= 2.0;
                if ds < MIN_STEP * s {
                    let end = match crash(x, s) {
                        Some(point) => RayEnd::Crash { potential: s, point },
                        None => RayEnd::Stalled { potential: s },
                    };
                    return RayPath { points, end };
                }
            }
        }
    }
    RayPath { points, end: RayEnd::Reached }
}

fn check_potentials(s_from: f64, s_to: f64) -> Result<()> {
    if !(s_from > s_to && s_to > 0.0 && s_from.is_finite()) {
        return Err(Error::domain(format!("need s_from > s_to > 0, got {s_from} and {s_to}")));
    }
    Ok(())
}

/// Traces R_base(θ) for f_a from potential `s_from` down to `s_to`, with
/// `steps` samples per halving of the potential.
pub fn trace_dynamical_ray(
    a: C64,
    base: RayBase,
    theta: &CircleAngle,
    s_from: f64,
    s_to: f64,
    steps: u32,
) -> Result<RayPath> {
    trace_ray_with(a, base, &|n| theta.frac_times_pow2_f64(n), s_from, s_to, steps)
}

/// As [`trace_dynamical_ray`] for an angle given in turns as a double,
/// which is an exact dyadic rational.
pub(crate) fn trace_ray_turns(
    a: C64,
    base: RayBase,
    theta: f64,
    s_from: f64,
    s_to: f64,
    steps: u32,
) -> Result<RayPath> {
    let theta = theta.rem_euclid(1.0);
    trace_ray_with(a, base, &|n| (theta * 2f64.powi(n as i32)).fract(), s_from, s_to, steps)
}

fn trace_ray_with(
    a: C64,
    base: RayBase,
    theta: &dyn Fn(u32) -> f64,
    s_from: f64,
    s_to: f64,
    steps: u32,
) -> Result<RayPath> {
    super::param(a)?;
    check_potentials(s_from, s_to)?;
    let r0 = boettcher_radius(a);
    let offset = usize::from(base == RayBase::Zero);
    let eval = move |z: C64, s: f64| -> Option<(C64, C64)> {
        let n = depth_for(s, r0, 0);
        let (mut w, mut dw) = (z, C64::new(1.0, 0.0));
        for _ in 0..(2 * n as usize + offset) {
            dw *= df(a, w);
            w = f(a, w);
        }
        // Written negated so a NaN norm is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(w.norm() > r0) || !dw.norm().is_finite() {
            return None;
        }
        let scale = 2f64.powi(n as i32);
        Some((wrap(log_boettcher(a, w) - target_log(theta, s, n)) / scale, dw / w / scale))
    };
    let s_seed = s_from.max((r0 * 4.0).ln());
    let w = C64::from_polar(s_seed.exp(), TAU * theta(0));
    let big = boettcher_inverse(a, w)?;
    let seed = match base {
        RayBase::Infinity => big,
        // The preimage of a point near ∞ that lies near 0.
        RayBase::Zero => {
            let r = (C64::new(1.0, 0.0) + a / big).sqrt();
            let (p, q) = (r - 1.0, -r - 1.0);
            if p.norm() < q.norm() {
                p
            } else {
                q
            }
        }
    };
    let seed = newton(seed, s_seed, &eval, f64::INFINITY)
        .filter(|&(_, r)| r < DYN_TOL)
        .ok_or_else(|| Error::numeric("could not seed the ray"))?
        .0;
    // Pre-critical points sit at potentials ±s_c/2ᵏ: even k in the basin of 0, odd k in the basin of ∞.
    let s_c = green(a, SpherePoint::Finite(-a), 4000).ok().filter(|g| g.is_finite() && *g > 0.0);
    let barrier = |lo: f64, hi: f64| -> Option<f64> {
        let s_c = s_c?;
        let first = if base == RayBase::Infinity { 1 } else { 0 };
        (first..60).step_by(2).map(|k| s_c / 2f64.powi(k)).find(|&l| l >= lo && l < hi)
    };
    // At level s_c/2ᵏ only the depth-k pre-critical points can be hit.
    let crash = |z: C64, level: f64| -> Option<C64> {
        let k = (s_c? / level).log2().round().max(0.0) as usize;
        let (dist, at) = precritical_distance(a, z, k + 1);
        (dist < CRASH_DIST * (1.0 + z.norm())).then_some(at)
    };
    Ok(continue_down(seed, s_seed, s_from, s_to, steps, DYN_TOL, &eval, &barrier, &crash))
}

/// Traces the parameter ray of angle θ₀: the locus of a with the critical
/// value −a at potential s on R_∞(θ₀). Points are parameters a.
pub fn trace_parameter_ray(theta0: &CircleAngle, s_from: f64, s_to: f64, steps: u32) -> Result<RayPath> {
    check_potentials(s_from, s_to)?;
    if s_from < 3.0 {
        return Err(Error::domain(format!("seeding needs s_from ≥ 3, got {s_from}")));
    }
    let eval = move |a: C64, s: f64| -> Option<(C64, C64)> {
        if a.norm() == 0.0 {
            return None;
        }
        let r0 = boettcher_radius(a);
        let n = depth_for(s, r0, 1);
        let (mut w, mut dw) = (-a, C64::new(-1.0, 0.0));
        for _ in 0..2 * n {
            dw = df_da(w) + df(a, w) * dw;
            w = f(a, w);
        }
        // Written negated so a NaN norm is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(w.norm() > r0) || !dw.norm().is_finite() {
            return None;
        }
        let scale = 2f64.powi(n as i32);
        let d = wrap(log_boettcher(a, w) - target_log(&|k| theta0.frac_times_pow2_f64(k), s, n));
        Some((d / scale, dw / w / scale))
    };
    // φ(−a) ≈ (1 − a)/2 for large a.
    let seed = C64::new(1.0, 0.0) - C64::from_polar(2.0 * s_from.exp(), TAU * theta0.to_f64());
    let seed = newton(seed, s_from, &eval, f64::INFINITY)
        .filter(|&(_, r)| r < PARAM_TOL)
        .ok_or_else(|| Error::numeric("could not seed the parameter ray"))?
        .0;
    Ok(continue_down(seed, s_from, s_from, s_to, steps, PARAM_TOL, &eval, &|_, _| None, &|_, _| None))
}

#[cfg(test)]
mod tests {
    use super::super::{critical_value_angle, green, SpherePoint};
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_ray_has_zero_angle() {
        let a = c(6.0, 0.0);
        let path = trace_dynamical_ray(a, RayBase::Infinity, &CircleAngle::zero(), 4.0, 0.01, 8).unwrap();
        assert_eq!(path.end, RayEnd::Reached);
        assert!(path.points.len() > 40);
        for p in &path.points {
            assert!(p.residual < 1e-9);
            assert!(p.z.im.abs() < 1e-6 * (1.0 + p.z.norm()), "{}", p.z);
        }
        assert!(path.points.windows(2).all(|w| w[1].s < w[0].s));
    }

    #[test]
    fn traced_points_sit_at_their_potential() {
        let a = c(8.0, 3.0);
        let path = trace_dynamical_ray(a, RayBase::Infinity, &CircleAngle::frac(2, 7), 3.0, 0.05, 4).unwrap();
        for p in path.points.iter().step_by(5) {
            let g = green(a, SpherePoint::Finite(p.z), 2000).unwrap();
            assert!((g - p.s).abs() < 1e-8 * p.s.max(1.0), "{g} vs {}", p.s);
        }
    }

    #[test]
    fn antipodal_rays_are_related_by_the_symmetry() {
        // f(z) = f(−2 − z) and f² ~ z²/2 send R_∞(θ) and R_∞(θ + 1/2) to the same ray.
        let a = c(7.0, -2.0);
        let t = CircleAngle::frac(1, 5);
        let p = trace_dynamical_ray(a, RayBase::Infinity, &t, 3.0, 0.2, 4).unwrap();
        let q = trace_dynamical_ray(a, RayBase::Infinity, &t.antipode(), 3.0, 0.2, 4).unwrap();
        for (x, y) in p.points.iter().zip(&q.points).step_by(3) {
            assert!((x.s - y.s).abs() < 1e-12);
            let (fx, fy) = (f(a, f(a, x.z)), f(a, f(a, y.z)));
            assert!((fx - fy).norm() < 1e-6 * fx.norm(), "{fx} vs {fy}");
        }
    }

    #[test]
    fn parameter_ray_zero_is_real() {
        let path = trace_parameter_ray(&CircleAngle::zero(), 8.0, 0.1, 4).unwrap();
        assert_eq!(path.end, RayEnd::Reached);
        assert!(path.points.iter().all(|p| p.z.im.abs() < 1e-10));
    }

    #[test]
    fn conjugate_angles_give_conjugate_parameter_rays() {
        let p = trace_parameter_ray(&CircleAngle::frac(1, 6), 6.0, 0.5, 4).unwrap();
        let q = trace_parameter_ray(&CircleAngle::frac(5, 6), 6.0, 0.5, 4).unwrap();
        assert_eq!(p.points.len(), q.points.len());
        for (x, y) in p.points.iter().zip(&q.points) {
            assert!((x.z - y.z.conj()).norm() < 1e-8 * x.z.norm());
        }
    }

    #[test]
    fn zero_based_ray_crashes_into_the_critical_point() {
        let t = CircleAngle::frac(1, 6);
        let param = trace_parameter_ray(&t, 8.0, 1.0, 4).unwrap();
        let a = param.points.last().unwrap().z;
        let (s_c, angle) = critical_value_angle(a, t.to_f64()).unwrap();
        assert!((s_c - 1.0).abs() < 1e-9 && (angle - t.to_f64()).abs() < 1e-9);
        let ray = trace_dynamical_ray(a, RayBase::Zero, &t, 4.0, 0.2, 8).unwrap();
        match ray.end {
            RayEnd::Crash { potential, point } => {
                assert!((point + 1.0).norm() < 1e-4, "{point}");
                assert!((potential - s_c).abs() < 1e-4, "{potential}");
            }
            other => panic!("expected a crash, got {other:?}"),
        }
    }
}
