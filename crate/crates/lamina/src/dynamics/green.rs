//! Green function and Böttcher coordinate of the superattracting cycle.
//!
//! Near ∞ the second iterate behaves like z²/2, so φ(z) ~ z/2 and
//! G(z) = log|φ(z)|. On the basin of 0 the sign flips: G(z) = −G(f(z)).

use std::f64::consts::{LN_2, TAU};

use super::{f, SpherePoint, C64};
use crate::error::{Error, Result};

/// An orbit counts as escaped once it exceeds this multiple of max(1, |a|).
pub const ESCAPE_SCALE: f64 = 1e30;

/// Signed potential: positive on the basin of ∞ for f², negative on the
/// basin of 0, ±∞ on the grand orbit of the cycle.
pub fn green(a: C64, z: SpherePoint, n_max: u32) -> Result<f64> {
    let mut w = match z {
        SpherePoint::Infinity => return Ok(f64::INFINITY),
        SpherePoint::Finite(w) => w,
    };
    let big = ESCAPE_SCALE * a.norm().max(1.0);
    for j in 0..=n_max {
        let r = w.norm();
        if r > big {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if !r.is_finite() {
                return Ok(sign * f64::INFINITY);
            }
            let g = (r.ln() - LN_2) / 2f64.powi((j / 2) as i32);
            return Ok(sign * g);
        }
        if r == 0.0 {
            // On the cycle: 0 sits at −∞, its image ∞ at +∞.
            return Ok(if j % 2 == 0 { f64::NEG_INFINITY } else { f64::INFINITY });
        }
        w = f(a, w);
    }
    Err(Error::NonConvergence { last_potential: 0.0 })
}

/// Radius beyond which the product formula for φ is used directly.
pub fn boettcher_radius(a: C64) -> f64 {
    (2.0 * a.norm()).max(16.0)
}

/// log φ for |z| > [`boettcher_radius`], via
/// φ(z) = (z/2) Π ρₙ^{1/2ⁿ⁺¹}, ρₙ = 2 f²(zₙ)/zₙ², zₙ = f²ⁿ(z).
pub(crate) fn log_boettcher(a: C64, z: C64) -> C64 {
    let mut acc = (z / 2.0).ln();
    let mut zn = z;
    let mut weight = 0.5;
    for _ in 0..60 {
        let next = f(a, f(a, zn));
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        let term = (next * 2.0 / (zn * zn)).ln() * weight;
        acc += term;
        if term.norm() < 1e-18 || next.norm() > 1e150 {
            break;
        }
        zn = next;
        weight *= 0.5;
    }
    acc
}

/// Böttcher coordinate at ∞: φ(f²(z)) = φ(z)², φ(z) ~ z/2.
pub fn boettcher_infty(a: C64, z: C64) -> Result<C64> {
    let r0 = boettcher_radius(a);
    if z.norm() <= r0 {
        return Err(Error::numeric(format!("|z| = {} is inside the Böttcher radius {r0}; iterate f² first", z.norm())));
    }
    Ok(log_boettcher(a, z).exp())
}

/// Solves φ(Z) = w for large |w| by fixed-point Newton with φ′ ≈ φ/Z.
pub fn boettcher_inverse(a: C64, w: C64) -> Result<C64> {
    let r0 = boettcher_radius(a);
    let mut z = w * 2.0 - 1.0;
    let lw = w.ln();
    for _ in 0..100 {
        if z.norm() <= r0 {
            break;
        }
        let mut d = log_boettcher(a, z) - lw;
        // Compare logarithms modulo 2πi.
        d.im -= TAU * (d.im / TAU).round();
        if d.norm() < 1e-15 {
            return Ok(z);
        }
        z *= (-d).exp();
    }
    Err(Error::numeric(format!("Böttcher inverse failed at w = {w}")))
}

/// Potential and angle (in turns) of the critical value −a in the basin of
/// ∞, resolving the 2⁻ⁿ ambiguity of the angle by the nearest candidate to
/// `near`.
pub fn critical_value_angle(a: C64, near: f64) -> Result<(f64, f64)> {
    let r0 = boettcher_radius(a);
    let mut z = -a;
    for n in 0..40 {
        if n > 0 {
            z = f(a, f(a, z));
        }
        if !z.re.is_finite() {
            break;
        }
        if z.norm() > r0 {
            let lphi = log_boettcher(a, z);
            let scale = 2f64.powi(n);
            let base = (lphi.im / TAU).rem_euclid(1.0);
            let mut best = (f64::INFINITY, 0.0);
            for k in 0..(1u64 << n) {
                let cand = (base + k as f64) / scale;
                let d = circle_distance(cand, near);
                if d < best.0 {
                    best = (d, cand);
                }
            }
            return Ok((lphi.re / scale, best.1));
        }
    }
    Err(Error::domain(format!("critical value of a = {a} does not escape to ∞")))
}

/// Distance between two angles on the circle of circumference 1.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn green_asymptote() {
        let z = C64::from_polar(1e6, 0.7);
        let g = green(c(1.0, 0.0), SpherePoint::Finite(z), 200).unwrap();
        assert!((g - (1e6f64.ln() - LN_2)).abs() < 1e-3, "{g}");
    }

    #[test]
    fn green_sentinels_and_sign() {
        let a = c(6.0, 1.0);
        assert_eq!(green(a, SpherePoint::Finite(c(0.0, 0.0)), 10).unwrap(), f64::NEG_INFINITY);
        assert_eq!(green(a, SpherePoint::Infinity, 10).unwrap(), f64::INFINITY);
        assert!(green(a, SpherePoint::Finite(c(30.0, 5.0)), 200).unwrap() > 0.0);
        assert!(green(a, SpherePoint::Finite(c(0.01, 0.02)), 200).unwrap() < 0.0);
    }

    #[test]
    fn green_doubling_law() {
        let a = c(6.0, 0.0);
        for z in [c(3.0, 4.0), c(-4.0, 2.5), c(0.2, -0.1), c(-1.3, 0.9), c(8.0, -8.0)] {
            let g = green(a, SpherePoint::Finite(z), 400).unwrap();
            let g2 = green(a, SpherePoint::Finite(f(a, f(a, z))), 400).unwrap();
            assert!((g2 - 2.0 * g).abs() < 1e-6, "z = {z}: {g2} vs {}", 2.0 * g);
            // f swaps the basins: G∘f = −2G on the basin of ∞ and −G on the basin of 0.
            let g1 = green(a, SpherePoint::Finite(f(a, z)), 400).unwrap();
            let want = if g > 0.0 { -2.0 * g } else { -g };
            assert!((g1 - want).abs() < 1e-6, "z = {z}: {g1} vs {want}");
        }
    }

    #[test]
    fn boettcher_normalization_and_functional_equation() {
        let a = c(2.0, -3.0);
        let z = C64::from_polar(1e8, 1.1);
        let phi = boettcher_infty(a, z).unwrap();
        assert!((phi / (z / 2.0) - 1.0).norm() < 1e-6);
        for z in [c(40.0, 3.0), c(-25.0, 30.0), c(0.0, -60.0)] {
            let p = boettcher_infty(a, z).unwrap();
            let q = boettcher_infty(a, f(a, f(a, z))).unwrap();
            assert!((q - p * p).norm() / (p * p).norm() < 1e-9);
            assert!((green(a, SpherePoint::Finite(z), 200).unwrap() - p.norm().ln()).abs() < 1e-9);
        }
        assert!(boettcher_infty(a, c(3.0, 0.0)).is_err());
    }

    #[test]
    fn boettcher_inverse_roundtrip() {
        let a = c(-7.0, 1.0);
        for w in [c(100.0, 0.0), C64::from_polar(1e4, 2.0), C64::from_polar(50.0, -1.0)] {
            let z = boettcher_inverse(a, w).unwrap();
            assert!((boettcher_infty(a, z).unwrap() - w).norm() < 1e-12 * w.norm());
        }
    }

    #[test]
    fn real_parameters_have_real_critical_angle() {
        // For real a < 0 large, −a is real positive on R_∞(0).
        let (s, t) = critical_value_angle(c(-400.0, 0.0), 0.0).unwrap();
        assert!(s > 0.0 && circle_distance(t, 0.0) < 1e-12);
    }
}
