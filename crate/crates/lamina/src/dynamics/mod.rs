//! Double-precision dynamics of `f_a(z) = a / (z² + 2z)`.
//!
//! The pair {0, ∞} is a superattracting 2-cycle; the free critical point
//! is −1 with critical value −a. Everything here works on the Riemann
//! sphere through [`SpherePoint`].

mod blaschke;
mod green;
mod leaves;
mod raster;
mod rays;

use std::fmt;

use num::complex::Complex64;

use crate::error::{Error, Result};

pub use blaschke::{blaschke_critical_points, blaschke_derivative, blaschke_eval};
pub use green::{
    boettcher_infty, boettcher_inverse, boettcher_radius, circle_distance, critical_value_angle, green, ESCAPE_SCALE,
};
pub use leaves::{ray_leaf_endpoints, BoundaryCoordinate, RayLeaf, RayLeafReport, BOUNDARY_LEVELS};
pub use raster::{julia_agreement, julia_raster, m2_raster, Bounds, JuliaMethod, Pixel, Raster};
pub use rays::{trace_dynamical_ray, trace_parameter_ray, RayBase, RayEnd, RayPath, RayPoint};

pub type C64 = Complex64;

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<C64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    fn from_value(z: C64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::from_value(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Rejects a = 0 and non-finite parameters.
pub fn param(a: C64) -> Result<C64> {
    if a == C64::new(0.0, 0.0) || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::domain(format!("parameter a = {a} must be finite and nonzero")));
    }
    Ok(a)
}

/// Raw evaluation at a finite point; infinite at the poles 0 and −2.
///
/// Written so that conjugating `a` and `z` conjugates the result bit for bit.
#[inline]
pub fn f(a: C64, z: C64) -> C64 {
    let d = z * (z + 2.0);
    if d.re == 0.0 && d.im == 0.0 {
        return C64::new(f64::INFINITY, 0.0);
    }
    a / d
}

/// f′(z) = −a(2z + 2)/(z² + 2z)².
#[inline]
pub fn df(a: C64, z: C64) -> C64 {
    let d = z * (z + 2.0);
    -a * (z * 2.0 + 2.0) / (d * d)
}

/// ∂f/∂a = 1/(z² + 2z).
#[inline]
fn df_da(z: C64) -> C64 {
    (z * (z + 2.0)).inv()
}

pub fn apply_f(a: C64, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Finite(C64::new(0.0, 0.0)),
        SpherePoint::Finite(z) => SpherePoint::from_value(f(a, z)),
    }
}

fn cubic(a: C64, z: C64) -> C64 {
    z * z * (z + 2.0) - a
}

/// The three finite fixed points, roots of z³ + 2z² − a, sorted by (re, im).
pub fn fixed_points(a: C64) -> Result<[C64; 3]> {
    // Weierstrass iteration from the standard non-symmetric start, then Newton polish.
    let scale = 2.0 + a.norm().cbrt();
    let seed = C64::new(0.4, 0.9);
    let mut z = [seed * scale, seed * seed * scale, seed * seed * seed * scale];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = cubic(a, z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * scale {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let d = *zi * (*zi * 3.0 + 4.0);
            if d.norm() > 0.0 {
                *zi -= cubic(a, *zi) / d;
            }
        }
    }
    let tol = 1e-10 * a.norm().max(1.0);
    if let Some(bad) = z.iter().find(|zi| cubic(a, **zi).norm() >= tol) {
        return Err(Error::numeric(format!("fixed point {bad} has residual {}", cubic(a, *bad).norm())));
    }
    z.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(z)
}

pub fn multiplier(a: C64, z: SpherePoint) -> Result<C64> {
    match z {
        SpherePoint::Finite(z) if z.norm() > 0.0 && (z + 2.0).norm() > 0.0 => Ok(df(a, z)),
        _ => Err(Error::domain(format!("multiplier undefined at the pole {z}"))),
    }
}

/// Trap radii (R_out, r_in): |z| > R_out maps into |z| < r_in and vice versa.
pub fn trap_radii(a: C64) -> (f64, f64) {
    let r_out = (4.0 * a.norm()).max(8.0);
    (r_out, 3.0 * a.norm() / (r_out * r_out))
}

#[inline]
fn in_trap(z: C64, r_out: f64, r_in: f64) -> bool {
    let n = z.norm_sqr();
    !(n.is_finite()) || n > r_out * r_out || n < r_in * r_in
}

/// Whether the orbit of z enters the trap around {0, ∞} within `n_max`
/// steps, and the step at which it did (or `n_max`).
pub fn attracted_to_supercycle(a: C64, z: SpherePoint, n_max: u32) -> (bool, u32) {
    let SpherePoint::Finite(mut z) = z else {
        return (true, 0);
    };
    let (r_out, r_in) = trap_radii(a);
    for n in 0..=n_max {
        if in_trap(z, r_out, r_in) {
            return (true, n);
        }
        z = f(a, z);
    }
    (false, n_max)
}

/// Samples both trap boundaries for the given parameters and confirms the
/// swap |z| > R_out ↦ |f| < r_in, |z| < r_in ↦ |f| > R_out.
pub fn certify_trap(params: &[C64]) -> bool {
    params.iter().all(|&a| {
        let (r_out, r_in) = trap_radii(a);
        (0..64).all(|k| {
            let u = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 64.0);
            let big = u * r_out * (1.0 + 1e-9);
            let small = u * r_in * (1.0 - 1e-9);
            f(a, big).norm() < r_in && f(a, small).norm() > r_out
        })
    })
}

/// Distance estimate from z to the nearest point of the first `m`
/// backward images of −1, and that point's estimated location.
fn precritical_distance(a: C64, z: C64, m: usize) -> (f64, C64) {
    let (mut w, mut dw) = (z, C64::new(1.0, 0.0));
    let mut best = (f64::INFINITY, z);
    for _ in 0..m {
        let g = w + 1.0;
        if dw.norm() > 0.0 {
            let d = (g / dw).norm();
            if d < best.0 {
                best = (d, z - g / dw);
            }
        }
        dw *= df(a, w);
        w = f(a, w);
        if !w.re.is_finite() || !w.im.is_finite() {
            break;
        }
    }
    best
}
