//! Parameter-plane and dynamical-plane rasters.
//!
//! Rows are computed in parallel and collected in order, so the output is
//! independent of the thread count. Pixel centres are placed symmetrically
//! about the middle of the rectangle; with bounds symmetric about the real
//! axis, mirrored rows see exactly conjugate inputs.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{certify_trap, f, fixed_points, multiplier, trap_radii, SpherePoint, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Bounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Bounds {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Bounds { re_min, re_max, im_min, im_max }
    }

    pub fn is_empty(&self) -> bool {
        !(self.re_max > self.re_min && self.im_max > self.im_min)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pixel {
    /// The orbit never reached the trap around {0, ∞}.
    Bounded,
    /// Trapped after `n` steps; `toward_zero` when the even iterates tend to 0.
    Escaped {
        n: u32,
        toward_zero: bool,
    },
    /// The pixel containing a = 0, where the family degenerates.
    Puncture,
    /// Visited by the inverse orbit.
    Hit,
    Blank,
}

#[derive(Clone, Debug)]
pub struct Raster {
    pub kind: &'static str,
    pub width: usize,
    pub height: usize,
    pub bounds: Bounds,
    pub n_max: u32,
    pub pixels: Vec<Pixel>,
}

impl Raster {
    fn empty(kind: &'static str, bounds: Bounds, n_max: u32) -> Self {
        Raster { kind, width: 0, height: 0, bounds, n_max, pixels: Vec::new() }
    }

    pub fn get(&self, col: usize, row: usize) -> Pixel {
        self.pixels[row * self.width + col]
    }

    fn step(&self) -> (f64, f64) {
        let b = &self.bounds;
        ((b.re_max - b.re_min) / self.width as f64, (b.im_max - b.im_min) / self.height as f64)
    }

    /// Centre of pixel (col, row); row 0 is the top.
    pub fn center(&self, col: usize, row: usize) -> C64 {
        pixel_center(&self.bounds, self.width, self.height, col, row)
    }

    /// Pixel containing z, if inside the bounds.
    pub fn locate(&self, z: C64) -> Option<(usize, usize)> {
        let (dx, dy) = self.step();
        let col = ((z.re - self.bounds.re_min) / dx).floor();
        let row = ((self.bounds.im_max - z.im) / dy).floor();
        (col >= 0.0 && row >= 0.0 && (col as usize) < self.width && (row as usize) < self.height)
            .then_some((col as usize, row as usize))
    }

    pub fn count(&self, pred: impl Fn(Pixel) -> bool) -> usize {
        self.pixels.iter().filter(|p| pred(**p)).count()
    }

    /// Binary PGM (P5), dark for bounded and hit pixels, shaded by escape time.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().map(|p| match *p {
            Pixel::Bounded | Pixel::Hit => 0,
            Pixel::Escaped { n, .. } => 255 - (n.min(50) * 4) as u8,
            Pixel::Puncture => 128,
            Pixel::Blank => 255,
        }));
        out
    }

    /// Sidecar text recording how the raster was produced.
    pub fn header(&self) -> String {
        let b = &self.bounds;
        let mut out = String::new();
        let _ = writeln!(out, "kind={}", self.kind);
        let _ = writeln!(out, "width={}", self.width);
        let _ = writeln!(out, "height={}", self.height);
        let _ = writeln!(out, "bounds={},{},{},{}", b.re_min, b.re_max, b.im_min, b.im_max);
        let _ = writeln!(out, "n_max={}", self.n_max);
        out
    }
}

fn pixel_center(b: &Bounds, width: usize, height: usize, col: usize, row: usize) -> C64 {
    let mid_re = (b.re_min + b.re_max) / 2.0;
    let mid_im = (b.im_min + b.im_max) / 2.0;
    let x = (2.0 * col as f64 + 1.0 - width as f64) / (2.0 * width as f64) * (b.re_max - b.re_min);
    let y = (height as f64 - 1.0 - 2.0 * row as f64) / (2.0 * height as f64) * (b.im_max - b.im_min);
    C64::new(mid_re + x, mid_im + y)
}

/// Trap entry step and basin label of the orbit of z.
fn trap_entry(a: C64, mut z: C64, n_max: u32) -> Option<(u32, bool)> {
    let (r_out, r_in) = trap_radii(a);
    for n in 0..=n_max {
        let r = z.norm_sqr();
        if !r.is_finite() || r > r_out * r_out {
            return Some((n, n % 2 == 1));
        }
        if r < r_in * r_in {
            return Some((n, n % 2 == 0));
        }
        z = f(a, z);
    }
    None
}

fn classify(a: C64, z: C64, n_max: u32) -> Pixel {
    match trap_entry(a, z, n_max) {
        Some((n, toward_zero)) => Pixel::Escaped { n, toward_zero },
        None => Pixel::Bounded,
    }
}

fn trap_certified() -> bool {
    static CERT: OnceLock<bool> = OnceLock::new();
    *CERT.get_or_init(|| {
        let params: Vec<C64> = (0..60)
            .flat_map(|i| {
                let r = 10f64.powf(-4.0 + i as f64 * 0.15);
                (0..12).map(move |k| C64::from_polar(r, k as f64 * std::f64::consts::FRAC_PI_6))
            })
            .collect();
        certify_trap(&params)
    })
}

fn render(
    kind: &'static str,
    bounds: Bounds,
    width: usize,
    height: usize,
    n_max: u32,
    pixel: impl Fn(C64, usize, usize) -> Pixel + Sync,
) -> Raster {
    if bounds.is_empty() || width == 0 || height == 0 {
        return Raster::empty(kind, bounds, n_max);
    }
    let pixels = (0..height)
        .into_par_iter()
        .map(|row| (0..width).map(|col| pixel(pixel_center(&bounds, width, height, col, row), col, row)).collect())
        .collect::<Vec<Vec<Pixel>>>()
        .concat();
    Raster { kind, width, height, bounds, n_max, pixels }
}

/// Membership of a in M₂: the orbit of −1 never reaches the trap.
pub fn m2_raster(bounds: Bounds, width: usize, height: usize, n_max: u32) -> Result<Raster> {
    if !trap_certified() {
        return Err(Error::numeric("trap radii failed certification"));
    }
    let dx = (bounds.re_max - bounds.re_min) / width.max(1) as f64;
    let dy = (bounds.im_max - bounds.im_min) / height.max(1) as f64;
    Ok(render("m2", bounds, width, height, n_max, |a, _, _| {
        if a.re.abs() <= dx / 2.0 && a.im.abs() <= dy / 2.0 {
            Pixel::Puncture
        } else {
            classify(a, C64::new(-1.0, 0.0), n_max)
        }
    }))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum JuliaMethod {
    Escape,
    Inverse,
}

/// Backward-orbit sample size for [`JuliaMethod::Inverse`].
pub const INVERSE_POINTS: usize = 200_000;

/// Julia set of f_a: escape time to the trap, or a random backward orbit
/// of a repelling fixed point.
pub fn julia_raster(
    a: C64,
    bounds: Bounds,
    width: usize,
    height: usize,
    method: JuliaMethod,
    n_max: u32,
) -> Result<Raster> {
    super::param(a)?;
    match method {
        JuliaMethod::Escape => {
            Ok(render("julia-escape", bounds, width, height, n_max, |z, _, _| classify(a, z, n_max)))
        }
        JuliaMethod::Inverse => {
            let mut raster = render("julia-inverse", bounds, width, height, n_max, |_, _, _| Pixel::Blank);
            if raster.pixels.is_empty() {
                return Ok(raster);
            }
            let start = fixed_points(a)?
                .into_iter()
                .filter_map(|z| multiplier(a, SpherePoint::Finite(z)).ok().map(|m| (m.norm(), z)))
                .filter(|(m, _)| *m > 1.0)
                .max_by(|p, q| p.0.total_cmp(&q.0))
                .ok_or_else(|| Error::numeric(format!("no repelling fixed point for a = {a}")))?
                .1;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut z = start;
            for i in 0..INVERSE_POINTS + 64 {
                let r = (C64::new(1.0, 0.0) + a / z).sqrt();
                z = if rng.gen::<bool>() { r - 1.0 } else { -r - 1.0 };
                if !z.re.is_finite() || !z.im.is_finite() {
                    z = start;
                    continue;
                }
                if i >= 64 {
                    if let Some((c, r)) = raster.locate(z) {
                        raster.pixels[r * raster.width + c] = Pixel::Hit;
                    }
                }
            }
            Ok(raster)
        }
    }
}

/// Fraction of inverse-orbit pixels lying within two pixels of the escape
/// raster's Julia set, taken as bounded pixels and basin-label changes.
pub fn julia_agreement(escape: &Raster, inverse: &Raster) -> f64 {
    let (w, h) = (escape.width, escape.height);
    if w != inverse.width || h != inverse.height || w == 0 {
        return 0.0;
    }
    let label = |c: usize, r: usize| match escape.get(c, r) {
        Pixel::Escaped { toward_zero, .. } => Some(toward_zero),
        _ => None,
    };
    let on_boundary = |c: usize, r: usize| {
        let here = label(c, r);
        here.is_none()
            || [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)].iter().any(|(dc, dr)| {
                let (cc, rr) = (c as i64 + dc, r as i64 + dr);
                cc >= 0 && rr >= 0 && (cc as usize) < w && (rr as usize) < h && label(cc as usize, rr as usize) != here
            })
    };
    let mut hits = 0usize;
    let mut near = 0usize;
    for r in 0..h {
        for c in 0..w {
            if inverse.get(c, r) != Pixel::Hit {
                continue;
            }
            hits += 1;
            let found = (r.saturating_sub(2)..(r + 3).min(h))
                .any(|rr| (c.saturating_sub(2)..(c + 3).min(w)).any(|cc| on_boundary(cc, rr)));
            near += usize::from(found);
        }
    }
    if hits == 0 {
        0.0
    } else {
        near as f64 / hits as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m2_examples() {
        let b = Bounds::new(-2.0, 2.0, -2.0, 2.0);
        let r = m2_raster(b, 4, 4, 200).unwrap();
        assert_eq!(r.pixels.len(), 16);
        assert_eq!(classify(C64::new(1.0, 0.0), C64::new(-1.0, 0.0), 512), Pixel::Bounded);
        assert!(matches!(classify(C64::new(100.0, 0.0), C64::new(-1.0, 0.0), 512), Pixel::Escaped { .. }));
    }

    #[test]
    fn puncture_is_marked() {
        let r = m2_raster(Bounds::new(-1.5, 1.5, -1.5, 1.5), 3, 3, 50).unwrap();
        assert_eq!(r.get(1, 1), Pixel::Puncture);
        assert_eq!(r.count(|p| p == Pixel::Puncture), 1);
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let r = m2_raster(Bounds::new(-6.0, 10.0, -8.0, 8.0), 60, 60, 128).unwrap();
        for row in 0..60 {
            assert_eq!(r.center(7, row), r.center(7, 59 - row).conj());
            for col in 0..60 {
                assert_eq!(r.get(col, row), r.get(col, 59 - row));
            }
        }
    }

    #[test]
    fn empty_bounds_give_an_empty_raster() {
        let r =
            julia_raster(C64::new(6.0, 0.0), Bounds::new(1.0, 1.0, 0.0, 1.0), 10, 10, JuliaMethod::Escape, 10).unwrap();
        assert!(r.pixels.is_empty());
        assert_eq!(r.to_pgm(), b"P5\n0 0\n255\n".to_vec());
    }

    #[test]
    fn pgm_and_header() {
        let r = m2_raster(Bounds::new(-1.0, 1.0, -1.0, 1.0), 5, 4, 20).unwrap();
        let pgm = r.to_pgm();
        assert!(pgm.starts_with(b"P5\n5 4\n255\n"));
        assert_eq!(pgm.len(), 11 + 20);
        assert!(r.header().contains("n_max=20"));
    }

    #[test]
    fn escape_and_inverse_agree() {
        let a = C64::new(6.0, 0.0);
        let b = Bounds::new(-4.5, 2.5, -3.5, 3.5);
        let esc = julia_raster(a, b, 200, 200, JuliaMethod::Escape, 200).unwrap();
        let inv = julia_raster(a, b, 200, 200, JuliaMethod::Inverse, 200).unwrap();
        assert!(inv.count(|p| p == Pixel::Hit) > 500);
        let agreement = julia_agreement(&esc, &inv);
        assert!(agreement >= 0.9, "{agreement}");
        // The exterior Julia set separates the two immediate basins.
        assert!(esc.count(|p| matches!(p, Pixel::Escaped { toward_zero: true, .. })) > 0);
        assert!(esc.count(|p| matches!(p, Pixel::Escaped { toward_zero: false, .. })) > 0);
    }

    #[test]
    fn raster_is_deterministic_across_thread_counts() {
        let b = Bounds::new(-6.0, 10.0, -8.0, 8.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let r1 = one.install(|| m2_raster(b, 40, 30, 64).unwrap());
        let r2 = m2_raster(b, 40, 30, 64).unwrap();
        assert_eq!(r1.pixels, r2.pixels);
    }
}
