//! The degree-2 Blaschke model B(z) = z (z + b)/(b̄ z + 1).

use super::C64;
use crate::error::{Error, Result};

fn check(b: C64) -> Result<()> {
    let r = b.norm();
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Blaschke parameter needs 0 < |b| < 1, got |b| = {r}")))
    }
}

/// (c₁, c₂) with |c₁| < 1 < |c₂| and c₁c₂ on the unit circle.
pub fn blaschke_critical_points(b: C64) -> Result<(C64, C64)> {
    check(b)?;
    let root = (1.0 - b.norm_sqr()).sqrt();
    let p = (-1.0 + root) / b.conj();
    let q = (-1.0 - root) / b.conj();
    Ok(if p.norm() < 1.0 { (p, q) } else { (q, p) })
}

pub fn blaschke_eval(b: C64, z: C64) -> Result<C64> {
    let den = b.conj() * z + 1.0;
    if den.norm() <= 1e-14 * (1.0 + z.norm()) {
        return Err(Error::domain(format!("z = {z} is the pole of the Blaschke product")));
    }
    Ok(z * (z + b) / den)
}

/// B′(z) = (b̄z² + 2z + b)/(b̄z + 1)².
pub fn blaschke_derivative(b: C64, z: C64) -> Result<C64> {
    let den = b.conj() * z + 1.0;
    if den.norm() == 0.0 {
        return Err(Error::domain(format!("z = {z} is the pole of the Blaschke product")));
    }
    Ok((b.conj() * z * z + z * 2.0 + b) / (den * den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_points_at_one_half() {
        let (c1, c2) = blaschke_critical_points(C64::new(0.5, 0.0)).unwrap();
        let s3 = 3f64.sqrt();
        assert!((c1 - (-2.0 + s3)).norm() < 1e-12);
        assert!((c2 - (-2.0 - s3)).norm() < 1e-12);
        assert_eq!((c1.im, c2.im), (0.0, 0.0));
    }

    #[test]
    fn critical_points_general() {
        for b in [C64::new(0.3, 0.4), C64::new(-0.1, 0.9), C64::new(0.0, -0.05)] {
            let (c1, c2) = blaschke_critical_points(b).unwrap();
            assert!(c1.norm() < 1.0 && c2.norm() > 1.0);
            assert!(((c1 * c2).norm() - 1.0).abs() < 1e-12);
            // Central difference of B at c₁, independent of the closed-form derivative.
            let h = 1e-6;
            let fd = (blaschke_eval(b, c1 + h).unwrap() - blaschke_eval(b, c1 - h).unwrap()) / (2.0 * h);
            assert!(fd.norm() < 1e-9, "{fd}");
            assert!(blaschke_derivative(b, c2).unwrap().norm() < 1e-9);
        }
        assert!(blaschke_critical_points(C64::new(1.0, 0.0)).is_err());
        assert!(blaschke_critical_points(C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn unit_circle_is_invariant() {
        let b = C64::new(0.35, -0.2);
        assert_eq!(blaschke_eval(b, C64::new(0.0, 0.0)).unwrap(), C64::new(0.0, 0.0));
        for k in 0..100 {
            let z = C64::from_polar(1.0, k as f64 * 0.0628);
            assert!((blaschke_eval(b, z).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(blaschke_eval(b, -b.conj().inv()).is_err());
    }
}
