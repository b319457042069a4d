//! Constructions of L₀, L, 2L, L(y₀), the basilica lamination and matings.

use std::collections::{HashMap, HashSet};

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive};

use super::{chords_cross, Chord, LamKind, Lamination, Side};
use crate::angle::{self, CircleAngle};
use crate::error::{Error, Result};
use crate::measure;

fn require_non_periodic(theta0: &CircleAngle) -> Result<()> {
    if theta0.is_periodic() {
        Err(Error::domain(format!("θ₀ = {theta0} is periodic under doubling")))
    } else {
        Ok(())
    }
}

fn bridge(start: &CircleAngle, len: &BigRational) -> Option<Chord> {
    Chord::new(start.clone(), CircleAngle::from_ratio(start.as_ratio() + len))
}

fn half_pow(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << n)
}

/// Bridges over the h-preimages of every atom of μ with depth ≤ `depth`.
pub fn build_l0(theta0: &CircleAngle, depth: u32, m_cap: u32) -> Result<Lamination> {
    let levels = measure::atom_arc_starts(theta0, depth, m_cap)?;
    let mut lam = Lamination::new(LamKind::L0, Some(theta0.clone()), depth);
    for (m, row) in levels.iter().enumerate() {
        let len = measure::atom_arc_length(m as u32);
        for s in row {
            lam.insert(bridge(s, &len).expect("positive length"), Side::Inside, m as u32);
        }
    }
    Ok(lam)
}

/// Bridges over all pullbacks of σ₀ under t ↦ 4t up to `depth`.
pub fn build_l(theta0: &CircleAngle, depth: u32) -> Result<Lamination> {
    require_non_periodic(theta0)?;
    let mut lam = Lamination::new(LamKind::L, Some(theta0.clone()), depth);
    let mut starts = vec![angle::x0_digits(theta0)?];
    let quarter = BigRational::new(1.into(), 4.into());
    for n in 0..=depth {
        let len = half_pow(2 * n + 1);
        for s in &starts {
            lam.insert(bridge(s, &len).expect("positive length"), Side::Inside, n);
        }
        if n == depth {
            break;
        }
        starts = starts
            .iter()
            .flat_map(|s| {
                let base = s.as_ratio() * &quarter;
                (0..4).map(move |k| CircleAngle::from_ratio(&base + BigRational::new(k.into(), 4.into())))
            })
            .collect();
    }
    Ok(lam)
}

/// Bridges over pullbacks of σ₀ under t ↦ −2t; even levels inside, odd outside.
pub fn build_2l(theta0: &CircleAngle, depth: u32) -> Result<Lamination> {
    require_non_periodic(theta0)?;
    let mut lam = Lamination::new(LamKind::TwoSided, Some(theta0.clone()), depth);
    let mut starts = vec![angle::x0_digits(theta0)?];
    let half = BigRational::new(1.into(), 2.into());
    for n in 0..=depth {
        let len = half_pow(n + 1);
        let side = if n % 2 == 0 { Side::Inside } else { Side::Outside };
        for s in &starts {
            lam.insert(bridge(s, &len).expect("positive length"), side, n);
        }
        if n == depth {
            break;
        }
        // −2t ∈ [s, s+len]  ⇔  t ∈ [(−s−len+k)/2, (−s+k)/2].
        starts = starts
            .iter()
            .flat_map(|s| {
                let base = -(s.as_ratio() + &len) * &half;
                [0, 1].map(|k| CircleAngle::from_ratio(&base + BigRational::new(k.into(), 2.into())))
            })
            .collect();
    }
    Ok(lam)
}

/// Outside leaves {−2a, −2b} for every inside leaf {a, b}; collapsing leaves drop.
pub fn mirror_outside(lam: &Lamination) -> Lamination {
    let mut out = Lamination::new(lam.kind, lam.generator.clone(), lam.depth);
    for leaf in lam.leaves().filter(|l| l.side == Side::Inside) {
        if let Some(c) = leaf.chord.map(|t| t.double().neg()) {
            out.insert(c, Side::Outside, leaf.depth);
        }
    }
    out
}

/// Inside leaves of `l1` plus the leaves of `l2` reflected by t ↦ −t to the outside.
pub fn mate(l1: &Lamination, l2: &Lamination) -> Lamination {
    let mut out = Lamination::new(LamKind::Mating, None, l1.depth.max(l2.depth));
    for leaf in l1.leaves().filter(|l| l.side == Side::Inside) {
        out.insert(leaf.chord, Side::Inside, leaf.depth);
    }
    for leaf in l2.leaves().filter(|l| l.side == Side::Inside) {
        out.insert(leaf.chord.map(CircleAngle::neg).expect("negation is injective"), Side::Outside, leaf.depth);
    }
    out
}

/// l₀ = {y₀/2, y₀/2 + 1/2}.
fn quadratic_diameter(y0: &CircleAngle) -> Chord {
    let e = CircleAngle::from_ratio(y0.as_ratio() / BigRational::from_integer(2.into()));
    Chord::new(e.clone(), e.antipode()).expect("antipodal points differ")
}

/// Whether no forward doubling image of `chord` crosses l₀(y₀).
pub fn leaf_in_quadratic_lamination(y0: &CircleAngle, chord: &Chord) -> bool {
    let l0 = quadratic_diameter(y0);
    let mut seen = HashSet::new();
    let mut cur = Some(chord.clone());
    while let Some(c) = cur {
        if chords_cross(&c, &l0) {
            return false;
        }
        if !seen.insert(c.clone()) {
            return true;
        }
        cur = c.map(CircleAngle::double);
    }
    true
}

/// All chords between k-fold preimages (k ≤ depth) of the endpoints of l₀
/// that pass [`leaf_in_quadratic_lamination`].
///
/// Points are handled as numerators over a common denominator D, where
/// doubling is `n ↦ 2n mod D`.
pub fn build_quadratic_lamination(y0: &CircleAngle, depth: u32) -> Result<Lamination> {
    let l0 = quadratic_diameter(y0);
    let d0 = l0.lo().denom().lcm(l0.hi().denom());
    let den: BigInt = d0 << depth;
    let den = den
        .to_u64()
        .filter(|&d| d < 1 << 62)
        .ok_or_else(|| Error::domain(format!("depth {depth} too large for y₀ = {y0}")))?;
    let scaled = |t: &CircleAngle| -> u64 {
        (t.numer() * BigInt::from(den) / t.denom()).to_u64().expect("fits the common denominator")
    };
    let (e1, e2) = (scaled(l0.lo()), scaled(l0.hi()));

    let mut point_depth: HashMap<u64, u32> = HashMap::new();
    for k in 0..=depth {
        for e in [e1, e2] {
            for j in 0..1u64 << k {
                let n = (e + j * den) >> k;
                point_depth.entry(n).or_insert(k);
            }
        }
    }
    let mut points: Vec<u64> = point_depth.keys().copied().collect();
    points.sort_unstable();

    let crosses_l0 = |a: u64, b: u64| (a < e1 && e1 < b && b < e2) || (e1 < a && a < e2 && e2 < b);
    let mut memo: HashMap<(u64, u64), bool> = HashMap::new();
    let mut passes = |a: u64, b: u64| -> bool {
        let mut path = Vec::new();
        let (mut x, mut y) = (a, b);
        let verdict = loop {
            if x == y {
                break true;
            }
            let key = (x.min(y), x.max(y));
            if crosses_l0(key.0, key.1) {
                break false;
            }
            if let Some(&v) = memo.get(&key) {
                break v;
            }
            if path.contains(&key) {
                break true;
            }
            path.push(key);
            x = ((x as u128 * 2) % den as u128) as u64;
            y = ((y as u128 * 2) % den as u128) as u64;
        };
        for key in path {
            memo.insert(key, verdict);
        }
        verdict
    };

    let mut lam = Lamination::new(LamKind::Quadratic, Some(y0.clone()), depth);
    let to_angle = |n: u64| CircleAngle::new(n, den).expect("nonzero denominator");
    for (i, &a) in points.iter().enumerate() {
        let a_in = e1 < a && a < e2;
        for &b in &points[i + 1..] {
            let b_in = e1 < b && b < e2;
            let a_on = a == e1 || a == e2;
            let b_on = b == e1 || b == e2;
            if a_in != b_in && !a_on && !b_on {
                continue;
            }
            if passes(a, b) {
                let d = point_depth[&a].max(point_depth[&b]);
                lam.insert(Chord::new(to_angle(a), to_angle(b)).expect("distinct points"), Side::Inside, d);
            }
        }
    }
    Ok(lam)
}

/// The diameter used to pair preimages in the basilica pullback; it lies
/// in the critical gap and maps to a single point.
pub const BASILICA_DIAMETER: (i64, i64, i64, i64) = (3, 10, 4, 5);

/// Iterated pullbacks of {1/3, 2/3}, pairing preimages on the same side of
/// [`BASILICA_DIAMETER`].
pub fn build_basilica(depth: u32) -> Lamination {
    let (p1, q1, p2, q2) = BASILICA_DIAMETER;
    let diameter = Chord::frac(p1, q1, p2, q2);
    let mut lam = Lamination::new(LamKind::Basilica, None, depth);
    let mut frontier = vec![Chord::frac(1, 3, 2, 3)];
    lam.insert(frontier[0].clone(), Side::Inside, 0);
    for k in 1..=depth {
        let mut next = Vec::new();
        for c in &frontier {
            let pre = |t: &CircleAngle| {
                let h = t.preimage(&BigInt::from(0), 1);
                [h.antipode(), h]
            };
            let bs = pre(c.hi());
            for a in pre(c.lo()) {
                let b = bs
                    .iter()
                    .find(|b| diameter.separates(b) == diameter.separates(&a))
                    .expect("a diameter splits every antipodal pair it does not touch");
                let chord = Chord::new(a, b.clone()).expect("preimages of distinct points differ");
                if !lam.contains(Side::Inside, &chord) {
                    lam.insert(chord.clone(), Side::Inside, k);
                    next.push(chord);
                }
            }
        }
        frontier = next;
    }
    lam
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: i64, q: i64) -> CircleAngle {
        CircleAngle::frac(p, q)
    }

    fn chords_at(lam: &Lamination, side: Side, depth: u32) -> Vec<Chord> {
        lam.leaves().filter(|l| l.side == side && l.depth == depth).map(|l| l.chord).collect()
    }

    #[test]
    fn l0_examples() {
        let lam = build_l0(&a(1, 2), 0, 20).unwrap();
        assert_eq!(chords_at(&lam, Side::Inside, 0), vec![Chord::frac(1, 4, 3, 4)]);
        let lam = build_l0(&a(1, 2), 1, 20).unwrap();
        assert_eq!(lam.len(), 3);
        assert_eq!(chords_at(&lam, Side::Inside, 1), vec![Chord::frac(1, 16, 3, 16), Chord::frac(13, 16, 15, 16)]);
        assert!(build_l0(&a(1, 3), 1, 20).is_err());
    }

    #[test]
    fn l0_is_forward_invariant_under_quadrupling() {
        for t in [a(1, 2), a(1, 6), a(5, 12)] {
            let lam = build_l0(&t, 5, 24).unwrap();
            let l0 = chords_at(&lam, Side::Inside, 0).remove(0);
            for leaf in lam.leaves().filter(|l| l.chord != l0) {
                match leaf.chord.map(|x| x.times_pow2(2)) {
                    None => {}
                    Some(img) => assert!(lam.contains(Side::Inside, &img), "{} ↦ {}", leaf.chord, img),
                }
            }
        }
    }

    #[test]
    fn l0_sits_inside_l() {
        for t in [a(1, 2), a(1, 6), a(5, 12)] {
            let l0 = build_l0(&t, 4, 20).unwrap();
            let l = build_l(&t, 4).unwrap();
            for leaf in l0.leaves() {
                assert_eq!(l.depth_of(Side::Inside, &leaf.chord), Some(leaf.depth));
            }
        }
    }

    #[test]
    fn l_examples() {
        let lam = build_l(&a(1, 2), 1).unwrap();
        let mut expected: Vec<Chord> = (0..4).map(|k| Chord::frac(1 + 4 * k, 16, 3 + 4 * k, 16)).collect();
        expected.sort();
        assert_eq!(chords_at(&lam, Side::Inside, 1), expected);
        for d in 0..5 {
            assert!(build_l(&a(1, 6), d).unwrap().contains(Side::Inside, &Chord::frac(11, 60, 41, 60)));
        }
    }

    #[test]
    fn l_shadow_lengths_and_symmetry() {
        let lam = build_l(&a(5, 12), 4).unwrap();
        for leaf in lam.leaves() {
            let shadow = BigRational::new(1.into(), BigInt::from(2) << (2 * leaf.depth));
            assert_eq!(leaf.chord.length(), shadow);
            assert!(lam.contains(Side::Inside, &leaf.chord.antipode()));
        }
        assert_eq!(lam.len(), (0..=4).map(|n| 1 << (2 * n)).sum::<usize>());
    }

    #[test]
    fn two_sided_examples() {
        let lam = build_2l(&a(1, 2), 2).unwrap();
        assert_eq!(chords_at(&lam, Side::Inside, 0), vec![Chord::frac(1, 4, 3, 4)]);
        assert_eq!(chords_at(&lam, Side::Outside, 1), vec![Chord::frac(1, 8, 3, 8), Chord::frac(5, 8, 7, 8)]);
        let d2 = chords_at(&lam, Side::Inside, 2);
        assert_eq!(d2.len(), 4);
        assert!(d2.contains(&Chord::frac(5, 16, 7, 16)));
        assert!(d2.contains(&Chord::frac(13, 16, 15, 16)));
    }

    #[test]
    fn mirror_examples() {
        let mut lam = Lamination::new(LamKind::Custom, None, 0);
        lam.insert(Chord::frac(1, 4, 3, 4), Side::Inside, 0);
        assert!(mirror_outside(&lam).is_empty());
        lam.insert(Chord::frac(1, 16, 3, 16), Side::Inside, 1);
        let m = mirror_outside(&lam);
        assert_eq!(m.len(), 1);
        assert!(m.contains(Side::Outside, &Chord::frac(7, 8, 5, 8)));
        assert!(mirror_outside(&Lamination::new(LamKind::Custom, None, 0)).is_empty());
    }

    #[test]
    fn mate_examples() {
        let empty = Lamination::new(LamKind::Custom, None, 0);
        assert!(mate(&empty, &empty).is_empty());
        let b = build_basilica(0);
        let m = mate(&b, &b);
        assert!(m.contains(Side::Inside, &Chord::frac(1, 3, 2, 3)));
        assert!(m.contains(Side::Outside, &Chord::frac(2, 3, 1, 3)));
    }

    #[test]
    fn quadratic_membership_examples() {
        let y = a(1, 3);
        assert!(leaf_in_quadratic_lamination(&y, &quadratic_diameter(&y)));
        assert!(leaf_in_quadratic_lamination(&y, &Chord::frac(1, 3, 2, 3)));
        let z = CircleAngle::zero();
        assert!(leaf_in_quadratic_lamination(&z, &Chord::frac(0, 1, 1, 4)));
        assert!(!leaf_in_quadratic_lamination(&z, &Chord::frac(1, 8, 5, 8)));
    }

    #[test]
    fn quadratic_examples() {
        let lam = build_quadratic_lamination(&CircleAngle::zero(), 1).unwrap();
        let mut expected = vec![
            Chord::frac(0, 1, 1, 4),
            Chord::frac(0, 1, 3, 4),
            Chord::frac(1, 4, 1, 2),
            Chord::frac(1, 2, 3, 4),
            Chord::frac(0, 1, 1, 2),
        ];
        expected.sort();
        assert_eq!(lam.chords(Side::Inside).cloned().collect::<Vec<_>>(), expected);
        let lam = build_quadratic_lamination(&a(1, 3), 2).unwrap();
        assert!(lam.contains(Side::Inside, &Chord::frac(1, 3, 2, 3)));
        for d in 0..5 {
            let y = a(7, 20);
            assert!(build_quadratic_lamination(&y, d).unwrap().contains(Side::Inside, &quadratic_diameter(&y)));
        }
    }

    #[test]
    fn quadratic_builder_agrees_with_exact_oracle() {
        for y in [CircleAngle::zero(), a(1, 3), a(7, 20), a(7, 12)] {
            let depth = 3;
            let lam = build_quadratic_lamination(&y, depth).unwrap();
            let l0 = quadratic_diameter(&y);
            let mut pts = Vec::new();
            for k in 0..=depth {
                for e in [l0.lo(), l0.hi()] {
                    for j in 0..1i64 << k {
                        pts.push(e.preimage(&BigInt::from(j), k));
                    }
                }
            }
            pts.sort();
            pts.dedup();
            let mut count = 0;
            for (i, p) in pts.iter().enumerate() {
                for q in &pts[i + 1..] {
                    let c = Chord::new(p.clone(), q.clone()).unwrap();
                    let member = leaf_in_quadratic_lamination(&y, &c);
                    assert_eq!(lam.contains(Side::Inside, &c), member, "y₀ = {y}, chord {c}");
                    count += usize::from(member);
                }
            }
            assert_eq!(count, lam.len());
        }
    }

    #[test]
    fn basilica_examples() {
        let b0 = build_basilica(0);
        assert_eq!(b0.chords(Side::Inside).cloned().collect::<Vec<_>>(), vec![Chord::frac(1, 3, 2, 3)]);
        let b1 = build_basilica(1);
        assert_eq!(chords_at(&b1, Side::Inside, 1), vec![Chord::frac(1, 6, 5, 6)]);
        let b2 = build_basilica(2);
        assert_eq!(chords_at(&b2, Side::Inside, 2), vec![Chord::frac(1, 12, 11, 12), Chord::frac(5, 12, 7, 12)]);
        for d in 0..8 {
            assert_eq!(build_basilica(d).len(), 1 << d);
        }
    }

    #[test]
    fn basilica_avoids_pairing_diameter_and_stays_laminar() {
        let (p1, q1, p2, q2) = BASILICA_DIAMETER;
        let diameter = Chord::frac(p1, q1, p2, q2);
        let lam = build_basilica(10);
        assert!(lam.chords(Side::Inside).all(|c| !chords_cross(c, &diameter)));
        assert!(lam.crossing_report().passed());
        // {1/3, 2/3} stays the longest leaf.
        let top = Chord::frac(1, 3, 2, 3).length();
        assert!(lam.chords(Side::Inside).all(|c| c.length() <= top));
    }
}
