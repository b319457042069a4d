//! Invariance checks at finite depth and the L ∪ mirror(L) comparison.

use std::collections::BTreeMap;

use num::bigint::BigInt;

use super::{build_2l, build_l, mirror_outside, Chord, Lamination, Leaf, Side};
use crate::angle::CircleAngle;
use crate::error::Result;

#[derive(Clone, Debug, Default)]
pub struct InvarianceReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Forward, antipodal and backward conditions for the endpoint map `map`
/// whose images land on `image_side(side)`.
fn check_conditions(
    lam: &Lamination,
    depth: u32,
    map: impl Fn(&CircleAngle) -> CircleAngle,
    preimages: impl Fn(&CircleAngle) -> [CircleAngle; 2],
    image_side: impl Fn(Side) -> Side,
) -> InvarianceReport {
    let mut report = InvarianceReport::default();
    let leaves: Vec<Leaf> = lam.leaves().filter(|l| l.depth <= depth).collect();
    for leaf in leaves {
        report.checked += 1;
        let target = image_side(leaf.side);
        let tag = leaf.side.tag();
        if let Some(img) = leaf.chord.map(&map) {
            if !lam.contains(target, &img) {
                report.violations.push(format!("forward: {tag} {} ↦ {img} missing", leaf.chord));
            }
        }
        let anti = leaf.chord.antipode();
        if !lam.contains(leaf.side, &anti) {
            report.violations.push(format!("antipodal: {tag} {} ↦ {anti} missing", leaf.chord));
        }
        let pb = preimages(leaf.chord.hi());
        for pa in preimages(leaf.chord.lo()) {
            let found = pb.iter().any(|b| Chord::new(pa.clone(), b.clone()).is_some_and(|c| lam.contains(target, &c)));
            if !found {
                report.violations.push(format!("backward: {tag} {} has no pullback from {pa}", leaf.chord));
            }
        }
    }
    report
}

fn neg_double(t: &CircleAngle) -> CircleAngle {
    t.double().neg()
}

fn neg_double_preimages(t: &CircleAngle) -> [CircleAngle; 2] {
    let h = t.neg().preimage(&BigInt::from(0), 1);
    [h.antipode(), h]
}

fn doubling_preimages(t: &CircleAngle) -> [CircleAngle; 2] {
    let h = t.preimage(&BigInt::from(0), 1);
    [h.antipode(), h]
}

/// Invariance of a two-sided lamination under z ↦ 1/z², i.e. t ↦ −2t with
/// sides swapped, checked on all leaves of depth ≤ `depth`. Backward
/// conditions need the lamination built one level deeper.
pub fn check_two_sided_invariance(lam: &Lamination, depth: u32) -> InvarianceReport {
    check_conditions(lam, depth, neg_double, neg_double_preimages, Side::other)
}

/// Invariance of a one-sided lamination under z ↦ z².
pub fn check_quadratic_invariance(lam: &Lamination, depth: u32) -> InvarianceReport {
    check_conditions(lam, depth, CircleAngle::double, doubling_preimages, |s| s)
}

#[derive(Clone, Debug, Default)]
pub struct EquivalenceReport {
    pub compared: usize,
    pub missing: Vec<(Side, Chord, u32)>,
    pub extra: Vec<(Side, Chord, u32)>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Compares build_2L(θ₀, d) with L(⌊d/2⌋) inside and mirror(L(⌈d/2⌉))
/// outside. Inside level j of L sits at two-sided depth 2j, its mirror at 2j − 1.
pub fn construction_equivalence(theta0: &CircleAngle, depth: u32) -> Result<EquivalenceReport> {
    let two = build_2l(theta0, depth)?;
    let mut rhs: BTreeMap<(Side, Chord), u32> = BTreeMap::new();
    for leaf in build_l(theta0, depth / 2)?.leaves() {
        rhs.insert((Side::Inside, leaf.chord), 2 * leaf.depth);
    }
    for leaf in mirror_outside(&build_l(theta0, depth.div_ceil(2))?).leaves() {
        rhs.insert((Side::Outside, leaf.chord), 2 * leaf.depth - 1);
    }
    let lhs = two.as_map();
    let mut report = EquivalenceReport { compared: lhs.len().max(rhs.len()), ..Default::default() };
    for ((side, chord), &d) in lhs {
        if rhs.get(&(*side, chord.clone())) != Some(&d) {
            report.extra.push((*side, chord.clone(), d));
        }
    }
    for ((side, chord), &d) in &rhs {
        if lhs.get(&(*side, chord.clone())) != Some(&d) {
            report.missing.push((*side, chord.clone(), d));
        }
    }
    Ok(report)
}
