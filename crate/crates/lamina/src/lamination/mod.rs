//! Chords of the unit circle, finite lamination truncations and the
//! crossing predicate.
//!
//! A chord is stored by its endpoint angles with `lo < hi`; its inner arc
//! is `(lo, hi)`. Two chords cross iff their endpoints strictly interleave.

mod build;
mod invariance;
mod regions;
mod svg;

use std::collections::BTreeMap;
use std::fmt;

use num::rational::BigRational;
use rayon::prelude::*;

use crate::angle::CircleAngle;
use crate::error::{Error, Result};

pub use build::{
    build_2l, build_basilica, build_l, build_l0, build_quadratic_lamination, leaf_in_quadratic_lamination, mate,
    mirror_outside, BASILICA_DIAMETER,
};
pub use invariance::{
    check_quadratic_invariance, check_two_sided_invariance, construction_equivalence, EquivalenceReport,
    InvarianceReport,
};
pub use regions::{complementary_regions, BoundaryPiece, Region};
pub use svg::{render_svg, SvgOptions};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Chord {
    lo: CircleAngle,
    hi: CircleAngle,
}

impl Chord {
    /// `None` for coincident endpoints.
    pub fn new(a: CircleAngle, b: CircleAngle) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Chord { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Chord { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn frac(p1: i64, q1: i64, p2: i64, q2: i64) -> Self {
        Self::new(CircleAngle::frac(p1, q1), CircleAngle::frac(p2, q2)).expect("distinct endpoints")
    }

    pub fn lo(&self) -> &CircleAngle {
        &self.lo
    }

    pub fn hi(&self) -> &CircleAngle {
        &self.hi
    }

    /// Length of the arc `(lo, hi)`.
    pub fn inner_length(&self) -> BigRational {
        self.hi.as_ratio() - self.lo.as_ratio()
    }

    /// Length of the shorter subtended arc.
    pub fn length(&self) -> BigRational {
        let inner = self.inner_length();
        let outer = BigRational::from_integer(1.into()) - &inner;
        inner.min(outer)
    }

    pub fn is_diameter(&self) -> bool {
        self.inner_length() == *CircleAngle::half().as_ratio()
    }

    /// Image under an endpoint map; `None` when the endpoints collide.
    pub fn map(&self, f: impl Fn(&CircleAngle) -> CircleAngle) -> Option<Chord> {
        Chord::new(f(&self.lo), f(&self.hi))
    }

    pub fn antipode(&self) -> Chord {
        self.map(CircleAngle::antipode).expect("rotation is injective")
    }

    pub fn has_endpoint(&self, t: &CircleAngle) -> bool {
        &self.lo == t || &self.hi == t
    }

    /// Strict containment of `t` in the inner arc.
    pub fn separates(&self, t: &CircleAngle) -> bool {
        &self.lo < t && t < &self.hi
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

/// Strict interleaving of endpoints; shared endpoints never cross.
pub fn chords_cross(a: &Chord, b: &Chord) -> bool {
    (a.lo < b.lo && b.lo < a.hi && a.hi < b.hi) || (b.lo < a.lo && a.lo < b.hi && b.hi < a.hi)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    Inside,
    Outside,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Inside => Side::Outside,
            Side::Outside => Side::Inside,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Side::Inside => 'I',
            Side::Outside => 'O',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Leaf {
    pub chord: Chord,
    pub side: Side,
    pub depth: u32,
}

impl Leaf {
    pub fn new(chord: Chord, side: Side, depth: u32) -> Self {
        Leaf { chord, side, depth }
    }
}

pub fn leaves_cross(l1: &Leaf, l2: &Leaf) -> bool {
    chords_cross(&l1.chord, &l2.chord)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LamKind {
    L0,
    L,
    TwoSided,
    Quadratic,
    Basilica,
    Mating,
    Custom,
}

/// A finite set of leaves, each remembered at the smallest depth it appeared.
#[derive(Clone, Debug)]
pub struct Lamination {
    pub kind: LamKind,
    pub generator: Option<CircleAngle>,
    pub depth: u32,
    leaves: BTreeMap<(Side, Chord), u32>,
}

impl Lamination {
    pub fn new(kind: LamKind, generator: Option<CircleAngle>, depth: u32) -> Self {
        Lamination { kind, generator, depth, leaves: BTreeMap::new() }
    }

    pub fn insert(&mut self, chord: Chord, side: Side, depth: u32) {
        self.leaves.entry((side, chord)).and_modify(|d| *d = (*d).min(depth)).or_insert(depth);
    }

    pub fn contains(&self, side: Side, chord: &Chord) -> bool {
        self.leaves.contains_key(&(side, chord.clone()))
    }

    pub fn depth_of(&self, side: Side, chord: &Chord) -> Option<u32> {
        self.leaves.get(&(side, chord.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = Leaf> + '_ {
        self.leaves.iter().map(|((s, c), &d)| Leaf::new(c.clone(), *s, d))
    }

    pub fn chords(&self, side: Side) -> impl Iterator<Item = &Chord> + '_ {
        self.leaves.keys().filter(move |(s, _)| *s == side).map(|(_, c)| c)
    }

    pub fn count(&self, side: Side) -> usize {
        self.chords(side).count()
    }

    /// Leaves keyed by side and chord with their depths.
    pub fn as_map(&self) -> &BTreeMap<(Side, Chord), u32> {
        &self.leaves
    }

    /// One `I p/q r/s` or `O p/q r/s` line per leaf.
    pub fn to_text(&self) -> String {
        self.leaves().map(|l| format!("{} {} {} {}\n", l.side.tag(), l.chord.lo, l.chord.hi, l.depth)).collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lam = Lamination::new(LamKind::Custom, None, 0);
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::parse(format!("line {}: expected `I|O p/q r/s [depth]`, got {line:?}", n + 1));
            let (tag, a, b, depth) = match parts.as_slice() {
                [t, a, b] => (t, a, b, 0),
                [t, a, b, d] => (t, a, b, d.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            };
            let side = match *tag {
                "I" => Side::Inside,
                "O" => Side::Outside,
                _ => return Err(bad()),
            };
            let chord = Chord::new(a.parse()?, b.parse()?)
                .ok_or_else(|| Error::domain(format!("line {}: degenerate leaf", n + 1)))?;
            lam.insert(chord, side, depth);
        }
        Ok(lam)
    }

    pub fn crossing_report(&self) -> CrossingReport {
        let mut report = CrossingReport::default();
        for side in [Side::Inside, Side::Outside] {
            let chords: Vec<&Chord> = self.chords(side).collect();
            let n = chords.len() as u64;
            report.pairs += n * n.saturating_sub(1) / 2;
            if let Some((a, b)) = find_crossing(&chords) {
                report.crossings.push((side, a, b));
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default)]
pub struct CrossingReport {
    /// Same-side pairs covered by the sweep.
    pub pairs: u64,
    pub crossings: Vec<(Side, Chord, Chord)>,
}

impl CrossingReport {
    pub fn passed(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// Nesting sweep: a family is crossing-free iff it is laminar on inner arcs.
/// Returns one crossing pair if any exists.
pub fn find_crossing(chords: &[&Chord]) -> Option<(Chord, Chord)> {
    let mut sorted: Vec<&Chord> = chords.to_vec();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.hi.cmp(&a.hi)));
    let mut stack: Vec<&Chord> = Vec::new();
    for c in sorted {
        while stack.last().is_some_and(|top| top.hi <= c.lo) {
            stack.pop();
        }
        if let Some(top) = stack.last() {
            if top.hi < c.hi {
                return Some(((*top).clone(), c.clone()));
            }
        }
        stack.push(c);
    }
    None
}

/// Exhaustive pairwise check; returns (pairs examined, crossing pairs).
pub fn count_crossings_brute(chords: &[&Chord]) -> (u64, u64) {
    let crossings = (0..chords.len())
        .into_par_iter()
        .map(|i| chords[i + 1..].iter().filter(|c| chords_cross(chords[i], c)).count() as u64)
        .sum();
    let n = chords.len() as u64;
    (n * n.saturating_sub(1) / 2, crossings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(p1: i64, q1: i64, p2: i64, q2: i64) -> Leaf {
        Leaf::new(Chord::frac(p1, q1, p2, q2), Side::Inside, 0)
    }

    #[test]
    fn crossing_examples() {
        assert!(leaves_cross(&leaf(0, 1, 1, 2), &leaf(1, 4, 3, 4)));
        assert!(!leaves_cross(&leaf(0, 1, 1, 4), &leaf(1, 2, 3, 4)));
        assert!(!leaves_cross(&leaf(0, 1, 1, 4), &leaf(0, 1, 1, 2)));
        assert!(!leaves_cross(&leaf(1, 8, 1, 4), &leaf(0, 1, 1, 2)));
    }

    #[test]
    fn sweep_agrees_with_brute_force() {
        let pts: Vec<CircleAngle> = (0..10).map(|k| CircleAngle::frac(k, 10)).collect();
        let all: Vec<Chord> = pts
            .iter()
            .enumerate()
            .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| Chord::new(a.clone(), b.clone()).unwrap()))
            .collect();
        // Every subset of a fixed window of chords, compared on both routes.
        for mask in 0u32..(1 << 12) {
            let subset: Vec<&Chord> = (0..12).filter(|i| mask >> i & 1 == 1).map(|i| &all[i * 3 % all.len()]).collect();
            let (_, brute) = count_crossings_brute(&subset);
            assert_eq!(find_crossing(&subset).is_some(), brute > 0, "mask {mask}");
        }
    }

    #[test]
    fn text_roundtrip() {
        let mut lam = Lamination::new(LamKind::Custom, None, 0);
        lam.insert(Chord::frac(1, 3, 2, 3), Side::Inside, 0);
        lam.insert(Chord::frac(1, 8, 3, 8), Side::Outside, 1);
        let text = lam.to_text();
        assert_eq!(text, "I 1/3 2/3 0\nO 1/8 3/8 1\n");
        let back = Lamination::from_text(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.depth_of(Side::Outside, &Chord::frac(1, 8, 3, 8)), Some(1));
        assert_eq!(
            Lamination::from_text("I 1/3 2/3").unwrap().depth_of(Side::Inside, &Chord::frac(1, 3, 2, 3)),
            Some(0)
        );
        assert!(Lamination::from_text("I 1/3 2/3 x").is_err());
        assert!(Lamination::from_text("X 1/2 1/3").is_err());
        assert!(Lamination::from_text("I 1/2 1/2").is_err());
    }

    #[test]
    fn insert_keeps_smallest_depth() {
        let mut lam = Lamination::new(LamKind::Custom, None, 3);
        lam.insert(Chord::frac(1, 3, 2, 3), Side::Inside, 3);
        lam.insert(Chord::frac(1, 3, 2, 3), Side::Inside, 1);
        lam.insert(Chord::frac(1, 3, 2, 3), Side::Inside, 2);
        assert_eq!(lam.depth_of(Side::Inside, &Chord::frac(2, 3, 1, 3)), Some(1));
        assert_eq!(lam.len(), 1);
    }
}
