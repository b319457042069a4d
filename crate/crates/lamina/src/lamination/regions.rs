//! Faces of a finite non-crossing chord arrangement in the disk.
//!
//! Non-crossing chords are laminar on their inner arcs, so every chord
//! closes off exactly one face directly beneath it and one extra face
//! touches the point 0: n chords give n + 1 faces.

use std::fmt;

use super::{find_crossing, Chord};
use crate::angle::CircleAngle;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoundaryPiece {
    Chord(Chord),
    /// Counterclockwise circle arc from the first angle to the second.
    Arc(CircleAngle, CircleAngle),
}

/// A face given by its boundary cycle, traversed counterclockwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Region {
    /// The chord closing the face from outside; `None` for the face at 0.
    pub parent: Option<Chord>,
    pub boundary: Vec<BoundaryPiece>,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .boundary
            .iter()
            .map(|p| match p {
                BoundaryPiece::Chord(c) => format!("chord{c}"),
                BoundaryPiece::Arc(a, b) => format!("arc[{a}, {b}]"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Boundary cycle of the face spanning `[from, to]` whose inner chords are `children`.
fn cycle(from: &CircleAngle, to: &CircleAngle, children: &[&Chord], closing: &Chord) -> Vec<BoundaryPiece> {
    let mut out = Vec::new();
    let mut cur = from.clone();
    for c in children {
        if &cur != c.lo() {
            out.push(BoundaryPiece::Arc(cur.clone(), c.lo().clone()));
        }
        out.push(BoundaryPiece::Chord((*c).clone()));
        cur = c.hi().clone();
    }
    if &cur != to {
        out.push(BoundaryPiece::Arc(cur, to.clone()));
    }
    out.push(BoundaryPiece::Chord(closing.clone()));
    out
}

/// Faces of the arrangement; rejects crossing input.
pub fn complementary_regions(chords: &[Chord]) -> Result<Vec<Region>> {
    let refs: Vec<&Chord> = chords.iter().collect();
    if let Some((a, b)) = find_crossing(&refs) {
        return Err(Error::domain(format!("chords {a} and {b} cross")));
    }
    let mut sorted = refs;
    sorted.sort_by(|a, b| a.lo().cmp(b.lo()).then(b.hi().cmp(a.hi())));
    sorted.dedup();

    // parent[i] = innermost chord enclosing chord i.
    let mut children: Vec<Vec<&Chord>> = vec![Vec::new(); sorted.len()];
    let mut roots: Vec<&Chord> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for (i, c) in sorted.iter().enumerate() {
        while stack.last().is_some_and(|&t| sorted[t].hi() <= c.lo()) {
            stack.pop();
        }
        match stack.last() {
            Some(&t) => children[t].push(c),
            None => roots.push(c),
        }
        stack.push(i);
    }

    let mut regions = Vec::with_capacity(sorted.len() + 1);
    // The face at 0 alternates top-level chords with the arcs between them.
    let mut outer = Vec::new();
    if roots.is_empty() {
        outer.push(BoundaryPiece::Arc(CircleAngle::zero(), CircleAngle::zero()));
    }
    for (i, c) in roots.iter().enumerate() {
        outer.push(BoundaryPiece::Chord((*c).clone()));
        let last = i + 1 == roots.len();
        let next = if last { roots[0].lo() } else { roots[i + 1].lo() };
        if last || c.hi() != next {
            outer.push(BoundaryPiece::Arc(c.hi().clone(), next.clone()));
        }
    }
    regions.push(Region { parent: None, boundary: outer });
    for (i, c) in sorted.iter().enumerate() {
        regions.push(Region { parent: Some((*c).clone()), boundary: cycle(c.lo(), c.hi(), &children[i], c) });
    }
    Ok(regions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(r: &Region) -> usize {
        r.boundary.iter().filter(|p| matches!(p, BoundaryPiece::Arc(..))).count()
    }

    fn chords_on(r: &Region) -> usize {
        r.boundary.iter().filter(|p| matches!(p, BoundaryPiece::Chord(..))).count()
    }

    #[test]
    fn empty_and_diameter() {
        let r = complementary_regions(&[]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(arcs(&r[0]), 1);
        let r = complementary_regions(&[Chord::frac(1, 4, 3, 4)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|f| arcs(f) == 1 && chords_on(f) == 1));
    }

    #[test]
    fn dyadic_five_chords() {
        let chords = [
            Chord::frac(0, 1, 1, 4),
            Chord::frac(0, 1, 3, 4),
            Chord::frac(1, 4, 1, 2),
            Chord::frac(1, 2, 3, 4),
            Chord::frac(0, 1, 1, 2),
        ];
        let r = complementary_regions(&chords).unwrap();
        assert_eq!(r.len(), 6);
        // Euler: 4 vertices, 5 chords, 4 arcs; each chord borders two faces, each arc one.
        let chord_sides: usize = r.iter().map(chords_on).sum();
        let arc_sides: usize = r.iter().map(arcs).sum();
        assert_eq!((chord_sides, arc_sides), (10, 4));
        let triangles = r.iter().filter(|f| chords_on(f) == 3 && arcs(f) == 0).count();
        assert_eq!(triangles, 2);
    }

    #[test]
    fn crossing_input_rejected() {
        assert!(complementary_regions(&[Chord::frac(0, 1, 1, 2), Chord::frac(1, 4, 3, 4)]).is_err());
    }

    #[test]
    fn every_chord_bounds_two_faces() {
        let lam = super::super::build_l(&CircleAngle::frac(1, 6), 2).unwrap();
        let chords: Vec<Chord> = lam.chords(super::super::Side::Inside).cloned().collect();
        let r = complementary_regions(&chords).unwrap();
        assert_eq!(r.len(), chords.len() + 1);
        for c in &chords {
            let n = r.iter().flat_map(|f| &f.boundary).filter(|p| **p == BoundaryPiece::Chord(c.clone())).count();
            assert_eq!(n, 2);
        }
        let arc_total: usize = r.iter().map(arcs).sum();
        assert_eq!(arc_total, 2 * chords.len());
    }
}
