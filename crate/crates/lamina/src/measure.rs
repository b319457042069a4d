//! The atomic measure μ on the backward doubling orbit of θ₀ and the
//! blow-up map h that pushes Lebesgue measure forward to μ.
//!
//! An atom at depth m is an angle z with 2^m z = θ₀ and carries mass
//! 1/(2·4^m). Because μ has infinite support every quantity is computed
//! from the depth-M truncation together with its exact tail 2^{−(M+1)}.

use std::fmt;

use num::bigint::{BigInt, BigUint};
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::angle::{self, CircleAngle, RationalInterval};
use crate::error::{Error, Result};

/// Largest depth cap accepted by [`AtomicMeasure`]; keeps the mass numerator in a `u128`.
pub const MAX_MEASURE_DEPTH: u32 = 40;

/// Counterclockwise arc from `start` to `end`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub start: CircleAngle,
    pub end: CircleAngle,
}

impl Arc {
    pub fn new(start: CircleAngle, end: CircleAngle) -> Self {
        Arc { start, end }
    }

    /// (end − start) mod 1.
    pub fn length(&self) -> BigRational {
        self.start.ccw_to(&self.end)
    }

    /// Membership in the half-open arc `[start, end)`.
    pub fn contains(&self, t: &CircleAngle) -> bool {
        self.start.ccw_to(t) < self.length()
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

fn pow2(n: u32) -> BigInt {
    BigInt::one() << n
}

fn dyadic(num: impl Into<BigInt>, exp: u32) -> BigRational {
    BigRational::new(num.into(), pow2(exp))
}

fn require_non_periodic(theta0: &CircleAngle) -> Result<()> {
    if theta0.is_periodic() {
        Err(Error::domain(format!("θ₀ = {theta0} is periodic under doubling")))
    } else {
        Ok(())
    }
}

/// The 2ⁿ angles (θ₀ + k)/2ⁿ in increasing order.
pub fn preimages_of_angle(theta0: &CircleAngle, n: u32) -> Vec<CircleAngle> {
    let count: u64 = 1 << n;
    (0..count).map(|k| theta0.preimage(&BigInt::from(k), n)).collect()
}

/// Smallest m with 2^m z = θ₀, if any.
pub fn atom_depth(z: &CircleAngle, theta0: &CircleAngle) -> Option<u32> {
    if !theta0.is_periodic() {
        // The orbit of z can meet a non-periodic point only where the
        // 2-adic orders of the denominators line up.
        let m = z.two_adic_order().checked_sub(theta0.two_adic_order())?;
        let m = u32::try_from(m).ok()?;
        return (&z.times_pow2(m) == theta0).then_some(m);
    }
    let period = angle::orbit_type(theta0).period;
    let reach = z.two_adic_order() as usize + period;
    let mut w = z.clone();
    for m in 0..=reach {
        if &w == theta0 {
            return Some(m as u32);
        }
        w = w.double();
    }
    None
}

/// μ{z} restricted to depths m ≤ cap; `None` sums the whole series exactly.
pub fn mu_weight(z: &CircleAngle, theta0: &CircleAngle, cap: Option<u32>) -> BigRational {
    let Some(m0) = atom_depth(z, theta0) else {
        return BigRational::zero();
    };
    let term = |m: u32| dyadic(1, 2 * m + 1);
    if !theta0.is_periodic() {
        return match cap {
            Some(c) if m0 > c => BigRational::zero(),
            _ => term(m0),
        };
    }
    let p = angle::orbit_type(theta0).period as u32;
    match cap {
        None => {
            let ratio = BigRational::new(pow2(2 * p), pow2(2 * p) - 1);
            term(m0) * ratio
        }
        Some(c) => (m0..=c).step_by(p as usize).map(term).sum(),
    }
}

/// Arc lengths of the periodic-case shadow σ for period p.
pub fn sigma_lengths_periodic(p: u32) -> Result<Vec<BigRational>> {
    if p == 0 {
        return Err(Error::domain("period must be positive"));
    }
    let den: BigInt = (pow2(2 * p) - 1) * 2;
    Ok((1..=p).map(|i| BigRational::new(pow2(2 * i), den.clone())).collect())
}

/// An atom stored by position: angle (θ₀ + index)/2^depth.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Atom {
    pub depth: u32,
    pub index: u64,
}

/// The depth-truncated measure μ for a non-periodic generator.
#[derive(Clone, Debug)]
pub struct AtomicMeasure {
    generator: CircleAngle,
    depth_cap: u32,
}

impl AtomicMeasure {
    pub fn new(theta0: &CircleAngle, depth_cap: u32) -> Result<Self> {
        require_non_periodic(theta0)?;
        if depth_cap > MAX_MEASURE_DEPTH {
            return Err(Error::domain(format!("depth cap {depth_cap} exceeds {MAX_MEASURE_DEPTH}")));
        }
        Ok(AtomicMeasure { generator: theta0.clone(), depth_cap })
    }

    pub fn generator(&self) -> &CircleAngle {
        &self.generator
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    pub fn len(&self) -> u64 {
        (2u64 << self.depth_cap) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        (0..=self.depth_cap).flat_map(|depth| (0..1u64 << depth).map(move |index| Atom { depth, index }))
    }

    pub fn angle(&self, atom: Atom) -> CircleAngle {
        self.generator.preimage(&BigInt::from(atom.index), atom.depth)
    }

    /// Weight as a numerator over 2^{2·cap+1}.
    pub fn weight_units(&self, atom: Atom) -> u128 {
        1u128 << (2 * (self.depth_cap - atom.depth))
    }

    pub fn weight(&self, atom: Atom) -> BigRational {
        dyadic(1, 2 * atom.depth + 1)
    }

    /// Listed mass as a numerator over 2^{2·cap+1}, summed per depth.
    pub fn total_mass_units(&self) -> u128 {
        (0..=self.depth_cap).map(|m| (1u128 << m) << (2 * (self.depth_cap - m))).sum()
    }

    pub fn total_mass(&self) -> BigRational {
        BigRational::new(BigInt::from(self.total_mass_units()), pow2(2 * self.depth_cap + 1))
    }

    /// Atoms in increasing angle order with their weights.
    pub fn sorted(&self) -> Vec<(CircleAngle, BigRational)> {
        let cap = self.depth_cap;
        let (p, q) = (self.generator.numer(), self.generator.denom());
        let mut keyed: Vec<(BigInt, Atom)> =
            self.atoms().map(|a| ((p + BigInt::from(a.index) * q) << (cap - a.depth), a)).collect();
        keyed.sort_by(|x, y| x.0.cmp(&y.0));
        keyed.into_iter().map(|(_, a)| (self.angle(a), self.weight(a))).collect()
    }
}

/// Enclosure of μ([0, t)) from the depth-M truncation; width 2^{−(M+1)}.
pub fn cdf_below(t: &BigRational, theta0: &CircleAngle, m_max: u32) -> RationalInterval {
    let (p0, q0) = (theta0.numer(), theta0.denom());
    let (pt, qt) = (t.numer(), t.denom());
    let den = qt * q0;
    let mut num = BigInt::zero();
    for m in 0..=m_max {
        let cap = pow2(m);
        let diff: BigInt = ((pt * q0) << m) - p0 * qt;
        let count = num::clamp(Integer::div_ceil(&diff, &den), BigInt::zero(), cap);
        num += count << (2 * (m_max - m));
    }
    let lo = BigRational::new(num, pow2(2 * m_max + 1));
    let hi = &lo + dyadic(1, m_max + 1);
    RationalInterval { lo, hi }
}

/// The h-preimage of a single circle point, with enclosed endpoints.
#[derive(Clone, Debug)]
pub struct BlowupArc {
    /// Depth of z as an atom, if it is one within the cap.
    pub depth: Option<u32>,
    pub start: RationalInterval,
    pub end: RationalInterval,
    /// Exact length, the truncated μ-weight of z.
    pub length: BigRational,
    /// Exact start point recovered from x₀ through the semiconjugacy.
    pub exact_start: Option<CircleAngle>,
}

impl BlowupArc {
    pub fn exact(&self) -> Option<Arc> {
        let s = self.exact_start.clone()?;
        let e = CircleAngle::from_ratio(s.as_ratio() + &self.length);
        Some(Arc::new(s, e))
    }
}

/// h⁻¹(z) from the cumulative distribution of the depth-`m_max` truncation.
pub fn h_arc(z: &CircleAngle, theta0: &CircleAngle, m_max: u32) -> Result<BlowupArc> {
    require_non_periodic(theta0)?;
    if theta0.is_zero() {
        return Err(Error::domain("θ₀ must be nonzero"));
    }
    let start = cdf_below(z.as_ratio(), theta0, m_max);
    let length = mu_weight(z, theta0, Some(m_max));
    let end = RationalInterval { lo: &start.lo + &length, hi: &start.hi + &length };
    let depth = atom_depth(z, theta0).filter(|&m| m <= m_max);
    let exact_start = match depth {
        Some(m) if m_max >= 2 => Some(exact_atom_start(z, m, theta0, m_max)?),
        _ => None,
    };
    Ok(BlowupArc { depth, start, end, length, exact_start })
}

/// start(θ₀) = x₀ and 4·start(z) ≡ start(2z); the enclosure picks the
/// quarter, unambiguous once its width 2^{−(M+1)} is below 1/4.
fn exact_atom_start(z: &CircleAngle, depth: u32, theta0: &CircleAngle, m_max: u32) -> Result<CircleAngle> {
    let mut chain = vec![z.clone()];
    for _ in 0..depth {
        let next = chain.last().expect("nonempty").double();
        chain.push(next);
    }
    let mut s = angle::x0_digits(theta0)?;
    for w in chain.iter().rev().skip(1) {
        let enc = cdf_below(w.as_ratio(), theta0, m_max);
        let hits: Vec<BigRational> = (0..4)
            .map(|j| (s.as_ratio() + BigRational::from_integer(j.into())) / BigRational::from_integer(4.into()))
            .filter(|c| enc.contains(c))
            .collect();
        match hits.as_slice() {
            [c] => s = CircleAngle::from_ratio(c.clone()),
            _ => return Err(Error::numeric(format!("arc start of {w} not isolated by the enclosure"))),
        }
    }
    Ok(s)
}

/// Exact arc starts of every atom up to `depth`, level by level:
/// `starts[m][k]` belongs to the atom (θ₀ + k)/2^m.
pub fn atom_arc_starts(theta0: &CircleAngle, depth: u32, m_max: u32) -> Result<Vec<Vec<CircleAngle>>> {
    require_non_periodic(theta0)?;
    if m_max < depth.max(2) || m_max > MAX_MEASURE_DEPTH {
        return Err(Error::domain(format!("measure cap {m_max} must lie in [max(depth, 2), {MAX_MEASURE_DEPTH}]")));
    }
    let quarter = BigRational::new(1.into(), 4.into());
    let mut levels = vec![vec![angle::x0_digits(theta0)?]];
    for m in 1..=depth {
        let parents = levels.last().expect("level 0 present");
        let half = 1u64 << (m - 1);
        let mut row = Vec::with_capacity(2 * parents.len());
        for k in 0..2 * half {
            let z = theta0.preimage(&BigInt::from(k), m);
            let enc = cdf_below(z.as_ratio(), theta0, m_max);
            let base = parents[(k % half) as usize].as_ratio() * &quarter;
            let hit = (0..4)
                .map(|j| &base + BigRational::new(j.into(), 4.into()))
                .find(|c| enc.contains(c))
                .ok_or_else(|| Error::numeric(format!("arc start of {z} not isolated by the enclosure")))?;
            row.push(CircleAngle::from_ratio(hit));
        }
        levels.push(row);
    }
    Ok(levels)
}

/// Exact length of every depth-m atom arc.
pub fn atom_arc_length(m: u32) -> BigRational {
    dyadic(1, 2 * m + 1)
}

/// Enclosure of h(u) by bisection over dyadic t, `bits` levels deep.
pub fn h_enclosure(u: &BigRational, theta0: &CircleAngle, m_max: u32, bits: u32) -> RationalInterval {
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    let delta = dyadic(1, m_max + 1);
    for _ in 0..bits {
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        let f = cdf_below(&mid, theta0, m_max);
        if &f.lo > u {
            hi = mid;
        } else if &f.lo + &delta <= *u {
            lo = mid;
        } else {
            break;
        }
    }
    RationalInterval { lo, hi }
}

/// Circular gap between two arcs given as closed lifts; zero when they meet.
fn circular_gap(a: &RationalInterval, b: &RationalInterval) -> BigRational {
    let one = BigRational::one();
    if a.width() >= one || b.width() >= one {
        return BigRational::zero();
    }
    let frac = |x: &BigRational| x - x.floor();
    let (a0, b0) = (frac(&a.lo), frac(&b.lo));
    let aw = a.width();
    let bw = b.width();
    // Distance from the end of one arc forward to the start of the other.
    let ab = frac(&(&b0 - (&a0 + &aw)));
    let ba = frac(&(&a0 - (&b0 + &bw)));
    let b_in_a = frac(&(&b0 - &a0)) <= aw;
    let a_in_b = frac(&(&a0 - &b0)) <= bw;
    if b_in_a || a_in_b {
        BigRational::zero()
    } else {
        ab.min(ba)
    }
}

#[derive(Clone, Debug)]
pub struct SemiconjugacySample {
    pub u: CircleAngle,
    pub defect: f64,
    pub width_4u: f64,
    pub width_u: f64,
}

#[derive(Clone, Debug)]
pub struct SemiconjugacyReport {
    pub samples: Vec<SemiconjugacySample>,
    pub max_defect: f64,
    pub tolerance: f64,
    pub skipped: usize,
}

impl SemiconjugacyReport {
    pub fn passed(&self) -> bool {
        self.max_defect <= self.tolerance
    }
}

/// Checks h(4u) = 2·h(u) on samples outside σ₀; the defect is the gap
/// between the enclosures of the two sides.
pub fn semiconjugacy_check(theta0: &CircleAngle, samples: &[CircleAngle], m_max: u32) -> Result<SemiconjugacyReport> {
    let sigma0 = sigma0_arc(theta0)?;
    let bits = 2 * m_max + 4;
    let tolerance = 2.0 * 0.5f64.powi(m_max as i32 + 1);
    let mut out = Vec::new();
    let mut skipped = 0;
    for u in samples {
        if sigma0.contains(u) && u != &sigma0.start {
            skipped += 1;
            continue;
        }
        let four_u = u.times_pow2(2);
        let lhs = h_enclosure(four_u.as_ratio(), theta0, m_max, bits);
        let rhs = h_enclosure(u.as_ratio(), theta0, m_max, bits);
        let two = BigRational::from_integer(2.into());
        let doubled = RationalInterval { lo: &rhs.lo * &two, hi: &rhs.hi * &two };
        let gap = circular_gap(&lhs, &doubled);
        out.push(SemiconjugacySample {
            u: u.clone(),
            defect: gap.to_f64().unwrap_or(f64::INFINITY),
            width_4u: lhs.width().to_f64().unwrap_or(f64::INFINITY),
            width_u: rhs.width().to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let max_defect = out.iter().map(|s| s.defect).fold(0.0, f64::max);
    Ok(SemiconjugacyReport { samples: out, max_defect, tolerance, skipped })
}

/// σ₀ = [x₀, x₀ + 1/2] oriented to avoid angle 0.
pub fn sigma0_arc(theta0: &CircleAngle) -> Result<Arc> {
    require_non_periodic(theta0)?;
    let x0 = angle::x0_digits(theta0)?;
    let opposite = x0.antipode();
    // x₀ lies in (0, 1/2) for every admissible θ₀, since its first digit is 0.
    debug_assert!(x0 < CircleAngle::half() && !x0.is_zero());
    Ok(Arc::new(x0, opposite))
}

/// Lower end of an enclosure as a numerator over 2^exp, for exact stream comparison.
pub fn dyadic_numerator(x: &BigRational, exp: u32) -> Option<BigUint> {
    let scaled = x * BigRational::from_integer(pow2(exp));
    (scaled.is_integer() && !scaled.is_negative()).then(|| scaled.to_integer().magnitude().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(p: i64, q: i64) -> CircleAngle {
        CircleAngle::frac(p, q)
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(preimages_of_angle(&a(1, 2), 1), vec![a(1, 4), a(3, 4)]);
        assert_eq!(preimages_of_angle(&a(1, 6), 1), vec![a(1, 12), a(7, 12)]);
        assert_eq!(preimages_of_angle(&a(2, 7), 0), vec![a(2, 7)]);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(mu_weight(&a(1, 6), &a(1, 6), Some(10)), r(1, 2));
        assert_eq!(mu_weight(&a(1, 12), &a(1, 6), Some(10)), r(1, 8));
        assert_eq!(mu_weight(&a(1, 12), &a(1, 6), Some(0)), r(0, 1));
        assert_eq!(mu_weight(&CircleAngle::zero(), &CircleAngle::zero(), None), r(2, 3));
        assert_eq!(mu_weight(&a(1, 5), &a(1, 6), None), r(0, 1));
    }

    #[test]
    fn periodic_lengths() {
        assert_eq!(sigma_lengths_periodic(1).unwrap(), vec![r(2, 3)]);
        assert_eq!(sigma_lengths_periodic(2).unwrap(), vec![r(2, 15), r(8, 15)]);
        assert_eq!(sigma_lengths_periodic(1).unwrap()[0], mu_weight(&CircleAngle::zero(), &CircleAngle::zero(), None));
        // Period-2 generator: the largest shadow piece carries μ{θ₀}.
        assert_eq!(sigma_lengths_periodic(2).unwrap()[1], mu_weight(&a(1, 3), &a(1, 3), None));
    }

    #[test]
    fn sigma0_examples() {
        assert_eq!(sigma0_arc(&a(1, 2)).unwrap(), Arc::new(a(1, 4), a(3, 4)));
        let s = sigma0_arc(&a(1, 6)).unwrap();
        assert_eq!(s, Arc::new(a(11, 60), a(41, 60)));
        assert_eq!(s.length(), r(1, 2));
        assert_eq!(s.to_string(), "[11/60, 41/60)");
        assert!(sigma0_arc(&a(1, 3)).is_err());
    }

    #[test]
    fn blowup_of_generator() {
        for t in [a(1, 2), a(1, 6), a(5, 12), a(3, 10)] {
            let arc = h_arc(&t, &t, 30).unwrap();
            let x0 = angle::x0_digits(&t).unwrap();
            assert!(arc.start.contains(x0.as_ratio()));
            assert!(arc.end.contains(x0.antipode().as_ratio()));
            assert_eq!(arc.exact().unwrap(), sigma0_arc(&t).unwrap());
        }
        let arc = h_arc(&a(1, 5), &a(1, 6), 12).unwrap();
        assert!(arc.length.is_zero() && arc.depth.is_none());
    }

    #[test]
    fn depth_one_arcs_for_half() {
        let t = a(1, 2);
        let left = h_arc(&a(1, 4), &t, 20).unwrap().exact().unwrap();
        let right = h_arc(&a(3, 4), &t, 20).unwrap().exact().unwrap();
        assert_eq!(left.length(), r(1, 8));
        assert_eq!(right.length(), r(1, 8));
        assert_eq!(left, Arc::new(a(1, 16), a(3, 16)));
        assert_eq!(right, Arc::new(a(13, 16), a(15, 16)));
    }

    #[test]
    fn mass_accounting_against_weights() {
        for t in [a(1, 2), a(1, 6), a(5, 12)] {
            for cap in 0..8 {
                let mu = AtomicMeasure::new(&t, cap).unwrap();
                let summed: BigRational = mu.atoms().map(|at| mu_weight(&mu.angle(at), &t, Some(cap))).sum();
                let expected = BigRational::one() - dyadic(1, cap + 1);
                assert_eq!(summed, expected);
                assert_eq!(mu.total_mass(), expected);
            }
        }
    }

    #[test]
    fn arcs_are_disjoint_and_ordered() {
        let t = a(1, 6);
        let cap = 5;
        let mu = AtomicMeasure::new(&t, cap).unwrap();
        let arcs: Vec<Arc> =
            mu.sorted().iter().map(|(z, _)| h_arc(z, &t, cap + 12).unwrap().exact().unwrap()).collect();
        for w in arcs.windows(2) {
            assert!(w[0].start.as_ratio() + w[0].length() <= *w[1].start.as_ratio());
        }
        let total: BigRational = arcs.iter().map(Arc::length).sum();
        assert_eq!(total, mu.total_mass());
    }

    #[test]
    fn semiconjugacy_examples() {
        let t = a(1, 6);
        let x0 = angle::x0_digits(&t).unwrap();
        let hx = h_enclosure(x0.as_ratio(), &t, 20, 44);
        assert!(hx.contains(t.as_ratio()));
        let h4 = h_enclosure(x0.times_pow2(2).as_ratio(), &t, 20, 44);
        assert!(h4.contains(t.double().as_ratio()));
        let h0 = h_enclosure(&BigRational::zero(), &t, 20, 44);
        assert!(h0.lo.is_zero());

        let samples: Vec<CircleAngle> = (1..40).map(|k| a(k, 40)).collect();
        let rep = semiconjugacy_check(&t, &samples, 20).unwrap();
        assert!(rep.passed(), "max defect {}", rep.max_defect);
        assert!(rep.skipped > 0);
    }

    #[test]
    fn level_starts_match_pointwise_arcs() {
        for t in [a(1, 2), a(1, 6), a(5, 12)] {
            let levels = atom_arc_starts(&t, 4, 16).unwrap();
            for (m, row) in levels.iter().enumerate() {
                for (k, s) in row.iter().enumerate() {
                    let z = t.preimage(&BigInt::from(k), m as u32);
                    let arc = h_arc(&z, &t, 16).unwrap();
                    assert_eq!(arc.exact_start.as_ref(), Some(s));
                    assert!(arc.start.contains(s.as_ratio()));
                }
            }
        }
    }

    #[test]
    fn circular_gap_cases() {
        let iv = |a: BigRational, b: BigRational| RationalInterval { lo: a, hi: b };
        assert!(circular_gap(&iv(r(1, 10), r(2, 10)), &iv(r(15, 100), r(3, 10))).is_zero());
        assert_eq!(circular_gap(&iv(r(1, 10), r(2, 10)), &iv(r(3, 10), r(4, 10))), r(1, 10));
        assert_eq!(circular_gap(&iv(r(9, 10), r(19, 20)), &iv(r(21, 20), r(11, 10))), r(1, 10));
    }

    /// Angles with an even reduced denominator.
    pub(crate) fn non_periodic(max_odd: i64) -> impl Strategy<Value = CircleAngle> {
        (0..max_odd, 1u32..6)
            .prop_flat_map(|(o, k)| {
                let q = (2 * o + 1) << k;
                (0..q).prop_map(move |p| (2 * p + 1, 2 * q))
            })
            .prop_map(|(p, q)| CircleAngle::frac(p, q))
    }

    proptest! {
        #[test]
        fn atom_depth_matches_brute_force(t in non_periodic(60), zq in 1u32..7, k in 0u64..64) {
            let k = k % (1 << zq);
            let z = t.preimage(&BigInt::from(k), zq);
            let brute = (0..=zq).find(|&m| z.times_pow2(m) == t);
            prop_assert_eq!(atom_depth(&z, &t), brute);
            let other = z.add(&CircleAngle::frac(1, 3));
            let brute = (0..=12).find(|&m| other.times_pow2(m) == t);
            prop_assert_eq!(atom_depth(&other, &t), brute);
        }

        #[test]
        fn cdf_enclosures_nest(t0 in non_periodic(20), tn in 0u64..97) {
            let x = BigRational::new((tn as i64).into(), 97.into());
            let deep = cdf_below(&x, &t0, 16);
            let shallow = cdf_below(&x, &t0, 6);
            prop_assert!(shallow.lo <= deep.lo && deep.hi <= shallow.hi);
        }
    }
}
