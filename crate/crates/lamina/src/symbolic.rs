//! Binary addresses of Julia-set points, the identification ∼, the
//! angle ↔ address dictionary and the regulated-ray rewrite rules.
//!
//! Addresses are eventually periodic bit sequences. An angle θ is
//! identified with the address whose odd-position bits (1-based) are the
//! complements of θ's binary digits; under this dictionary t ↦ −2t becomes
//! the shift.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::angle::{self, CircleAngle, DigitStream};
use crate::error::{Error, Result};
use crate::lamination::{build_2l, Side};

/// An address, optionally with a distinguished first bit.
#[derive(Clone, Debug)]
pub struct Address {
    pub leading: Option<u8>,
    pub body: DigitStream,
}

impl Address {
    pub fn new(leading: Option<u8>, body: DigitStream) -> Self {
        Address { leading, body }
    }

    pub fn from_stream(body: DigitStream) -> Self {
        Address { leading: None, body }
    }

    /// The full bit sequence.
    pub fn stream(&self) -> DigitStream {
        match self.leading {
            Some(b) => self.body.prepend(&[b]),
            None => self.body.clone(),
        }
    }

    pub fn shift(&self) -> Address {
        match self.leading {
            Some(_) => Address::from_stream(self.body.clone()),
            None => Address::from_stream(self.body.shift()),
        }
    }
}

impl PartialEq for Address {
    fn eq(&self, other: &Self) -> bool {
        self.stream() == other.stream()
    }
}

impl Eq for Address {}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.leading {
            Some(b) => write!(f, "{b}|{}", self.body),
            None => write!(f, "{}", self.body),
        }
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once('|') {
            Some((b, body)) => {
                let lead = match b.trim() {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(Error::parse(format!("bad leading bit in {s:?}"))),
                };
                Ok(Address::new(Some(lead), body.parse()?))
            }
            None => Ok(Address::from_stream(s.parse()?)),
        }
    }
}

/// Index convention for the critical itinerary.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Convention {
    /// d_{2m−1} = θ₀[m], d_{2m} = 1 − ν_m(θ₀).
    Itinerary,
    /// Shifted by one: d_1 = 1 − ν_0, d_{2m} = θ₀[m], d_{2m+1} = 1 − ν_m.
    Shifted,
}

/// Body d of the two addresses 0·d and 1·d of the critical point.
pub fn critical_body(theta0: &CircleAngle, convention: Convention) -> Result<DigitStream> {
    if theta0.is_periodic() {
        return Err(Error::domain(format!("θ₀ = {theta0} is periodic under doubling")));
    }
    let e = angle::expand(theta0);
    let pair = |i: usize| [e.digits[i], 1 - e.nu[i]];
    let mut pre: Vec<u8> = match convention {
        Convention::Itinerary => Vec::new(),
        Convention::Shifted => vec![0],
    };
    pre.extend((0..e.pre).flat_map(pair));
    let per = (e.pre..e.pre + e.per).flat_map(pair).collect();
    DigitStream::new(pre, per)
}

/// The two addresses 0·d and 1·d of the critical point −1.
pub fn critical_address(theta0: &CircleAngle) -> Result<[Address; 2]> {
    let d = critical_body(theta0, Convention::Itinerary)?;
    Ok([Address::new(Some(0), d.clone()), Address::new(Some(1), d)])
}

/// Flips the bits at 1-based odd positions.
pub fn angle_to_address(theta: &CircleAngle) -> Address {
    Address::from_stream(theta.digit_stream().xor_periodic(&[1, 0]))
}

pub fn address_to_angle(a: &Address) -> CircleAngle {
    a.stream().xor_periodic(&[1, 0]).value()
}

fn alternating(start: u8) -> DigitStream {
    DigitStream::new(Vec::new(), vec![start, 1 - start]).expect("bits")
}

/// Upper bound on the size of an explored equivalence class.
pub const CLASS_CAP: usize = 64;

/// Addresses reachable from `x` by one application of a defining rule.
fn neighbours(x: &DigitStream, critical: Option<&DigitStream>) -> Vec<DigitStream> {
    let (w01, w10) = (alternating(0), alternating(1));
    let mut out = Vec::new();
    if *x == w01 {
        out.push(w10.clone());
    } else if *x == w10 {
        out.push(w01.clone());
    }
    // Canonical suffixes equal to a purely periodic or preperiodic stream
    // can only start inside the preperiod or the first period.
    let reach = x.preperiod().len() + x.period().len() + 1;
    for i in 0..reach {
        let tail = x.suffix(i + 1);
        let bit = x.bit(i);
        let head = x.prefix(i);
        let rebuild = |b: u8, rest: &DigitStream| rest.prepend(&[b]).prepend(&head);
        if bit == 0 && tail == w01 {
            out.push(rebuild(1, &w10));
        }
        if bit == 1 && tail == w10 {
            out.push(rebuild(0, &w01));
        }
        if critical.is_some_and(|d| &tail == d) {
            out.push(rebuild(1 - bit, &tail));
        }
    }
    out
}

/// Breadth-first closure of `x` under the rules, capped at [`CLASS_CAP`].
fn closure(x: &DigitStream, critical: Option<&DigitStream>) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([x.clone()]);
    seen.insert(x.to_string());
    while let Some(y) = queue.pop_front() {
        for z in neighbours(&y, critical) {
            if seen.len() >= CLASS_CAP {
                return seen;
            }
            if seen.insert(z.to_string()) {
                queue.push_back(z);
            }
        }
    }
    seen
}

/// Equivalence class of `x` under ∼ for generator θ₀, as printed streams.
pub fn equivalence_class(x: &Address, theta0: &CircleAngle) -> Result<BTreeSet<String>> {
    let d = critical_body(theta0, Convention::Itinerary)?;
    Ok(closure(&x.stream(), Some(&d)))
}

/// x ∼ y for generator θ₀.
pub fn addr_equivalent(x: &Address, y: &Address, theta0: &CircleAngle) -> Result<bool> {
    let d = critical_body(theta0, Convention::Itinerary)?;
    Ok(x == y || closure(&x.stream(), Some(&d)).contains(&y.stream().to_string()))
}

/// Equivalence under the two circle rules only (distinct expansions of one angle).
pub fn circle_equivalent(x: &Address, y: &Address) -> bool {
    x == y || closure(&x.stream(), None).contains(&y.stream().to_string())
}

#[derive(Clone, Debug, Default)]
pub struct MatchReport {
    pub leaves_checked: usize,
    pub words_checked: usize,
    pub mismatches: Vec<String>,
}

impl MatchReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Cross-checks 2L(x₀) against the address model in both directions:
/// every leaf joins equivalent addresses, and every critical pair w0d ∼ w1d
/// with |w| ≤ depth is a leaf at depth |w| on the side fixed by |w|'s parity.
pub fn leaf_addresses_match(theta0: &CircleAngle, depth: u32) -> Result<MatchReport> {
    leaf_addresses_match_with(theta0, depth, Convention::Itinerary)
}

pub fn leaf_addresses_match_with(theta0: &CircleAngle, depth: u32, convention: Convention) -> Result<MatchReport> {
    let d = critical_body(theta0, convention)?;
    let lam = build_2l(theta0, depth)?;
    let mut report = MatchReport::default();
    for leaf in lam.leaves() {
        report.leaves_checked += 1;
        let a = angle_to_address(leaf.chord.lo()).stream();
        let b = angle_to_address(leaf.chord.hi()).stream();
        if !closure(&a, Some(&d)).contains(&b.to_string()) {
            report.mismatches.push(format!("leaf {} joins inequivalent {a} and {b}", leaf.chord));
        }
    }
    for n in 0..=depth {
        for word in cells_at_depth(n) {
            report.words_checked += 1;
            let w: Vec<u8> = word.bytes().map(|c| c - b'0').collect();
            let ends: Vec<CircleAngle> = [0u8, 1]
                .iter()
                .map(|&b| address_to_angle(&Address::from_stream(d.prepend(&[b]).prepend(&w))))
                .collect();
            let side = if n % 2 == 0 { Side::Inside } else { Side::Outside };
            let found =
                crate::lamination::Chord::new(ends[0].clone(), ends[1].clone()).and_then(|c| lam.depth_of(side, &c));
            if found != Some(n) {
                report.mismatches.push(format!("critical pair over {word:?} is not a depth-{n} leaf"));
            }
        }
    }
    Ok(report)
}

/// All 2ⁿ cell words of length n in lexicographic order.
pub fn cells_at_depth(n: u32) -> Vec<String> {
    (0..1u64 << n).map(|k| if n == 0 { String::new() } else { format!("{k:0width$b}", width = n as usize) }).collect()
}

/// f(C_{ε₁ε₂…εₙ}) = C_{ε₂…εₙ}.
pub fn cell_image(word: &str) -> &str {
    word.get(1..).unwrap_or("")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RayBase {
    Zero,
    Infinity,
}

/// Γ(base; r₁, r₂, …) with the optional Γ[0,∞] segment marker.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegulatedRay {
    pub base: RayBase,
    pub angles: Vec<CircleAngle>,
    pub marker: bool,
}

impl RegulatedRay {
    pub fn new(base: RayBase, angles: Vec<CircleAngle>) -> Result<Self> {
        if let Some(bad) = angles.iter().find(|r| !r.is_dyadic()) {
            return Err(Error::domain(format!("regulated-ray angle {bad} must be dyadic and nonzero")));
        }
        Ok(RegulatedRay { base, angles, marker: false })
    }
}

impl fmt::Display for RegulatedRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            RayBase::Zero => "0",
            RayBase::Infinity => "inf",
        };
        let angles: Vec<String> = self.angles.iter().map(ToString::to_string).collect();
        write!(f, "G({base};{})", angles.join(","))?;
        if self.marker {
            f.write_str("+seg")?;
        }
        Ok(())
    }
}

impl FromStr for RegulatedRay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, marker) = match s.strip_suffix("+seg") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let bad = || Error::parse(format!("expected G(0|inf;r1,r2,...), got {s:?}"));
        let inner = body.strip_prefix("G(").and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (base, list) = inner.split_once(';').ok_or_else(bad)?;
        let base = match base.trim() {
            "0" => RayBase::Zero,
            "inf" => RayBase::Infinity,
            _ => return Err(bad()),
        };
        let mut ray = RegulatedRay::new(base, angle::parse_angle_list(list)?)?;
        ray.marker = marker;
        Ok(ray)
    }
}

/// Image under f: Γ(0, r…) ↦ Γ(∞, r…); Γ(∞, r₁, r…) ↦ Γ(0, 2r₁, r…) for
/// r₁ ≠ 1/2; Γ(∞, 1/2, r…) ↦ Γ(∞, r…) with the segment marker set.
pub fn regulated_ray_image(g: &RegulatedRay) -> Result<RegulatedRay> {
    let Some((r1, rest)) = g.angles.split_first() else {
        return Err(Error::domain("regulated ray needs at least one angle"));
    };
    Ok(match g.base {
        RayBase::Zero => RegulatedRay { base: RayBase::Infinity, angles: g.angles.clone(), marker: g.marker },
        RayBase::Infinity if *r1 == CircleAngle::half() => {
            RegulatedRay { base: RayBase::Infinity, angles: rest.to_vec(), marker: true }
        }
        RayBase::Infinity => {
            let mut angles = vec![r1.double()];
            angles.extend_from_slice(rest);
            RegulatedRay { base: RayBase::Zero, angles, marker: g.marker }
        }
    })
}

/// Both preimages of a ray based at 0: Γ(∞, r₁/2, r…) and Γ(∞, (r₁+1)/2, r…).
pub fn regulated_ray_preimage(g: &RegulatedRay) -> Result<[RegulatedRay; 2]> {
    if g.base != RayBase::Zero {
        return Err(Error::domain("only rays based at 0 have a two-ray preimage"));
    }
    let Some((r1, rest)) = g.angles.split_first() else {
        return Err(Error::domain("regulated ray needs at least one angle"));
    };
    let h = r1.preimage(&0.into(), 1);
    Ok([h.clone(), h.antipode()].map(|first| {
        let mut angles = vec![first];
        angles.extend_from_slice(rest);
        RegulatedRay { base: RayBase::Infinity, angles, marker: g.marker }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(p: i64, q: i64) -> CircleAngle {
        CircleAngle::frac(p, q)
    }

    fn addr(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_body(&a(1, 2), Convention::Itinerary).unwrap().to_string(), "1(10)");
        assert_eq!(critical_body(&a(1, 6), Convention::Itinerary).unwrap().to_string(), "0(0001)");
        let [x, y] = critical_address(&a(1, 6)).unwrap();
        let (sx, sy) = (x.stream(), y.stream());
        assert_ne!(sx.bit(0), sy.bit(0));
        assert_eq!(sx.suffix(1), sy.suffix(1));
        assert!(critical_address(&a(1, 3)).is_err());
    }

    #[test]
    fn rule_examples() {
        let t = a(1, 6);
        assert!(addr_equivalent(&addr("(01)"), &addr("(10)"), &t).unwrap());
        assert!(addr_equivalent(&addr("10(01)"), &addr("11(10)"), &t).unwrap());
        assert!(addr_equivalent(&addr("0(011)"), &addr("0(011)"), &t).unwrap());
        assert!(!addr_equivalent(&addr("(001)"), &addr("(011)"), &t).unwrap());
        let [x, y] = critical_address(&t).unwrap();
        assert!(addr_equivalent(&x, &y, &t).unwrap());
        assert!(addr_equivalent(&x.body.prepend(&[1, 1, 0]).into_addr(), &y.body.prepend(&[1, 1, 1]).into_addr(), &t)
            .unwrap());
    }

    trait IntoAddr {
        fn into_addr(self) -> Address;
    }

    impl IntoAddr for DigitStream {
        fn into_addr(self) -> Address {
            Address::from_stream(self)
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(addr("0(10)").shift(), addr("(10)"));
        assert_eq!(addr("(0)").shift(), addr("(0)"));
        assert_eq!(addr("01(1)").shift().shift(), addr("(1)"));
        assert_eq!(addr("1|10(01)").shift(), addr("10(01)"));
        assert_eq!(addr("1|10(01)").to_string(), "1|10(01)");
    }

    #[test]
    fn dictionary_examples() {
        assert_eq!(angle_to_address(&a(1, 4)).to_string(), "11(10)");
        assert_eq!(angle_to_address(&a(3, 4)).to_string(), "01(10)");
        assert_eq!(address_to_angle(&addr("(10)")), CircleAngle::zero());
        assert_eq!(address_to_angle(&addr("(0)")), a(2, 3));
        // The critical leaf of 2L(x₀(1/2)) = {1/4, 3/4} carries the two critical addresses.
        let [zero, one] = critical_address(&a(1, 2)).unwrap();
        assert_eq!(angle_to_address(&a(1, 4)), one);
        assert_eq!(angle_to_address(&a(3, 4)), zero);
    }

    #[test]
    fn critical_leaf_endpoints_for_generic_generators() {
        for t in [a(1, 6), a(5, 12), a(3, 10), a(7, 40)] {
            let x0 = angle::x0_digits(&t).unwrap();
            let [zero, one] = critical_address(&t).unwrap();
            assert_eq!(angle_to_address(&x0), one, "θ₀ = {t}");
            assert_eq!(angle_to_address(&x0.antipode()), zero, "θ₀ = {t}");
        }
    }

    #[test]
    fn leaves_match_addresses() {
        for t in [a(1, 2), a(1, 6), a(5, 12)] {
            let rep = leaf_addresses_match(&t, 5).unwrap();
            assert!(rep.passed(), "θ₀ = {t}: {:?}", &rep.mismatches[..rep.mismatches.len().min(3)]);
            assert_eq!(rep.leaves_checked, 63);
            assert_eq!(rep.words_checked, 63);
        }
    }

    #[test]
    fn shifted_convention_is_rejected_by_the_cross_check() {
        let rep = leaf_addresses_match_with(&a(1, 6), 3, Convention::Shifted).unwrap();
        assert!(!rep.passed());
    }

    /// All addresses with preperiod ≤ `pre` and period ≤ `per`, deduplicated.
    fn universe(pre: usize, per: usize) -> Vec<DigitStream> {
        let words =
            |n: usize| (0..1u32 << n).map(move |k| (0..n).map(|i| (k >> (n - 1 - i) & 1) as u8).collect::<Vec<u8>>());
        let mut out = BTreeSet::new();
        for p in 0..=pre {
            for q in 1..=per {
                for w in words(p) {
                    for v in words(q) {
                        out.insert(DigitStream::new(w.clone(), v).unwrap().to_string());
                    }
                }
            }
        }
        out.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn equivalence_relation_on_small_universe() {
        let all = universe(6, 4);
        for t in [a(1, 2), a(1, 6)] {
            let d = critical_body(&t, Convention::Itinerary).unwrap();
            let names: BTreeSet<String> = all.iter().map(ToString::to_string).collect();
            for x in &all {
                let cx = closure(x, Some(&d));
                assert!(cx.contains(&x.to_string()));
                assert!(cx.len() < CLASS_CAP, "class of {x} hit the cap");
                for y in cx.iter().filter(|y| names.contains(*y)) {
                    let cy = closure(&y.parse().unwrap(), Some(&d));
                    assert_eq!(cx, cy, "θ₀ = {t}: classes of {x} and {y} differ");
                }
            }
        }
    }

    #[test]
    fn shift_respects_equivalence() {
        let all = universe(5, 3);
        let omega: BTreeSet<String> = ["(01)", "(10)"].map(String::from).into();
        for t in [a(1, 2), a(1, 6)] {
            let d = critical_body(&t, Convention::Itinerary).unwrap();
            for x in &all {
                if omega.contains(&x.to_string()) {
                    continue;
                }
                for y in closure(x, Some(&d)) {
                    let y: DigitStream = y.parse().unwrap();
                    let sx = Address::from_stream(x.shift());
                    let sy = Address::from_stream(y.shift());
                    assert!(addr_equivalent(&sx, &sy, &t).unwrap(), "θ₀ = {t}: {x} ∼ {y}");
                }
            }
        }
    }

    #[test]
    fn cells() {
        assert_eq!(cells_at_depth(0), vec![String::new()]);
        assert_eq!(cells_at_depth(2), vec!["00", "01", "10", "11"]);
        for n in 0..=20 {
            assert_eq!(cells_at_depth(n).len(), 1 << n);
        }
        let depth3 = cells_at_depth(3);
        let depth2 = cells_at_depth(2);
        assert!(depth3.iter().all(|w| depth2.contains(&cell_image(w).to_string())));
    }

    fn ray(s: &str) -> RegulatedRay {
        s.parse().unwrap()
    }

    #[test]
    fn regulated_ray_examples() {
        assert_eq!(regulated_ray_image(&ray("G(0;1/4)")).unwrap(), ray("G(inf;1/4)"));
        assert_eq!(regulated_ray_image(&ray("G(inf;1/4)")).unwrap(), ray("G(0;1/2)"));
        assert_eq!(regulated_ray_image(&ray("G(inf;1/2,1/4)")).unwrap(), ray("G(inf;1/4)+seg"));
        assert_eq!(regulated_ray_image(&ray("G(inf;1/2)")).unwrap().to_string(), "G(inf;)+seg");
        assert!(regulated_ray_image(&ray("G(0;)")).is_err());
        let [p, q] = regulated_ray_preimage(&ray("G(0;1/2)")).unwrap();
        assert_eq!((p, q), (ray("G(inf;1/4)"), ray("G(inf;3/4)")));
        let [p, q] = regulated_ray_preimage(&ray("G(0;1/4,1/2)")).unwrap();
        assert_eq!((p, q), (ray("G(inf;1/8,1/2)"), ray("G(inf;5/8,1/2)")));
        assert!(regulated_ray_preimage(&ray("G(inf;1/2)")).is_err());
        assert!("G(0;1/3)".parse::<RegulatedRay>().is_err());
    }

    proptest! {
        #[test]
        fn dictionary_roundtrip(q in 1i64..400, p in 0i64..400) {
            let t = CircleAngle::frac(p % q, q);
            prop_assert_eq!(address_to_angle(&angle_to_address(&t)), t);
        }

        #[test]
        fn doubling_with_reflection_is_the_shift(q in 1i64..400, p in 0i64..400) {
            let t = CircleAngle::frac(p % q, q);
            let lhs = angle_to_address(&t.double().neg());
            let rhs = angle_to_address(&t).shift();
            if t.is_dyadic() || t.is_zero() {
                prop_assert!(circle_equivalent(&lhs, &rhs), "{} vs {}", lhs, rhs);
            } else {
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
