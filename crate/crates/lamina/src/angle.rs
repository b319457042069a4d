//! Exact arithmetic on rational points of the circle ℝ/ℤ.
//!
//! Angles are measured in full turns. Everything here is exact; floating
//! point appears only in explicit `to_f64` conversions.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, BigUint, Sign};
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational point of ℝ/ℤ, stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CircleAngle(BigRational);

impl CircleAngle {
    /// `num/den` reduced modulo 1.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Self::from_ratio(BigRational::new(num.into(), den)))
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn from_ratio(r: BigRational) -> Self {
        let floor = r.floor();
        CircleAngle(r - floor)
    }

    pub fn zero() -> Self {
        CircleAngle(BigRational::zero())
    }

    pub fn half() -> Self {
        Self::frac(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exponent of 2 in the denominator.
    pub fn two_adic_order(&self) -> u64 {
        self.denom().trailing_zeros().unwrap_or(0)
    }

    /// Periodic under doubling, i.e. odd denominator (0 is a fixed point).
    pub fn is_periodic(&self) -> bool {
        self.two_adic_order() == 0
    }

    /// Nonzero with a power-of-two denominator.
    pub fn is_dyadic(&self) -> bool {
        let d = self.denom();
        !self.is_zero() && (d >> self.two_adic_order()).is_one()
    }

    /// 2θ mod 1.
    pub fn double(&self) -> Self {
        let (p, q) = (self.numer(), self.denom());
        if q.bit(0) {
            let mut n = p << 1u32;
            if &n >= q {
                n -= q;
            }
            CircleAngle(BigRational::new_raw(n, q.clone()))
        } else if q == &BigInt::from(2) {
            Self::zero()
        } else {
            let h: BigInt = q >> 1u32;
            CircleAngle(BigRational::new_raw(p % &h, h))
        }
    }

    /// 2^k θ mod 1.
    pub fn times_pow2(&self, k: u32) -> Self {
        let (p, q) = (self.numer(), self.denom());
        let shift = u64::from(k).min(self.two_adic_order()) as u32;
        let q2: BigInt = q >> shift;
        let p2: BigInt = (p << (k - shift)) % &q2;
        CircleAngle(BigRational::new_raw(p2, q2))
    }

    /// The preimage (θ + k)/2ⁿ under n-fold doubling.
    pub fn preimage(&self, k: &BigInt, n: u32) -> Self {
        let (p, q) = (self.numer(), self.denom());
        let num: BigInt = p + k * q;
        let tz = num.trailing_zeros().unwrap_or(0).min(u64::from(n)) as u32;
        let num = num >> tz;
        let den: BigInt = q << (n - tz);
        Self::from_ratio(BigRational::new_raw(num, den))
    }

    /// −θ mod 1.
    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let q = self.denom().clone();
        CircleAngle(BigRational::new_raw(&q - self.numer(), q))
    }

    pub fn add(&self, other: &CircleAngle) -> Self {
        Self::from_ratio(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &CircleAngle) -> Self {
        Self::from_ratio(&self.0 - &other.0)
    }

    /// θ + 1/2 mod 1.
    pub fn antipode(&self) -> Self {
        self.add(&Self::half())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// frac(2ⁿθ) as a float, reduced exactly before conversion.
    pub fn frac_times_pow2_f64(&self, n: u32) -> f64 {
        self.times_pow2(n).to_f64()
    }

    /// Counterclockwise distance from `self` to `other`, in `[0, 1)`.
    pub fn ccw_to(&self, other: &CircleAngle) -> BigRational {
        other.sub(self).0
    }

    /// Binary expansion (canonical, never ending in repeated ones).
    pub fn digit_stream(&self) -> DigitStream {
        let e = expand(self);
        DigitStream::new(e.digits[..e.pre].to_vec(), e.digits[e.pre..].to_vec())
            .expect("long division yields a nonempty period")
    }
}

impl fmt::Display for CircleAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for CircleAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q.parse().map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
        if q.sign() != Sign::Plus {
            return Err(Error::parse(format!("denominator must be positive in {s:?}")));
        }
        if p.sign() == Sign::Minus || p >= q {
            return Err(Error::domain(format!("angle {s} is outside [0, 1)")));
        }
        Ok(CircleAngle(BigRational::new(p, q)))
    }
}

/// Parses a comma-separated list of angles.
pub fn parse_angle_list(s: &str) -> Result<Vec<CircleAngle>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// An eventually periodic bit sequence `preperiod (period)^∞` in canonical form.
///
/// Canonical means the period is primitive and the preperiod cannot be
/// shortened. Angle expansions never end in `(1)`; general symbol sequences
/// (addresses) may.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DigitStream {
    pre: Vec<u8>,
    per: Vec<u8>,
}

impl DigitStream {
    pub fn new(pre: Vec<u8>, per: Vec<u8>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::domain("digit stream needs a nonempty period"));
        }
        if pre.iter().chain(&per).any(|&b| b > 1) {
            return Err(Error::domain("digit stream entries must be bits"));
        }
        let (pre, per) = canonicalize(pre, per);
        Ok(DigitStream { pre, per })
    }

    pub fn zeros() -> Self {
        DigitStream { pre: Vec::new(), per: vec![0] }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.per
    }

    /// Bit at 0-based position `k`.
    pub fn bit(&self, k: usize) -> u8 {
        if k < self.pre.len() {
            self.pre[k]
        } else {
            self.per[(k - self.pre.len()) % self.per.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|k| self.bit(k)).collect()
    }

    /// Drops the first `j` bits.
    pub fn suffix(&self, j: usize) -> Self {
        if j <= self.pre.len() {
            return DigitStream { pre: self.pre[j..].to_vec(), per: self.per.clone() };
        }
        let mut per = self.per.clone();
        let r = (j - self.pre.len()) % per.len();
        per.rotate_left(r);
        DigitStream { pre: Vec::new(), per }
    }

    pub fn shift(&self) -> Self {
        self.suffix(1)
    }

    pub fn prepend(&self, bits: &[u8]) -> Self {
        let mut pre = bits.to_vec();
        pre.extend_from_slice(&self.pre);
        Self::new(pre, self.per.clone()).expect("bits stay bits")
    }

    /// Bitwise xor with the sequence `pattern` repeated from position 0.
    pub fn xor_periodic(&self, pattern: &[u8]) -> Self {
        let a = self.pre.len();
        let b = lcm(self.per.len(), pattern.len());
        let pre = (0..a).map(|k| self.bit(k) ^ pattern[k % pattern.len()]).collect();
        let per = (a..a + b).map(|k| self.bit(k) ^ pattern[k % pattern.len()]).collect();
        Self::new(pre, per).expect("bits stay bits")
    }

    /// Interleaves zeros: bit k moves to position 2k+1.
    pub fn spread(&self) -> Self {
        let sp = |v: &[u8]| v.iter().flat_map(|&b| [0, b]).collect::<Vec<_>>();
        Self::new(sp(&self.pre), sp(&self.per)).expect("bits stay bits")
    }

    pub fn is_all_zero(&self) -> bool {
        self.pre.is_empty() && self.per == [0]
    }

    /// The rational `0.b₁b₂…` reduced mod 1 (an all-ones tail rounds up).
    pub fn value(&self) -> CircleAngle {
        let a = self.pre.len();
        let b = self.per.len();
        let p = bits_to_biguint(&self.pre);
        if self.per.iter().all(|&x| x == 1) {
            let num = BigInt::from(p + 1u32);
            return CircleAngle::from_ratio(BigRational::new(num, BigInt::one() << a));
        }
        let q = bits_to_biguint(&self.per);
        let m: BigUint = (BigUint::one() << b) - 1u32;
        let num = BigInt::from(p * &m + q);
        let den = BigInt::from(m << a);
        CircleAngle::from_ratio(BigRational::new(num, den))
    }

    /// Compares the value with the dyadic `num / 2^exp`, reading only
    /// `exp` bits. Valid for sequences that do not end in `(1)`.
    pub fn cmp_dyadic(&self, num: &BigUint, exp: usize) -> Ordering {
        let head = bits_to_biguint(&self.prefix(exp));
        match head.cmp(num) {
            Ordering::Equal if self.suffix(exp).is_all_zero() => Ordering::Equal,
            Ordering::Equal => Ordering::Greater,
            o => o,
        }
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.pre {
            write!(f, "{b}")?;
        }
        f.write_str("(")?;
        for b in &self.per {
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for DigitStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("expected pre(period), got {s:?}"));
        let (pre, rest) = s.split_once('(').ok_or_else(bad)?;
        let per = rest.strip_suffix(')').ok_or_else(bad)?;
        let bits = |t: &str| {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<u8>>>()
        };
        DigitStream::new(bits(pre)?, bits(per)?)
    }
}

fn canonicalize(mut pre: Vec<u8>, mut per: Vec<u8>) -> (Vec<u8>, Vec<u8>) {
    let n = per.len();
    if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| per[i] == per[i - d])) {
        per.truncate(d);
    }
    while let Some(&last) = pre.last() {
        if Some(&last) != per.last() {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    (pre, per)
}

/// Most significant bit first.
pub(crate) fn bits_to_biguint(bits: &[u8]) -> BigUint {
    let n = bits.len();
    let mut words = vec![0u32; n.div_ceil(32)];
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            let pos = n - 1 - i;
            words[pos / 32] |= 1 << (pos % 32);
        }
    }
    BigUint::new(words)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Long-division record: `digits[i] = θ[i+1]`, `nu[i] = ν_{i+1}(θ)`; both
/// sequences are periodic from index `pre` with period `per`.
pub(crate) struct Expansion {
    pub digits: Vec<u8>,
    pub nu: Vec<u8>,
    pub pre: usize,
    pub per: usize,
}

pub(crate) fn expand(theta: &CircleAngle) -> Expansion {
    let k = theta.two_adic_order() as usize;
    let p = theta.numer().to_biguint().expect("nonnegative");
    let q = theta.denom().to_biguint().expect("positive");
    match (p.to_u128(), q.to_u128()) {
        (Some(p), Some(q)) if q < 1 << 126 => long_division(p, q, k, |r| r << 1),
        _ => long_division(p, q, k, |r| r << 1u32),
    }
}

fn long_division<T>(p: T, q: T, k: usize, dbl: impl Fn(T) -> T) -> Expansion
where
    T: Clone + PartialOrd + PartialEq + std::ops::SubAssign<T>,
{
    let mut digits = Vec::new();
    let mut nu = Vec::new();
    let mut r = p.clone();
    let mut mark = None;
    loop {
        let m = digits.len();
        if m == k {
            mark = Some(r.clone());
        }
        let mut t = dbl(r);
        let d = t >= q;
        if d {
            t -= q.clone();
        }
        r = t;
        digits.push(u8::from(d));
        nu.push(u8::from(r >= p));
        if m + 1 > k && Some(&r) == mark.as_ref() {
            break;
        }
    }
    let per = digits.len() - k;
    Expansion { digits, nu, pre: k, per }
}

/// m-th binary digit ⌊2^mθ⌋ − 2⌊2^{m−1}θ⌋ (m ≥ 1; m = 0 gives 0).
pub fn binary_digit(theta: &CircleAngle, m: u32) -> u8 {
    if m == 0 {
        return 0;
    }
    let v: BigInt = (theta.numer() << m) / theta.denom();
    u8::from(v.bit(0))
}

pub fn double(theta: &CircleAngle) -> CircleAngle {
    theta.double()
}

pub fn digit_stream(theta: &CircleAngle) -> DigitStream {
    theta.digit_stream()
}

/// ν_m(θ) = 1 iff frac(2^m θ) ≥ θ.
pub fn nu(theta: &CircleAngle, m: u64) -> u8 {
    let p = theta.numer().to_biguint().expect("nonnegative");
    let q = theta.denom().to_biguint().expect("positive");
    let r = (BigUint::from(2u32).modpow(&BigUint::from(m), &q) * &p) % &q;
    u8::from(r >= p)
}

/// Closed rational interval.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

fn require_open_unit(theta: &CircleAngle) -> Result<()> {
    if theta.is_zero() {
        Err(Error::domain("θ₀ must lie in (0, 1)"))
    } else {
        Ok(())
    }
}

/// Partial sum of the x₀ series through `m_max` terms with its exact tail bound.
pub fn x0_series(theta0: &CircleAngle, m_max: u32) -> Result<RationalInterval> {
    require_open_unit(theta0)?;
    if m_max == 0 {
        return Err(Error::domain("series needs at least one term"));
    }
    let (p, q) = (theta0.numer(), theta0.denom());
    let mut num = BigInt::zero();
    for m in 1..=m_max {
        let coeff: BigInt = (BigInt::one() << m) - 1;
        let term: BigInt = (coeff * p) / q + 1;
        num += term << (2 * (m_max - m));
    }
    let lo = BigRational::new(num, BigInt::one() << (2 * m_max + 1));
    let hi = &lo + BigRational::new(BigInt::one(), BigInt::one() << (m_max + 1));
    Ok(RationalInterval { lo, hi })
}

fn require_non_periodic(theta0: &CircleAngle) -> Result<()> {
    if theta0.is_periodic() {
        Err(Error::domain(format!("θ₀ = {theta0} is periodic under doubling")))
    } else {
        Ok(())
    }
}

/// Binary expansion of x₀: x₀[1] = 0, x₀[2m] = θ₀[m], x₀[2m+1] = ν_m(θ₀).
pub fn x0_stream(theta0: &CircleAngle) -> Result<DigitStream> {
    require_open_unit(theta0)?;
    require_non_periodic(theta0)?;
    let e = expand(theta0);
    let pair = |i: usize| [e.digits[i], e.nu[i]];
    let mut pre = vec![0];
    pre.extend((0..e.pre).flat_map(pair));
    let per = (e.pre..e.pre + e.per).flat_map(pair).collect();
    DigitStream::new(pre, per)
}

/// Exact x₀ assembled from its binary digits.
pub fn x0_digits(theta0: &CircleAngle) -> Result<CircleAngle> {
    Ok(x0_stream(theta0)?.value())
}

/// y₀ = (1/3)(1 + 3 Σ θ₀[m] 4^{−m}).
pub fn y0_from_theta(theta0: &CircleAngle) -> CircleAngle {
    let s = theta0.digit_stream().spread().value();
    CircleAngle::from_ratio(s.as_ratio() + BigRational::new(1.into(), 3.into()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitTag {
    Dyadic,
    Periodic,
    Preperiodic,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OrbitType {
    pub tag: OrbitTag,
    pub preperiod: usize,
    pub period: usize,
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.tag {
            OrbitTag::Dyadic => "dyadic",
            OrbitTag::Periodic => "periodic",
            OrbitTag::Preperiodic => "preperiodic",
        };
        write!(f, "{tag} preperiod={} period={}", self.preperiod, self.period)
    }
}

/// Classification of θ under doubling. Zero counts as periodic (a fixed point).
pub fn orbit_type(theta: &CircleAngle) -> OrbitType {
    let e = expand(theta);
    let tag = if theta.is_periodic() {
        OrbitTag::Periodic
    } else if theta.is_dyadic() {
        OrbitTag::Dyadic
    } else {
        OrbitTag::Preperiodic
    };
    OrbitType { tag, preperiod: e.pre, period: e.per }
}
