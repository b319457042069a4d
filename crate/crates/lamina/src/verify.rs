//! The twelve end-to-end acceptance checks, shared by the test suite and
//! `lamina check`.
//!
//! Each runner returns a [`Outcome`] with a one-line detail. Runtime limits
//! are part of the verdict; tolerances are the constants below.

use std::time::{Duration, Instant};

use num::{BigInt, BigRational, BigUint, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angle::{self, CircleAngle};
use crate::dynamics::{
    self, boettcher_infty, critical_value_angle, fixed_points, green, m2_raster, multiplier, ray_leaf_endpoints,
    trace_parameter_ray, Bounds, Pixel, SpherePoint, C64,
};
use crate::error::Result;
use crate::lamination::{build_2l, build_l, check_two_sided_invariance, construction_equivalence, Side};
use crate::measure::{h_arc, sigma_lengths_periodic, AtomicMeasure};
use crate::symbolic::{
    angle_to_address, circle_equivalent, critical_address, leaf_addresses_match, regulated_ray_image,
    regulated_ray_preimage, RayBase, RegulatedRay,
};

/// Generators used by the lamination criteria.
pub const TEST_SET: [(i64, i64); 3] = [(1, 2), (1, 6), (5, 12)];

pub const RANDOM_ANGLES: usize = 200;
pub const RANDOM_SEED: u64 = 0x001a_31a0;
/// Largest x₀ period (in bits) for which the full rational is assembled.
pub const FULL_RATIONAL_PERIOD: usize = 4096;
pub const SERIES_TERMS: u32 = 40;
pub const BLOWUP_DEPTH: u32 = 30;
pub const LAMINATION_DEPTH: u32 = 8;
pub const MIN_CROSSING_PAIRS: u64 = 10_000;
pub const MULTIPLIER_TOL: f64 = 1e-9;
pub const VIETA_TOL: f64 = 1e-10;
pub const GREEN_ASYMPTOTE_TOL: f64 = 1e-3;
pub const BOETTCHER_TOL: f64 = 1e-9;
pub const RASTER_SIDE: usize = 400;
pub const RASTER_ITER: u32 = 512;
pub const PARAM_FROM: f64 = 8.0;
pub const PARAM_TO: f64 = 0.05;
pub const PARAM_STEPS: u32 = 4;
pub const ANGLE_TOL: f64 = 1e-6;
/// Relative bound on Im a along the zero parameter ray.
pub const REAL_TOL: f64 = 1e-10;
/// Potential of the exterior parameter used for the ray-leaf comparison.
pub const LEAF_POTENTIAL: f64 = 0.25;
pub const LEAF_DEPTH: u32 = 3;
pub const LEAF_TOL: f64 = 1e-2;
pub const MAX_UNRESOLVED: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    /// The check itself, ignoring time.
    pub ok: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.ok && self.elapsed <= self.limit
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!(
            "[{verdict}] {:>2} {:<28} {:>8.3}s / {:>3}s  {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(u8, &str, u64, Check); 12] = [
    (1, "x0 digits vs series", 5, x0_digits_vs_series),
    (2, "blow-up endpoints", 5, blowup_endpoints),
    (3, "measure mass", 1, measure_mass),
    (4, "disjoint bridges", 10, disjoint_bridges),
    (5, "two-sided invariance", 5, two_sided_invariance),
    (6, "construction equivalence", 5, construction_agreement),
    (7, "symbolic agreement", 5, symbolic_agreement),
    (8, "regulated-ray algebra", 1, regulated_ray_algebra),
    (9, "dynamics sanity", 5, dynamics_sanity),
    (10, "M2 raster", 60, m2_raster_check),
    (11, "parameter-ray angle", 60, parameter_ray_angle),
    (12, "ray leaves vs 2L", 120, ray_leaves_vs_2l),
];

pub fn run(id: u8) -> Option<Outcome> {
    let &(id, name, secs, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Some(Outcome { id, name, ok, detail, elapsed: start.elapsed(), limit: Duration::from_secs(secs) })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

fn test_set() -> Vec<CircleAngle> {
    TEST_SET.iter().map(|&(p, q)| CircleAngle::frac(p, q)).collect()
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn dyadic_numerator(x: &BigRational, exp: usize) -> BigUint {
    let scaled = x * BigRational::from_integer(BigInt::one() << exp);
    debug_assert!(scaled.is_integer());
    scaled.to_integer().to_biguint().expect("nonnegative")
}

/// Random θ₀ with even reduced denominator ≤ 2²⁰.
fn random_generators() -> Vec<CircleAngle> {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut out = Vec::with_capacity(RANDOM_ANGLES);
    while out.len() < RANDOM_ANGLES {
        let q = 2 * rng.gen_range(1..=1i64 << 19);
        let p = rng.gen_range(1..q);
        let t = CircleAngle::frac(p, q);
        if !t.is_periodic() {
            out.push(t);
        }
    }
    out
}

fn x0_digits_vs_series() -> Result<(bool, String)> {
    let exp = 2 * SERIES_TERMS as usize + 1;
    let mut full = 0;
    let mut bad = Vec::new();
    for t in random_generators() {
        let enc = angle::x0_series(&t, SERIES_TERMS)?;
        let stream = angle::x0_stream(&t)?;
        // Exact comparison of the digit stream with the dyadic enclosure ends.
        let (lo, hi) = (dyadic_numerator(&enc.lo, exp), dyadic_numerator(&enc.hi, exp));
        let mut inside = stream.cmp_dyadic(&lo, exp).is_ge() && stream.cmp_dyadic(&hi, exp).is_le();
        if stream.period().len() <= FULL_RATIONAL_PERIOD {
            full += 1;
            inside &= enc.contains(stream.value().as_ratio());
        }
        if !inside {
            bad.push(t.to_string());
        }
    }
    let hits = angle::x0_digits(&CircleAngle::frac(1, 2))? == CircleAngle::frac(1, 4)
        && angle::x0_digits(&CircleAngle::frac(1, 6))? == CircleAngle::frac(11, 60);
    Ok((
        bad.is_empty() && hits,
        format!(
            "{} generators, {} outside the enclosure, {full} also as full rationals; exact hits {}",
            RANDOM_ANGLES,
            bad.len(),
            if hits { "ok" } else { "wrong" }
        ),
    ))
}

fn blowup_endpoints() -> Result<(bool, String)> {
    let width = ratio(1, 1 << 31);
    let mut worst = BigRational::zero();
    let mut ok = true;
    for (p, q) in [(1, 2), (1, 6), (5, 12), (3, 10)] {
        let t = CircleAngle::frac(p, q);
        let arc = h_arc(&t, &t, BLOWUP_DEPTH)?;
        let x0 = angle::x0_digits(&t)?;
        let end = x0.as_ratio() + ratio(1, 2);
        ok &= arc.start.contains(x0.as_ratio()) && arc.end.contains(&end);
        for w in [arc.start.width(), arc.end.width()] {
            ok &= w <= width;
            worst = worst.max(w);
        }
    }
    Ok((ok, format!("4 generators, widest enclosure {worst}")))
}

fn measure_mass() -> Result<(bool, String)> {
    let mut ok = true;
    for t in test_set().iter().chain([CircleAngle::frac(3, 10)].iter()) {
        for m in 0..=20u32 {
            let want = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << (m + 1));
            ok &= AtomicMeasure::new(t, m)?.total_mass() == want;
        }
    }
    ok &= sigma_lengths_periodic(1)? == vec![ratio(2, 3)];
    ok &= sigma_lengths_periodic(2)? == vec![ratio(2, 15), ratio(8, 15)];
    Ok((ok, "masses for M ≤ 20 and periodic lengths for p = 1, 2".into()))
}

fn disjoint_bridges() -> Result<(bool, String)> {
    let (mut pairs, mut crossings) = (0, 0);
    for t in test_set() {
        for lam in [build_l(&t, LAMINATION_DEPTH)?, build_2l(&t, LAMINATION_DEPTH)?] {
            let rep = lam.crossing_report();
            pairs += rep.pairs;
            crossings += rep.crossings.len();
        }
    }
    Ok((crossings == 0 && pairs >= MIN_CROSSING_PAIRS, format!("{pairs} same-side pairs, {crossings} crossings")))
}

fn two_sided_invariance() -> Result<(bool, String)> {
    let (mut checked, mut violations) = (0, 0);
    for t in test_set() {
        let rep = check_two_sided_invariance(&build_2l(&t, 6)?, 5);
        checked += rep.checked;
        violations += rep.violations.len();
    }
    Ok((violations == 0 && checked > 0, format!("{checked} conditions, {violations} violations")))
}

fn construction_agreement() -> Result<(bool, String)> {
    let (mut compared, mut diff) = (0, 0);
    for t in test_set() {
        for d in 0..=LAMINATION_DEPTH {
            let rep = construction_equivalence(&t, d)?;
            compared += rep.compared;
            diff += rep.missing.len() + rep.extra.len();
        }
    }
    Ok((diff == 0 && compared > 0, format!("{compared} leaves compared, {diff} differences")))
}

fn symbolic_agreement() -> Result<(bool, String)> {
    let (mut leaves, mut mismatches, mut critical) = (0, 0, true);
    for t in [CircleAngle::frac(1, 2), CircleAngle::frac(1, 6)] {
        let rep = leaf_addresses_match(&t, LAMINATION_DEPTH)?;
        leaves += rep.leaves_checked;
        mismatches += rep.mismatches.len();
        let x0 = angle::x0_digits(&t)?;
        let [zero, one] = critical_address(&t)?;
        let (at_x0, at_anti) = (angle_to_address(&x0), angle_to_address(&x0.antipode()));
        // Dyadic endpoints have two expansions; only the circle rules identify them.
        critical &= if x0.is_dyadic() {
            circle_equivalent(&at_x0, &one) && circle_equivalent(&at_anti, &zero)
        } else {
            at_x0 == one && at_anti == zero
        };
    }
    Ok((
        mismatches == 0 && critical,
        format!(
            "{leaves} leaves, {mismatches} mismatches, critical endpoints {}",
            if critical { "ok" } else { "wrong" }
        ),
    ))
}

fn regulated_ray_algebra() -> Result<(bool, String)> {
    let dyadics: Vec<(CircleAngle, f64)> = (1..16).map(|k| (CircleAngle::frac(k, 16), k as f64 / 16.0)).collect();
    let mut symbols = 0usize;
    let mut bad = 0usize;
    let mut absorbed = 0usize;
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..4 {
        words = words.iter().flat_map(|w| (0..dyadics.len()).map(move |k| [w.as_slice(), &[k]].concat())).collect();
        for w in &words {
            let angles: Vec<CircleAngle> = w.iter().map(|&k| dyadics[k].0.clone()).collect();
            let floats: Vec<f64> = w.iter().map(|&k| dyadics[k].1).collect();
            for base in [RayBase::Zero, RayBase::Infinity] {
                symbols += 1;
                let g = RegulatedRay::new(base, angles.clone())?;
                let img = regulated_ray_image(&g)?;
                let img_f: Vec<f64> = img.angles.iter().map(CircleAngle::to_f64).collect();
                // Oracle on binary floats, exact for these dyadics.
                let ok = match base {
                    RayBase::Zero => img.base == RayBase::Infinity && img_f == floats && !img.marker,
                    RayBase::Infinity if floats[0] == 0.5 => {
                        absorbed += 1;
                        img.base == RayBase::Infinity && img_f == floats[1..] && img.marker
                    }
                    RayBase::Infinity => {
                        let mut want = floats.clone();
                        want[0] = (2.0 * want[0]).fract();
                        img.base == RayBase::Zero && img_f == want && !img.marker
                    }
                };
                let back = match base {
                    RayBase::Zero => regulated_ray_preimage(&g)?.iter().all(|p| {
                        p.base == RayBase::Infinity
                            && p.angles[1..] == g.angles[1..]
                            && regulated_ray_image(p).is_ok_and(|i| i == g)
                    }),
                    RayBase::Infinity => regulated_ray_preimage(&g).is_err(),
                };
                bad += usize::from(!(ok && back));
            }
        }
    }
    Ok((bad == 0 && absorbed > 0, format!("{symbols} symbols, {absorbed} absorptions, {bad} failures")))
}

fn dynamics_sanity() -> Result<(bool, String)> {
    let one = C64::new(1.0, 0.0);
    let want = 1.0 - 5f64.sqrt();
    let mult = fixed_points(one)?
        .iter()
        .map(|&z| multiplier(one, SpherePoint::Finite(z)).map(|m| (m - want).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut vieta = 0f64;
    for a in [C64::new(1.0, 0.0), C64::new(-3.0, 2.0), C64::new(0.2, -5.0), C64::new(40.0, 7.0)] {
        let [z1, z2, z3] = fixed_points(a)?;
        let scale = a.norm().max(1.0);
        vieta = vieta
            .max((z1 + z2 + z3 + 2.0).norm() / scale)
            .max((z1 * z2 + z1 * z3 + z2 * z3).norm() / scale)
            .max((z1 * z2 * z3 - a).norm() / scale);
    }
    let z = C64::from_polar(1e6, 0.3);
    let g = green(C64::new(2.0, 1.0), SpherePoint::Finite(z), 200)?;
    let asymptote = (g - (1e6f64.ln() - std::f64::consts::LN_2)).abs();
    let a = C64::new(2.0, -3.0);
    let mut functional = 0f64;
    for z in [C64::new(40.0, 3.0), C64::new(-25.0, 30.0), C64::new(0.0, -60.0)] {
        let p = boettcher_infty(a, z)?;
        let q = boettcher_infty(a, dynamics::f(a, dynamics::f(a, z)))?;
        functional = functional.max((q - p * p).norm() / (p * p).norm());
    }
    let ok =
        mult < MULTIPLIER_TOL && vieta < VIETA_TOL && asymptote < GREEN_ASYMPTOTE_TOL && functional < BOETTCHER_TOL;
    Ok((ok, format!("multiplier {mult:.1e}, Vieta {vieta:.1e}, Green {asymptote:.1e}, Böttcher {functional:.1e}")))
}

fn m2_raster_check() -> Result<(bool, String)> {
    let member = |a: f64| {
        !dynamics::attracted_to_supercycle(C64::new(a, 0.0), SpherePoint::Finite(C64::new(-1.0, 0.0)), RASTER_ITER).0
    };
    let raster = m2_raster(Bounds::new(-4.0, 4.0, -4.0, 4.0), RASTER_SIDE, RASTER_SIDE, RASTER_ITER)?;
    let mut asym = 0;
    for row in 0..RASTER_SIDE {
        for col in 0..RASTER_SIDE {
            asym += usize::from(raster.get(col, row) != raster.get(col, RASTER_SIDE - 1 - row));
        }
    }
    let at_one = raster.locate(C64::new(1.0, 0.0)).map(|(c, r)| raster.get(c, r));
    let ok = member(1.0) && !member(100.0) && asym == 0 && at_one == Some(Pixel::Bounded);
    Ok((ok, format!("a = 1 member {}, a = 100 member {}, {asym} asymmetric pixels", member(1.0), member(100.0))))
}

fn parameter_ray_angle() -> Result<(bool, String)> {
    let theta0 = CircleAngle::frac(1, 6);
    let target = theta0.to_f64();
    let path = trace_parameter_ray(&theta0, PARAM_FROM, PARAM_TO, PARAM_STEPS)?;
    let reached = path.points.last().is_some_and(|p| p.s <= PARAM_TO);
    let mut near = target;
    let mut worst = 0f64;
    for p in &path.points {
        let (_, t) = critical_value_angle(p.z, near)?;
        worst = worst.max(crate::dynamics::circle_distance(t, target));
        near = t;
    }
    let zero = trace_parameter_ray(&CircleAngle::zero(), PARAM_FROM, PARAM_TO, PARAM_STEPS)?;
    let imag = zero.points.iter().map(|p| p.z.im.abs() / p.z.norm().max(1.0)).fold(0.0, f64::max);
    let ok = reached && worst < ANGLE_TOL && imag < REAL_TOL && zero.points.last().is_some_and(|p| p.s <= PARAM_TO);
    Ok((ok, format!("{} points, angle error {worst:.1e}, zero-ray |Im a| {imag:.1e}", path.points.len())))
}

fn ray_leaves_vs_2l() -> Result<(bool, String)> {
    let theta0 = CircleAngle::frac(1, 6);
    let path = trace_parameter_ray(&theta0, PARAM_FROM, LEAF_POTENTIAL, PARAM_STEPS)?;
    let a = path.points.last().map(|p| p.z).ok_or_else(|| crate::Error::numeric("empty parameter ray"))?;
    let report = ray_leaf_endpoints(a, LEAF_DEPTH)?;
    let lam = build_2l(&theta0, LEAF_DEPTH)?;
    let chords: Vec<(Side, u32, f64, f64)> =
        lam.leaves().map(|l| (l.side, l.depth, l.chord.lo().to_f64(), l.chord.hi().to_f64())).collect();
    let dist = |(p, q): (f64, f64), (u, v): (f64, f64)| {
        let d = crate::dynamics::circle_distance;
        d(p, u).max(d(q, v)).min(d(p, v).max(d(q, u)))
    };
    let mut worst = 0f64;
    let mut matched = vec![false; chords.len()];
    let mut unmatched = 0;
    for leaf in &report.leaves {
        let Some(pair) = leaf.angles else { continue };
        let best = chords
            .iter()
            .enumerate()
            .filter(|(_, c)| c.0 == leaf.side && c.1 == leaf.depth)
            .map(|(i, c)| (dist(pair, (c.2, c.3)), i))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        match best {
            Some((d, i)) if d <= LEAF_TOL => {
                worst = worst.max(d);
                matched[i] = true;
            }
            _ => unmatched += 1,
        }
    }
    let unresolved = report.unresolved();
    let total = report.leaves.len();
    let uncovered = matched.iter().filter(|m| !**m).count().saturating_sub(unresolved);
    let ok = total == chords.len()
        && unmatched == 0
        && uncovered == 0
        && (unresolved as f64) < MAX_UNRESOLVED * total as f64;
    Ok((
        ok,
        format!(
            "a = {a:.4}, {total} ray leaves vs {} chords, {unresolved} unresolved, {unmatched} unmatched, max error {worst:.1e}",
            chords.len()
        ),
    ))
}
