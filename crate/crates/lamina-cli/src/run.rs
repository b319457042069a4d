//! Command dispatch. Everything printed to stdout is deterministic for a
//! given flag set.

use std::fmt::Display;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use lamina::angle::{self, CircleAngle};
use lamina::dynamics::{
    self, blaschke_critical_points, blaschke_eval, boettcher_infty, boettcher_radius, green, julia_agreement,
    julia_raster, m2_raster, ray_leaf_endpoints, trace_dynamical_ray, trace_parameter_ray, Bounds, JuliaMethod, Pixel,
    Raster, RayBase, RayEnd, RayPath, SpherePoint, C64,
};
use lamina::lamination::{
    build_2l, build_basilica, build_l, build_l0, build_quadratic_lamination, check_quadratic_invariance,
    check_two_sided_invariance, complementary_regions, construction_equivalence, mate, render_svg, Lamination, Side,
    SvgOptions,
};
use lamina::measure::{h_arc, mu_weight, preimages_of_angle, semiconjugacy_check, sigma0_arc, sigma_lengths_periodic};
use lamina::symbolic::{
    addr_equivalent, address_to_angle, angle_to_address, cells_at_depth, critical_address, leaf_addresses_match,
    regulated_ray_image, regulated_ray_preimage, Address, RegulatedRay,
};
use lamina::verify;

use crate::*;

/// A failed run and its exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or a failed check: exit 1.
    Domain(String),
    /// Floating-point machinery gave up: exit 2.
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<lamina::Error> for Failure {
    fn from(e: lamina::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Out = Result<(), Failure>;

/// Fixed 12-digit rendering so tiny round-off parts stay readable.
fn cx(z: C64) -> String {
    // Parts that round to zero print as +0, never −0.
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let z = C64::new(clean(z.re), clean(z.im));
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn domain(msg: impl Display) -> Failure {
    Failure::Domain(msg.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Out {
    if path.as_os_str() == "-" {
        return std::io::stdout().write_all(bytes).map_err(|e| domain(format!("stdout: {e}")));
    }
    fs::write(path, bytes).map_err(|e| domain(format!("{}: {e}", path.display())))
}

struct Limits {
    lifted: bool,
}

impl Limits {
    fn depth(&self, depth: u32) -> Out {
        if depth > MAX_DEPTH && !self.lifted {
            return Err(domain(format!("depth {depth} exceeds {MAX_DEPTH}; pass --unsafe-limits to allow it")));
        }
        Ok(())
    }

    fn iterations(&self, n: u32) -> Out {
        if n > MAX_ITER && !self.lifted {
            return Err(domain(format!("n_max {n} exceeds {MAX_ITER}; pass --unsafe-limits to allow it")));
        }
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Out {
    let limits = Limits { lifted: cli.unsafe_limits };
    match &cli.cmd {
        Cmd::Angle(c) => run_angle(c),
        Cmd::Lam(c) => run_lam(c, &limits),
        Cmd::Sym(c) => run_sym(c, &limits),
        Cmd::Dyn(c) => run_dyn(c, &limits),
        Cmd::Check(c) => run_check(c, &limits),
    }
}

fn run_angle(cmd: &AngleCmd) -> Out {
    match cmd {
        AngleCmd::X0 { theta, series } => {
            let stream = angle::x0_stream(theta)?;
            println!("{}", stream.value());
            println!("{stream}");
            if let Some(m) = series {
                let enc = angle::x0_series(theta, *m)?;
                println!("series[{m}] = [{}, {}]", enc.lo, enc.hi);
            }
        }
        AngleCmd::Y0 { theta } => println!("{}", angle::y0_from_theta(theta)),
        AngleCmd::Nu { theta, m } => println!("{}", angle::nu(theta, *m)),
        AngleCmd::Digits { theta, m } => match m {
            Some(0) => return Err(domain("digit positions start at 1")),
            Some(m) => println!("{}", angle::binary_digit(theta, *m)),
            None => println!("{}", angle::digit_stream(theta)),
        },
        AngleCmd::Double { theta } => println!("{}", angle::double(theta)),
        AngleCmd::OrbitType { theta } => println!("{}", angle::orbit_type(theta)),
        AngleCmd::Preimages { theta, n } => {
            if *n > 20 {
                return Err(domain("n is capped at 20"));
            }
            let list: Vec<String> = preimages_of_angle(theta, *n).iter().map(ToString::to_string).collect();
            println!("{}", list.join(" "));
        }
        AngleCmd::Mu { z, theta, cap } => println!("{}", mu_weight(z, theta, *cap)),
        AngleCmd::HArc { z, theta, m } => {
            let arc = h_arc(z, theta, *m)?;
            println!("start in [{}, {}]", arc.start.lo, arc.start.hi);
            println!("end   in [{}, {}]", arc.end.lo, arc.end.hi);
            println!("length {}", arc.length);
            if let Some(exact) = arc.exact() {
                println!("exact {exact}");
            }
        }
        AngleCmd::Sigma0 { theta } => println!("{}", sigma0_arc(theta)?),
        AngleCmd::SigmaPeriodic { p } => {
            let list: Vec<String> = sigma_lengths_periodic(*p)?.iter().map(ToString::to_string).collect();
            println!("{}", list.join(" "));
        }
        AngleCmd::Semiconj { theta, samples, m } => {
            let samples = angle::parse_angle_list(samples)?;
            let rep = semiconjugacy_check(theta, &samples, *m)?;
            for s in &rep.samples {
                println!("{} defect {:e} widths {:e} {:e}", s.u, s.defect, s.width_4u, s.width_u);
            }
            println!("max defect {:e} (tolerance {:e}), {} skipped in σ₀", rep.max_defect, rep.tolerance, rep.skipped);
            if !rep.passed() {
                return Err(domain("semiconjugacy defect above tolerance"));
            }
        }
    }
    Ok(())
}

fn quadratic_side(spec: &str, depth: u32) -> Result<Lamination, Failure> {
    if spec == "basilica" {
        return Ok(build_basilica(depth));
    }
    let y0: CircleAngle = spec.parse()?;
    Ok(build_quadratic_lamination(&y0, depth)?)
}

/// Prints a summary line, on stderr when a file is streamed to stdout.
fn note(out: &LamOut, line: &str) {
    let streamed = [&out.leaves, &out.svg].iter().any(|p| p.as_ref().is_some_and(|p| p.as_os_str() == "-"));
    if streamed {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn emit(lam: &Lamination, out: &LamOut) -> Out {
    let summary =
        format!("{} leaves ({} inside, {} outside)", lam.len(), lam.count(Side::Inside), lam.count(Side::Outside));
    note(out, &summary);
    if let Some(path) = &out.leaves {
        write_file(path, lam.to_text().as_bytes())?;
    }
    if let Some(path) = &out.svg {
        if !(out.radius > 0.0 && out.radius.is_finite()) {
            return Err(domain("radius must be positive"));
        }
        let opts = SvgOptions { radius: out.radius, ..SvgOptions::default() };
        write_file(path, render_svg(lam, &opts).as_bytes())?;
    }
    Ok(())
}

fn build_kind(kind: LamKindArg, theta: Option<&CircleAngle>, depth: u32) -> Result<Lamination, Failure> {
    if kind == LamKindArg::Basilica {
        return Ok(build_basilica(depth));
    }
    let theta = theta.ok_or_else(|| domain("--theta is required for this kind"))?;
    Ok(match kind {
        LamKindArg::L0 => build_l0(theta, depth, 20.max(depth))?,
        LamKindArg::L => build_l(theta, depth)?,
        LamKindArg::TwoSided => build_2l(theta, depth)?,
        LamKindArg::Quadratic => build_quadratic_lamination(&angle::y0_from_theta(theta), depth)?,
        LamKindArg::Basilica => unreachable!(),
    })
}

fn read_leaves(path: &Path) -> Result<Lamination, Failure> {
    let text = fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    Ok(Lamination::from_text(&text)?)
}

fn run_lam(cmd: &LamCmd, limits: &Limits) -> Out {
    match cmd {
        LamCmd::L0 { theta, depth, m_cap, out } => {
            limits.depth(*depth)?;
            emit(&build_l0(theta, *depth, *m_cap)?, out)
        }
        LamCmd::L { theta, depth, out } => {
            limits.depth(*depth)?;
            emit(&build_l(theta, *depth)?, out)
        }
        LamCmd::TwoSided { theta, depth, out } => {
            limits.depth(*depth)?;
            emit(&build_2l(theta, *depth)?, out)
        }
        LamCmd::Quadratic { y0, theta, depth, out } => {
            limits.depth(*depth)?;
            let y0 = match (y0, theta) {
                (Some(y), _) => y.clone(),
                (None, Some(t)) => angle::y0_from_theta(t),
                (None, None) => return Err(domain("give --y0 or --theta")),
            };
            note(out, &format!("y0 = {y0}"));
            emit(&build_quadratic_lamination(&y0, *depth)?, out)
        }
        LamCmd::Basilica { depth, out } => {
            limits.depth(*depth)?;
            emit(&build_basilica(*depth), out)
        }
        LamCmd::Mate { left, right, depth, out } => {
            limits.depth(*depth)?;
            let lam = mate(&quadratic_side(left, *depth)?, &quadratic_side(right, *depth)?);
            let crossings = lam.crossing_report();
            emit(&lam, out)?;
            note(out, &format!("{} same-side crossings", crossings.crossings.len()));
            Ok(())
        }
        LamCmd::CheckInvariance { kind, theta, depth, input } => {
            limits.depth(*depth)?;
            let lam = match input {
                Some(p) => read_leaves(p)?,
                // Backward conditions at `depth` need one more level.
                None => build_kind(*kind, theta.as_ref(), depth + 1)?,
            };
            let rep = match kind {
                LamKindArg::TwoSided => check_two_sided_invariance(&lam, *depth),
                _ => check_quadratic_invariance(&lam, *depth),
            };
            for v in &rep.violations {
                println!("{v}");
            }
            println!("{} leaves checked, {} violations", rep.checked, rep.violations.len());
            if rep.passed() {
                Ok(())
            } else {
                Err(domain("lamination is not invariant"))
            }
        }
        LamCmd::Regions { kind, theta, depth, side, input } => {
            limits.depth(*depth)?;
            let lam = match input {
                Some(p) => read_leaves(p)?,
                None => build_kind(*kind, theta.as_ref(), *depth)?,
            };
            let side = if *side == SideArg::Inside { Side::Inside } else { Side::Outside };
            let chords: Vec<_> = lam.chords(side).cloned().collect();
            let regions = complementary_regions(&chords)?;
            for r in &regions {
                println!("{r}");
            }
            println!("{} regions", regions.len());
            Ok(())
        }
    }
}

fn parse_address(s: &str) -> Result<Address, Failure> {
    Ok(s.parse()?)
}

fn run_sym(cmd: &SymCmd, limits: &Limits) -> Out {
    match cmd {
        SymCmd::CriticalAddress { theta } => {
            let [zero, one] = critical_address(theta)?;
            println!("{zero}");
            println!("{one}");
        }
        SymCmd::Equiv { x, y, theta } => {
            let eq = addr_equivalent(&parse_address(x)?, &parse_address(y)?, theta)?;
            println!("{eq}");
        }
        SymCmd::AngleToAddress { angle, address } => match (angle, address) {
            (Some(t), _) => println!("{}", angle_to_address(t)),
            (None, Some(a)) => println!("{}", address_to_angle(&parse_address(a)?)),
            (None, None) => return Err(domain("give --angle or --address")),
        },
        SymCmd::Shift { address } => println!("{}", parse_address(address)?.shift()),
        SymCmd::MatchLeaves { theta, depth } => {
            limits.depth(*depth)?;
            let rep = leaf_addresses_match(theta, *depth)?;
            for m in &rep.mismatches {
                println!("{m}");
            }
            println!("{} leaves, {} words, {} mismatches", rep.leaves_checked, rep.words_checked, rep.mismatches.len());
            if !rep.passed() {
                return Err(domain("leaves and addresses disagree"));
            }
        }
        SymCmd::Cells { depth } => {
            limits.depth(*depth)?;
            println!("{}", cells_at_depth(*depth).join(" "));
        }
        SymCmd::RegRay { symbol, op } => {
            let g: RegulatedRay = symbol.parse()?;
            match op {
                RegOp::Image => println!("{}", regulated_ray_image(&g)?),
                RegOp::Preimage => {
                    for p in regulated_ray_preimage(&g)? {
                        println!("{p}");
                    }
                }
            }
        }
    }
    Ok(())
}

fn parse_bounds(s: &str) -> Result<Bounds, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| domain(format!("bounds must be four numbers re_min,re_max,im_min,im_max, got {s:?}")))?;
    match v.as_slice() {
        &[a, b, c, d] if v.iter().all(|x| x.is_finite()) => Ok(Bounds::new(a, b, c, d)),
        _ => Err(domain(format!("bounds must be four finite numbers, got {s:?}"))),
    }
}

fn parse_sphere(s: &str) -> Result<SpherePoint, Failure> {
    if s.trim() == "inf" {
        return Ok(SpherePoint::Infinity);
    }
    let z: C64 = s.trim().parse().map_err(|_| domain(format!("expected a complex number or inf, got {s:?}")))?;
    Ok(SpherePoint::Finite(z))
}

fn save_raster(r: &Raster, out: Option<&Path>) -> Out {
    let escaped = r.count(|p| matches!(p, Pixel::Escaped { .. }));
    let bounded = r.count(|p| matches!(p, Pixel::Bounded | Pixel::Hit));
    println!("{}x{} {}: {bounded} marked, {escaped} escaped", r.width, r.height, r.kind);
    if let Some(path) = out {
        write_file(path, &r.to_pgm())?;
        let mut side = path.as_os_str().to_owned();
        side.push(".txt");
        write_file(Path::new(&side), r.header().as_bytes())?;
    }
    Ok(())
}

fn report_path(path: &RayPath, csv: Option<&Path>) -> Out {
    if let Some(p) = csv {
        write_file(p, path.to_csv().as_bytes())?;
    }
    println!("{} points", path.points.len());
    if let Some((z, err)) = path.landing() {
        let s = path.points.last().map_or(f64::NAN, |p| p.s);
        println!("last point {} at potential {s:e}, last step {err:.3e}", cx(z));
    }
    match path.end {
        RayEnd::Reached => println!("reached the target potential"),
        RayEnd::Crash { potential, point } => println!("crashed at potential {potential:e} near {}", cx(point)),
        RayEnd::Stalled { potential } => {
            return Err(Failure::Numeric(format!("continuation stalled at potential {potential:e}")));
        }
    }
    Ok(())
}

fn run_dyn(cmd: &DynCmd, limits: &Limits) -> Out {
    match cmd {
        DynCmd::M2 { raster } => {
            limits.iterations(raster.n_max)?;
            let r = m2_raster(parse_bounds(&raster.bounds)?, raster.width, raster.height, raster.n_max)?;
            save_raster(&r, raster.out.as_deref())
        }
        DynCmd::Julia { a, method, compare, raster } => {
            limits.iterations(raster.n_max)?;
            let bounds = parse_bounds(&raster.bounds)?;
            let m = if *method == MethodArg::Escape { JuliaMethod::Escape } else { JuliaMethod::Inverse };
            let r = julia_raster(*a, bounds, raster.width, raster.height, m, raster.n_max)?;
            save_raster(&r, raster.out.as_deref())?;
            if *compare {
                let other = if m == JuliaMethod::Escape { JuliaMethod::Inverse } else { JuliaMethod::Escape };
                let s = julia_raster(*a, bounds, raster.width, raster.height, other, raster.n_max)?;
                let (esc, inv) = if m == JuliaMethod::Escape { (&r, &s) } else { (&s, &r) };
                println!("agreement {:.4}", julia_agreement(esc, inv));
            }
            Ok(())
        }
        DynCmd::Fixed { a } => {
            for z in dynamics::fixed_points(*a)? {
                let m = dynamics::multiplier(*a, SpherePoint::Finite(z))?;
                println!("{}  multiplier {} (|m| = {:.12})", cx(z), cx(m), m.norm());
            }
            Ok(())
        }
        DynCmd::Orbit { a, z, n_max } => {
            limits.iterations(*n_max)?;
            let z = parse_sphere(z)?;
            match dynamics::apply_f(*a, z) {
                SpherePoint::Finite(w) => println!("f(z) = {}", cx(w)),
                SpherePoint::Infinity => println!("f(z) = inf"),
            }
            let (hit, n) = dynamics::attracted_to_supercycle(*a, z, *n_max);
            println!("attracted {hit} after {n} steps");
            Ok(())
        }
        DynCmd::Green { a, z, n_max } => {
            let z = parse_sphere(z)?;
            println!("G = {}", green(*a, z, *n_max)?);
            if let SpherePoint::Finite(w) = z {
                if w.norm() > boettcher_radius(*a) {
                    println!("phi = {}", cx(boettcher_infty(*a, w)?));
                }
            }
            Ok(())
        }
        DynCmd::Ray { a, base, theta, s_from, s_to, steps, csv } => {
            let base = if *base == BaseArg::Zero { RayBase::Zero } else { RayBase::Infinity };
            let path = trace_dynamical_ray(*a, base, theta, *s_from, *s_to, *steps)?;
            report_path(&path, csv.as_deref())
        }
        DynCmd::ParamRay { theta, s_from, s_to, steps, csv } => {
            let path = trace_parameter_ray(theta, *s_from, *s_to, *steps)?;
            report_path(&path, csv.as_deref())
        }
        DynCmd::RayLeaves { a, theta, potential, depth } => {
            limits.depth(*depth)?;
            let a = match (a, theta) {
                (Some(a), _) => *a,
                (None, Some(t)) => {
                    let path = trace_parameter_ray(t, 8.0, *potential, 4)?;
                    let a = path.landing().ok_or_else(|| Failure::Numeric("empty parameter ray".into()))?.0;
                    println!("a = {}", cx(a));
                    a
                }
                (None, None) => return Err(domain("give --a or --theta")),
            };
            let rep = ray_leaf_endpoints(a, *depth)?;
            println!("theta0 = {:.12}, critical potential {:.6}", rep.theta0, rep.critical_potential);
            for leaf in &rep.leaves {
                let pair = match leaf.angles {
                    Some((p, q)) => format!("{:.6} {:.6}", p.min(q), p.max(q)),
                    None => "unresolved".into(),
                };
                println!("{} {} {pair}  offset {:.1e}", leaf.depth, leaf.side.tag(), leaf.offset);
            }
            println!("{} leaves, {} unresolved", rep.leaves.len(), rep.unresolved());
            Ok(())
        }
        DynCmd::Blaschke { b, z } => {
            let (c1, c2) = blaschke_critical_points(*b)?;
            println!("c1 = {}", cx(c1));
            println!("c2 = {}", cx(c2));
            if let Some(z) = z {
                println!("B(z) = {}", cx(blaschke_eval(*b, *z)?));
            }
            Ok(())
        }
    }
}

fn run_check(args: &CheckArgs, limits: &Limits) -> Out {
    limits.depth(args.depth)?;
    let ids: &[u8] = match args.suite {
        Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        Suite::Angle => &[1, 2, 3],
        Suite::Lam => &[4, 5, 6],
        Suite::Sym => &[7, 8],
        Suite::Dyn => &[9, 10, 11, 12],
    };
    let mut failed = 0;
    for &id in ids {
        let o = verify::run(id).expect("known criterion");
        println!("{}", o.line());
        failed += usize::from(!o.passed());
    }
    if let Some(set) = &args.theta_set {
        let thetas = angle::parse_angle_list(set)?;
        let lam = matches!(args.suite, Suite::All | Suite::Lam);
        let sym = matches!(args.suite, Suite::All | Suite::Sym);
        for t in &thetas {
            for (name, ok, detail) in sweep(t, args.depth, lam, sym)? {
                println!("[{}] {name} θ₀ = {t}: {detail}", if ok { "PASS" } else { "FAIL" });
                failed += usize::from(!ok);
            }
        }
    }
    if failed > 0 {
        return Err(domain(format!("{failed} checks failed")));
    }
    Ok(())
}

fn sweep(t: &CircleAngle, depth: u32, lam: bool, sym: bool) -> Result<Vec<(&'static str, bool, String)>, Failure> {
    let mut out = Vec::new();
    if lam {
        for (name, l) in [("crossings L", build_l(t, depth)?), ("crossings 2L", build_2l(t, depth)?)] {
            let rep = l.crossing_report();
            out.push((name, rep.passed(), format!("{} pairs, {} crossings", rep.pairs, rep.crossings.len())));
        }
        let inv = check_two_sided_invariance(&build_2l(t, depth + 1)?, depth);
        out.push((
            "invariance 2L",
            inv.passed(),
            format!("{} leaves, {} violations", inv.checked, inv.violations.len()),
        ));
        let eq = construction_equivalence(t, depth)?;
        let diff = eq.missing.len() + eq.extra.len();
        out.push(("equivalence", eq.passed(), format!("{} leaves, {diff} differences", eq.compared)));
    }
    if sym {
        let rep = leaf_addresses_match(t, depth)?;
        out.push((
            "addresses",
            rep.passed(),
            format!("{} leaves, {} mismatches", rep.leaves_checked, rep.mismatches.len()),
        ));
    }
    Ok(out)
}
