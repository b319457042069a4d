//! `lamina`: exact angles, laminations, symbolic models and ray tracing for
//! f_a(z) = a/(z² + 2z) from the command line.

mod config;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use lamina::dynamics::C64;
use lamina::CircleAngle;

pub const MAX_DEPTH: u32 = 16;
pub const MAX_ITER: u32 = 4096;

const EXAMPLES: &str = "\
Examples:
  lamina angle x0 --theta 1/6
  lamina angle h-arc --z 1/6 --theta 1/6 --m 30
  lamina lam two-sided --theta 1/2 --depth 6 --svg out.svg --leaves out.leaves
  lamina lam regions --kind L --theta 1/6 --depth 2
  lamina sym critical-address --theta 1/6
  lamina sym reg-ray --symbol 'G(inf;1/2,1/4)' --op image
  lamina dyn fixed --a 1
  lamina dyn m2 --bounds=-4,4,-4,4 --width 400 --height 400 --n-max 512 --out m2.pgm
  lamina dyn param-ray --theta 1/6 --s-from 8 --s-to 0.25 --csv ray.csv
  lamina dyn ray-leaves --theta 1/6 --potential 0.25 --depth 3
  lamina check all --theta-set 1/2,1/6,5/12 --depth 8

Exit status: 0 success, 1 domain error or failed check, 2 numeric failure, 64 usage error.";

#[derive(Parser, Debug)]
#[command(name = "lamina", version, about = "Invariant laminations and dynamics of a/(z²+2z)", after_help = EXAMPLES)]
pub struct Cli {
    /// File of `key = value` lines used as defaults for long flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Lift the depth (≤ 16) and iteration (≤ 4096) caps.
    #[arg(long, global = true)]
    pub unsafe_limits: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Exact circle angles, x₀/y₀ and the blow-up measure.
    #[command(subcommand)]
    Angle(AngleCmd),
    /// Build, check and render laminations.
    #[command(subcommand)]
    Lam(LamCmd),
    /// Addresses, the equivalence relation and regulated rays.
    #[command(subcommand)]
    Sym(SymCmd),
    /// Numerical dynamics of f_a.
    #[command(subcommand)]
    Dyn(DynCmd),
    /// Acceptance suites.
    Check(CheckArgs),
}

fn angle(s: &str) -> Result<CircleAngle, String> {
    s.parse().map_err(|e: lamina::Error| e.to_string())
}

fn complex(s: &str) -> Result<C64, String> {
    s.trim().parse::<C64>().map_err(|_| format!("expected a complex number like 1.5-2i, got {s:?}"))
}

#[derive(Subcommand, Debug)]
pub enum AngleCmd {
    /// x₀ from its binary digits, optionally with the series enclosure.
    X0 {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        /// Also print the enclosure from this many series terms.
        #[arg(long)]
        series: Option<u32>,
    },
    /// y₀, the basilica angle attached to θ₀.
    Y0 {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    /// ν_m(θ) = [frac(2^m θ) ≥ θ].
    Nu {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        m: u64,
    },
    /// Binary expansion, or the single digit m.
    Digits {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Doubling image of θ.
    Double {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    OrbitType {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    /// The 2ⁿ angles (θ₀ + k)/2ⁿ.
    Preimages {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        n: u32,
    },
    /// Exact μ-weight of z, truncated at depth `cap` when given.
    Mu {
        #[arg(long, value_parser = angle)]
        z: CircleAngle,
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// The arc h⁻¹(z) with enclosed endpoints.
    HArc {
        #[arg(long, value_parser = angle)]
        z: CircleAngle,
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long, default_value_t = 20)]
        m: u32,
    },
    /// The critical arc σ₀.
    Sigma0 {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    /// Arc lengths of the periodic shadow for period p.
    SigmaPeriodic {
        #[arg(long)]
        p: u32,
    },
    /// Defect of h(4u) against 2·h(u) on comma-separated samples.
    Semiconj {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        samples: String,
        #[arg(long, default_value_t = 20)]
        m: u32,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LamOut {
    /// Write an SVG drawing here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write `I|O p/q r/s` leaf lines here (`-` for stdout).
    #[arg(long)]
    pub leaves: Option<PathBuf>,
    /// Radius of the unit circle in the SVG, in pixels.
    #[arg(long, default_value_t = 200.0)]
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LamKindArg {
    #[value(name = "L0")]
    L0,
    #[value(name = "L")]
    L,
    TwoSided,
    Quadratic,
    Basilica,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Inside,
    Outside,
}

#[derive(Subcommand, Debug)]
pub enum LamCmd {
    /// Bridges over h-preimages of atoms.
    #[command(name = "L0")]
    L0 {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = 20)]
        m_cap: u32,
        #[command(flatten)]
        out: LamOut,
    },
    #[command(name = "L")]
    L {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        out: LamOut,
    },
    TwoSided {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        out: LamOut,
    },
    /// L(y₀), from --y0 or from the y₀ of --theta.
    Quadratic {
        #[arg(long, value_parser = angle, conflicts_with = "theta", required_unless_present = "theta")]
        y0: Option<CircleAngle>,
        #[arg(long, value_parser = angle)]
        theta: Option<CircleAngle>,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        out: LamOut,
    },
    Basilica {
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        out: LamOut,
    },
    /// Inside leaves of --left, reflected leaves of --right outside. Each
    /// side is `basilica` or an angle y₀ for L(y₀).
    Mate {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        out: LamOut,
    },
    /// Invariance of a built lamination, or of a leaf file with --input.
    CheckInvariance {
        #[arg(long, value_enum, default_value = "two-sided")]
        kind: LamKindArg,
        #[arg(long, value_parser = angle)]
        theta: Option<CircleAngle>,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Complementary regions of one side of a lamination.
    Regions {
        #[arg(long, value_enum, default_value = "L")]
        kind: LamKindArg,
        #[arg(long, value_parser = angle)]
        theta: Option<CircleAngle>,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value = "inside")]
        side: SideArg,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegOp {
    Image,
    Preimage,
}

#[derive(Subcommand, Debug)]
pub enum SymCmd {
    CriticalAddress {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    /// Whether two addresses (`b|pre(per)`) are equivalent for θ₀.
    Equiv {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
    },
    /// Address of --angle, or the angle of --address.
    AngleToAddress {
        #[arg(long, value_parser = angle, required_unless_present = "address", conflicts_with = "address")]
        angle: Option<CircleAngle>,
        #[arg(long)]
        address: Option<String>,
    },
    Shift {
        #[arg(long)]
        address: String,
    },
    MatchLeaves {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long)]
        depth: u32,
    },
    Cells {
        #[arg(long)]
        depth: u32,
    },
    /// Image or preimages of a symbol such as `G(inf;1/2,1/4)`.
    RegRay {
        #[arg(long)]
        symbol: String,
        #[arg(long, value_enum)]
        op: RegOp,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "inf")]
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Escape,
    Inverse,
}

#[derive(Args, Debug, Clone)]
pub struct RasterArgs {
    /// `re_min,re_max,im_min,im_max`
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: String,
    #[arg(long, default_value_t = 400)]
    pub width: usize,
    #[arg(long, default_value_t = 400)]
    pub height: usize,
    #[arg(long, default_value_t = 512)]
    pub n_max: u32,
    /// Binary PGM output; the header goes to `<out>.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum DynCmd {
    /// Parameter-plane raster of M₂.
    M2 {
        #[command(flatten)]
        raster: RasterArgs,
    },
    Julia {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_enum, default_value = "escape")]
        method: MethodArg,
        /// Also render the other method and report the pixel agreement.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        raster: RasterArgs,
    },
    /// The three fixed points with multipliers.
    Fixed {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
    },
    /// f_a(z) and whether the orbit of z reaches the trap around {0, ∞}.
    Orbit {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        /// A complex number or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 512)]
        n_max: u32,
    },
    /// Signed Green function, and the Böttcher coordinate when defined.
    Green {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 4000)]
        n_max: u32,
    },
    Ray {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_enum, default_value = "inf")]
        base: BaseArg,
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long, default_value_t = 4.0)]
        s_from: f64,
        #[arg(long, default_value_t = 1e-3)]
        s_to: f64,
        #[arg(long, default_value_t = 8)]
        steps: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    ParamRay {
        #[arg(long, value_parser = angle)]
        theta: CircleAngle,
        #[arg(long, default_value_t = 8.0)]
        s_from: f64,
        #[arg(long, default_value_t = 0.05)]
        s_to: f64,
        #[arg(long, default_value_t = 4)]
        steps: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Ray leaves of f_a in circle coordinates, with a given directly or
    /// traced down the parameter ray of --theta to --potential.
    RayLeaves {
        #[arg(long, value_parser = complex, allow_hyphen_values = true, required_unless_present = "theta")]
        a: Option<C64>,
        #[arg(long, value_parser = angle, conflicts_with = "a")]
        theta: Option<CircleAngle>,
        #[arg(long, default_value_t = 0.25)]
        potential: f64,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Critical points of B(z) = z(z+b)/(b̄z+1), and B(z) if given.
    Blaschke {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        b: C64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: Option<C64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Angle,
    Lam,
    Sym,
    Dyn,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: Suite,
    /// Extra invariant sweeps over these comma-separated generators.
    #[arg(long)]
    pub theta_set: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
}

/// Long flags accepted by the subcommand named in `raw`, globals included.
/// Config keys outside this set are ignored for that invocation.
fn accepted_flags(raw: &[OsString]) -> Vec<String> {
    let mut cmd = Cli::command();
    cmd.build();
    let longs =
        |c: &clap::Command| c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect::<Vec<_>>();
    let mut out = longs(&cmd);
    let mut cur = &cmd;
    for word in raw.iter().skip(1).filter_map(|a| a.to_str()).filter(|a| !a.starts_with('-')) {
        match cur.find_subcommand(word) {
            Some(sub) => {
                cur = sub;
                out.extend(longs(cur));
            }
            None => continue,
        }
    }
    out
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`lamina … | head`) instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let raw: Vec<OsString> = std::env::args_os().collect();
    let args = match config::path(&raw) {
        None => raw,
        Some(p) => match std::fs::read_to_string(&p).map_err(|e| format!("{p}: {e}")).and_then(|t| config::parse(&t)) {
            Ok(kv) => {
                let accepted = accepted_flags(&raw);
                let kv: Vec<_> = kv.into_iter().filter(|(k, _)| accepted.iter().any(|a| a == k)).collect();
                config::merge(raw, &kv)
            }
            Err(e) => {
                eprintln!("error: config {e}");
                return ExitCode::from(64);
            }
        },
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
