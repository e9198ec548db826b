//! `realizer`: batch front end for nearest/farthest-neighbor realizability.
//!
//! Exit codes: 0 success or realizable, 1 usage/format error, 2 not realizable (or not
//! certified), 3 construction budget exhausted.

mod formats;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use realizer_core::embed::{self, EmbedError, EmbedParams, Family, FamilyInstance};
use realizer_core::funcgraph::FuncPair;
use realizer_core::maxreal2d::{max_realize, MaxRealError};
use realizer_core::realize::{self, RealizeError};
use realizer_core::verify::{self, certify, certify_maps, Extreme, PointConfig, VerifyError};
use serde_json::{json, Value};

use formats::{read_json, write_json, Instance, InstanceFile, MatrixFile, PointsFile};

#[derive(Parser)]
#[command(name = "realizer", version, about = "Nearest/farthest-neighbor map realizability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Simplex,
    Spherical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Nearest,
    Farthest,
}

#[derive(Subcommand)]
enum Command {
    /// Decide realizability of a pair, or of a single map
    Check { instance: PathBuf },
    /// Write a metric witness (distance matrix) for a realizable pair
    Witness {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a realizable pair in Euclidean space
    Embed {
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "0")]
        seed: String,
        #[arg(long, value_enum, default_value = "simplex")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_attempts: Option<usize>,
        #[arg(long)]
        max_restarts: Option<usize>,
    },
    /// Realize a map as the farthest-point map of points in the plane
    Maxreal {
        instance: PathBuf,
        #[arg(long, default_value = "0")]
        seed: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a points file against an instance
    Verify {
        points: PathBuf,
        instance: PathBuf,
        /// Role of a single-map instance
        #[arg(long = "as", value_enum, default_value = "nearest")]
        role: Role,
    },
    /// Brute-force realizability over all distance orders (n <= 5)
    Oracle {
        instance: PathBuf,
        #[arg(long = "as", value_enum, default_value = "nearest")]
        role: Role,
    },
    /// Closed-form dimension bounds
    Bounds {
        #[arg(long)]
        k: usize,
        /// Also report the lattice-cube count (2r+1)^k
        #[arg(long)]
        r: Option<u32>,
    },
    /// Write a named instance: croft6, twofix4, star(n), btree(s)
    Family {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const OK: u8 = 0;
const USAGE: u8 = 1;
const NO: u8 = 2;
const BUDGET: u8 = 3;

struct Outcome {
    code: u8,
    verdict: &'static str,
    diagnostics: Value,
    seed: Option<String>,
}

impl Outcome {
    fn new(code: u8, verdict: &'static str, diagnostics: Value) -> Self {
        Self { code, verdict, diagnostics, seed: None }
    }

    fn seeded(mut self, seed: &str) -> Self {
        self.seed = Some(seed.to_string());
        self
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: USAGE, message: message.to_string() }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        usage(e)
    }
}

impl From<RealizeError> for Failure {
    fn from(e: RealizeError) -> Self {
        match e {
            RealizeError::NotNice(_) => Failure { code: NO, message: e.to_string() },
            other => usage(other),
        }
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Realize(r) => r.into(),
            other => usage(other),
        }
    }
}

impl From<MaxRealError> for Failure {
    fn from(e: MaxRealError) -> Self {
        match e {
            MaxRealError::NotMaxRealizable(_) => Failure { code: NO, message: e.to_string() },
            MaxRealError::ShrinkExhausted(_) => Failure { code: BUDGET, message: e.to_string() },
            other => usage(other),
        }
    }
}

/// Numeric seeds are used as-is; anything else is hashed with 64-bit FNV-1a.
fn parse_seed(s: &str) -> u64 {
    s.parse().unwrap_or_else(|_| {
        s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
    })
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let file: InstanceFile = read_json(path).map_err(usage)?;
    file.instance().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_pair(path: &Path) -> Result<FuncPair, Failure> {
    match load(path)? {
        Instance::Pair(p) => Ok(p),
        Instance::Single(_) => Err(usage(format!("{}: this command needs a pair instance with 'g'", path.display()))),
    }
}

fn points_file(c: &PointConfig, seed: &str) -> PointsFile {
    PointsFile { n: c.n(), k: c.k(), points: c.coords().to_vec(), seed: seed.to_string() }
}

fn cmd_check(path: &Path) -> Result<Outcome, Failure> {
    match load(path)? {
        Instance::Pair(p) => {
            let report = realize::check(&p);
            let code = if report.is_nice { OK } else { NO };
            let verdict = if report.is_nice { "realizable" } else { "not_realizable" };
            Ok(Outcome::new(code, verdict, json!(report)))
        }
        Instance::Single(f) => match f.long_cycle() {
            None => Ok(Outcome::new(OK, "realizable", json!({"long_cycle": null}))),
            Some(c) => {
                let cycle: Vec<usize> = c.iter().map(|v| v + 1).collect();
                Ok(Outcome::new(NO, "not_realizable", json!({"long_cycle": cycle})))
            }
        },
    }
}

fn cmd_witness(path: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let p = load_pair(path)?;
    let d = realize::metric_witness(&p)?;
    let maps = verify::extract_maps(&d);
    if !(maps.distinct && maps.nearest == p.f.images() && maps.farthest == p.g.images() && verify::is_metric(&d)) {
        return Err(usage("internal error: witness failed self-certification"));
    }
    let file = MatrixFile { n: d.n(), d: d.to_rows() };
    let diagnostics = match out {
        Some(out) => {
            write_json(out, &file).map_err(usage)?;
            json!({"out": out.display().to_string()})
        }
        None => json!({"matrix": file}),
    };
    Ok(Outcome::new(OK, "realizable", diagnostics))
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    path: &Path,
    k: Option<usize>,
    seed: &str,
    mode: Mode,
    out: Option<&Path>,
    max_attempts: Option<usize>,
    max_restarts: Option<usize>,
) -> Result<Outcome, Failure> {
    let p = load_pair(path)?;
    let (config, mut diagnostics) = match mode {
        Mode::Simplex => {
            if let Some(k) = k.filter(|&k| k + 1 < p.n()) {
                return Err(usage(format!("simplex mode writes {} coordinates; --k {k} is too small", p.n() - 1)));
            }
            (embed::simplex(&p)?, json!({"mode": "simplex"}))
        }
        Mode::Spherical => {
            let k = k.ok_or_else(|| usage("spherical mode needs --k"))?;
            let mut params = EmbedParams::new(k, parse_seed(seed));
            if let Some(a) = max_attempts {
                params.max_attempts_per_point = a;
            }
            if let Some(r) = max_restarts {
                params.max_restarts = r;
            }
            let report = embed::spherical_embed_report(&p, &params)?;
            let diagnostics = json!({
                "mode": "spherical",
                "restarts": report.restarts,
                "targeted_points": report.targeted_points,
            });
            match report.config {
                Some(c) => (c, diagnostics),
                None => return Ok(Outcome::new(BUDGET, "budget_exhausted", diagnostics).seeded(seed)),
            }
        }
    };
    if !certify(&config, &p)?.certified {
        return Err(usage("internal error: embedding failed self-certification"));
    }
    let file = points_file(&config, seed);
    match out {
        Some(out) => {
            write_json(out, &file).map_err(usage)?;
            diagnostics["out"] = json!(out.display().to_string());
        }
        None => diagnostics["points"] = json!(file),
    }
    Ok(Outcome::new(OK, "realizable", diagnostics).seeded(seed))
}

fn cmd_maxreal(path: &Path, seed: &str, out: Option<&Path>) -> Result<Outcome, Failure> {
    let g = match load(path)? {
        Instance::Single(g) => g,
        Instance::Pair(p) => p.g,
    };
    let config = max_realize(&g, parse_seed(seed))?;
    if !certify_maps(&config, None, Some(&g))?.certified {
        return Err(usage("internal error: planar configuration failed self-certification"));
    }
    let file = points_file(&config, seed);
    let diagnostics = match out {
        Some(out) => {
            write_json(out, &file).map_err(usage)?;
            json!({"out": out.display().to_string()})
        }
        None => json!({"points": file}),
    };
    Ok(Outcome::new(OK, "realizable", diagnostics).seeded(seed))
}

fn cmd_verify(points: &Path, instance: &Path, role: Role) -> Result<Outcome, Failure> {
    let file: PointsFile = read_json(points).map_err(usage)?;
    if file.points.len() != file.n || file.points.iter().any(|p| p.len() != file.k) {
        return Err(usage(format!("{}: point count or dimension disagrees with n/k", points.display())));
    }
    let config = PointConfig::new(file.points)?;
    let report = match load(instance)? {
        Instance::Pair(p) => certify(&config, &p)?,
        Instance::Single(f) => match role {
            Role::Nearest => certify_maps(&config, Some(&f), None)?,
            Role::Farthest => certify_maps(&config, None, Some(&f))?,
        },
    };
    let (code, verdict) = if report.certified { (OK, "certified") } else { (NO, "not_certified") };
    Ok(Outcome::new(code, verdict, json!(report)))
}

fn cmd_oracle(path: &Path, role: Role) -> Result<Outcome, Failure> {
    let yes = match load(path)? {
        Instance::Pair(p) => verify::oracle(&p)?,
        Instance::Single(f) => {
            let mode = match role {
                Role::Nearest => Extreme::Nearest,
                Role::Farthest => Extreme::Farthest,
            };
            verify::oracle_single(&f, mode)?
        }
    };
    Ok(if yes {
        Outcome::new(OK, "realizable", json!({}))
    } else {
        Outcome::new(NO, "not_realizable", json!({}))
    })
}

fn cmd_bounds(k: usize, r: Option<u32>) -> Result<Outcome, Failure> {
    let report = embed::bounds(k)?;
    let mut diagnostics = json!(report);
    if let Some(r) = r {
        diagnostics["ball_bound"] = json!(embed::ball_bound(r, k as u32));
    }
    Ok(Outcome::new(OK, "ok", diagnostics))
}

fn cmd_family(name: &str, out: Option<&Path>) -> Result<Outcome, Failure> {
    let which: Family = name.parse()?;
    let mut file = match embed::family(which)? {
        FamilyInstance::Pair(p) => InstanceFile::from_pair(&p),
        FamilyInstance::Single(f) => InstanceFile::from_map(&f),
    };
    file.metadata.insert("family".into(), which.to_string());
    let diagnostics = match out {
        Some(out) => {
            write_json(out, &file).map_err(usage)?;
            json!({"out": out.display().to_string()})
        }
        None => json!({"instance": file}),
    };
    Ok(Outcome::new(OK, "ok", diagnostics))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Witness { .. } => "witness",
        Command::Embed { .. } => "embed",
        Command::Maxreal { .. } => "maxreal",
        Command::Verify { .. } => "verify",
        Command::Oracle { .. } => "oracle",
        Command::Bounds { .. } => "bounds",
        Command::Family { .. } => "family",
    }
}

fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Check { instance } => cmd_check(instance),
        Command::Witness { instance, out } => cmd_witness(instance, out.as_deref()),
        Command::Embed { instance, k, seed, mode, out, max_attempts, max_restarts } => {
            cmd_embed(instance, *k, seed, *mode, out.as_deref(), *max_attempts, *max_restarts)
        }
        Command::Maxreal { instance, seed, out } => cmd_maxreal(instance, seed, out.as_deref()),
        Command::Verify { points, instance, role } => cmd_verify(points, instance, *role),
        Command::Oracle { instance, role } => cmd_oracle(instance, *role),
        Command::Bounds { k, r } => cmd_bounds(*k, *r),
        Command::Family { name, out } => cmd_family(name, out.as_deref()),
    }
}

fn init_logging() {
    let level = match std::env::var("REALIZER_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    info!("running {name}");
    match run(&cli.command) {
        Ok(outcome) => {
            let summary = json!({
                "command": name,
                "verdict": outcome.verdict,
                "diagnostics": outcome.diagnostics,
                "seed": outcome.seed,
                "version": env!("CARGO_PKG_VERSION"),
                "timing_ms": start.elapsed().as_secs_f64() * 1e3,
            });
            let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
            // A closed pipe on stdout is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
