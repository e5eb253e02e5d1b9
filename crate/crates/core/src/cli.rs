//! The `sphdyn` command line.
//!
//! Every report embeds the fully resolved [`RunConfig`] under `"config"`;
//! `sphdyn --config FILE` replays it (FILE may be the config itself or any
//! JSON report containing one) and reproduces the report byte for byte.
//!
//! Exit codes: 0 success, 1 domain error (error JSON on stdout), 2 usage
//! error (message on stderr).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ergodic::{chi_average, DEFAULT_BURN_IN, DEFAULT_PATHS, MIN_BURN_IN};
use crate::knorm::{k_norm, k_norm_adaptive, KReport, k_norm_iterate, k_norm_iterate_adaptive, min_k_search, phi_functional};
use crate::knorm::{MIN_INTEGRAL_GRID, MIN_K_GRID};
use crate::lab::{
    default_m_max, inequality_chain_report, k_infinity_bracket, theorem1_growth_table, BracketOptions, ChainOptions,
    GrowthOptions, CHAIN_TOL_FLOOR, DEFAULT_N_MAX, DEFAULT_PHI_GRID, DEFAULT_SEEDS, GROWTH_MAX_N,
};
use crate::periodic::{chi_max_lower, cycles_up_to, k_attaining_cycle_check};
use crate::rational::{MapJson, RationalMap};
use crate::report::{growth_csv, to_json_string};
use crate::sphere::SpherePoint;
use crate::zoo::{lattes4, FamilyLabel};
use crate::{Error, Result};

pub const WORKERS_ENV: &str = "SPHDYN_WORKERS";
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_STARTS: usize = 8;
pub const DEFAULT_CYCLES_M_MAX: usize = 3;
const MAX_GRID: usize = 5_000_000;
const MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Knorm,
    Kiter,
    Bracket,
    Chimax,
    Chiavg,
    ChainReport,
    Theorem1,
    LattesDemo,
    MinimizeK,
    Phi,
    Cycles,
}

impl Command {
    fn needs_map(self) -> bool {
        !matches!(self, Command::Theorem1 | Command::LattesDemo | Command::MinimizeK)
    }

    fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A fully resolved run. `null` for `grid` means a grid fitted to each map
/// (see [`k_norm_adaptive`]); `null` for `m_max` on `kiter`-like commands
/// means unused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<String>,
    pub map: Option<String>,
    pub grid: Option<usize>,
    pub seeds: usize,
    pub tol: f64,
    pub seed: u64,
    /// Burn-in depth of backward paths.
    pub depth: usize,
    pub paths: usize,
    pub n_max: usize,
    pub m_max: Option<usize>,
    pub degree: Option<usize>,
    pub starts: usize,
    pub output: Option<String>,
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "sphdyn", version, about = "Spherical-derivative experiments on rational maps")]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    /// Replay a RunConfig, or the config embedded in a report.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores); overrides $SPHDYN_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// K(f), the maximum of the spherical derivative norm.
    Knorm(Opts),
    /// K(fⁿ) for n = 1..=n-max.
    Kiter(Opts),
    /// Bracket on k∞ from cycles (below) and K(fⁿ) (above).
    Bracket(Opts),
    /// Largest cycle exponent over periods up to m-max.
    Chimax(Opts),
    /// Average exponent against the measure of maximal entropy.
    Chiavg(Opts),
    /// Every link of ½ log d ≤ χa ≤ χm ≤ k∞ ≤ log K.
    ChainReport(Opts),
    /// K and φ of the tanh-product family.
    Theorem1(Opts),
    /// The degree-4 Lattès map: multiplier at ∞, χm, χa.
    LattesDemo(Opts),
    /// Multistart search for the smallest K at a given degree.
    MinimizeK(Opts),
    /// The logarithmic area functional φ(f).
    Phi(Opts),
    /// Cycles of exact period up to m-max.
    Cycles(Opts),
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// Named family, e.g. power:d=3, lattes4, random:d=4:seed=7.
    #[arg(long, conflicts_with = "map")]
    family: Option<String>,
    /// JSON file {"num": [[re, im], …], "den": […]}, ascending powers.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn split(cmd: Cmd) -> (Command, Opts) {
    match cmd {
        Cmd::Knorm(o) => (Command::Knorm, o),
        Cmd::Kiter(o) => (Command::Kiter, o),
        Cmd::Bracket(o) => (Command::Bracket, o),
        Cmd::Chimax(o) => (Command::Chimax, o),
        Cmd::Chiavg(o) => (Command::Chiavg, o),
        Cmd::ChainReport(o) => (Command::ChainReport, o),
        Cmd::Theorem1(o) => (Command::Theorem1, o),
        Cmd::LattesDemo(o) => (Command::LattesDemo, o),
        Cmd::MinimizeK(o) => (Command::MinimizeK, o),
        Cmd::Phi(o) => (Command::Phi, o),
        Cmd::Cycles(o) => (Command::Cycles, o),
    }
}

fn from_opts(command: Command, o: Opts) -> RunConfig {
    let n_max_default = if command == Command::Theorem1 { GROWTH_MAX_N } else { DEFAULT_N_MAX };
    RunConfig {
        command,
        family: o.family,
        map: o.map,
        grid: o.grid,
        seeds: o.seeds.unwrap_or(DEFAULT_SEEDS),
        tol: o.tol.unwrap_or(DEFAULT_TOL),
        seed: o.seed.unwrap_or(0),
        depth: o.depth.unwrap_or(DEFAULT_BURN_IN),
        paths: o.paths.unwrap_or(DEFAULT_PATHS),
        n_max: o.n_max.unwrap_or(n_max_default),
        m_max: o.m_max,
        degree: o.degree.or((command == Command::MinimizeK).then_some(2)),
        starts: o.starts.unwrap_or(DEFAULT_STARTS),
        output: o.output,
        format: o.format.unwrap_or_default(),
    }
}

/// A usage error: the run is rejected before any computation.
#[derive(Debug)]
pub struct Usage(pub String);

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), Usage> {
    if ok {
        Ok(())
    } else {
        Err(Usage(msg()))
    }
}

/// Range checks that need no map.
pub fn validate(c: &RunConfig) -> std::result::Result<(), Usage> {
    let cmd = c.command;
    if cmd.needs_map() {
        check(c.family.is_some() != c.map.is_some(), || {
            format!("{} needs exactly one of --family or --map", cmd.name())
        })?;
    } else {
        check(c.family.is_none() && c.map.is_none(), || format!("{} takes no --family or --map", cmd.name()))?;
    }
    if let Some(g) = c.grid {
        let min = if cmd == Command::Phi { MIN_INTEGRAL_GRID } else { MIN_K_GRID };
        check((min..=MAX_GRID).contains(&g), || format!("--grid must lie in {min}..={MAX_GRID}"))?;
    }
    check((1..=1000).contains(&c.seeds), || "--seeds must lie in 1..=1000".into())?;
    check(c.tol.is_finite() && c.tol > 0.0 && c.tol < 1.0, || "--tol must lie in (0, 1)".into())?;
    check((MIN_BURN_IN..=10_000).contains(&c.depth), || format!("--depth must lie in {MIN_BURN_IN}..=10000"))?;
    check((1..=1_000_000).contains(&c.paths), || "--paths must lie in 1..=1000000".into())?;
    let n_range = match cmd {
        Command::Bracket | Command::ChainReport => 2..=MAX_N,
        Command::Theorem1 => 1..=GROWTH_MAX_N,
        _ => 1..=MAX_N,
    };
    check(n_range.contains(&c.n_max), || {
        format!("--n-max must lie in {}..={}", n_range.start(), n_range.end())
    })?;
    if let Some(m) = c.m_max {
        check((1..=MAX_N).contains(&m), || format!("--m-max must lie in 1..={MAX_N}"))?;
    }
    if let Some(d) = c.degree {
        check(cmd == Command::MinimizeK, || "--degree is only used by minimize-k".into())?;
        check((2..=6).contains(&d), || "--degree must lie in 2..=6".into())?;
    }
    check((1..=1000).contains(&c.starts), || "--starts must lie in 1..=1000".into())?;
    check(c.format == Format::Json || cmd == Command::Theorem1, || {
        "--format csv is only available for theorem1".into()
    })?;
    if let Some(f) = &c.family {
        let label = FamilyLabel::from_str(f).map_err(|e| Usage(e.to_string()))?;
        label.build().map_err(|e| Usage(e.to_string()))?;
    }
    Ok(())
}

fn load_map(c: &RunConfig) -> Result<(RationalMap, String)> {
    if let Some(f) = &c.family {
        let label = FamilyLabel::from_str(f)?;
        return Ok((label.build()?, label.to_string()));
    }
    let path = c.map.as_deref().ok_or_else(|| Error::InvalidParameter("no map given".into()))?;
    let text = std::fs::read_to_string(path)?;
    let json: MapJson = serde_json::from_str(&text)?;
    Ok((RationalMap::from_json(&json)?, "custom".into()))
}

/// Fills map-dependent defaults.
fn resolve(c: &mut RunConfig, f: Option<&RationalMap>) -> Result<()> {
    let Some(f) = f else { return Ok(()) };
    let d = f.degree();
    match c.command {
        Command::Phi => {
            c.grid.get_or_insert(DEFAULT_PHI_GRID);
        }
        Command::Bracket | Command::Chimax | Command::ChainReport => {
            if c.m_max.is_none() {
                c.m_max = Some(default_m_max(d)?);
            }
        }
        Command::Cycles => {
            if c.m_max.is_none() {
                c.m_max = Some(default_m_max(d)?.min(DEFAULT_CYCLES_M_MAX));
            }
        }
        _ => {}
    }
    Ok(())
}

/// `K(f)` on the given grid, or on an adaptive one.
fn knorm_with(f: &RationalMap, grid: Option<usize>, n_seeds: usize) -> Result<KReport> {
    match grid {
        Some(g) => k_norm(f, g, n_seeds),
        None => k_norm_adaptive(f, n_seeds),
    }
}

enum Body {
    Json(Value),
    Csv(String),
}

fn dispatch(c: &RunConfig, f: Option<&RationalMap>, label: &str) -> Result<Body> {
    let need = || f.ok_or_else(|| Error::InvalidParameter("no map given".into()));
    let m_max = || c.m_max.ok_or_else(|| Error::InvalidParameter("m_max unresolved".into()));
    let bracket_opts = BracketOptions { grid_size: c.grid, n_seeds: c.seeds };
    let v = match c.command {
        Command::Knorm => {
            let f = need()?;
            serde_json::to_value(knorm_with(f, c.grid, c.seeds)?)?
        }
        Command::Kiter => {
            let f = need()?;
            let mut rows = Vec::new();
            for n in 1..=c.n_max {
                let r = match c.grid {
                    Some(grid) => k_norm_iterate(f, n, grid, c.seeds)?,
                    None => k_norm_iterate_adaptive(f, n, c.seeds, &[])?,
                };
                let a = r.value.ln();
                rows.push(json!({
                    "n": n, "value": r.value, "a_n": a, "a_n_over_n": a / n as f64,
                    "argmax": r.argmax_points, "grid_size": r.grid_size,
                }));
            }
            json!({ "map_label": label, "rows": rows })
        }
        Command::Bracket => {
            let f = need()?;
            let b = k_infinity_bracket(f, c.n_max, m_max()?, &bracket_opts)?;
            let k1 = knorm_with(f, c.grid, c.seeds)?;
            let check = k_attaining_cycle_check(f, &k1, b.m_used.max(1), c.tol)?;
            let mut v = serde_json::to_value(&b)?;
            if let Value::Object(map) = &mut v {
                map.insert("gap".into(), json!(b.gap()));
                map.insert("attaining_cycle".into(), serde_json::to_value(check)?);
            }
            v
        }
        Command::Chimax => {
            let f = need()?;
            let m = m_max()?;
            json!({ "m_max": m, "chi_max_lower": chi_max_lower(f, m)? })
        }
        Command::Chiavg => {
            let f = need()?;
            let e = chi_average(f, c.paths, c.depth, c.seed)?;
            let mut v = serde_json::to_value(e)?;
            if let Value::Object(map) = &mut v {
                map.insert("flagged".into(), json!(e.flagged));
            }
            v
        }
        Command::ChainReport => {
            let f = need()?;
            let opts = ChainOptions {
                n_max: c.n_max,
                m_max: c.m_max,
                n_paths: c.paths,
                burn_in: c.depth,
                seed: c.seed,
                bracket: bracket_opts,
            };
            serde_json::to_value(inequality_chain_report(f, label, &opts)?)?
        }
        Command::Theorem1 => {
            let opts = GrowthOptions { grid_size: c.grid, n_seeds: c.seeds, phi_grid: DEFAULT_PHI_GRID };
            let rows = theorem1_growth_table(c.n_max, &opts)?;
            if c.format == Format::Csv {
                return Ok(Body::Csv(growth_csv(&rows)));
            }
            json!({ "rows": rows })
        }
        Command::LattesDemo => {
            let l = lattes4();
            let mult = l.multiplier_at_fixed_point(&SpherePoint::INFINITY);
            let chi_m = chi_max_lower(&l, 1)?;
            let k = knorm_with(&l, c.grid, c.seeds)?;
            let chi_a = chi_average(&l, c.paths, c.depth, c.seed)?;
            let half = 0.5 * 4f64.ln();
            let tol = (3.0 * chi_a.stderr).max(CHAIN_TOL_FLOOR);
            json!({
                "degree": 4,
                "multiplier_at_infinity": [mult.re, mult.im],
                "chi_max_lower": chi_m,
                "log_degree": 4f64.ln(),
                "half_log_degree": half,
                "k": k.value,
                "chi_a": chi_a,
                "tol": tol,
                "chi_a_matches_half_log_degree": (chi_a.value - half).abs() <= tol,
                "strict_gap": chi_a.value + tol < chi_m,
            })
        }
        Command::MinimizeK => {
            let d = c.degree.unwrap_or(2);
            let r = min_k_search(d, c.starts, c.seed)?;
            json!({
                "degree": d,
                "k": r.k,
                "sqrt_degree": (d as f64).sqrt(),
                "best_start": r.best_start,
                "n_feasible": r.n_feasible,
                "best_map": r.best_map.to_json(),
            })
        }
        Command::Phi => {
            let f = need()?;
            let grid = c.grid.unwrap_or(DEFAULT_PHI_GRID);
            json!({ "value": phi_functional(f, grid)?, "grid_size": grid })
        }
        Command::Cycles => {
            let f = need()?;
            let m = m_max()?;
            json!({ "m_max": m, "cycles": cycles_up_to(f, m)? })
        }
    };
    Ok(Body::Json(v))
}

/// Result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn with_config(v: Value, config: &RunConfig) -> Result<Value> {
    let config = serde_json::to_value(config)?;
    Ok(match v {
        Value::Object(mut map) => {
            map.insert("config".into(), config);
            Value::Object(map)
        }
        other => json!({ "result": other, "config": config }),
    })
}

fn error_json(e: &Error, config: Option<&RunConfig>) -> String {
    let mut v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    if let (Some(c), Value::Object(map)) = (config, &mut v) {
        if let Ok(cv) = serde_json::to_value(c) {
            map.insert("config".into(), cv);
        }
    }
    to_json_string(&v).unwrap_or_else(|_| format!("{{\"error\": \"{}\"}}\n", e.kind()))
}

/// Reads a RunConfig, or the `config` member of a report.
pub fn read_config(path: &Path) -> std::result::Result<RunConfig, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let inner = match v.get("config") {
        Some(c) => c.clone(),
        None => v,
    };
    serde_json::from_value(inner).map_err(|e| Usage(format!("invalid config: {e}")))
}

fn workers(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|s| s.trim().parse().ok())).unwrap_or(0)
}

fn usage(msg: String) -> Outcome {
    Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

/// Parses `args` (including the program name) and runs the experiment.
/// Reports go to `--output` when given, otherwise into `Outcome::stdout`.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let config = match (cli.command, &cli.config) {
        (None, Some(path)) => match read_config(path) {
            Ok(c) => c,
            Err(Usage(m)) => return usage(m),
        },
        (Some(_), Some(_)) => return usage("--config replaces the subcommand; give one or the other".into()),
        (Some(cmd), None) => {
            let (command, opts) = split(cmd);
            from_opts(command, opts)
        }
        (None, None) => return usage("a subcommand or --config is required (see --help)".into()),
    };
    if let Err(Usage(m)) = validate(&config) {
        return usage(m);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers(cli.workers)).build() {
        Ok(p) => p,
        Err(e) => return usage(format!("cannot start worker pool: {e}")),
    };
    pool.install(|| execute(config))
}

fn execute(mut config: RunConfig) -> Outcome {
    let map = if config.command.needs_map() {
        match load_map(&config) {
            Ok(m) => Some(m),
            Err(e) => return Outcome { code: 1, stdout: error_json(&e, Some(&config)), stderr: String::new() },
        }
    } else {
        None
    };
    let (f, label) = match &map {
        Some((f, l)) => (Some(f), l.as_str()),
        None => (None, ""),
    };
    let body = resolve(&mut config, f).and_then(|_| dispatch(&config, f, label));
    let text = body.and_then(|b| match b {
        Body::Json(v) => to_json_string(&with_config(v, &config)?),
        Body::Csv(mut s) => {
            s.push_str("# config: ");
            s.push_str(&serde_json::to_string(&config)?);
            s.push('\n');
            Ok(s)
        }
    });
    let text = match text {
        Ok(t) => t,
        Err(e) => return Outcome { code: 1, stdout: error_json(&e, Some(&config)), stderr: String::new() },
    };
    match &config.output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome::default(),
            Err(e) => {
                let e = Error::Io(e);
                Outcome { code: 1, stdout: error_json(&e, Some(&config)), stderr: String::new() }
            }
        },
        None => Outcome { code: 0, stdout: text, stderr: String::new() },
    }
}
