//! The `kleinlab` command line: argument parsing, config files, report
//! envelopes and exit codes.
//!
//! Exit status is 0 on success, 1 when a run fails a check or hits a
//! runtime error (the report is still written when possible), 2 on usage
//! errors.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::audit::{boundary_oracle_audit, gamma_audit, radial_criterion_audit};
use crate::boundary::LimitSetSample;
use crate::embedding::embed_tree_ball;
use crate::group::{
    discreteness_audit, enumerate_ball, limit_set_sample_with, schottky_h2, SampleMethod, SampleOptions,
};
use crate::render::render_svg;
use crate::scenario::{
    scenario_h4, scenario_nonrigidity, scenario_normal_subgroup, H4Params, NonrigidityParams,
    NormalSubgroupParams,
};
use crate::tolerance;

pub const SCHEMA: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kleinlab", version, about = "Kleinian group and tree-embedding laboratory")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write point data as CSV (`word,c0,c1,...`).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Render the limit-set sample as SVG.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `key = value` lines; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Embed wall time in the report. Off by default so reports are reproducible byte for byte.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a ball of the free-group tree into hyperbolic space.
    Embed(EmbedArgs),
    /// Exact checks of the tree automorphism γ.
    GammaProbe(GammaArgs),
    /// Run one of the worked counterexamples.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Ping-pong certificate, orbit and limit set of a Schottky pair in ℍ².
    Schottky(SchottkyArgs),
    /// Numerical audits of the boundary calculus.
    #[command(subcommand)]
    Audit(AuditCmd),
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    radius: Option<usize>,
}

#[derive(Debug, Args)]
struct GammaArgs {
    #[arg(long)]
    x_radius: Option<usize>,
    #[arg(long)]
    test_radius: Option<usize>,
    #[arg(long)]
    edge_radius: Option<usize>,
    #[arg(long)]
    involution_radius: Option<usize>,
    #[arg(long)]
    homomorphy_radius: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum ScenarioCmd {
    /// Two groups with equal limit sets and trivial intersection.
    Nonrigidity {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        tree_radius: Option<usize>,
        #[arg(long)]
        word_depth: Option<usize>,
    },
    /// Agreement on a plane in ℍ⁴.
    H4 {
        #[arg(long)]
        ell_g: Option<f64>,
        #[arg(long)]
        ell_h: Option<f64>,
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Truncated normal closures in a Schottky group.
    NormalSubgroup {
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        n_conjugates: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct SchottkyArgs {
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    /// `projection` or `fixed-points`.
    #[arg(long)]
    method: Option<String>,
    /// Radius of the discreteness ball.
    #[arg(long)]
    audit_radius: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum AuditCmd {
    /// Busemann and Gromov closed forms against their limit oracles.
    Boundary {
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Gromov products along rays and along a parabolic orbit.
    Radial {
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Debug)]
struct Usage(String);

impl<E: Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Types parameters and fills defaults. Every resolved value is echoed
/// into the report.
struct Resolver {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    echo: Map<String, Value>,
}

impl Resolver {
    fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            used: BTreeSet::new(),
            echo: Map::new(),
        }
    }

    fn get<T>(&mut self, key: &str, default: T) -> std::result::Result<T, Usage>
    where
        T: FromStr + Into<Value> + Clone,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let v = match self.file.get(key) {
            Some(s) => s
                .parse()
                .map_err(|e| Usage(format!("parameter {key}: cannot parse {s:?}: {e}")))?,
            None => default,
        };
        self.echo.insert(key.to_string(), v.clone().into());
        Ok(v)
    }

    fn finish(&self) -> std::result::Result<(), Usage> {
        let unknown: Vec<&str> = self
            .file
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Usage(format!("unknown config keys for this command: {}", unknown.join(", "))))
        }
    }
}

/// Reads `key = value` lines. Blank lines and lines starting with `#` are
/// skipped. Keys use the long flag names.
pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let k = k.trim().replace('_', "-");
        let v = v.trim().trim_matches('"').to_string();
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if out.insert(k.clone(), v).is_some() {
            return Err(format!("line {}: duplicate key {k}", i + 1));
        }
    }
    Ok(out)
}

/// What a command produced, before outputs are written.
struct Outcome {
    result: Value,
    pass: bool,
    csv: Option<String>,
    sample: Option<LimitSetSample>,
}

/// The command a [`RunConfig`] names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Embed,
    GammaProbe,
    ScenarioNonrigidity,
    ScenarioH4,
    ScenarioNormalSubgroup,
    Schottky,
    AuditBoundary,
    AuditRadial,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Embed => "embed",
            CommandKind::GammaProbe => "gamma-probe",
            CommandKind::ScenarioNonrigidity => "scenario nonrigidity",
            CommandKind::ScenarioH4 => "scenario h4",
            CommandKind::ScenarioNormalSubgroup => "scenario normal-subgroup",
            CommandKind::Schottky => "schottky",
            CommandKind::AuditBoundary => "audit boundary",
            CommandKind::AuditRadial => "audit radial",
        }
    }
}

/// A fully parsed invocation. `parameters` maps long flag names to their
/// textual values; values are typed, and defaults filled in, by [`execute`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub parameters: BTreeMap<String, String>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: u64,
    /// Embed wall time in the report.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            report: None,
            csv: None,
            svg: None,
            seed: 0,
            timing: false,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }
}

type Job = Box<dyn FnOnce(u64) -> crate::Result<Outcome>>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(cfg) => execute(&cfg),
        Err(code) => code,
    }
}

/// Parses arguments and the optional config file. On failure the message
/// has been printed and the exit code is returned.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Err(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    from_cli(cli).map_err(|Usage(msg)| {
        eprintln!("error: {msg}");
        EXIT_USAGE
    })
}

fn put<T: ToString>(m: &mut BTreeMap<String, String>, key: &str, flag: Option<T>) {
    if let Some(v) = flag {
        m.insert(key.into(), v.to_string());
    }
}

fn from_cli(cli: Cli) -> std::result::Result<RunConfig, Usage> {
    let mut m = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?
        }
        None => BTreeMap::new(),
    };
    let command = match cli.command {
        Command::Embed(a) => {
            put(&mut m, "lambda", a.lambda);
            put(&mut m, "radius", a.radius);
            CommandKind::Embed
        }
        Command::GammaProbe(a) => {
            put(&mut m, "x-radius", a.x_radius);
            put(&mut m, "test-radius", a.test_radius);
            put(&mut m, "edge-radius", a.edge_radius);
            put(&mut m, "involution-radius", a.involution_radius);
            put(&mut m, "homomorphy-radius", a.homomorphy_radius);
            CommandKind::GammaProbe
        }
        Command::Scenario(ScenarioCmd::Nonrigidity {
            lambda,
            tree_radius,
            word_depth,
        }) => {
            put(&mut m, "lambda", lambda);
            put(&mut m, "tree-radius", tree_radius);
            put(&mut m, "word-depth", word_depth);
            CommandKind::ScenarioNonrigidity
        }
        Command::Scenario(ScenarioCmd::H4 {
            ell_g,
            ell_h,
            separation,
            theta,
            depth,
        }) => {
            put(&mut m, "ell-g", ell_g);
            put(&mut m, "ell-h", ell_h);
            put(&mut m, "separation", separation);
            put(&mut m, "theta", theta);
            put(&mut m, "depth", depth);
            CommandKind::ScenarioH4
        }
        Command::Scenario(ScenarioCmd::NormalSubgroup {
            ell,
            separation,
            n_conjugates,
            depth,
        }) => {
            put(&mut m, "ell", ell);
            put(&mut m, "separation", separation);
            put(&mut m, "n-conjugates", n_conjugates);
            put(&mut m, "depth", depth);
            CommandKind::ScenarioNormalSubgroup
        }
        Command::Schottky(a) => {
            put(&mut m, "ell", a.ell);
            put(&mut m, "separation", a.separation);
            put(&mut m, "depth", a.depth);
            put(&mut m, "method", a.method);
            put(&mut m, "audit-radius", a.audit_radius);
            CommandKind::Schottky
        }
        Command::Audit(AuditCmd::Boundary { instances, dim, t }) => {
            put(&mut m, "instances", instances);
            put(&mut m, "dim", dim);
            put(&mut m, "t", t);
            CommandKind::AuditBoundary
        }
        Command::Audit(AuditCmd::Radial { steps }) => {
            put(&mut m, "steps", steps);
            CommandKind::AuditRadial
        }
    };
    let mut take_path = |key: &str, flag: Option<PathBuf>| flag.or_else(|| m.remove(key).map(PathBuf::from));
    let report = take_path("report", cli.report);
    let csv = take_path("csv", cli.csv);
    let svg = take_path("svg", cli.svg);
    let seed = match (cli.seed, m.remove("seed")) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(|e| Usage(format!("config key seed: cannot parse {s:?}: {e}")))?,
        (None, None) => 0,
    };
    Ok(RunConfig {
        command,
        parameters: m,
        report,
        csv,
        svg,
        seed,
        timing: cli.timing,
    })
}

/// Executes a configuration: runs the command, writes the declared outputs
/// and returns the exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let (job, echo) = match build_job(cfg) {
        Ok(p) => p,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let name = cfg.command.name();
    let start = Instant::now();
    let outcome = job(cfg.seed);
    let elapsed = start.elapsed().as_secs_f64();

    let mut env = Map::new();
    env.insert("schema".into(), SCHEMA.into());
    env.insert("tool".into(), "kleinlab".into());
    env.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    env.insert("command".into(), name.into());
    env.insert("config".into(), Value::Object(echo));
    env.insert("seed".into(), cfg.seed.into());
    if cfg.timing {
        env.insert("wall_time_s".into(), json!(elapsed));
    }
    let mut code = EXIT_OK;
    match outcome {
        Ok(o) => {
            env.insert("overall_pass".into(), o.pass.into());
            env.insert("result".into(), o.result);
            if !o.pass {
                code = EXIT_FAIL;
            }
            if let (Some(path), Some(text)) = (&cfg.csv, &o.csv) {
                if let Err(e) = write_file(path, text) {
                    eprintln!("error: {e}");
                    code = EXIT_FAIL;
                }
            }
            if let (Some(path), Some(sample)) = (&cfg.svg, &o.sample) {
                if let Err(e) = render_svg(sample).map_err(|e| e.to_string()).and_then(|s| write_file(path, &s)) {
                    eprintln!("error: svg: {e}");
                    env.insert("render_error".into(), e.into());
                    code = EXIT_FAIL;
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            env.insert("overall_pass".into(), false.into());
            env.insert("error".into(), e.to_string().into());
            code = EXIT_FAIL;
        }
    }
    let passed = env.get("overall_pass") == Some(&Value::Bool(true));
    let text = match serde_json::to_string_pretty(&Value::Object(env)) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    match &cfg.report {
        Some(path) => {
            if let Err(e) = write_file(path, &text) {
                eprintln!("error: {e}");
                code = EXIT_FAIL;
            }
        }
        None => print!("{text}"),
    }
    let verdict = match (passed, code == EXIT_OK) {
        (true, true) => "pass",
        (true, false) => "pass, but output failed",
        _ => "FAIL",
    };
    eprintln!("{name}: {verdict} in {elapsed:.3} s");
    code
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn audit_outcome<T: serde::Serialize>(pass: bool, rep: &T) -> crate::Result<Outcome> {
    Ok(Outcome {
        pass,
        result: to_value(rep)?,
        csv: None,
        sample: None,
    })
}

/// Types the parameters, fills defaults and returns the work with the
/// config echo.
fn build_job(cfg: &RunConfig) -> std::result::Result<(Job, Map<String, Value>), Usage> {
    let mut r = Resolver::new(cfg.parameters.clone());
    r.echo.insert("seed".into(), cfg.seed.into());
    for (k, p) in [("report", &cfg.report), ("csv", &cfg.csv), ("svg", &cfg.svg)] {
        if let Some(p) = p {
            r.echo.insert(k.into(), p.display().to_string().into());
        }
    }
        let (job, csv_ok, svg_ok): (Job, bool, bool) = match cfg.command {
        CommandKind::Embed => {
            let lambda = r.get("lambda", 2.0)?;
            let radius = r.get("radius", 3usize)?;
            (Box::new(move |_| embed(lambda, radius)), true, false)
        }
        CommandKind::GammaProbe => {
            let x = r.get("x-radius", 4usize)?;
            let t = r.get("test-radius", 2usize)?;
            let e = r.get("edge-radius", 8usize)?;
            let i = r.get("involution-radius", 10usize)?;
            let h = r.get("homomorphy-radius", 4usize)?;
            let job: Job = Box::new(move |_| {
                let rep = gamma_audit(e, i, h, x, t)?;
                audit_outcome(rep.pass, &rep)
            });
            (job, false, false)
        }
        CommandKind::ScenarioNonrigidity => {
            let d = NonrigidityParams::default();
            let p = NonrigidityParams {
                lambda: r.get("lambda", d.lambda)?,
                tree_radius: r.get("tree-radius", d.tree_radius)?,
                word_depth: r.get("word-depth", d.word_depth)?,
                seed: 0,
            };
            let job: Job = Box::new(move |seed| scenario_outcome(scenario_nonrigidity(NonrigidityParams { seed, ..p })?));
            (job, true, true)
        }
        CommandKind::ScenarioH4 => {
            let d = H4Params::default();
            let p = H4Params {
                ell_g: r.get("ell-g", d.ell_g)?,
                ell_h: r.get("ell-h", d.ell_h)?,
                separation: r.get("separation", d.separation)?,
                theta: r.get("theta", d.theta)?,
                depth: r.get("depth", d.depth)?,
                seed: 0,
            };
            (Box::new(move |seed| scenario_outcome(scenario_h4(H4Params { seed, ..p })?)), true, true)
        }
        CommandKind::ScenarioNormalSubgroup => {
            let d = NormalSubgroupParams::default();
            let p = NormalSubgroupParams {
                ell: r.get("ell", d.ell)?,
                separation: r.get("separation", d.separation)?,
                n_conjugates: r.get("n-conjugates", d.n_conjugates)?,
                depth: r.get("depth", d.depth)?,
                seed: 0,
            };
            let job: Job =
                Box::new(move |seed| scenario_outcome(scenario_normal_subgroup(NormalSubgroupParams { seed, ..p })?));
            (job, true, true)
        }
        CommandKind::Schottky => {
            let ell = r.get("ell", 2.0)?;
            let sep = r.get("separation", 2.0)?;
            let depth = r.get("depth", 6usize)?;
            let method = r.get("method", "projection".to_string())?;
            let method = match method.as_str() {
                "projection" => SampleMethod::OrbitProjection,
                "fixed-points" => SampleMethod::AttractingFixedPoints,
                other => return Err(Usage(format!("unknown method {other:?}; use projection or fixed-points"))),
            };
            let radius = r.get("audit-radius", 8.0)?;
            (Box::new(move |_| schottky(ell, sep, depth, method, radius)), true, true)
        }
        CommandKind::AuditBoundary => {
            let n = r.get("instances", 100usize)?;
            let d = r.get("dim", 3usize)?;
            let t = r.get("t", 30.0)?;
            let job: Job = Box::new(move |seed| {
                let rep = boundary_oracle_audit(n, d, t, seed)?;
                audit_outcome(rep.pass, &rep)
            });
            (job, false, false)
        }
        CommandKind::AuditRadial => {
            let n = r.get("steps", 100usize)?;
            let job: Job = Box::new(move |_| {
                let rep = radial_criterion_audit(n)?;
                audit_outcome(rep.pass, &rep)
            });
            (job, false, false)
        }
    };
    let name = cfg.command.name();
    if cfg.csv.is_some() && !csv_ok {
        return Err(Usage(format!("{name} has no point data for --csv")));
    }
    if cfg.svg.is_some() && !svg_ok {
        return Err(Usage(format!("{name} has no limit set for --svg")));
    }
    r.finish()?;
    Ok((job, r.echo))
}

fn to_value<T: serde::Serialize>(v: &T) -> crate::Result<Value> {
    serde_json::to_value(v).map_err(|e| crate::Error::Io(e.to_string()))
}

fn scenario_outcome(rep: crate::scenario::ScenarioReport) -> crate::Result<Outcome> {
    let mut csv = String::new();
    for (k, s) in rep.samples.iter().enumerate() {
        let text = labelled_csv(s);
        // One header for the whole file; samples of a scenario share a dimension.
        let body = text.split_once('\n').map_or("", |(_, b)| b);
        if k == 0 {
            csv.push_str(text.split_once('\n').map_or("", |(h, _)| h));
            csv.push('\n');
        }
        csv.push_str(body);
    }
    Ok(Outcome {
        pass: rep.overall_pass,
        result: to_value(&rep)?,
        csv: Some(csv),
        sample: rep.samples.first().cloned(),
    })
}

/// The sample CSV with `group:word` in the word column.
fn labelled_csv(s: &LimitSetSample) -> String {
    let mut t = s.clone();
    t.words = (0..s.len())
        .map(|i| {
            let w = s.words.get(i).cloned().unwrap_or_else(|| i.to_string());
            format!("{}:{}", s.group_label, w)
        })
        .collect();
    t.to_csv()
}

fn embed(lambda: f64, radius: usize) -> crate::Result<Outcome> {
    let e = embed_tree_ball(radius, lambda)?;
    let positive = e.gram_spectrum.iter().filter(|&&v| v > 0.0).count();
    let mut csv = crate::group::csv_header(e.ambient_dim);
    for (w, p) in e.vertices.iter().zip(&e.points) {
        crate::group::csv_row(&mut csv, &w.to_string(), p.coords().iter());
    }
    let pass = e.max_rel_residual <= tolerance::METRIC;
    Ok(Outcome {
        result: json!({
            "lambda": e.lambda,
            "radius": e.radius,
            "vertices": e.len(),
            "ambient_dim": e.ambient_dim,
            "max_rel_residual": e.max_rel_residual,
            "residual_tolerance": tolerance::METRIC,
            "positive_eigenvalues": positive,
            "gram_spectrum": e.gram_spectrum,
        }),
        pass,
        csv: Some(csv),
        sample: None,
    })
}

fn schottky(ell: f64, sep: f64, depth: usize, method: SampleMethod, radius: f64) -> crate::Result<Outcome> {
    let s = schottky_h2(ell, sep)?;
    let sample = limit_set_sample_with(
        &s.spec,
        depth,
        SampleOptions {
            method,
            translation_length: None,
        },
    )?;
    let orbit = enumerate_ball(&s.spec, depth.min(6))?;
    let disc = discreteness_audit(&orbit, radius)?;
    let pass = disc.collisions == 0 && s.certificate.min_product > 1.0;
    Ok(Outcome {
        result: json!({
            "ell": ell,
            "separation": sep,
            "depth": depth,
            "method": method,
            "certificate": to_value(&s.certificate)?,
            "orbit_depth": orbit.depth,
            "orbit_points": orbit.entries.len(),
            "discreteness": to_value(&disc)?,
            "limit_points": sample.len(),
            "sample_meta": to_value(&sample.meta)?,
        }),
        pass,
        csv: Some(labelled_csv(&sample)),
        sample: Some(sample),
    })
}
