//! Command-line front end: spectra, gap reports, verification suites, and
//! walk simulation. Every artifact embeds the effective configuration and
//! the toolkit version so a run can be reproduced from its own output.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical or
//! runtime failure, 4 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use kacgap::density::{AngularDensity, ScatteringWeight};
use kacgap::gap::{
    gap_recursion_lower, kac_gap_exact, lambda2_kac, moment_scan_cap, shuffle_gap_closed_form,
    GapReport,
};
use kacgap::model::ModelSpec;
use kacgap::simulate::{estimate_gap, run_walk, uniform_times, Observable, SimulationPlan};
use kacgap::spectra::{
    boltzmann_spectrum_table, kac_spectrum_table, shuffle_k_spectrum, son_spectrum_table,
};
use kacgap::verify::{kac_k_quadrature_gate, run_suite, SuiteReport, SUITE_NAMES};
use kacgap::{Error, VERSION};

const DEFAULT_MAX_DEGREE: usize = 8;
const DEFAULT_K_MAX: usize = 8;
const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_P: f64 = 1.0;
const DEFAULT_TRAJ: usize = 1000;
const DEFAULT_TIME_STEP: f64 = 0.5;
const DEFAULT_TIME_COUNT: usize = 12;

#[derive(Parser)]
#[command(
    name = "kacgap",
    version,
    about = "Spectral gaps of Kac-type random collision models",
    long_about = "Computes collision-operator spectra and walk gaps in closed form, \
                  re-derives them with independent numerical oracles, and estimates \
                  relaxation rates by direct simulation."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-pair operator spectrum for one model as a JSON table.
    Spectrum(SpectrumArgs),
    /// Gap report for one model: exact value and certified bounds.
    Gap(GapArgs),
    /// Run verification suites; exits 4 if any check fails.
    Verify(VerifyArgs),
    /// Simulate trajectories and fit the relaxation rate.
    Simulate(SimulateArgs),
    /// Pretty-print a JSON artifact produced by the other commands.
    Table(TableArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Config file of `key = value` lines mirroring the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the KACGAP_WORKERS environment variable).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Model: kac | boltzmann | shuffle | son.
    #[arg(long)]
    model: Option<String>,
    /// Number of particles / cards / matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Largest polynomial degree listed (kac, son). Default 8.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Radial index depth of the collision-model scan. Default 8.
    #[arg(long)]
    k_max: Option<usize>,
    /// Recompute the kac table by quadrature on an n-node grid instead of
    /// the closed form (cross-check path).
    #[arg(long)]
    grid: Option<usize>,
    /// Worst deviation allowed between quadrature and closed form. Default 1e-8.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct GapArgs {
    /// Model: kac | boltzmann | shuffle | son.
    #[arg(long)]
    model: Option<String>,
    /// Single system size to report (JSON).
    #[arg(long)]
    n: Option<usize>,
    /// Emit a CSV table of reports for every size from the base up to this.
    #[arg(long)]
    n_max: Option<usize>,
    /// Angle density: `uniform` or `a2=0.5,a4=-0.1`.
    #[arg(long)]
    rho: Option<String>,
    /// Transposition success probability (shuffle). Default 1.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`. Known suites: kac-small-n, shuffle-bruteforce,
    /// boltzmann-eigen, marginals, recursion-consistency, theorem71.
    #[arg(long)]
    suite: Option<String>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model: kac | boltzmann | shuffle | son.
    #[arg(long)]
    model: Option<String>,
    /// Number of particles / cards / matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Angle density (kac, son): `uniform` or `a2=0.5,...`.
    #[arg(long)]
    rho: Option<String>,
    /// Scattering weight (boltzmann): `uniform` or comma-separated grid.
    #[arg(long)]
    b: Option<String>,
    /// Transposition success probability (shuffle). Default 1.
    #[arg(long)]
    p: Option<f64>,
    /// Master seed; required so runs are reproducible.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of trajectories. Default 1000.
    #[arg(long)]
    traj: Option<usize>,
    /// Sampling times: `step:count` or an explicit `0,0.5,1,...` list
    /// starting at 0. Default 0.5:12.
    #[arg(long)]
    times: Option<String>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct TableArgs {
    /// Artifact to render.
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                Error::InvalidInput(_) => ExitCode::from(2),
                Error::Numerical(_) => ExitCode::from(3),
                Error::VerificationFailed(_) => ExitCode::from(4),
            }
        }
    }
}

fn run(cli: Cli) -> kacgap::Result<()> {
    match cli.cmd {
        Cmd::Spectrum(args) => cmd_spectrum(args),
        Cmd::Gap(args) => cmd_gap(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Table(args) => cmd_table(args),
    }
}

/// Flat key/value view of a config file plus flag overrides. Keys use
/// underscores; hyphens in the file are normalized.
struct Settings {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "model", "n", "n_max", "rho", "b", "p", "max_degree", "k_max", "grid", "tol", "seed",
    "traj", "times", "out", "workers", "suite",
];

impl Settings {
    fn from_config(path: Option<&Path>) -> kacgap::Result<Settings> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(Error::invalid(format!(
                        "config line {} is not `key = value`: {raw:?}",
                        lineno + 1
                    )));
                };
                let key = key.trim().replace('-', "_");
                if !KNOWN_KEYS.contains(&key.as_str()) {
                    return Err(Error::invalid(format!(
                        "unknown config key `{key}` on line {}",
                        lineno + 1
                    )));
                }
                values.insert(key, value.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    fn set_flag(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v);
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> kacgap::Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::invalid(format!("cannot parse `{key} = {raw}`"))
            }),
        }
    }

    /// Effective configuration echoed into artifacts.
    fn echo(&self, command: &str) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("command".into(), json!(command));
        for (k, v) in &self.values {
            map.insert(k.clone(), json!(v));
        }
        Value::Object(map)
    }
}

fn init_workers(settings: &Settings) -> kacgap::Result<()> {
    let from_env = std::env::var("KACGAP_WORKERS")
        .ok()
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::invalid(format!("KACGAP_WORKERS={s} is not a thread count")))
        })
        .transpose()?;
    let workers = settings.parse::<usize>("workers")?.or(from_env);
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::invalid("worker count must be positive"));
        }
        // Ignore "already initialized": tests and repeated calls share one pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

fn parse_rho(text: Option<&str>) -> kacgap::Result<AngularDensity> {
    let Some(text) = text else {
        return Ok(AngularDensity::uniform());
    };
    let text = text.trim();
    if text.is_empty() || text.eq_ignore_ascii_case("uniform") {
        return Ok(AngularDensity::uniform());
    }
    // Compact form: a2=0.5,a4=-0.1 sets the cosine coefficients.
    let mut coeffs: Vec<f64> = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let Some((name, value)) = part.split_once('=') else {
            return Err(Error::invalid(format!(
                "density term {part:?} is not of the form a<k>=<value>"
            )));
        };
        let name = name.trim();
        let k: usize = name
            .strip_prefix('a')
            .and_then(|s| s.parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| {
                Error::invalid(format!("density term {part:?} must name a frequency a1, a2, ..."))
            })?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad coefficient in {part:?}")))?;
        if coeffs.len() < k {
            coeffs.resize(k, 0.0);
        }
        coeffs[k - 1] = v;
    }
    AngularDensity::from_unit_coeffs(&coeffs)
}

fn parse_b(text: Option<&str>) -> kacgap::Result<ScatteringWeight> {
    let Some(text) = text else {
        return Ok(ScatteringWeight::Uniform);
    };
    let text = text.trim();
    if text.is_empty() || text.eq_ignore_ascii_case("uniform") {
        return Ok(ScatteringWeight::Uniform);
    }
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad scattering grid value {s:?}")))
        })
        .collect::<kacgap::Result<_>>()?;
    ScatteringWeight::normalized_from_grid(values)
}

fn parse_times(text: Option<&str>) -> kacgap::Result<Vec<f64>> {
    let Some(text) = text else {
        return uniform_times(DEFAULT_TIME_STEP, DEFAULT_TIME_COUNT);
    };
    let text = text.trim();
    if let Some((step, count)) = text.split_once(':') {
        let step: f64 = step
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad time step in {text:?}")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad interval count in {text:?}")))?;
        return uniform_times(step, count);
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad sample time {s:?}")))
        })
        .collect()
}

fn require_n(settings: &Settings) -> kacgap::Result<usize> {
    settings
        .parse::<usize>("n")?
        .ok_or_else(|| Error::invalid("--n is required"))
}

fn model_kind(settings: &Settings) -> kacgap::Result<String> {
    let name = settings
        .get("model")
        .ok_or_else(|| Error::invalid("--model is required (kac | boltzmann | shuffle | son)"))?;
    let canon = match name.trim().to_ascii_lowercase().as_str() {
        "kac" | "kac-sphere" | "sphere" => "kac",
        "boltzmann" | "boltzmann-3d" => "boltzmann",
        "shuffle" | "transposition" => "shuffle",
        "son" | "kac-so-n" | "so-n" => "son",
        other => {
            return Err(Error::invalid(format!(
                "unknown model {other:?}; expected kac | boltzmann | shuffle | son"
            )))
        }
    };
    Ok(canon.to_string())
}

fn build_model(settings: &Settings, kind: &str, n: usize) -> kacgap::Result<ModelSpec> {
    let spec = match kind {
        "kac" => ModelSpec::KacSphere { n, rho: parse_rho(settings.get("rho"))? },
        "boltzmann" => ModelSpec::Boltzmann3d { n, b: parse_b(settings.get("b"))? },
        "shuffle" => ModelSpec::Shuffle {
            n,
            p: settings.parse::<f64>("p")?.unwrap_or(DEFAULT_P),
        },
        "son" => ModelSpec::KacSoN { n, rho: parse_rho(settings.get("rho"))? },
        other => return Err(Error::invalid(format!("unknown model {other:?}"))),
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Serialize)]
struct Artifact<T: Serialize> {
    version: &'static str,
    config: Value,
    result: T,
}

fn emit_json<T: Serialize>(
    settings: &Settings,
    command: &str,
    result: &T,
) -> kacgap::Result<()> {
    let artifact = Artifact { version: VERSION, config: settings.echo(command), result };
    let text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
    emit_text(settings, &(text + "\n"))
}

fn emit_text(settings: &Settings, text: &str) -> kacgap::Result<()> {
    match settings.get("out") {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::numerical(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> kacgap::Result<()> {
    let mut settings = Settings::from_config(args.common.config.as_deref())?;
    settings.set_flag("model", args.model);
    settings.set_flag("n", args.n.map(|v| v.to_string()));
    settings.set_flag("max_degree", args.max_degree.map(|v| v.to_string()));
    settings.set_flag("k_max", args.k_max.map(|v| v.to_string()));
    settings.set_flag("grid", args.grid.map(|v| v.to_string()));
    settings.set_flag("tol", args.tol.map(|v| v.to_string()));
    settings.set_flag("out", args.common.out.map(|p| p.display().to_string()));
    settings.set_flag("workers", args.common.workers.map(|v| v.to_string()));
    init_workers(&settings)?;

    let kind = model_kind(&settings)?;
    let n = require_n(&settings)?;
    let max_degree = settings.parse::<usize>("max_degree")?.unwrap_or(DEFAULT_MAX_DEGREE);
    let table = match (kind.as_str(), settings.parse::<usize>("grid")?) {
        ("kac", Some(grid)) => {
            let tol = settings.parse::<f64>("tol")?.unwrap_or(DEFAULT_TOL);
            kac_k_quadrature_gate(n, grid, tol)?
        }
        (_, Some(_)) => {
            return Err(Error::invalid(
                "--grid recomputes the kac table by quadrature and applies to --model kac only",
            ))
        }
        ("kac", None) => kac_spectrum_table(n, max_degree)?,
        ("son", None) => son_spectrum_table(n, max_degree)?,
        ("shuffle", None) => shuffle_k_spectrum(n)?,
        ("boltzmann", None) => {
            let k_max = settings.parse::<usize>("k_max")?.unwrap_or(DEFAULT_K_MAX);
            boltzmann_spectrum_table(n, k_max)?
        }
        _ => unreachable!(),
    };
    emit_json(&settings, "spectrum", &table)
}

fn gap_base_delta2(settings: &Settings, kind: &str) -> kacgap::Result<f64> {
    match kind {
        "kac" | "son" => {
            let rho = parse_rho(settings.get("rho"))?;
            let lambda2 = lambda2_kac(&rho, moment_scan_cap(&rho))?;
            Ok(2.0 * (1.0 - lambda2))
        }
        "shuffle" => {
            let p = settings.parse::<f64>("p")?.unwrap_or(DEFAULT_P);
            Ok(4.0 * p)
        }
        // The collision-model base gap is not derived here; the recursion
        // reports factors relative to a unit base, as its notes say.
        "boltzmann" => Ok(1.0),
        other => Err(Error::invalid(format!("unknown model {other:?}"))),
    }
}

fn gap_csv(reports: &[GapReport], settings: &Settings, command: &str) -> kacgap::Result<String> {
    let mut out = String::new();
    let config = serde_json::to_string(&settings.echo(command))
        .map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
    let _ = writeln!(out, "# version={VERSION}");
    let _ = writeln!(out, "# config={config}");
    let _ = writeln!(out, "N,kappa,beta,mu,delta_lower,delta_upper,delta_exact,sharp");
    for r in reports {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{},{},{},{}",
            r.n_particles,
            r.kappa,
            r.beta,
            r.mu,
            opt(r.delta_lower),
            opt(r.delta_upper),
            opt(r.delta_exact),
            r.sharp
        );
    }
    Ok(out)
}

fn cmd_gap(args: GapArgs) -> kacgap::Result<()> {
    let mut settings = Settings::from_config(args.common.config.as_deref())?;
    settings.set_flag("model", args.model);
    settings.set_flag("n", args.n.map(|v| v.to_string()));
    settings.set_flag("n_max", args.n_max.map(|v| v.to_string()));
    settings.set_flag("rho", args.rho);
    settings.set_flag("p", args.p.map(|v| v.to_string()));
    settings.set_flag("out", args.common.out.map(|p| p.display().to_string()));
    settings.set_flag("workers", args.common.workers.map(|v| v.to_string()));
    init_workers(&settings)?;

    let kind = model_kind(&settings)?;
    if let Some(n_max) = settings.parse::<usize>("n_max")? {
        let spec = build_model(&settings, &kind, n_max)?;
        let base = gap_base_delta2(&settings, &kind)?;
        let reports = gap_recursion_lower(&spec, n_max, base)?;
        let csv = gap_csv(&reports, &settings, "gap")?;
        return emit_text(&settings, &csv);
    }

    let n = require_n(&settings)?;
    let report = match kind.as_str() {
        "kac" => kac_gap_exact(&parse_rho(settings.get("rho"))?, n)?,
        "son" => {
            let mut r = kac_gap_exact(&parse_rho(settings.get("rho"))?, n)?;
            r.notes.push(
                "rotation-walk spectrum coincides with the sphere walk; the report is shared"
                    .to_string(),
            );
            r
        }
        "shuffle" => {
            shuffle_gap_closed_form(n, settings.parse::<f64>("p")?.unwrap_or(DEFAULT_P))?
        }
        "boltzmann" => {
            let spec = build_model(&settings, &kind, n)?;
            let base = gap_base_delta2(&settings, &kind)?;
            gap_recursion_lower(&spec, n, base)?
                .pop()
                .ok_or_else(|| Error::numerical("empty recursion"))?
        }
        _ => unreachable!(),
    };
    report.validate()?;
    emit_json(&settings, "gap", &report)
}

fn cmd_verify(args: VerifyArgs) -> kacgap::Result<()> {
    let mut settings = Settings::from_config(args.common.config.as_deref())?;
    settings.set_flag("suite", args.suite);
    settings.set_flag("out", args.common.out.map(|p| p.display().to_string()));
    settings.set_flag("workers", args.common.workers.map(|v| v.to_string()));
    init_workers(&settings)?;

    let which = settings.get("suite").unwrap_or("all").to_string();
    let reports: Vec<SuiteReport> = if which == "all" {
        SUITE_NAMES
            .iter()
            .map(|name| run_suite(name))
            .collect::<kacgap::Result<_>>()?
    } else {
        vec![run_suite(&which)?]
    };
    emit_json(&settings, "verify", &reports)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| {
            let bad = r.checks.iter().filter(|c| !c.pass).count();
            format!("{} ({bad} checks)", r.suite)
        })
        .collect();
    if !failed.is_empty() {
        return Err(Error::VerificationFailed(format!(
            "failed suites: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> kacgap::Result<()> {
    let mut settings = Settings::from_config(args.common.config.as_deref())?;
    settings.set_flag("model", args.model);
    settings.set_flag("n", args.n.map(|v| v.to_string()));
    settings.set_flag("rho", args.rho);
    settings.set_flag("b", args.b);
    settings.set_flag("p", args.p.map(|v| v.to_string()));
    settings.set_flag("seed", args.seed.map(|v| v.to_string()));
    settings.set_flag("traj", args.traj.map(|v| v.to_string()));
    settings.set_flag("times", args.times);
    settings.set_flag("out", args.common.out.map(|p| p.display().to_string()));
    settings.set_flag("workers", args.common.workers.map(|v| v.to_string()));
    init_workers(&settings)?;

    let kind = model_kind(&settings)?;
    let n = require_n(&settings)?;
    let spec = build_model(&settings, &kind, n)?;
    let seed = settings
        .parse::<u64>("seed")?
        .ok_or_else(|| Error::invalid("--seed is required so the run is reproducible"))?;
    let plan = SimulationPlan {
        observable: Observable::default_for(&spec),
        spec,
        times: parse_times(settings.get("times"))?,
        trajectories: settings.parse::<usize>("traj")?.unwrap_or(DEFAULT_TRAJ),
        seed,
    };
    let ensemble = run_walk(&plan)?;

    // Trajectory CSV goes to --out when given; the fitted rate always goes
    // to stdout.
    if let Some(path) = settings.get("out") {
        let mut csv = String::new();
        let config = serde_json::to_string(&settings.echo("simulate"))
            .map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
        let _ = writeln!(csv, "# version={VERSION}");
        let _ = writeln!(csv, "# config={config}");
        let _ = writeln!(csv, "trajectory,t,observable_name,value");
        let name = ensemble.observable.name();
        for (m, row) in ensemble.values.iter().enumerate() {
            for (t, v) in ensemble.times.iter().zip(row) {
                let _ = writeln!(csv, "{m},{t:.16e},{name},{v:.16e}");
            }
        }
        std::fs::write(path, csv)
            .map_err(|e| Error::numerical(format!("cannot write {path}: {e}")))?;
    }

    let estimate = estimate_gap(&ensemble)?;
    let artifact = Artifact {
        version: VERSION,
        config: settings.echo("simulate"),
        result: &estimate,
    };
    let text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn cmd_table(args: TableArgs) -> kacgap::Result<()> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", args.file.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("{} is not JSON: {e}", args.file.display())))?;
    print!("{}", render_artifact(&value));
    Ok(())
}

fn render_artifact(value: &Value) -> String {
    let mut out = String::new();
    let inner = if let Some(obj) = value.as_object() {
        if let (Some(version), Some(result)) = (obj.get("version"), obj.get("result")) {
            let command = obj
                .get("config")
                .and_then(|c| c.get("command"))
                .and_then(|c| c.as_str())
                .unwrap_or("?");
            let _ = writeln!(out, "kacgap {} artifact (version {})", command, version);
            result
        } else {
            value
        }
    } else {
        value
    };
    out + &render_value(inner)
}

fn render_value(v: &Value) -> String {
    if let Some(rows) = spectrum_rows(v) {
        return rows;
    }
    if let Some(rows) = suite_rows(v) {
        return rows;
    }
    if let Some(rows) = gap_rows(v) {
        return rows;
    }
    if let Some(obj) = v.as_object() {
        if obj.contains_key("rate") && obj.contains_key("stderr") {
            let mut out = String::new();
            for key in ["rate", "stderr", "window", "n_events"] {
                if let Some(x) = obj.get(key) {
                    let _ = writeln!(out, "{key:>10}: {x}");
                }
            }
            return out;
        }
    }
    serde_json::to_string_pretty(v).map(|s| s + "\n").unwrap_or_default()
}

fn spectrum_rows(v: &Value) -> Option<String> {
    let obj = v.as_object()?;
    let entries = obj.get("entries")?.as_array()?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "model {}  N={}",
        obj.get("model").and_then(|m| m.as_str()).unwrap_or("?"),
        obj.get("N").map(|n| n.to_string()).unwrap_or_else(|| "?".into())
    );
    let _ = writeln!(out, "{:>4} {:>4} {:>10} {:>24} {:>14}", "n", "l", "class", "value", "mult");
    for e in entries {
        let cell = |key: &str| {
            e.get(key)
                .filter(|x| !x.is_null())
                .map(|x| x.to_string().trim_matches('"').to_string())
                .unwrap_or_else(|| "-".into())
        };
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:>10} {:>24} {:>14}",
            cell("n"),
            cell("l"),
            cell("class"),
            cell("value"),
            cell("multiplicity"),
        );
    }
    Some(out)
}

fn suite_rows(v: &Value) -> Option<String> {
    let list: Vec<&Value> = match v {
        Value::Array(items) if items.iter().all(|i| i.get("checks").is_some()) && !items.is_empty() => {
            items.iter().collect()
        }
        Value::Object(obj) if obj.contains_key("checks") => vec![v],
        _ => return None,
    };
    let mut out = String::new();
    for suite in list {
        let _ = writeln!(
            out,
            "suite {} -- {}",
            suite.get("suite").and_then(|s| s.as_str()).unwrap_or("?"),
            if suite.get("passed").and_then(|p| p.as_bool()).unwrap_or(false) {
                "PASS"
            } else {
                "FAIL"
            }
        );
        if let Some(checks) = suite.get("checks").and_then(|c| c.as_array()) {
            for c in checks {
                let _ = writeln!(
                    out,
                    "  [{}] {:<32} computed {} expected {} tol {}",
                    if c.get("pass").and_then(|p| p.as_bool()).unwrap_or(false) {
                        "ok"
                    } else {
                        "XX"
                    },
                    c.get("check_id").and_then(|s| s.as_str()).unwrap_or("?"),
                    c.get("computed").map(|x| x.to_string()).unwrap_or_default(),
                    c.get("expected").map(|x| x.to_string()).unwrap_or_default(),
                    c.get("tolerance").map(|x| x.to_string()).unwrap_or_default(),
                );
            }
        }
    }
    Some(out)
}

fn gap_rows(v: &Value) -> Option<String> {
    let report = v.as_object()?;
    if !report.contains_key("delta2") || !report.contains_key("mu") {
        return None;
    }
    let mut out = String::new();
    for key in [
        "N", "lambda2", "delta2", "kappa", "beta", "mu", "delta_lower", "delta_upper",
        "delta_exact", "sharp", "sector",
    ] {
        if let Some(x) = report.get(key) {
            let _ = writeln!(out, "{key:>12}: {x}");
        }
    }
    if let Some(notes) = report.get("notes").and_then(|n| n.as_array()) {
        for note in notes {
            let _ = writeln!(out, "{:>12}: {}", "note", note.as_str().unwrap_or(""));
        }
    }
    Some(out)
}
