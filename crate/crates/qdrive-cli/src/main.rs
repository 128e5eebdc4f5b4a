//! Batch command-line front end for the `qdrive` simulator.
//!
//! Every subcommand writes its results as data files — CSV for record
//! streams and tables, JSON for run manifests — so figures and tables can
//! be reproduced from the shell without touching the library API.
//!
//! Conventions shared by all subcommands:
//!
//! * Configuration precedence is flags > `--config` TOML file > built-in
//!   defaults. The file uses one table per subcommand with keys named
//!   after the long flags (`[protocol-ideal] n-bar = 100.0`). The fully
//!   resolved configuration is echoed into the JSON manifest together
//!   with a SHA-256 content hash of its canonical serialization.
//! * Floating-point values in CSV files carry 17 significant digits, so
//!   identical (configuration, seed) pairs produce byte-identical files.
//! * The output directory is `--out-dir`, else `$QDRIVE_OUT_DIR`, else
//!   the working directory.
//! * Exit codes: 0 success, 2 invalid configuration or usage, 3 Fock
//!   cutoff inadequate for the requested photon number.

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_complex::Complex64 as C64;
use qdrive::budget::{budget_report, BudgetParams};
use qdrive::error::{
    analytic_error, error_operator_average, error_operator_min, AnalyticGate, AverageMethod,
    DriveFamily, ErrorStatistic,
};
use qdrive::fock::{coherent_state, squeezed_cat_state, squeezed_coherent_state, DriveState};
use qdrive::optimize::{characterize_state, optimal_drive_state};
use qdrive::protocol::{
    run_full, run_ghz, run_ideal, GateSpec, GhzDriveMode, ProtocolConfig, ProtocolRun, TimingRule,
};
use qdrive::recommended_cutoff;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// ---------------------------------------------------------------------
// Command-line grammar
// ---------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "qdrive",
    version,
    about = "Quantum-limited gate fidelity: optimal drive states, error scans, \
             drive-refreshing protocols, and the power budget, as data files"
)]
struct Cli {
    /// TOML file supplying defaults for any subcommand flag
    /// (one table per subcommand, keys named after the long flags).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for output files (default: $QDRIVE_OUT_DIR, else ".").
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity-optimal drive state of a gate: amplitudes, Gaussian fit,
    /// and optionally a Wigner-function grid.
    OptimalState(OptimalStateArgs),
    /// Average/worst-case gate error of a drive family over a list of
    /// photon numbers, with first-order analytic values for comparison.
    ErrorScan(ErrorScanArgs),
    /// Drive-refreshing protocol with ideal (perfectly reset) ancillas.
    ProtocolIdeal(ProtocolArgs),
    /// One drive pulse applying a gate to every qubit of a GHZ register.
    ProtocolGhz(GhzArgs),
    /// Full protocol: corrector pulse plus finite ancillas, nothing ideal.
    ProtocolFull(ProtocolArgs),
    /// Surface-code power-budget table.
    Budget(BudgetArgs),
}

#[derive(Args)]
struct OptimalStateArgs {
    /// Gate: `xpi`, `ypi`, `xpi2`, `ypi2`, or `THETA,PHI` in radians.
    #[arg(long)]
    gate: Option<String>,
    /// Drive mean photon number n̄ (sets gT = θ/(2√n̄)).
    #[arg(long)]
    n_bar: Option<f64>,
    /// Dimensionless interaction time gT (alternative to --n-bar).
    #[arg(long)]
    g_t: Option<f64>,
    /// Fock-space cutoff (default: adequacy rule for the implied n̄).
    #[arg(long)]
    n_cut: Option<usize>,
    /// Bloch-sphere average: `integral` or `axial`.
    #[arg(long)]
    method: Option<String>,
    /// Also write the Wigner function on an N×N phase-space grid.
    #[arg(long, value_name = "N")]
    wigner_grid: Option<usize>,
}

#[derive(Args)]
struct ErrorScanArgs {
    /// Gate: `xpi`, `ypi`, `xpi2`, `ypi2`, or `THETA,PHI` in radians.
    #[arg(long)]
    gate: Option<String>,
    /// Drive family: `coherent`, `squeezed`, or `squeezed-cat`.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated list of mean photon numbers.
    #[arg(long, value_name = "LIST")]
    n_bar: Option<String>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Drive mean photon number n̄.
    #[arg(long)]
    n_bar: Option<f64>,
    /// Gate applied to register qubits (default `xpi`).
    #[arg(long)]
    gate: Option<String>,
    /// Ancillas refreshing the drive per cycle.
    #[arg(long, visible_alias = "M")]
    ancillas: Option<usize>,
    /// Number of protocol cycles.
    #[arg(long)]
    cycles: Option<usize>,
    /// Fock-space cutoff (default: adequacy rule for n̄).
    #[arg(long)]
    n_cut: Option<usize>,
    /// Squeezing magnitude of the initial drive along the gate axis
    /// (default ln√(π/2)).
    #[arg(long)]
    r: Option<f64>,
    /// Interaction-time rule: `condition` (T = θ/(2g√n̄), default) or
    /// `inverse-photon` (T = θ/(2gn̄)).
    #[arg(long)]
    timing: Option<String>,
    /// RNG seed of the first run.
    #[arg(long)]
    seed: Option<u64>,
    /// Fan out this many runs with consecutive seeds.
    #[arg(long)]
    seeds: Option<u64>,
}

#[derive(Args)]
struct GhzArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Register qubits prepared in the GHZ state.
    #[arg(long)]
    ghz_qubits: Option<usize>,
    /// Drive usage: `refreshed`, `disposable-constant`, or
    /// `disposable-split`.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Number of physical qubits.
    #[arg(long)]
    n_qubits: Option<f64>,
    /// π-rotation duration, seconds.
    #[arg(long)]
    t_pi: Option<f64>,
    /// Controlled-phase duration, seconds.
    #[arg(long)]
    t_cz: Option<f64>,
    /// Measurement duration, seconds.
    #[arg(long)]
    t_m: Option<f64>,
    /// π-rotation drive power at the chip, watts.
    #[arg(long)]
    p_pi: Option<f64>,
    /// Controlled-phase drive power, watts.
    #[arg(long)]
    p_cz: Option<f64>,
    /// Measurement drive power, watts.
    #[arg(long)]
    p_m: Option<f64>,
    /// Qubit angular frequency, rad/s.
    #[arg(long)]
    omega: Option<f64>,
    /// Base-stage attenuation as a multiplicative factor (10 dB → 10).
    #[arg(long)]
    attenuation_factor: Option<f64>,
    /// Target average gate error.
    #[arg(long)]
    target_error: Option<f64>,
    /// Additionally write the report as budget.json.
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------
// Error handling and exit codes
// ---------------------------------------------------------------------

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<qdrive::Error> for CliError {
    fn from(e: qdrive::Error) -> Self {
        let code = match e {
            qdrive::Error::CutoffTooSmall { .. } | qdrive::Error::CutoffBelowRule { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::config(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::config(format!("serialization error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::config(format!("csv error: {e}"))
    }
}

/// Error for a flag that is required but was found in neither the
/// command line nor the config file; reproduces the clap usage text.
fn missing_flag(subcommand: &str, flag: &str) -> CliError {
    let mut root = Cli::command();
    let usage = root
        .find_subcommand_mut(subcommand)
        .map(|c| c.render_usage().to_string())
        .unwrap_or_default();
    CliError::config(format!(
        "missing required value for {flag} (flag or config file)\n{usage}"
    ))
}

// ---------------------------------------------------------------------
// Config-file layer
// ---------------------------------------------------------------------

/// The subcommand's table of the `--config` TOML file, if any.
struct FileCfg(Option<toml::Table>);

impl FileCfg {
    fn load(path: Option<&Path>, section: &str) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self(None));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Ok(Self(match table.get(section) {
            Some(toml::Value::Table(t)) => Some(t.clone()),
            Some(other) => {
                return Err(CliError::config(format!(
                    "config section [{section}] must be a table, found {}",
                    other.type_str()
                )))
            }
            None => None,
        }))
    }

    fn f64(&self, key: &str) -> Option<f64> {
        match self.0.as_ref()?.get(key)? {
            toml::Value::Float(v) => Some(*v),
            toml::Value::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn usize(&self, key: &str) -> Option<usize> {
        match self.0.as_ref()?.get(key)? {
            toml::Value::Integer(v) if *v >= 0 => Some(*v as usize),
            _ => None,
        }
    }

    fn u64(&self, key: &str) -> Option<u64> {
        match self.0.as_ref()?.get(key)? {
            toml::Value::Integer(v) if *v >= 0 => Some(*v as u64),
            _ => None,
        }
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.as_ref()?.get(key)?.as_str().map(str::to_owned)
    }
}

// ---------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------

/// 17 significant digits: enough to reconstruct the exact f64.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_gate(s: &str) -> Result<GateSpec, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "xpi" => return Ok(GateSpec::new(PI, 0.0)),
        "ypi" => return Ok(GateSpec::new(PI, FRAC_PI_2)),
        "xpi2" => return Ok(GateSpec::new(FRAC_PI_2, 0.0)),
        "ypi2" => return Ok(GateSpec::new(FRAC_PI_2, FRAC_PI_2)),
        _ => {}
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(theta), Ok(phi)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok(GateSpec::new(theta, phi));
        }
    }
    Err(CliError::config(format!(
        "unrecognized gate {s:?}: use xpi, ypi, xpi2, ypi2, or THETA,PHI in radians"
    )))
}

fn gate_label(gate: &GateSpec) -> Value {
    json!({ "theta": gate.theta, "phi": gate.phi })
}

fn parse_method(s: &str) -> Result<AverageMethod, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "integral" => Ok(AverageMethod::Integral),
        "axial" => Ok(AverageMethod::Axial),
        _ => Err(CliError::config(format!(
            "unrecognized averaging method {s:?}: use integral or axial"
        ))),
    }
}

fn parse_family(s: &str) -> Result<DriveFamily, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "coherent" => Ok(DriveFamily::Coherent),
        "squeezed" => Ok(DriveFamily::Squeezed),
        "squeezed-cat" | "cat" => Ok(DriveFamily::SqueezedCat),
        _ => Err(CliError::config(format!(
            "unrecognized drive family {s:?}: use coherent, squeezed, or squeezed-cat"
        ))),
    }
}

fn parse_timing(s: &str) -> Result<TimingRule, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "condition" => Ok(TimingRule::TimingCondition),
        "inverse-photon" | "inverse-photon-number" => Ok(TimingRule::InversePhotonNumber),
        _ => Err(CliError::config(format!(
            "unrecognized timing rule {s:?}: use condition or inverse-photon"
        ))),
    }
}

fn parse_ghz_mode(s: &str) -> Result<GhzDriveMode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "refreshed" => Ok(GhzDriveMode::Refreshed),
        "disposable-constant" => Ok(GhzDriveMode::DisposableConstant),
        "disposable-split" => Ok(GhzDriveMode::DisposableSplit),
        _ => Err(CliError::config(format!(
            "unrecognized drive mode {s:?}: use refreshed, disposable-constant, \
             or disposable-split"
        ))),
    }
}

fn timing_label(rule: TimingRule) -> &'static str {
    match rule {
        TimingRule::TimingCondition => "condition",
        TimingRule::InversePhotonNumber => "inverse-photon",
    }
}

fn resolve_out_dir(cli: &Cli) -> Result<PathBuf, CliError> {
    let dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("QDRIVE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Writes `bytes` and returns the file's SHA-256 (over exactly the bytes
/// on disk).
fn write_artifact(path: &Path, bytes: &[u8]) -> Result<String, CliError> {
    fs::write(path, bytes)?;
    println!("wrote {}", path.display());
    Ok(sha256_hex(bytes))
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| CliError::config(format!("csv error: {e}")))
}

/// Writes `<command>.json`: the resolved configuration, its content
/// hash, and the list of produced files with their hashes.
fn write_manifest(
    dir: &Path,
    command: &str,
    config: &Value,
    results: Option<&Value>,
    outputs: &[(String, String)],
) -> Result<(), CliError> {
    let params_sha256 = sha256_hex(serde_json::to_string(config)?.as_bytes());
    let mut manifest = json!({
        "command": command,
        "config": config,
        "params_sha256": params_sha256,
        "outputs": outputs
            .iter()
            .map(|(file, sha)| json!({ "file": file, "sha256": sha }))
            .collect::<Vec<_>>(),
    });
    if let Some(results) = results {
        manifest["results"] = results.clone();
    }
    let bytes = format!("{}\n", serde_json::to_string_pretty(&manifest)?);
    let path = dir.join(format!("{command}.json"));
    fs::write(&path, bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------
// optimal-state
// ---------------------------------------------------------------------

fn cmd_optimal_state(cli: &Cli, args: &OptimalStateArgs) -> Result<(), CliError> {
    let file = FileCfg::load(cli.config.as_deref(), "optimal-state")?;
    let gate_str = args
        .gate
        .clone()
        .or_else(|| file.string("gate"))
        .ok_or_else(|| missing_flag("optimal-state", "--gate"))?;
    let gate = parse_gate(&gate_str)?;
    let n_bar = args.n_bar.or_else(|| file.f64("n-bar"));
    let g_t_flag = args.g_t.or_else(|| file.f64("g-t"));

    // n̄ and gT are tied by the timing condition gT = θ/(2√n̄); exactly
    // one of them must be given.
    let (g_t, n_bar) = match (n_bar, g_t_flag) {
        (Some(nb), None) => {
            if !(nb > 0.0) {
                return Err(CliError::config(format!(
                    "--n-bar must be positive, got {nb}"
                )));
            }
            (gate.theta / (2.0 * nb.sqrt()), nb)
        }
        (None, Some(gt)) => {
            if !(gt > 0.0) {
                return Err(CliError::config(format!("--g-t must be positive, got {gt}")));
            }
            (gt, (gate.theta / (2.0 * gt)).powi(2))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give exactly one of --n-bar and --g-t, not both",
            ))
        }
        (None, None) => return Err(missing_flag("optimal-state", "--n-bar or --g-t")),
    };

    let required = recommended_cutoff(n_bar);
    let n_cut = args
        .n_cut
        .or_else(|| file.usize("n-cut"))
        .unwrap_or(required);
    if n_cut < required {
        return Err(qdrive::Error::CutoffBelowRule {
            n_cut,
            required,
            n_bar,
        }
        .into());
    }
    let method_str = args
        .method
        .clone()
        .or_else(|| file.string("method"))
        .unwrap_or_else(|| "integral".to_owned());
    let method = parse_method(&method_str)?;
    let wigner_grid = args.wigner_grid.or_else(|| file.usize("wigner-grid"));

    let out_dir = resolve_out_dir(cli)?;
    let operator = error_operator_average(&gate.matrix(), g_t, n_cut, method);
    let opt = optimal_drive_state(&operator);
    let fit = characterize_state(&opt.state);

    let config = json!({
        "gate": gate_label(&gate),
        "g_t": g_t,
        "n_bar": n_bar,
        "n_cut": n_cut,
        "method": method_str.to_ascii_lowercase(),
        "wigner_grid": wigner_grid,
    });
    let results = json!({
        "fidelity": opt.fidelity,
        "avg_error": 1.0 - opt.fidelity,
        "mean_photon": opt.state.mean_photon(),
        "degenerate": opt.degenerate,
        "fit": {
            "alpha": [fit.alpha.re, fit.alpha.im],
            "r": [fit.r.re, fit.r.im],
            "residual": fit.residual,
        },
        "amplitudes": opt
            .state
            .amplitudes()
            .iter()
            .map(|a| json!([a.re, a.im]))
            .collect::<Vec<_>>(),
    });

    let mut outputs = Vec::new();
    if let Some(points) = wigner_grid {
        if points < 2 {
            return Err(CliError::config("--wigner-grid needs at least 2 points"));
        }
        let half = opt.state.mean_photon().sqrt() + 5.0;
        let coord = |i: usize| -half + 2.0 * half * i as f64 / (points - 1) as f64;
        let mut rows = Vec::with_capacity(points * points);
        for i in 0..points {
            for j in 0..points {
                let z = C64::new(coord(i), coord(j));
                rows.push(vec![
                    fmt17(z.re),
                    fmt17(z.im),
                    fmt17(opt.state.wigner(z)),
                ]);
            }
        }
        let bytes = csv_bytes(&["x", "p", "w"], &rows)?;
        let name = "optimal-state_wigner.csv".to_owned();
        let sha = write_artifact(&out_dir.join(&name), &bytes)?;
        outputs.push((name, sha));
    }
    write_manifest(&out_dir, "optimal-state", &config, Some(&results), &outputs)
}

// ---------------------------------------------------------------------
// error-scan
// ---------------------------------------------------------------------

/// Default squeezing (along the gate axis) used to build each family
/// member when no analytic optimum is known.
fn fallback_r(family: DriveFamily, gate: &GateSpec) -> f64 {
    match family {
        DriveFamily::Coherent => 0.0,
        DriveFamily::Squeezed | DriveFamily::SqueezedCat => {
            if (gate.theta - FRAC_PI_2).abs() < 1e-9 {
                (PI / 8.0f64.sqrt()).sqrt().ln()
            } else {
                (PI / 2.0).sqrt().ln()
            }
        }
    }
}

fn family_state(
    family: DriveFamily,
    n_bar: f64,
    r_along: f64,
    phi: f64,
    n_cut: usize,
) -> Result<DriveState, CliError> {
    let alpha = C64::from_polar(n_bar.sqrt(), phi);
    let r = C64::new(r_along, 0.0) * C64::from_polar(1.0, 2.0 * phi);
    Ok(match family {
        DriveFamily::Coherent => coherent_state(alpha, n_cut)?,
        DriveFamily::Squeezed => squeezed_coherent_state(alpha, r, n_cut)?,
        DriveFamily::SqueezedCat => squeezed_cat_state(alpha, r, 1, n_cut)?,
    })
}

fn cmd_error_scan(cli: &Cli, args: &ErrorScanArgs) -> Result<(), CliError> {
    let file = FileCfg::load(cli.config.as_deref(), "error-scan")?;
    let gate_str = args
        .gate
        .clone()
        .or_else(|| file.string("gate"))
        .ok_or_else(|| missing_flag("error-scan", "--gate"))?;
    let gate = parse_gate(&gate_str)?;
    let family_str = args
        .family
        .clone()
        .or_else(|| file.string("family"))
        .ok_or_else(|| missing_flag("error-scan", "--family"))?;
    let family = parse_family(&family_str)?;
    let list_str = args
        .n_bar
        .clone()
        .or_else(|| file.string("n-bar"))
        .ok_or_else(|| missing_flag("error-scan", "--n-bar"))?;
    let mut n_bars = Vec::new();
    for part in list_str.split(',') {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("bad photon number {part:?} in --n-bar")))?;
        if !(v > 0.0) {
            return Err(CliError::config(format!(
                "photon numbers must be positive, got {v}"
            )));
        }
        n_bars.push(v);
    }

    let analytic_gate = if (gate.theta - PI).abs() < 1e-9 {
        Some(AnalyticGate::PiRotation)
    } else if (gate.theta - FRAC_PI_2).abs() < 1e-9 {
        Some(AnalyticGate::HalfPiRotation)
    } else {
        None
    };
    let is_pi_rotation = (gate.theta - PI).abs() < 1e-9;

    let out_dir = resolve_out_dir(cli)?;
    let mut rows = Vec::new();
    for &n_bar in &n_bars {
        let g_t = gate.theta / (2.0 * n_bar.sqrt());
        let n_cut = recommended_cutoff(n_bar);

        let analytic_avg = analytic_gate
            .and_then(|g| analytic_error(g, family, n_bar, ErrorStatistic::Average).ok());
        let analytic_max = analytic_gate
            .and_then(|g| analytic_error(g, family, n_bar, ErrorStatistic::Maximum).ok());
        let r_along = analytic_avg
            .map(|(_, r_opt)| r_opt)
            .unwrap_or_else(|| fallback_r(family, &gate));

        let state = family_state(family, n_bar, r_along, gate.phi, n_cut)?;
        let e_avg = error_operator_average(&gate.matrix(), g_t, n_cut, AverageMethod::Axial)
            .error_of_state(&state);
        // The worst-case operator is specific to π rotations.
        let e_max = is_pi_rotation
            .then(|| error_operator_min(gate.phi, g_t, n_cut).error_of_state(&state));

        let opt_fmt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        rows.push(vec![
            fmt17(n_bar),
            fmt17(g_t),
            n_cut.to_string(),
            fmt17(r_along),
            fmt17(e_avg),
            opt_fmt(e_max),
            opt_fmt(analytic_avg.map(|(v, _)| v)),
            opt_fmt(analytic_max.map(|(v, _)| v)),
            opt_fmt(analytic_avg.map(|(v, _)| e_avg - v)),
            opt_fmt(analytic_max.and_then(|(v, _)| e_max.map(|m| m - v))),
        ]);
    }

    let bytes = csv_bytes(
        &[
            "n_bar",
            "g_t",
            "n_cut",
            "r",
            "e_avg",
            "e_max",
            "analytic_avg",
            "analytic_max",
            "delta_avg",
            "delta_max",
        ],
        &rows,
    )?;
    let name = "error-scan.csv".to_owned();
    let sha = write_artifact(&out_dir.join(&name), &bytes)?;

    let config = json!({
        "gate": gate_label(&gate),
        "family": family_str.to_ascii_lowercase(),
        "n_bar": n_bars,
    });
    write_manifest(&out_dir, "error-scan", &config, None, &[(name, sha)])
}

// ---------------------------------------------------------------------
// protocol-ideal / protocol-full / protocol-ghz
// ---------------------------------------------------------------------

struct ResolvedProtocol {
    cfg: ProtocolConfig,
    r_along: f64,
    seed_start: u64,
    seed_count: u64,
}

fn resolve_protocol(
    args: &ProtocolArgs,
    file: &FileCfg,
    subcommand: &str,
) -> Result<ResolvedProtocol, CliError> {
    let n_bar = args
        .n_bar
        .or_else(|| file.f64("n-bar"))
        .ok_or_else(|| missing_flag(subcommand, "--n-bar"))?;
    let gate_str = args
        .gate
        .clone()
        .or_else(|| file.string("gate"))
        .unwrap_or_else(|| "xpi".to_owned());
    let gate = parse_gate(&gate_str)?;

    let mut cfg = ProtocolConfig::new(n_bar, gate)?;
    if let Some(m) = args.ancillas.or_else(|| file.usize("ancillas")) {
        cfg.ancillas = m;
    }
    cfg.cycles = args.cycles.or_else(|| file.usize("cycles")).unwrap_or(100);
    if let Some(n_cut) = args.n_cut.or_else(|| file.usize("n-cut")) {
        cfg.n_cut = n_cut;
    }
    if let Some(t) = args
        .timing
        .clone()
        .or_else(|| file.string("timing"))
        .as_deref()
    {
        cfg.timing = parse_timing(t)?;
    }
    let r_along = args
        .r
        .or_else(|| file.f64("r"))
        .unwrap_or_else(|| (PI / 2.0).sqrt().ln());
    cfg.r = C64::new(r_along, 0.0) * C64::from_polar(1.0, 2.0 * gate.phi);

    let seed_start = args.seed.or_else(|| file.u64("seed")).unwrap_or(0);
    let seed_count = args.seeds.or_else(|| file.u64("seeds")).unwrap_or(1);
    if seed_count == 0 {
        return Err(CliError::config("--seeds must be at least 1"));
    }
    Ok(ResolvedProtocol {
        cfg,
        r_along,
        seed_start,
        seed_count,
    })
}

fn protocol_config_json(p: &ResolvedProtocol, extra: Value) -> Value {
    let mut config = json!({
        "n_bar": p.cfg.n_bar,
        "gate": { "theta": p.cfg.gate.theta, "phi": p.cfg.gate.phi },
        "ancillas": p.cfg.ancillas,
        "cycles": p.cfg.cycles,
        "n_cut": p.cfg.n_cut,
        "r": p.r_along,
        "timing": timing_label(p.cfg.timing),
        "seed": p.seed_start,
        "seeds": p.seed_count,
    });
    if let Value::Object(extra) = extra {
        for (k, v) in extra {
            config[k] = v;
        }
    }
    config
}

fn record_rows(run: &ProtocolRun) -> Vec<Vec<String>> {
    run.records
        .iter()
        .map(|rec| {
            vec![
                rec.cycle.to_string(),
                fmt17(rec.energy_per_gate),
                fmt17(rec.avg_error),
                fmt17(rec.purity),
                fmt17(rec.mean_photon),
            ]
        })
        .collect()
}

const RECORD_HEADER: [&str; 5] = [
    "cycle",
    "energy_per_gate",
    "avg_error",
    "purity",
    "mean_photon",
];

fn cmd_protocol(
    cli: &Cli,
    args: &ProtocolArgs,
    subcommand: &str,
    runner: fn(&ProtocolConfig) -> qdrive::Result<ProtocolRun>,
) -> Result<(), CliError> {
    let file = FileCfg::load(cli.config.as_deref(), subcommand)?;
    let mut p = resolve_protocol(args, &file, subcommand)?;
    let out_dir = resolve_out_dir(cli)?;

    // Independent seeds run back to back; outputs are ordered by seed.
    let mut outputs = Vec::new();
    for seed in p.seed_start..p.seed_start + p.seed_count {
        p.cfg.seed = seed;
        let run = runner(&p.cfg)?;
        let bytes = csv_bytes(&RECORD_HEADER, &record_rows(&run))?;
        let name = format!("{subcommand}_seed{seed:04}.csv");
        let sha = write_artifact(&out_dir.join(&name), &bytes)?;
        outputs.push((name, sha));
    }

    let config = protocol_config_json(&p, json!({}));
    write_manifest(&out_dir, subcommand, &config, None, &outputs)
}

fn cmd_protocol_ghz(cli: &Cli, args: &GhzArgs) -> Result<(), CliError> {
    let file = FileCfg::load(cli.config.as_deref(), "protocol-ghz")?;
    let mut p = resolve_protocol(&args.protocol, &file, "protocol-ghz")?;
    if let Some(n) = args.ghz_qubits.or_else(|| file.usize("ghz-qubits")) {
        p.cfg.ghz_qubits = n;
    }
    let mode_str = args
        .mode
        .clone()
        .or_else(|| file.string("mode"))
        .unwrap_or_else(|| "refreshed".to_owned());
    let mode = parse_ghz_mode(&mode_str)?;
    let out_dir = resolve_out_dir(cli)?;

    let outcome = run_ghz(&p.cfg, mode)?;
    let rows = vec![vec![
        mode_str.to_ascii_lowercase(),
        p.cfg.ghz_qubits.to_string(),
        p.cfg.ancillas.to_string(),
        fmt17(p.cfg.n_bar),
        fmt17(outcome.error_total),
        fmt17(outcome.error_per_gate),
    ]];
    let bytes = csv_bytes(
        &[
            "mode",
            "ghz_qubits",
            "ancillas",
            "n_bar",
            "error_total",
            "error_per_gate",
        ],
        &rows,
    )?;
    let name = "protocol-ghz.csv".to_owned();
    let sha = write_artifact(&out_dir.join(&name), &bytes)?;

    let config = protocol_config_json(
        &p,
        json!({
            "ghz_qubits": p.cfg.ghz_qubits,
            "mode": mode_str.to_ascii_lowercase(),
        }),
    );
    write_manifest(&out_dir, "protocol-ghz", &config, None, &[(name, sha)])
}

// ---------------------------------------------------------------------
// budget
// ---------------------------------------------------------------------

fn cmd_budget(cli: &Cli, args: &BudgetArgs) -> Result<(), CliError> {
    let file = FileCfg::load(cli.config.as_deref(), "budget")?;
    let d = BudgetParams::default();
    let params = BudgetParams {
        n_qubits: args.n_qubits.or_else(|| file.f64("n-qubits")).unwrap_or(d.n_qubits),
        t_pi: args.t_pi.or_else(|| file.f64("t-pi")).unwrap_or(d.t_pi),
        t_cz: args.t_cz.or_else(|| file.f64("t-cz")).unwrap_or(d.t_cz),
        t_m: args.t_m.or_else(|| file.f64("t-m")).unwrap_or(d.t_m),
        p_pi: args.p_pi.or_else(|| file.f64("p-pi")).unwrap_or(d.p_pi),
        p_cz: args.p_cz.or_else(|| file.f64("p-cz")).unwrap_or(d.p_cz),
        p_m: args.p_m.or_else(|| file.f64("p-m")).unwrap_or(d.p_m),
        omega: args.omega.or_else(|| file.f64("omega")).unwrap_or(d.omega),
        attenuation_factor: args
            .attenuation_factor
            .or_else(|| file.f64("attenuation-factor"))
            .unwrap_or(d.attenuation_factor),
        target_error: args
            .target_error
            .or_else(|| file.f64("target-error"))
            .unwrap_or(d.target_error),
    };
    let report = budget_report(&params)?;

    let table = [
        ("qubit power, exact [W]", report.qubit_power_exact),
        ("qubit power, rounded [W]", report.qubit_power_rounded),
        ("total dissipation, exact [W]", report.total_dissipation_exact),
        ("total dissipation, rounded [W]", report.total_dissipation_rounded),
        ("minimum photons per pi pulse, exact", report.min_photons_exact),
        ("minimum photons per pi pulse, rounded", report.min_photons_rounded),
        ("quantum-limited pi-pulse power, exact [W]", report.min_drive_power_exact),
        ("quantum-limited pi-pulse power, rounded [W]", report.min_drive_power_rounded),
        ("quantum-limited total dissipation, exact [W]", report.min_total_dissipation_exact),
        ("quantum-limited total dissipation, rounded [W]", report.min_total_dissipation_rounded),
        ("TL/resonator power ratio (angular frequency)", report.tl_ratio.with_angular_frequency),
        ("TL/resonator power ratio (cyclic frequency)", report.tl_ratio.with_cyclic_frequency),
    ];
    for (label, value) in table {
        println!("{label:<48} {value:.6e}");
    }

    if args.json {
        let out_dir = resolve_out_dir(cli)?;
        let config = json!({
            "n_qubits": params.n_qubits,
            "t_pi": params.t_pi,
            "t_cz": params.t_cz,
            "t_m": params.t_m,
            "p_pi": params.p_pi,
            "p_cz": params.p_cz,
            "p_m": params.p_m,
            "omega": params.omega,
            "attenuation_factor": params.attenuation_factor,
            "target_error": params.target_error,
        });
        let results = json!({
            "qubit_power_exact": report.qubit_power_exact,
            "qubit_power_rounded": report.qubit_power_rounded,
            "total_dissipation_exact": report.total_dissipation_exact,
            "total_dissipation_rounded": report.total_dissipation_rounded,
            "min_photons_exact": report.min_photons_exact,
            "min_photons_rounded": report.min_photons_rounded,
            "min_drive_power_exact": report.min_drive_power_exact,
            "min_drive_power_rounded": report.min_drive_power_rounded,
            "min_total_dissipation_exact": report.min_total_dissipation_exact,
            "min_total_dissipation_rounded": report.min_total_dissipation_rounded,
            "tl_ratio_with_angular_frequency": report.tl_ratio.with_angular_frequency,
            "tl_ratio_with_cyclic_frequency": report.tl_ratio.with_cyclic_frequency,
        });
        write_manifest(&out_dir, "budget", &config, Some(&results), &[])?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::OptimalState(args) => cmd_optimal_state(cli, args),
        Command::ErrorScan(args) => cmd_error_scan(cli, args),
        Command::ProtocolIdeal(args) => cmd_protocol(cli, args, "protocol-ideal", run_ideal),
        Command::ProtocolGhz(args) => cmd_protocol_ghz(cli, args),
        Command::ProtocolFull(args) => cmd_protocol(cli, args, "protocol-full", run_full),
        Command::Budget(args) => cmd_budget(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
