//! Command-line surface for the cost engine: JSON in, JSON or CSV out.
//!
//! Exit codes: 0 success, 2 input validation, 3 inconclusive (enumeration
//! budget exhausted without a certificate), 4 I/O failure, 5 property-check
//! failure. stdout carries only the result payload; stderr carries
//! structured JSON error/warning lines.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use teq::matcore::Tolerance;
use teq::optics;
use teq::povm::EnumerationBudget;
use teq::presets;
use teq::schema::{
    fmt_sig12, write_fig4_csv, write_fig5_csv, write_rank2_csv, BoundReportJson, FamilyJson,
    KrausStackJson, MatrixJson, PovmJson, UsdPovmJson,
};
use teq::ucost;
use teq::usd;
use teq::{Result, TeqError};

#[derive(Parser)]
#[command(name = "teq", version, about = "Time-energy costs of quantum operations")]
struct Cli {
    /// Validation tolerance (overrides the TEQ_TOL environment variable).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Certificate tolerance.
    #[arg(long, global = true)]
    cert_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cost of a unitary matrix: largest absolute eigenphase.
    UnitaryCost {
        /// Path to a matrix JSON file, inline JSON, or - for stdin.
        #[arg(long)]
        input: String,
    },
    /// Full bound report for a POVM.
    PovmCost {
        #[arg(long)]
        input: String,
        /// Enumeration budget for the certificate search.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Lower bounds for a partially specified unitary given as a Kraus stack.
    PartialUBounds {
        #[arg(long)]
        input: String,
    },
    /// Exact cost under element-level relabeling only.
    ElementOrderCost {
        #[arg(long)]
        input: String,
    },
    /// Unambiguous state discrimination for geometrically uniform families.
    Usd {
        #[command(subcommand)]
        cmd: UsdCommand,
    },
    /// Linear-optics element costs.
    Optics {
        #[command(subcommand)]
        cmd: OpticsCommand,
    },
    /// Reproduce a named analysis end to end.
    Reproduce {
        target: ReproduceTarget,
        /// Output directory for generated files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Grid override START:END:COUNT for sweep targets.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Run the seeded property suites.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum UsdCommand {
    /// Build the optimal USD POVM for a family.
    Build {
        #[arg(long)]
        input: String,
    },
    /// Cost lower bound for the optimal USD measurement.
    Bound {
        #[arg(long)]
        input: String,
    },
    /// Sweep the bound over intensities and state counts.
    Sweep {
        /// Comma-separated mean photon numbers.
        #[arg(long, default_value = "0.1,0.5,1,3")]
        intensities: String,
        /// State-count range MIN:MAX.
        #[arg(long, default_value = "2:30")]
        kbar: String,
        #[arg(long, default_value_t = 50)]
        trunc: usize,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OpticsCommand {
    /// Optimal beam-splitter cost for a reflectivity.
    Bs { reflectivity: f64 },
    /// Optimal polarizing beam-splitter cost.
    Pbs,
    /// Optimal time split: input {"costs_rad": [...], "total_time": T}.
    Split {
        #[arg(long)]
        input: String,
    },
    /// Implementation-to-ideal energy ratio at a working point.
    Ratio { phi: f64 },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproduceTarget {
    Bell1,
    Bell2,
    Fig4,
    Fig5,
    Rank2Sweep,
}

struct Failure {
    exit: u8,
    payload: Value,
}

impl Failure {
    fn code(exit: u8, code: &str, message: String) -> Self {
        Failure {
            exit,
            payload: json!({"error": code, "message": message}),
        }
    }
}

impl From<TeqError> for Failure {
    fn from(e: TeqError) -> Self {
        let exit = match &e {
            TeqError::Io(_) => 4,
            TeqError::NumericFailure { .. } => 4,
            _ => 2,
        };
        Failure {
            exit,
            payload: json!({"error": e.code(), "message": e.to_string()}),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.payload);
            ExitCode::from(f.exit)
        }
    }
}

fn resolve_tolerance(cli: &Cli) -> std::result::Result<Tolerance, Failure> {
    let mut t = Tolerance::default();
    if let Ok(env_tol) = std::env::var("TEQ_TOL") {
        let parsed: f64 = env_tol.parse().map_err(|_| {
            Failure::code(2, "invalid_input", format!("TEQ_TOL is not a number: {env_tol}"))
        })?;
        t.validation_eps = parsed;
    }
    if let Some(tol) = cli.tol {
        t.validation_eps = tol;
    }
    if let Some(cert) = cli.cert_tol {
        t.certificate_eps = cert;
    }
    Tolerance::new(t.validation_eps, t.certificate_eps).map_err(Failure::from)
}

/// Read an input argument: `-` for stdin, inline JSON when it starts with
/// `{`, otherwise a file path.
fn read_input(input: &str) -> std::result::Result<String, Failure> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::code(4, "io", e.to_string()))?;
        return Ok(buf);
    }
    if input.trim_start().starts_with('{') {
        return Ok(input.to_string());
    }
    fs::read_to_string(input).map_err(|e| Failure::code(4, "io", format!("{input}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::code(2, "invalid_input", format!("JSON parse error: {e}")))
}

fn emit(value: &Value) {
    println!("{value}");
}

fn warn(value: Value) {
    eprintln!("{value}");
}

fn parse_grid(spec: &str) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::code(
            2,
            "invalid_input",
            format!("grid must be START:END:COUNT, got {spec}"),
        ));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::code(2, "invalid_input", "bad grid start".into()))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::code(2, "invalid_input", "bad grid end".into()))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Failure::code(2, "invalid_input", "bad grid count".into()))?;
    if count < 1 {
        return Err(Failure::code(2, "invalid_input", "grid count must be >= 1".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
        .collect())
}

fn parse_kbar_range(spec: &str) -> std::result::Result<std::ops::RangeInclusive<usize>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(Failure::code(
            2,
            "invalid_input",
            format!("kbar range must be MIN:MAX, got {spec}"),
        ));
    }
    let lo: usize = parts[0]
        .parse()
        .map_err(|_| Failure::code(2, "invalid_input", "bad kbar min".into()))?;
    let hi: usize = parts[1]
        .parse()
        .map_err(|_| Failure::code(2, "invalid_input", "bad kbar max".into()))?;
    if lo < 2 || hi < lo {
        return Err(Failure::code(2, "invalid_input", "kbar range must satisfy 2 <= MIN <= MAX".into()));
    }
    Ok(lo..=hi)
}

fn run(cli: Cli) -> std::result::Result<u8, Failure> {
    let tol = resolve_tolerance(&cli)?;
    match &cli.command {
        Command::UnitaryCost { input } => {
            let text = read_input(input)?;
            let m: MatrixJson = parse_json(&text)?;
            let matrix = m.to_matrix()?;
            let cost = ucost::maxnorm_unitary(&matrix, &tol)?;
            emit(&json!({"cost_rad": cost.radians()}));
            Ok(0)
        }
        Command::PovmCost { input, budget } => {
            let text = read_input(input)?;
            let p: PovmJson = parse_json(&text)?;
            let povm = p.to_povm(&tol)?;
            let budget = EnumerationBudget::new(*budget)?;
            let report = teq::povm::povm_cost(&povm, &budget, &tol)?;
            let out = BoundReportJson::from_report(&report);
            emit(&serde_json::to_value(&out).expect("serializable"));
            if report.exhausted && report.certificate.is_none() {
                warn(json!({
                    "warning": "budget_exhausted",
                    "message": "certificate enumeration truncated; lower bound remains sound"
                }));
                return Ok(3);
            }
            Ok(0)
        }
        Command::PartialUBounds { input } => {
            let text = read_input(input)?;
            let s: KrausStackJson = parse_json(&text)?;
            let stack = s.to_stack(&tol)?;
            let b = ucost::partial_u_bounds(&stack)?;
            emit(&json!({
                "diag1_rad": b.diag1.radians(),
                "schur_rad": b.schur.radians(),
                "sv_rad": b.sv.radians(),
                "best_rad": b.best.radians(),
            }));
            Ok(0)
        }
        Command::ElementOrderCost { input } => {
            let text = read_input(input)?;
            let p: PovmJson = parse_json(&text)?;
            let povm = p.to_povm(&tol)?;
            let cost = teq::povm::element_order_cost(&povm)?;
            emit(&json!({"element_order_rad": cost.radians()}));
            Ok(0)
        }
        Command::Usd { cmd } => run_usd(cmd, &tol),
        Command::Optics { cmd } => run_optics(cmd, &tol),
        Command::Reproduce {
            target,
            out,
            grid,
            budget,
        } => run_reproduce(*target, out, grid.as_deref(), *budget, &tol),
        Command::Check { seed } => {
            let report = teq::check::run_all(*seed);
            emit(&serde_json::to_value(&report).expect("serializable"));
            if report.failed > 0 {
                Ok(5)
            } else {
                Ok(0)
            }
        }
    }
}

fn run_usd(cmd: &UsdCommand, tol: &Tolerance) -> std::result::Result<u8, Failure> {
    match cmd {
        UsdCommand::Build { input } => {
            let text = read_input(input)?;
            let fam_json: FamilyJson = parse_json(&text)?;
            let (family, warnings) = fam_json.build(tol)?;
            for w in &warnings {
                warn(json!({"warning": "truncation", "message": w}));
            }
            let result = usd::optimal_usd_povm(&family, tol)?;
            for w in &result.warnings {
                warn(json!({"warning": "usd_structure", "message": w}));
            }
            emit(&serde_json::to_value(UsdPovmJson::from_usd(&result)).expect("serializable"));
            Ok(0)
        }
        UsdCommand::Bound { input } => {
            let text = read_input(input)?;
            let fam_json: FamilyJson = parse_json(&text)?;
            let (family, warnings) = fam_json.build(tol)?;
            for w in &warnings {
                warn(json!({"warning": "truncation", "message": w}));
            }
            let bound = usd::usd_cost_lower_bound(&family, tol)?;
            emit(&json!({"bound_rad": bound.radians()}));
            Ok(0)
        }
        UsdCommand::Sweep {
            intensities,
            kbar,
            trunc,
            out,
        } => {
            let intensities: Vec<f64> = intensities
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Failure::code(2, "invalid_input", format!("bad intensity: {s}"))
                    })
                })
                .collect::<std::result::Result<_, _>>()?;
            let range = parse_kbar_range(kbar)?;
            let rows = usd::fig5_sweep(&intensities, range, *trunc);
            let warnings: Vec<Value> = rows
                .iter()
                .filter_map(|r| {
                    r.warning.as_ref().map(|w| {
                        json!({
                            "warning": "sweep_point",
                            "intensity": r.intensity,
                            "k_bar": r.k_bar,
                            "message": w,
                        })
                    })
                })
                .collect();
            for w in &warnings {
                warn(w.clone());
            }
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_fig5_csv(&mut buf, &rows)?;
                    fs::write(path, &buf).map_err(|e| Failure::code(4, "io", e.to_string()))?;
                    if !warnings.is_empty() {
                        let sidecar = sidecar_path(path);
                        let lines: String = warnings
                            .iter()
                            .map(|w| format!("{w}\n"))
                            .collect();
                        fs::write(&sidecar, lines)
                            .map_err(|e| Failure::code(4, "io", e.to_string()))?;
                    }
                    emit(&json!({
                        "rows": rows.len(),
                        "out": path.display().to_string(),
                        "warnings": warnings.len(),
                    }));
                }
                None => {
                    let mut buf = Vec::new();
                    write_fig5_csv(&mut buf, &rows)?;
                    print!("{}", String::from_utf8(buf).expect("utf8 csv"));
                }
            }
            Ok(0)
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".warnings.jsonl");
    path.with_file_name(name)
}

fn run_optics(cmd: &OpticsCommand, tol: &Tolerance) -> std::result::Result<u8, Failure> {
    match cmd {
        OpticsCommand::Bs { reflectivity } => {
            let cost = optics::bs_optimal_cost(*reflectivity)?;
            emit(&json!({"cost_rad": cost.radians()}));
            Ok(0)
        }
        OpticsCommand::Pbs => {
            emit(&json!({"cost_rad": optics::pbs_optimal_cost().radians()}));
            Ok(0)
        }
        OpticsCommand::Split { input } => {
            let text = read_input(input)?;
            let v: Value = parse_json(&text)?;
            let costs = v
                .get("costs_rad")
                .and_then(|c| c.as_array())
                .ok_or_else(|| {
                    Failure::code(2, "invalid_input", "missing costs_rad array".into())
                })?;
            let total_time = v
                .get("total_time")
                .and_then(|t| t.as_f64())
                .ok_or_else(|| Failure::code(2, "invalid_input", "missing total_time".into()))?;
            let items = costs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let rad = c.as_f64().ok_or_else(|| {
                        Failure::code(2, "invalid_input", format!("cost {i} is not a number"))
                    })?;
                    Ok((
                        format!("element{i}"),
                        teq::CostAngle::from_radians(rad).map_err(Failure::from)?,
                    ))
                })
                .collect::<std::result::Result<Vec<_>, Failure>>()?;
            let split = optics::optimal_time_split(&optics::ElementCosts::new(items), total_time)?;
            emit(&json!({
                "total_time": split.total_time,
                "times": split.times,
                "total_energy": split.total_energy,
            }));
            let _ = tol;
            Ok(0)
        }
        OpticsCommand::Ratio { phi } => {
            let ratio = optics::implementation_energy_ratio(*phi)?;
            emit(&json!({"phi_rad": phi, "ratio": ratio}));
            Ok(0)
        }
    }
}

fn run_reproduce(
    target: ReproduceTarget,
    out_dir: &Path,
    grid: Option<&str>,
    budget: usize,
    tol: &Tolerance,
) -> std::result::Result<u8, Failure> {
    fs::create_dir_all(out_dir).map_err(|e| Failure::code(4, "io", e.to_string()))?;
    let budget = EnumerationBudget::new(budget)?;
    match target {
        ReproduceTarget::Bell1 => {
            let impl_cost = optics::bs_optimal_cost(std::f64::consts::FRAC_1_SQRT_2)?;
            let povm = presets::singlet_projector_povm(tol)?;
            let report = teq::povm::povm_cost(&povm, &budget, tol)?;
            let optimal = (impl_cost.radians() - report.lower.radians()).abs() <= 1e-9;
            let summary = json!({
                "target": "bell1",
                "impl_rad": impl_cost.radians(),
                "ideal_rad": report.lower.radians(),
                "optimal": optimal,
            });
            write_summary(out_dir, "bell1.json", &summary)?;
            emit(&summary);
            Ok(0)
        }
        ReproduceTarget::Bell2 => {
            let u = optics::bell_two_state_unitary();
            let ideal = ucost::maxnorm_unitary(&u, tol)?;
            let povm = presets::two_bell_povm(tol)?;
            let report = teq::povm::povm_cost(&povm, &budget, tol)?;
            // sequential BS + two PBS gives an energy*time product lower
            // estimate for the actual implementation
            let costs = optics::ElementCosts::new(vec![
                ("bs".into(), optics::bs_optimal_cost(std::f64::consts::FRAC_1_SQRT_2)?),
                ("pbs1".into(), optics::pbs_optimal_cost()),
                ("pbs2".into(), optics::pbs_optimal_cost()),
            ]);
            let split = optics::optimal_time_split(&costs, 1.0)?;
            let summary = json!({
                "target": "bell2",
                "ideal_rad": ideal.radians(),
                "ideal_povm_lower_rad": report.lower.radians(),
                "impl_lower_estimate": split.total_energy,
                "impl_label": "implementation lower estimate",
                "optimal": false,
            });
            write_summary(out_dir, "bell2.json", &summary)?;
            emit(&summary);
            Ok(0)
        }
        ReproduceTarget::Fig4 => {
            let grid_values = match grid {
                Some(g) => parse_grid(g)?,
                None => optics::fig4_default_grid(),
            };
            let rows = optics::fig4_sweep(&grid_values)?;
            let path = out_dir.join("fig4.csv");
            let mut buf = Vec::new();
            write_fig4_csv(&mut buf, &rows)?;
            fs::write(&path, &buf).map_err(|e| Failure::code(4, "io", e.to_string()))?;
            let summary = json!({
                "target": "fig4",
                "rows": rows.len(),
                "out": path.display().to_string(),
            });
            emit(&summary);
            Ok(0)
        }
        ReproduceTarget::Fig5 => {
            let (intensities, range, trunc) = usd::fig5_defaults();
            let rows = usd::fig5_sweep(&intensities, range, trunc);
            let path = out_dir.join("fig5.csv");
            let mut buf = Vec::new();
            write_fig5_csv(&mut buf, &rows)?;
            fs::write(&path, &buf).map_err(|e| Failure::code(4, "io", e.to_string()))?;
            let warnings: Vec<Value> = rows
                .iter()
                .filter_map(|r| {
                    r.warning.as_ref().map(|w| {
                        json!({"intensity": r.intensity, "k_bar": r.k_bar, "message": w})
                    })
                })
                .collect();
            if !warnings.is_empty() {
                let sidecar = sidecar_path(&path);
                let lines: String = warnings.iter().map(|w| format!("{w}\n")).collect();
                fs::write(&sidecar, lines).map_err(|e| Failure::code(4, "io", e.to_string()))?;
            }
            let summary = json!({
                "target": "fig5",
                "rows": rows.len(),
                "out": path.display().to_string(),
                "warnings": warnings.len(),
            });
            emit(&summary);
            Ok(0)
        }
        ReproduceTarget::Rank2Sweep => {
            let grid_values = match grid {
                Some(g) => parse_grid(g)?,
                None => (1..=15).map(|i| 0.1 * i as f64).collect(),
            };
            let mut rows = Vec::with_capacity(grid_values.len());
            for &phi in &grid_values {
                let povm = presets::rank2_povm(phi, tol)?;
                let report = teq::povm::povm_cost(&povm, &budget, tol)?;
                rows.push((phi, BoundReportJson::from_report(&report)));
            }
            let path = out_dir.join("rank2_sweep.csv");
            let mut buf = Vec::new();
            write_rank2_csv(&mut buf, &rows)?;
            fs::write(&path, &buf).map_err(|e| Failure::code(4, "io", e.to_string()))?;
            let exact_count = rows.iter().filter(|(_, r)| r.exact).count();
            let summary = json!({
                "target": "rank2-sweep",
                "rows": rows.len(),
                "exact": exact_count,
                "out": path.display().to_string(),
            });
            emit(&summary);
            Ok(0)
        }
    }
}

fn write_summary(dir: &Path, name: &str, value: &Value) -> std::result::Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, format!("{value}\n")).map_err(|e| Failure::code(4, "io", e.to_string()))
}

// keep the Result alias in scope for ? conversions from TeqError
#[allow(dead_code)]
fn _assert_result_alias(r: Result<()>) -> Result<()> {
    r
}
