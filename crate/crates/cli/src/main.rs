use clap::{Parser, Subcommand};
use tbqudit_cli::emit::{emit_table, Format};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use tbqudit::protocols::{fit_hyperfine_report, run_experiment, validate_config, ExperimentKind};
use tbqudit::{ExperimentConfig, ExperimentReport};

#[derive(Parser)]
#[command(name = "tbqudit", version, about = "TbPc2 nuclear-spin qudit simulator")]
struct Cli {
    /// Experiment configuration (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed overriding the config value.
    #[arg(long, global = true, env = "TBQUDIT_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue traces versus field.
    Zeeman,
    /// Avoided-crossing fields, gaps and flip probabilities.
    Crossings,
    /// Hyperfine and quadrupole constants from three transition frequencies.
    FitHf {
        #[arg(long)]
        nu01: f64,
        #[arg(long)]
        nu12: f64,
        #[arg(long)]
        nu23: f64,
    },
    /// Rabi oscillation scan.
    Rabi,
    /// Ramsey fringe scan.
    Ramsey,
    /// Calibrate the equal-superposition gate.
    Hadamard,
    /// Calibrate and scan the Grover drive.
    Grover,
    /// Repeated field sweeps and the jump-field histogram.
    Hysteresis,
    /// Nuclear telegraph trace and lifetime estimates.
    T1,
    /// Storage fidelities exp(-t/T1).
    Fidelity,
    /// Check the configuration and print OK.
    Validate,
    /// Repeated initialize, pulse, probe runs.
    Sequence,
    /// Sequence repeated over a grid of tau, detuning or field.
    Scan,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn load_config(path: Option<&PathBuf>) -> Result<ExperimentConfig, Failure> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| fail(2, format!("cannot read config {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(cfg).expect("config serializes")))
}

fn kind(command: &Command) -> Option<ExperimentKind> {
    Some(match command {
        Command::Zeeman => ExperimentKind::Zeeman,
        Command::Crossings => ExperimentKind::Crossings,
        Command::Rabi => ExperimentKind::Rabi,
        Command::Ramsey => ExperimentKind::Ramsey,
        Command::Hadamard => ExperimentKind::Hadamard,
        Command::Grover => ExperimentKind::Grover,
        Command::Hysteresis => ExperimentKind::Hysteresis,
        Command::T1 => ExperimentKind::T1,
        Command::Fidelity => ExperimentKind::Fidelity,
        Command::Sequence => ExperimentKind::Sequence,
        Command::Scan => ExperimentKind::Scan,
        Command::FitHf { .. } | Command::Validate => return None,
    })
}

fn write_report(report: &ExperimentReport, cfg: &ExperimentConfig, cli: &Cli) -> Result<Vec<String>, Failure> {
    let dir = cli.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| fail(1, format!("cannot create {}: {e}", dir.display())))?;
    let hash = config_hash(cfg);
    let single = report.tables.len() == 1;
    let mut written = Vec::new();
    for (name, table) in &report.tables {
        let stem = if single { report.experiment.clone() } else { format!("{}_{name}", report.experiment) };
        let path = dir.join(format!("{stem}.{}", cli.format.extension()));
        let mut meta = Map::new();
        meta.insert("config_hash".into(), json!(hash));
        meta.insert("seed".into(), json!(cfg.seed));
        meta.insert("experiment".into(), json!(report.experiment));
        meta.insert("table".into(), json!(name));
        emit_table(table, cli.format, &path, &meta).map_err(|m| fail(1, m))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = load_config(cli.config.as_ref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let report = match &cli.command {
        Command::Validate => {
            let diagnostics = validate_config(&cfg);
            if diagnostics.is_empty() {
                println!("OK");
                return Ok(());
            }
            let lines: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
            return Err(fail(1, lines.join("\n")));
        }
        Command::FitHf { nu01, nu12, nu23 } => fit_hyperfine_report(*nu01, *nu12, *nu23),
        other => run_experiment(&cfg, kind(other).expect("experiment command")),
    }
    .map_err(|e| fail(1, e.to_string()))?;

    let files = write_report(&report, &cfg, cli)?;
    let summary = json!({
        "experiment": report.experiment,
        "seed": cfg.seed,
        "values": report.values.iter().map(|(k, v)| (k.clone(), serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number))).collect::<Map<_, _>>(),
        "notes": report.notes,
        "degraded": report.degraded,
        "simulated_time_s": report.simulated_time_s,
        "files": files,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    if report.degraded {
        eprintln!("warning: {} run is degraded: {}", report.experiment, report.notes.join("; "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
