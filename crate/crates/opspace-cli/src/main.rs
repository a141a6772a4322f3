//! Command-line harness for the opspace phase-space toolbox.
//!
//! Thin dispatcher: all numerics live in the `opspace` library; this binary
//! parses configs, runs the requested sweep/audit/transform, writes CSV and
//! JSON artifacts, and prints a one-line verdict per check.
//!
//! Exit codes: 0 when every asserted check passes, 1 when an asserted check
//! fails, 2 on usage or configuration errors.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use opspace::experiments::{
    self, AuditReport, SweepConfig, SweepResult, Verdict,
};

#[derive(Parser)]
#[command(
    name = "opspace",
    version,
    about = "Phase-space projection toolbox: semiclassical sweeps, inequality audits, transforms"
)]
struct Cli {
    /// Directory for CSV/JSON artifacts (default: $SRL_OUTPUT_DIR, then ".")
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Cap on worker threads; 1 reproduces parallel output bit-exactly
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print progress details to stderr
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gradient-norm scaling sweep over the harmonic Slater projections
    Harmonic(ConfigOverride),
    /// Weyl-law and Husimi-convergence sweep over Schrödinger projections
    Schrodinger(ConfigOverride),
    /// Run the sweep described by a TOML config (`family` key picks the kind)
    Sweep(SweepArgs),
    /// Evaluate the inequality audits on the stock projection targets
    Audit(AuditArgs),
    /// Apply a phase-space transform to an operator or field file
    Transform(TransformArgs),
}

#[derive(Args)]
struct ConfigOverride {
    /// TOML sweep config replacing the built-in default
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep config
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    /// Seed for the audit's random smooth symbols
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["wigner", "husimi", "weyl"])))]
struct TransformArgs {
    /// Wigner transform: operator binary in, field CSV out
    #[arg(long)]
    wigner: bool,
    /// Husimi transform: operator binary in, field CSV out
    #[arg(long)]
    husimi: bool,
    /// Weyl quantization: field binary in, operator binary out
    #[arg(long)]
    weyl: bool,
    /// Input file (operator for --wigner/--husimi, field for --weyl)
    #[arg(long)]
    input: PathBuf,
    /// Output path (default: `<input stem>_<transform>.{csv,bin}` in the
    /// output directory)
    #[arg(long)]
    output: Option<PathBuf>,
}

/// The numerical work behind each subcommand, factored out so the dispatcher
/// can be exercised with a stub in tests.
trait Backend {
    fn harmonic(&self, cfg: &SweepConfig) -> opspace::Result<SweepResult>;
    fn schrodinger(&self, cfg: &SweepConfig) -> opspace::Result<SweepResult>;
    fn audit(&self, seed: u64) -> opspace::Result<Vec<AuditReport>>;
}

struct Experiments;

impl Backend for Experiments {
    fn harmonic(&self, cfg: &SweepConfig) -> opspace::Result<SweepResult> {
        experiments::harmonic_sweep(cfg)
    }

    fn schrodinger(&self, cfg: &SweepConfig) -> opspace::Result<SweepResult> {
        experiments::weyl_law_sweep(cfg)
    }

    fn audit(&self, seed: u64) -> opspace::Result<Vec<AuditReport>> {
        experiments::audit_targets()?
            .iter()
            .map(|(label, op)| experiments::inequality_audit(label, op, seed))
            .collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let timestamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    match run(&cli, &Experiments, &timestamp) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Dispatch a parsed command line. Returns whether every asserted check
/// passed; configuration and I/O problems surface as errors (exit 2).
fn run(cli: &Cli, backend: &dyn Backend, timestamp: &str) -> Result<bool> {
    let out_dir = output_dir(cli)?;
    match &cli.command {
        Command::Harmonic(args) => {
            let cfg = load_or_default(args.config.as_deref(), SweepConfig::default_harmonic)?;
            expect_family(&cfg, "harmonic")?;
            let result = backend.harmonic(&cfg)?;
            report_sweep(&result, &out_dir, timestamp, cli.verbose)
        }
        Command::Schrodinger(args) => {
            let cfg = load_or_default(args.config.as_deref(), SweepConfig::default_schrodinger)?;
            expect_family(&cfg, "schrodinger")?;
            let result = backend.schrodinger(&cfg)?;
            report_sweep(&result, &out_dir, timestamp, cli.verbose)
        }
        Command::Sweep(args) => {
            let cfg = load_config(&args.config)?;
            let result = match cfg {
                SweepConfig::Harmonic { .. } => backend.harmonic(&cfg)?,
                SweepConfig::Schrodinger { .. } => backend.schrodinger(&cfg)?,
            };
            report_sweep(&result, &out_dir, timestamp, cli.verbose)
        }
        Command::Audit(args) => {
            let reports = backend.audit(args.seed)?;
            report_audits(&reports, &out_dir, timestamp)
        }
        Command::Transform(args) => {
            transform(args, &out_dir)?;
            Ok(true)
        }
    }
}

fn output_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli
        .output_dir
        .clone()
        .or_else(|| std::env::var_os("SRL_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("output_dir: cannot create {}", dir.display()))?;
    Ok(dir)
}

fn load_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("config: cannot read {}", path.display()))?;
    let cfg: SweepConfig = toml::from_str(&text)
        .with_context(|| format!("config {}: invalid sweep config", path.display()))?;
    cfg.validate()
        .with_context(|| format!("config {}: invalid sweep parameters", path.display()))?;
    Ok(cfg)
}

fn load_or_default(path: Option<&Path>, default: fn() -> SweepConfig) -> Result<SweepConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(default()),
    }
}

fn expect_family(cfg: &SweepConfig, family: &str) -> Result<()> {
    if cfg.family_name() != family {
        bail!("config key `family`: expected \"{family}\", got \"{}\"", cfg.family_name());
    }
    Ok(())
}

fn verdict_line(v: &Verdict) -> String {
    let tag = match v.passed {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "info",
    };
    format!("[{tag}] {}: {} ({})", v.check, v.statement, v.details)
}

fn report_sweep(
    result: &SweepResult,
    out_dir: &Path,
    timestamp: &str,
    verbose: u8,
) -> Result<bool> {
    let stem = format!("{}_{}_{}", result.family, result.check, timestamp);
    let csv = out_dir.join(format!("{stem}.csv"));
    let json = out_dir.join(format!("{stem}_verdicts.json"));
    result.write_csv(&csv)?;
    std::fs::write(&json, result.verdicts_json()?)
        .with_context(|| format!("writing {}", json.display()))?;
    for v in &result.verdicts {
        println!("{}", verdict_line(v));
    }
    if verbose > 0 {
        for (key, fit) in &result.fits {
            eprintln!(
                "fit {key}: slope {:.4}, intercept {:.4}, R² {:.4}",
                fit.slope, fit.intercept, fit.r_squared
            );
        }
        eprintln!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(result.all_asserted_passed())
}

fn report_audits(reports: &[AuditReport], out_dir: &Path, timestamp: &str) -> Result<bool> {
    let mut all = true;
    for report in reports {
        let path = out_dir.join(format!("audit_{}_{}.json", report.label, timestamp));
        let body = serde_json::to_string_pretty(report)?;
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        for c in &report.checks {
            let tag = if c.passed { "pass" } else { "FAIL" };
            println!(
                "[{tag}] {}/{}: {} (lhs {:.6e}, rhs {:.6e}, slack {:.3e})",
                report.label, c.name, c.statement, c.lhs, c.rhs, c.slack
            );
        }
        all &= report.all_passed;
    }
    Ok(all)
}

fn transform(args: &TransformArgs, out_dir: &Path) -> Result<()> {
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("transform");
    if args.weyl {
        let field = io::read_field(&args.input)?;
        let op = opspace::phasespace::weyl_quantize(&field)?;
        let out = args
            .output
            .clone()
            .unwrap_or_else(|| out_dir.join(format!("{stem}_weyl.bin")));
        io::write_operator(&op, &out)?;
        println!("weyl quantization of {} -> {}", args.input.display(), out.display());
        return Ok(());
    }
    let op = io::read_operator(&args.input)?;
    let (name, field) = if args.wigner {
        ("wigner", opspace::phasespace::wigner(&op)?)
    } else {
        ("husimi", opspace::phasespace::husimi(&op)?)
    };
    let out = args
        .output
        .clone()
        .unwrap_or_else(|| out_dir.join(format!("{stem}_{name}.csv")));
    field.write_csv(&out)?;
    println!("{name} transform of {} -> {}", args.input.display(), out.display());
    Ok(())
}
