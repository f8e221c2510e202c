use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dunkl_cli::{
    parse_config_file, parse_list, run_suite, write_csv_report, write_json_report, Suite,
    SuiteConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dunkl", about = "Verification CLI for the Dunkl harmonic-analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a machine-readable report
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct VerifyArgs {
    /// Flat key=value config file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suite name (plancherel, inversion, translation, poisson,
    /// cauchy_riemann, hilbert_routes, estimate_a, atoms, hilbert_atoms, all)
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated lambda values, all > 0
    #[arg(long)]
    lambda: Option<String>,
    /// Comma-separated Hardy exponents for the atom suites
    #[arg(long)]
    p: Option<String>,
    /// Real-line grid resolution (>= 64)
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Truncation radius of the real-line grid
    #[arg(long)]
    domain: Option<f64>,
    /// Number of half-plane y levels
    #[arg(long = "y-levels")]
    y_levels: Option<usize>,
    /// Seed for the randomized sweeps
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path (written atomically)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV table path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record per-case wall clock (breaks byte-level report reproducibility)
    #[arg(long)]
    timings: bool,
}

fn build_config(args: &VerifyArgs) -> Result<SuiteConfig> {
    // file values first, then flags on top
    let mut file: std::collections::HashMap<String, String> = Default::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (k, v) in parse_config_file(&text)? {
            file.insert(k.replace('-', "_"), v);
        }
    }
    let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());

    let suite_name = pick(args.suite.clone(), "suite")
        .ok_or_else(|| anyhow::anyhow!("--suite is required (or 'suite=' in the config file)"))?;
    let lambda = pick(args.lambda.clone(), "lambda").unwrap_or_else(|| "0.5".into());
    let p = pick(args.p.clone(), "p").unwrap_or_else(|| "0.9".into());
    let parse_num = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| anyhow::anyhow!("bad {what}: '{s}'"))
    };
    let grid_n = match args.grid_n {
        Some(v) => v,
        None => match file.get("grid_n") {
            Some(s) => parse_num(s, "grid_n")? as usize,
            None => 2048,
        },
    };
    let domain = match args.domain {
        Some(v) => v,
        None => match file.get("domain") {
            Some(s) => parse_num(s, "domain")?,
            None => 40.0,
        },
    };
    let y_levels = match args.y_levels {
        Some(v) => v,
        None => match file.get("y_levels") {
            Some(s) => parse_num(s, "y_levels")? as usize,
            None => 64,
        },
    };
    let seed = match args.seed {
        Some(v) => v,
        None => match file.get("seed") {
            Some(s) => s.parse().map_err(|_| anyhow::anyhow!("bad seed: '{s}'"))?,
            None => 7,
        },
    };
    let out = args
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let csv_out = args.csv.clone().or_else(|| file.get("csv").map(PathBuf::from));
    let timings = args.timings || file.get("timings").map(|v| v == "true").unwrap_or(false);

    Ok(SuiteConfig {
        suite: Suite::parse(&suite_name)?,
        lambda_list: parse_list(&lambda)?,
        p_list: parse_list(&p)?,
        grid_n,
        domain,
        y_levels,
        seed,
        out,
        csv_out,
        timings,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Verify(args) = cli.command;
    match run(&args) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &VerifyArgs) -> Result<bool> {
    let cfg = build_config(args)?;
    let report = run_suite(&cfg)?;
    write_json_report(&report, &cfg.out)
        .with_context(|| format!("writing {}", cfg.out.display()))?;
    if let Some(csv) = &cfg.csv_out {
        write_csv_report(&report, csv).with_context(|| format!("writing {}", csv.display()))?;
    }
    let failed: Vec<_> = report.cases.iter().filter(|c| !c.pass).collect();
    println!(
        "{} cases, {} failed -> {}",
        report.cases.len(),
        failed.len(),
        cfg.out.display()
    );
    for c in failed.iter().take(20) {
        println!(
            "FAIL {}/{} lambda={} value={:e} reference={:e} tol={:e}",
            c.suite, c.case_id, c.lambda, c.value, c.reference, c.tol
        );
    }
    if report.cases.is_empty() {
        bail!("no cases were produced");
    }
    Ok(report.all_pass)
}
