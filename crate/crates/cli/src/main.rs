use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use respa_md::diagnostics::run_checks;
use respa_md::experiment::{
    compare_points, max_rdf_difference, run_points, single_points, sweep_points, write_rdf_comparison,
    write_report, ExperimentError, PointResult,
};
use respa_md::scenario::{parse_scenario, ExperimentPlan, ScenarioError};

const EXIT_INVALID: u8 = 1;
const EXIT_ALL_FAILED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "respa-md", version, about = "LJ + ATM molecular dynamics with r-RESPA multiple time stepping")]
struct Cli {
    /// Worker threads for force passes (1 gives bit-reproducible output).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides the scenario's `output`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// RNG seed (overrides the scenario's `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's base point (plus the s = 1 reference).
    Run { scenario: PathBuf },
    /// Run the full ν × s grid.
    Sweep { scenario: PathBuf },
    /// Compare RDFs of a pure two-body run and the three-body runs.
    Compare { scenario: PathBuf },
    /// Run the built-in oracle checks on small random systems.
    Check,
}

enum Failure {
    Invalid(String),
    AllFailed,
    Io(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io { .. } => Failure::Io(e.to_string()),
            ExperimentError::Invalid(inner) => Failure::Invalid(inner.to_string()),
        }
    }
}

fn load(path: &Path, cli: &Cli) -> Result<(ExperimentPlan, PathBuf), Failure> {
    let mut plan = parse_scenario(path)?;
    if let Some(seed) = cli.seed {
        plan.base.seed = seed;
    }
    let out = cli
        .output
        .clone()
        .or_else(|| plan.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(path.file_stem().unwrap_or_default()));
    Ok((plan, out))
}

fn report_point(p: &PointResult) {
    let status = if p.status.is_ok() { "ok".to_string() } else { format!("{:?}", p.status) };
    let rvite = p.rvite.map_or("-".into(), |r| format!("{r:.4e}"));
    eprintln!("nu={} s={:<3} {:>8.2}s rvite={} {}", p.nu, p.s, p.wall_seconds, rvite, status);
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let (path, grid): (&PathBuf, fn(&ExperimentPlan) -> Vec<(f64, usize)>) = match &cli.command {
        Command::Check => {
            let outcomes = run_checks(cli.seed.unwrap_or(42));
            let mut ok = true;
            for c in &outcomes {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return if ok { Ok(()) } else { Err(Failure::Invalid("oracle checks failed".into())) };
        }
        Command::Run { scenario } => (scenario, single_points),
        Command::Sweep { scenario } => (scenario, sweep_points),
        Command::Compare { scenario } => (scenario, compare_points),
    };
    let (plan, out) = load(path, cli)?;
    let report = run_points(&plan.base, &grid(&plan), &mut report_point).map_err(ExperimentError::from)?;
    write_report(&report, &plan.base, &out)?;
    if matches!(cli.command, Command::Compare { .. }) {
        write_rdf_comparison(&report, &out)?;
        let pure = report.points.first().filter(|p| p.status.is_ok() && !p.rdf.is_empty());
        if let Some(pure) = pure {
            for p in report.points.iter().skip(1).filter(|p| p.status.is_ok() && !p.rdf.is_empty()) {
                eprintln!("max |g_pure_2b - g(nu={}, s={})| = {:.4}", p.nu, p.s, max_rdf_difference(&pure.rdf, &p.rdf));
            }
        }
    }
    eprintln!("wrote {}", out.display());
    if report.all_failed() {
        return Err(Failure::AllFailed);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::AllFailed) => {
            eprintln!("error: every grid point blew up");
            ExitCode::from(EXIT_ALL_FAILED)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
