use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use coarse_chains::equivariant::torus_homology;
use coarse_chains::error::{Error, Result};
use coarse_chains::io::{self, AnyChain};
use coarse_chains::scenario::{self, Scenario};
use coarse_chains::verify::{run_suite, Mutation, SuiteConfig, DEFAULT_SEED};

/// Exit status for a verification run with failing checks.
const SUITE_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "coarse-chains", version, about = "Exact wrong-way maps on lattice chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name) and print its report.
    Run {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add wall-clock time to the report; reports are then no longer
        /// byte-stable across runs.
        #[arg(long)]
        timing: bool,
    },
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, value_parser = parse_mutation)]
        mutation: Option<Mutation>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the wrong-way map to a chain file.
    Wrongway {
        /// Ambient dimension and codimension, e.g. `3,1`.
        #[arg(long)]
        pair: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        perturb: bool,
        /// Orientation of the normal frame, 1 or -1.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        orientation: i64,
    },
    /// Homology of the quotient complex of the n-torus.
    Homology {
        #[arg(long)]
        torus: usize,
        #[arg(long, default_value_t = 1)]
        rmax: i64,
    },
}

fn parse_mutation(s: &str) -> std::result::Result<Mutation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(value: &Value, out: Option<&PathBuf>) -> Result<()> {
    let text = io::to_canonical_string(value);
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    match scenario::bundled(arg) {
        Some(text) if !PathBuf::from(arg).exists() => Scenario::from_json(&io::parse_json(text)?, None),
        _ => Scenario::from_file(&PathBuf::from(arg)),
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Run { scenario, out, timing } => {
            let start = Instant::now();
            let s = load_scenario(&scenario)?;
            let mut report = s.run()?;
            if timing {
                report["wall_clock_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            emit(&report, out.as_ref())?;
            Ok(0)
        }
        Command::Verify { mutation, seed, out } => {
            let start = Instant::now();
            let cfg = SuiteConfig {
                seed,
                mutation,
                ..SuiteConfig::default()
            };
            let report = run_suite(&cfg);
            emit(&report.to_json(), out.as_ref())?;
            for c in &report.checks {
                let status = if c.passed() { "ok" } else if c.gating { "FAIL" } else { "warn" };
                eprintln!("{status:>4}  {:<28} {:>6} cases, {} failures", c.name, c.cases, c.failures);
            }
            eprintln!("suite finished in {:.2?}", start.elapsed());
            Ok(if report.passed() { 0 } else { SUITE_FAILED })
        }
        Command::Wrongway {
            pair,
            input,
            out,
            perturb,
            orientation,
        } => {
            if orientation != 1 && orientation != -1 {
                return Err(Error::Parse("orientation must be 1 or -1".into()));
            }
            let pair = io::parse_pair(&pair)?.with_orientation(orientation);
            let text = fs::read_to_string(&input).map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
            let chain = AnyChain::from_json(&io::parse_json(&text)?)?;
            let ctx = chain.context(pair, perturb)?;
            let image = chain.wrong_way(&ctx)?;
            emit(&image.to_json(), Some(&out))?;
            Ok(0)
        }
        Command::Homology { torus, rmax } => {
            let (complex, reports) = torus_homology(torus, rmax)?;
            let report = json!({
                "torus": torus,
                "r_max": rmax,
                "basis_sizes": complex.basis_sizes(),
                "homology": reports,
            });
            emit(&report, None)?;
            Ok(0)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("COARSE_CHAINS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", io::to_canonical_string(&scenario::error_json(&e)));
            ExitCode::from(scenario::exit_code(&e) as u8)
        }
    }
}
