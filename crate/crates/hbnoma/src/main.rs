use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbnoma::config::{ScenarioConfig, SnrSpec};
use hbnoma::error::{HarnessError, Result};
use hbnoma::output::{self, Format};
use hbnoma::sweep;

#[derive(Parser)]
#[command(name = "hbnoma", version, about = "Hybrid-beamforming NOMA downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rate and bound of MU-(1,2) while its AoD moves from 50 to 60 degrees.
    Fig2 {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 5.0], allow_hyphen_values = true)]
        snr_db: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// AoD grid step in degrees.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlation of MU-(1,2) with MU-(1,1) over AoDs from -90 to 90 degrees.
    Fig3 {
        #[arg(long)]
        seed: Option<u64>,
        /// AoD grid step in degrees.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Checks a scenario file and the precoder constraints of its first
    /// realisation.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn emit(bytes: Vec<u8>, out: &Option<PathBuf>) -> Result<()> {
    output::write_output(&bytes, out.as_deref())
}

fn validate(path: &Path) -> Result<()> {
    let config = ScenarioConfig::load(path)?;
    let system = sweep::design_first_trial(&config)?;
    let report = hbnoma_core::power_constraint_check(&system.analog, &system.baseband);
    let n = config.num_clusters();
    println!("clusters: {n}, users per cluster: {}", config.users_per_cluster());
    println!("frobenius_sqr: {:.16e} (target {n})", report.frobenius_sqr);
    println!("max_modulus_deviation: {:.3e}", report.max_modulus_deviation);
    for (i, c) in report.column_norms.iter().enumerate() {
        println!("beam {}: column_norm {c:.16e}", i + 1);
    }
    let demoted = system.plan.demoted_anchors();
    if !demoted.is_empty() {
        let list: Vec<String> = demoted.iter().map(|n| (n + 1).to_string()).collect();
        println!("anchor demoted in SIC order: cluster {}", list.join(", "));
    }
    if report.satisfied(1e-9) && report.max_modulus_deviation <= 1e-12 {
        println!("constraints: ok");
        Ok(())
    } else {
        Err(HarnessError::Numerical("precoder constraints violated".into()))
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            output,
        } => {
            let mut c = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                c.seed = s;
            }
            if let Some(t) = trials {
                c.trials = t;
            }
            let manifest = hbnoma::run_scenario(&c)?;
            emit(
                match output.format {
                    Format::Csv => output::run_csv(&manifest),
                    Format::Json => output::to_json(&manifest),
                },
                &output.out,
            )
        }
        Command::Fig2 {
            snr_db,
            trials,
            seed,
            step,
            output,
        } => {
            let mut c = ScenarioConfig::fig2_preset();
            c.snr_db = SnrSpec::Many(snr_db);
            if let Some(s) = seed {
                c.seed = s;
            }
            if let Some(t) = trials {
                c.trials = t;
            }
            let spec = sweep::fig2_spec(step)?;
            let manifest = sweep::fig2_manifest(&c, &spec)?;
            emit(
                match output.format {
                    Format::Csv => output::fig2_csv(&manifest.rows),
                    Format::Json => output::to_json(&manifest),
                },
                &output.out,
            )
        }
        Command::Fig3 { seed, step, output } => {
            let mut c = ScenarioConfig::fig3_preset();
            if let Some(s) = seed {
                c.seed = s;
            }
            let manifest = sweep::fig3_manifest(&c, &sweep::fig3_range(step)?)?;
            emit(
                match output.format {
                    Format::Csv => output::fig3_csv(&manifest.rows),
                    Format::Json => output::to_json(&manifest),
                },
                &output.out,
            )
        }
        Command::Validate { config } => validate(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hbnoma: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
