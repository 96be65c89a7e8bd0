//! Simulation CLI: sweeps the ergodic symmetric sum rates of aligned PCoF
//! and the time-sharing baseline over an SNR grid and writes CSV.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 configuration error,
//! 3 trial failure budget exceeded.

use apcof::sim::{
    config_metadata, emit_csv_file, ergodic_sweep, AlignSeed, Scheme, SimConfig,
};
use apcof::Error;
use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "apcof",
    about = "Aligned precoded compute-and-forward rate simulation for the 2x2x2 MIMO interference channel",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Antennas per node (M >= 2).
    #[arg(long, default_value_t = 2)]
    antennas: usize,

    /// First SNR point in dB.
    #[arg(long, default_value_t = 0.0)]
    snr_db_start: f64,

    /// Last SNR point in dB (inclusive).
    #[arg(long, default_value_t = 50.0)]
    snr_db_end: f64,

    /// SNR grid step in dB.
    #[arg(long, default_value_t = 5.0)]
    snr_db_step: f64,

    /// Monte Carlo trials per SNR point.
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Master seed; per-trial seeds derive from it deterministically.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Comma-separated schemes to evaluate.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "pcof_optimized,pcof_identity,time_sharing"
    )]
    schemes: Vec<String>,

    /// Prime p for the GF(p^2) message field (p = 3 mod 4).
    #[arg(long, default_value_t = 7)]
    prime: u32,

    /// Output CSV path.
    #[arg(long, default_value = "pcof_rates.csv")]
    out: String,

    /// Alignment-chain seed vector policy.
    #[arg(long, value_enum, default_value_t = AlignSeedArg::Ones)]
    align_seed: AlignSeedArg,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in invariant suites and report PASS/FAIL per suite.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignSeedArg {
    Ones,
    Random,
}

fn build_config(cli: &Cli) -> Result<SimConfig, Error> {
    if cli.snr_db_step <= 0.0 && cli.snr_db_end != cli.snr_db_start {
        return Err(Error::InvalidParameter(format!(
            "snr-db-step {} must be positive",
            cli.snr_db_step
        )));
    }
    let mut grid = Vec::new();
    if cli.snr_db_end < cli.snr_db_start {
        return Err(Error::InvalidParameter(
            "snr-db-end is below snr-db-start".into(),
        ));
    }
    let steps = if cli.snr_db_step > 0.0 {
        ((cli.snr_db_end - cli.snr_db_start) / cli.snr_db_step + 1e-9).floor() as usize
    } else {
        0
    };
    for k in 0..=steps {
        grid.push(cli.snr_db_start + k as f64 * cli.snr_db_step);
    }
    let schemes = cli
        .schemes
        .iter()
        .map(|s| s.parse::<Scheme>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = SimConfig {
        antennas: cli.antennas,
        snr_grid_db: grid,
        trials: cli.trials,
        seed: cli.seed,
        schemes,
        prime: cli.prime,
        output_path: cli.out.clone(),
        align_seed: match cli.align_seed {
            AlignSeedArg::Ones => AlignSeed::Ones,
            AlignSeedArg::Random => AlignSeed::Random,
        },
    };
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(Command::Selftest) = cli.command {
        let failures = apcof::selftest::run_all();
        return if failures == 0 {
            println!("selftest: all suites passed");
            ExitCode::SUCCESS
        } else {
            println!("selftest: {failures} suite(s) failed");
            ExitCode::from(1)
        };
    }

    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };

    let points = match ergodic_sweep(&config) {
        Ok(p) => p,
        Err(e @ Error::TrialFailed { .. }) => {
            eprintln!("trial failure budget exceeded: {e}");
            return ExitCode::from(3);
        }
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };

    if let Err(e) = emit_csv_file(&points, &config.output_path, &config_metadata(&config)) {
        eprintln!("i/o error: {e}");
        return ExitCode::from(2);
    }
    println!(
        "wrote {} rate points ({} schemes x {} SNR points, {} trials) to {}",
        points.len(),
        config.schemes.len(),
        config.snr_grid_db.len(),
        config.trials,
        config.output_path
    );
    ExitCode::SUCCESS
}
