//! Command-line front end: synthesis, forward NFT, successive eigenvalue
//! removal, closed-form analysis, and the benchmark experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use soliton_nft::bench::{
    self, io, ExperimentConfig, ExperimentKind, OutputFormat, SpectrumFamily,
};
use soliton_nft::eigenfinder::{
    fourier_collocation, newton_refine, CollocationConfig, NewtonConfig,
};
use soliton_nft::scattering::{fb_coefficients, split_index};
use soliton_nft::ser::{self, SerConfig};
use soliton_nft::{analysis, darboux, DiscreteSpectrum};

#[derive(Parser)]
#[command(
    name = "soliton-nft",
    about = "Multi-soliton synthesis and nonlinear-spectrum recovery",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for every randomized experiment.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Truncation parameter ε.
    #[arg(long, global = true, default_value_t = soliton_nft::DEFAULT_EPSILON)]
    epsilon: f64,

    /// Time-grid resolution for synthesis and noise-free runs.
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,

    /// Output file (stdout when omitted, where supported).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output encoding for result tables.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the multi-soliton of a prescribed discrete spectrum.
    Synthesize {
        /// Spectrum JSON ({"eigenvalues": [{re, im}..], "b": [{re, im}..]}).
        #[arg(long)]
        spectrum: PathBuf,
    },
    /// Forward NFT of a pulse: locate eigenvalues by Fourier collocation,
    /// refine by Newton, estimate amplitudes on the unmodified pulse.
    Nft {
        /// Pulse CSV (t,re,im).
        #[arg(long)]
        pulse: PathBuf,
        /// Fourier modes per component (matrix size 2(2K+1)).
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Recover the discrete spectrum by successive eigenvalue removal.
    Ser {
        /// Pulse CSV (t,re,im).
        #[arg(long)]
        pulse: PathBuf,
        /// Optional spectrum JSON supplying initial eigenvalue guesses.
        #[arg(long)]
        guesses: Option<PathBuf>,
    },
    /// Closed-form predictions for a spectrum: tail shift, per-iteration
    /// durations, and the complexity factor.
    Analyze {
        #[arg(long)]
        spectrum: PathBuf,
    },
    /// Reproduce a benchmark experiment.
    Bench {
        #[command(subcommand)]
        which: BenchCommand,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Pulse-duration staircase and complexity factor (noise free).
    Fig3(BenchArgs),
    /// SER vs classical phase-error variance across an SNR grid.
    Fig4(BenchArgs),
    /// Truncation sensitivity of the classical method at 30 dB.
    Fig5(BenchArgs),
    /// Escaping-soliton geometry under a controlled eigenvalue error.
    Separation(BenchArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Eigenvalue family (a, b or c).
    #[arg(long, default_value = "c")]
    family: String,

    /// Spectrum JSON overriding the named family.
    #[arg(long)]
    spectrum: Option<PathBuf>,

    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// SNR grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0])]
    snr_db: Vec<f64>,

    /// Sampling rate as a multiple of the batch-max bandwidth.
    #[arg(long, default_value_t = 4.0)]
    oversampling: f64,

    /// |δ| values for the separation experiment, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-4, 1e-6, 1e-8])]
    deltas: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> soliton_nft::Result<()> {
    let format: OutputFormat = cli.format.parse()?;
    match cli.command {
        Command::Synthesize { spectrum } => {
            let spec = io::read_spectrum_json(&spectrum)?;
            let grid = darboux::grid_for_spectrum(&spec, cli.epsilon, cli.samples)?;
            let pulse = darboux::synthesize(&spec, &grid)?;
            match &cli.output {
                Some(path) => io::write_pulse_csv(path, &pulse)?,
                None => {
                    return Err(soliton_nft::Error::InvalidInput(
                        "synthesize requires --output".into(),
                    ))
                }
            }
            eprintln!(
                "synthesized {} samples on [{:.4}, {:.4}], energy {:.6}",
                pulse.len(),
                pulse.t_start(),
                pulse.t_end(),
                pulse.energy()
            );
            Ok(())
        }
        Command::Nft { pulse, modes } => {
            let pulse = io::read_pulse_csv(&pulse)?;
            let mut config = CollocationConfig::for_pulse(&pulse);
            if let Some(k) = modes {
                config.modes = k;
            }
            let candidates = fourier_collocation(&pulse, &config)?;
            let p = split_index(pulse.len(), 0.5);
            let mut entries = Vec::new();
            for candidate in candidates {
                let refined = newton_refine(&pulse, candidate, &NewtonConfig::default())?;
                let (_, b) = fb_coefficients(&pulse, refined.lambda, p)?;
                entries.push((refined.lambda, b));
            }
            let spec = DiscreteSpectrum::new(entries)?;
            match &cli.output {
                Some(path) => io::write_spectrum_json(path, &spec)?,
                None => println!("{}", serde_json::to_string_pretty(&spec)?),
            }
            Ok(())
        }
        Command::Ser { pulse, guesses } => {
            let pulse = io::read_pulse_csv(&pulse)?;
            let guesses = match guesses {
                Some(path) => Some(io::read_spectrum_json(&path)?.eigenvalues()),
                None => None,
            };
            let config = SerConfig {
                epsilon: cli.epsilon,
                ..SerConfig::default()
            };
            let report = ser::decompose(&pulse, guesses.as_deref(), &config)?;
            match &cli.output {
                Some(path) => io::write_json(path, &report)?,
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(())
        }
        Command::Analyze { spectrum } => {
            let spec = io::read_spectrum_json(&spectrum)?;
            let mut remaining: Vec<_> = spec.sorted_descending_im();
            let mut rows = Vec::new();
            while !remaining.is_empty() {
                let sub = DiscreteSpectrum::new(
                    remaining.iter().map(|e| (e.lambda, e.b)).collect(),
                )?;
                rows.push(bench::ResultRow {
                    experiment: "analyze".into(),
                    trial: 0,
                    eigenvalue_index: remaining.len(),
                    quantity: "duration_estimate".into(),
                    value: analysis::duration_estimate(&sub, cli.epsilon),
                });
                rows.push(bench::ResultRow {
                    experiment: "analyze".into(),
                    trial: 0,
                    eigenvalue_index: remaining.len(),
                    quantity: "tail_shift".into(),
                    value: analysis::tail_shift(&sub),
                });
                remaining.pop();
            }
            let mut durations: Vec<f64> = rows
                .iter()
                .filter(|r| r.quantity == "duration_estimate")
                .map(|r| r.value)
                .collect();
            durations.reverse(); // index n = 1..N
            rows.push(bench::ResultRow {
                experiment: "analyze".into(),
                trial: 0,
                eigenvalue_index: 0,
                quantity: "alpha".into(),
                value: analysis::complexity_factor(&durations)?,
            });
            io::emit_results(cli.output.as_deref(), format, &rows)
        }
        Command::Bench { which } => {
            let (kind, args) = match &which {
                BenchCommand::Fig3(a) => (ExperimentKind::Duration, a),
                BenchCommand::Fig4(a) => (ExperimentKind::SnrSweep, a),
                BenchCommand::Fig5(a) => (ExperimentKind::Truncation, a),
                BenchCommand::Separation(a) => (ExperimentKind::Separation, a),
            };
            let eigenvalues = match &args.spectrum {
                Some(path) => io::read_spectrum_json(path)?.eigenvalues(),
                None => args.family.parse::<SpectrumFamily>()?.eigenvalues(),
            };
            let config = ExperimentConfig {
                eigenvalues,
                trials: args.trials,
                snr_grid_db: args.snr_db.clone(),
                epsilon: cli.epsilon,
                seed: cli.seed,
                oversampling: args.oversampling,
                samples: cli.samples,
                deltas: args.deltas.clone(),
            };
            let rows = bench::run_experiment(kind, &config)?;
            if matches!(which, BenchCommand::Fig3(_)) && format == OutputFormat::Csv {
                // fig3 ships in its dedicated columnar shape
                emit_fig3(cli.output.as_deref(), &rows)
            } else {
                io::emit_results(cli.output.as_deref(), format, &rows)
            }
        }
    }
}

/// fig3 CSV: columns `n,T_n,alpha`.
fn emit_fig3(path: Option<&std::path::Path>, rows: &[bench::ResultRow]) -> soliton_nft::Result<()> {
    let alpha = rows
        .iter()
        .find(|r| r.quantity == "alpha")
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let mut out = String::from("n,T_n,alpha\n");
    for r in rows.iter().filter(|r| r.quantity == "duration") {
        out.push_str(&format!("{},{},{}\n", r.eigenvalue_index, r.value, alpha));
    }
    match path {
        Some(p) => std::fs::write(p, out)?,
        None => print!("{out}"),
    }
    Ok(())
}
