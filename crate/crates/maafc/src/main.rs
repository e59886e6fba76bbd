//! Command-line front end for the experiment library.
//!
//! Every subcommand reads JSON configs, runs a library call, and writes CSV
//! or JSON to `--out` (stdout when omitted). Errors exit nonzero with one
//! machine-readable JSON line on stderr.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use maafc::channel::Scenario;
use maafc::codec::{bpsk_map, encode, extend_generator, CodeSpec, GeneratorMatrix};
use maafc::de::{de_run, write_trajectory_csv, DeScenario};
use maafc::decoder::CheckMode;
use maafc::sim::{
    run_ber_point, sweep_rate, sweep_snr, trace_point, write_output, BerPoint, ExperimentConfig,
};
use maafc::weights::{
    coded_symbol_pmf, design_weights, gaussianity_residual, DesignConfig, GaussFitSpec,
    VarianceMode,
};

#[derive(Parser)]
#[command(name = "maafc", version, about = "Multiple-access analog fountain code simulator")]
struct Cli {
    /// Experiment config JSON file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo frames.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the decoder's check-node rule: exact | gauss.
    #[arg(long, global = true, value_name = "MODE")]
    check_mode: Option<CheckMode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a weight set whose coded-symbol distribution passes the
    /// binned Gaussian-fit criterion; prints the set and its residuals.
    DesignWeights {
        /// Number of weights f.
        #[arg(long, default_value_t = 8)]
        count: usize,
        /// Coded-symbol degree used during evaluation; defaults to f.
        #[arg(long)]
        degree: Option<usize>,
        /// Bin width.
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        /// Per-bin squared-deviation tolerance.
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long, default_value_t = 15)]
        i_max: usize,
        /// matched | standard
        #[arg(long, default_value = "matched")]
        variance_mode: VarianceMode,
        /// Draw summand weights with replacement during evaluation.
        #[arg(long)]
        replacement: bool,
        #[arg(long, default_value_t = 48)]
        restarts: usize,
        #[arg(long, default_value_t = 600)]
        steps: usize,
    },
    /// Encode coded symbols from a code spec and message bits, one symbol
    /// per line.
    Encode {
        /// Number of coded symbols to emit.
        #[arg(long)]
        symbols: usize,
        /// Also write the generator matrix in row-wise text form.
        #[arg(long, value_name = "PATH")]
        generator_out: Option<PathBuf>,
    },
    /// Measure one Monte Carlo BER point at a fixed number of coded symbols.
    Simulate {
        #[arg(long)]
        symbols: usize,
        /// Write a per-iteration decoder trace of the first frame.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Density-evolution trajectory for the configured scenario.
    De {
        #[arg(long, conflicts_with = "symbol_ratio")]
        symbols: Option<usize>,
        /// Coded symbols per information symbol, m/k.
        #[arg(long)]
        symbol_ratio: Option<f64>,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sum-rate vs received SNR sweep at the configured target BER.
    SweepSnr,
    /// Per-user BER vs inverse sum-rate curve.
    BerCurve,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", serde_json::json!({ "error": err.to_string() }));
            std::process::ExitCode::FAILURE
        }
    }
}

type CliError = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }

    match &cli.command {
        Command::DesignWeights {
            count,
            degree,
            delta,
            epsilon,
            i_max,
            variance_mode,
            replacement,
            restarts,
            steps,
        } => {
            let fit = GaussFitSpec::new(*delta, *epsilon, *i_max, *variance_mode)?;
            let cfg = DesignConfig {
                f: *count,
                degree: degree.unwrap_or(*count),
                replacement: *replacement,
                fit,
                seed: cli.seed.unwrap_or(0),
                restarts: *restarts,
                steps_per_restart: *steps,
            };
            let set = design_weights(&cfg)?;
            let pmf = coded_symbol_pmf(&set, cfg.degree, cfg.replacement)?;
            let report = serde_json::json!({
                "weights": set,
                "degree": cfg.degree,
                "replacement": cfg.replacement,
                "epsilon": *epsilon,
                "avg_energy": set.avg_energy(),
                "residual_matched": gaussianity_residual(
                    &pmf,
                    &GaussFitSpec::new(*delta, *epsilon, *i_max, VarianceMode::MatchedVariance)?,
                )?,
                "residual_standard": gaussianity_residual(
                    &pmf,
                    &GaussFitSpec::new(*delta, *epsilon, *i_max, VarianceMode::StandardNormal)?,
                )?,
            });
            emit(&cli, &format!("{}\n", serde_json::to_string_pretty(&report)?))
        }
        Command::Encode {
            symbols,
            generator_out,
        } => {
            #[derive(Deserialize)]
            struct EncodeJob {
                spec: CodeSpec,
                bits: Vec<u8>,
            }
            let job: EncodeJob = read_config(&cli, "encode")?;
            let g = extend_generator(&job.spec, &GeneratorMatrix::empty(job.spec.k), *symbols)?;
            if let Some(path) = generator_out {
                write_output(path, &g.to_text())?;
            }
            let coded = encode(&g, &bpsk_map(&job.bits)?)?;
            let mut text = String::new();
            for u in coded {
                text.push_str(&format!("{u}\n"));
            }
            emit(&cli, &text)
        }
        Command::Simulate { symbols, trace } => {
            let cfg = experiment_config(&cli)?;
            if let Some(path) = trace {
                let rows = trace_point(&cfg, *symbols, 0)?;
                let mut text = String::from("iteration");
                let users = cfg.scenario.users.len();
                for i in 0..users {
                    text.push_str(&format!(",mean_abs_llr_{i}"));
                }
                for i in 0..users {
                    text.push_str(&format!(",ber_{i}"));
                }
                text.push('\n');
                for row in rows {
                    text.push_str(&row.iteration.to_string());
                    for v in &row.mean_abs_llr {
                        text.push_str(&format!(",{v}"));
                    }
                    if let Some(bers) = &row.ber_vs_truth {
                        for b in bers {
                            text.push_str(&format!(",{b}"));
                        }
                    }
                    text.push('\n');
                }
                write_output(path, &text)?;
            }
            let point = run_ber_point(&cfg, *symbols)?;
            emit(&cli, &point_csv(&point))
        }
        Command::De {
            symbols,
            symbol_ratio,
            max_iters,
            tol,
        } => {
            let cfg = experiment_config(&cli)?;
            let scenario: Scenario = cfg.scenario.build(None)?;
            let m = match (symbols, symbol_ratio) {
                (Some(m), _) => *m,
                (None, Some(r)) => (r * cfg.scenario.k as f64).round().max(1.0) as usize,
                (None, None) => return Err("de needs --symbols or --symbol-ratio".into()),
            };
            let de_sc = DeScenario::from_scenario(&scenario, m)?;
            let run = de_run(&de_sc, *max_iters, *tol);
            let mut buf = Vec::new();
            write_trajectory_csv(&run, &mut buf)?;
            emit(&cli, &String::from_utf8(buf)?)
        }
        Command::SweepSnr => {
            let cfg = experiment_config(&cli)?;
            emit(&cli, &sweep_snr(&cfg)?)
        }
        Command::BerCurve => {
            let cfg = experiment_config(&cli)?;
            emit(&cli, &sweep_rate(&cfg)?)
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned>(cli: &Cli, what: &str) -> Result<T, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| format!("{what} needs --config <json>"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))?)
}

fn experiment_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg: ExperimentConfig = read_config(cli, "this command")?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(mode) = cli.check_mode {
        cfg.decoder.check_mode = mode;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Single-point output in the same shape as the BER-curve CSV.
fn point_csv(point: &BerPoint) -> String {
    let mut csv = String::from(
        "snr_db,inverse_sum_rate,m,frames,user_id,gain,degree,errors,bits_tested,ber_sim,resolved,ber_de\n",
    );
    for u in &point.users {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            point.snr_db,
            point.inverse_sum_rate,
            point.m,
            point.frames,
            u.user_id,
            u.gain,
            u.degree,
            u.errors,
            u.bits_tested,
            u.ber_sim,
            u.resolved,
            u.ber_de,
        ));
    }
    csv
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => Ok(write_output(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
