use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use loclet::denoise::{denoise_llet, denoise_llet_pf_with, denoise_pf, snr_db, DenoiseConfig, SigmaSource};
use loclet::graph::{spectral_upper_bound, DEFAULT_DENSE_CAP};
use loclet_bench::{
    add_noise, build_partition, generate_signal, rep_seed, run_denoise_benchmark, run_entropy_scan,
    run_noise_estimation, write_bench_csv, write_entropy_csv, write_noise_csv, CountSource, ExperimentConfig, KChoice,
    MatrixSource, SignalSpec, Workspace, DEFAULT_K_GRID, DEFAULT_PROBES, NOISE_K_GRID,
};

#[derive(Parser)]
#[command(name = "loclet", version, about = "Localized spectral graph filtering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Matrix Market file, `laplacian:<path>`, or `swissroll:n,k[,seed]`
    #[arg(long, default_value = "swissroll:1000,10")]
    matrix: MatrixSource,
    /// Chebyshev degree
    #[arg(long = "N", default_value_t = 200)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest graph handed to the dense eigensolver
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    cap: usize,
}

#[derive(Args, Clone)]
struct Experiment {
    /// Number of intervals, or `auto` for the entropy elbow
    #[arg(long = "K", default_value = "auto")]
    k: KChoice,
    /// Comma-separated noise levels
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    sigma: Vec<f64>,
    /// Comma-separated signal ranges `i-j` (largest eigenvalue first, 1-based)
    #[arg(long, value_delimiter = ',', required = true)]
    signal: Vec<SignalSpec>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Hutchinson probes for interval counts; 0 uses exact counts
    #[arg(long, default_value_t = DEFAULT_PROBES)]
    probes: usize,
    /// Use the median estimate of sigma in the support test
    #[arg(long)]
    estimate_sigma: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Llet,
    LletPf,
    Pf,
}

#[derive(Subcommand)]
enum Command {
    /// Load a graph and print its size and spectral bounds
    Load {
        #[command(flatten)]
        common: Common,
    },
    /// Write a frequency-sparse signal `f_{i-j}` as CSV
    GenSignal {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        signal: SignalSpec,
        /// Add Gaussian noise of this level
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
    },
    /// Noise-level estimators over a K and r sweep
    EstimateNoise {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        /// Comma-separated K grid
        #[arg(long = "K-grid", value_delimiter = ',')]
        k_grid: Option<Vec<usize>>,
        /// Comma-separated trim parameters
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        r: Vec<usize>,
    },
    /// Denoise one noisy realisation with fixed thresholds
    Denoise {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long, value_enum, default_value = "llet-pf")]
        method: MethodArg,
        /// Threshold on the detected support (PF: the only threshold)
        #[arg(long, default_value_t = 0.0)]
        t1: f64,
        /// Threshold off the detected support
        #[arg(long, default_value_t = 0.0)]
        t2: f64,
    },
    /// Grid-searched denoising table over signals, noise levels and repetitions
    Bench {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
    },
    /// Partition entropy and count error per K
    EntropyScan {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K-grid", value_delimiter = ',')]
        k_grid: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_PROBES)]
        probes: usize,
        /// Relative entropy gain below which K stops growing
        #[arg(long, default_value_t = 0.05)]
        gain: f64,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn experiment_config(common: &Common, exp: &Experiment) -> ExperimentConfig {
    ExperimentConfig {
        k: exp.k,
        sigmas: exp.sigma.clone(),
        signals: exp
            .signal
            .iter()
            .map(|s| SignalSpec {
                seed: common.seed,
                ..*s
            })
            .collect(),
        reps: exp.reps,
        alpha: exp.alpha,
        degree: common.degree,
        seed: common.seed,
        counts: if exp.probes == 0 {
            CountSource::Oracle
        } else {
            CountSource::Hutchinson { probes: exp.probes }
        },
        estimate_sigma: exp.estimate_sigma,
        ..ExperimentConfig::default()
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Load { common } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let mut out = output(&common.out)?;
            writeln!(out, "n,edges,components,lambda_max_bound,lambda_1")?;
            writeln!(
                out,
                "{},{},{},{:.10},{}",
                ws.n(),
                ws.graph.edges().len(),
                ws.graph.connected_components(),
                spectral_upper_bound(&ws.op),
                ws.eig
                    .as_ref()
                    .map(|e| format!("{:.10}", e.lambda_1()))
                    .unwrap_or_default()
            )?;
        }
        Command::GenSignal { common, signal, sigma } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let spec = SignalSpec {
                seed: common.seed,
                ..signal
            };
            let clean = generate_signal(ws.oracle()?, &spec)?;
            let values = add_noise(&clean, sigma, rep_seed(common.seed, 0, 0))?;
            let mut w = csv::Writer::from_writer(output(&common.out)?);
            w.write_record(["vertex", "value"])?;
            for (i, v) in values.iter().enumerate() {
                w.write_record([i.to_string(), format!("{v:.17e}")])?;
            }
            w.flush()?;
        }
        Command::EstimateNoise { common, exp, k_grid, r } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let config = experiment_config(&common, &exp);
            let grid = k_grid.unwrap_or_else(|| NOISE_K_GRID.to_vec());
            let rows = run_noise_estimation(&ws, &config, &grid, &r)?;
            write_noise_csv(&rows, output(&common.out)?)?;
        }
        Command::Denoise {
            common,
            exp,
            method,
            t1,
            t2,
        } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let config = experiment_config(&common, &exp);
            let (Some(spec), Some(&sigma)) = (config.signals.first(), config.sigmas.first()) else {
                bail!("denoise needs one signal and one noise level");
            };
            let clean = generate_signal(ws.oracle()?, spec)?;
            let noisy = add_noise(&clean, sigma, rep_seed(common.seed, 0, 0))?;
            let partition = build_partition(&ws, config.k, config.degree, config.counts, config.seed)?;
            let mut dc = DenoiseConfig::new(partition).with_thresholds(t1, t2);
            dc.alpha = config.alpha;
            dc.degree = config.degree;
            dc.seed = config.seed;
            if !config.estimate_sigma {
                dc.sigma = SigmaSource::Known(sigma);
            }
            let result = match method {
                MethodArg::Llet => denoise_llet(&ws.op, &noisy, &dc)?,
                MethodArg::LletPf => {
                    let calc = loclet::calculus::ChebyshevCalculus::new(
                        &ws.op,
                        dc.degree,
                        loclet::chebyshev::Damping::Jackson,
                    )?;
                    denoise_llet_pf_with(&calc, ws.oracle()?, &noisy, &dc)?
                }
                MethodArg::Pf => denoise_pf(ws.oracle()?, &noisy, t1)?,
            };
            eprintln!(
                "{}: SNR_in {:.3} dB, SNR_out {:.3} dB, support {}",
                result.method,
                snr_db(&clean, &noisy)?,
                result.snr_out(&clean)?,
                result.support_size()
            );
            let mut w = csv::Writer::from_writer(output(&common.out)?);
            w.write_record(["vertex", "clean", "noisy", "estimate"])?;
            for i in 0..clean.len() {
                w.write_record([
                    i.to_string(),
                    format!("{:.17e}", clean[i]),
                    format!("{:.17e}", noisy[i]),
                    format!("{:.17e}", result.estimate[i]),
                ])?;
            }
            w.flush()?;
        }
        Command::Bench { common, exp } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let config = experiment_config(&common, &exp);
            if ws.eig.is_none() {
                bail!(
                    "n = {} exceeds the dense cap; test signals and the PF baseline need the eigendecomposition",
                    ws.n()
                );
            }
            let rows = run_denoise_benchmark(&ws, &config)?;
            write_bench_csv(&rows, output(&common.out)?)?;
        }
        Command::EntropyScan {
            common,
            k_grid,
            probes,
            gain,
        } => {
            let ws = Workspace::load(&common.matrix, common.cap)?;
            let grid = k_grid.unwrap_or_else(|| DEFAULT_K_GRID.to_vec());
            let rows = run_entropy_scan(&ws, &grid, common.degree, probes, common.seed, gain)?;
            write_entropy_csv(&rows, output(&common.out)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
