use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdpr_core::experiments::{
    make_phantom, recon_ensemble, reconstruct_measurements, run_phase_diagram, run_recon_experiment, run_verify,
    simulate, CheckStatus, ExperimentConfig,
};
use cdpr_core::forward::MeasurementSet;
use cdpr_core::textio::{VectorFile, KIND_SIGNAL};
use cdpr_core::Error;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cdpr", version, about = "Coded diffraction simulation and sparse phase retrieval")]
struct Cli {
    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the parallel experiments.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the phantom and its (optionally noisy) measurements.
    Simulate {
        /// Noise level in dB, overriding the config.
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Reconstruct from measurements, simulating them first if none are given.
    Reconstruct {
        #[arg(long)]
        measurements: Option<PathBuf>,
        /// Reference signal for error traces.
        #[arg(long)]
        phantom: Option<PathBuf>,
        #[arg(long)]
        sparsity: Option<usize>,
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Success rate over a grid of sparsity levels and measurement counts.
    PhaseDiagram,
    /// Operator identities, dense oracles and the tangent-space bound.
    Verify,
    /// Write the configured crystal phantom.
    GenCrystal,
}

enum Failure {
    Config(String),
    Run(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if matches!(cli.command, Command::Verify) => ExperimentConfig::verify_default(),
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    match &cli.command {
        Command::Simulate { snr: Some(v) } | Command::Reconstruct { snr: Some(v), .. } => config.snr_db = Some(*v),
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn read_phantom(path: &Path) -> Result<cdpr_core::CrystalSignal, Failure> {
    Ok(VectorFile::read(path)?.into_signal()?)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot set thread count: {e}")))?;
    }
    let out = config.out.clone();
    match &cli.command {
        Command::GenCrystal => {
            let x = make_phantom(&config)?;
            std::fs::create_dir_all(&out).map_err(Error::from)?;
            let path = out.join("phantom.txt");
            VectorFile::from_signal(&x, KIND_SIGNAL, Some(config.seed)).write(&path)?;
            println!("sparsity {}", x.sparsity);
            report_files(&[path]);
        }
        Command::Simulate { .. } => {
            let x = make_phantom(&config)?;
            let ens = recon_ensemble(&config)?;
            let g = simulate(&config, &x, &ens)?;
            std::fs::create_dir_all(&out).map_err(Error::from)?;
            let phantom_path = out.join("phantom.txt");
            let g_path = out.join("measurements.txt");
            VectorFile::from_signal(&x, KIND_SIGNAL, Some(config.seed)).write(&phantom_path)?;
            g.write(&g_path)?;
            println!("m = {}, ensemble {}", g.len(), g.ensemble_id);
            report_files(&[phantom_path, g_path]);
        }
        Command::Reconstruct {
            measurements,
            phantom,
            sparsity,
            ..
        } => {
            let output = match measurements {
                Some(path) => {
                    let g = MeasurementSet::read(path)?;
                    let reference = phantom.as_deref().map(read_phantom).transpose()?;
                    reconstruct_measurements(&config, g, reference, *sparsity)?
                }
                None => {
                    if phantom.is_some() || sparsity.is_some() {
                        return Err(Failure::Config("--phantom and --sparsity need --measurements".into()));
                    }
                    run_recon_experiment(&config)?
                }
            };
            let summary = output.report.summary();
            println!("iterations {}", summary.iterations_run);
            if let Some(err) = summary.rel_error {
                println!("relative error {err:e}");
            }
            report_files(&output.write(&out)?);
        }
        Command::PhaseDiagram => {
            let diagram = run_phase_diagram(&config)?;
            print!("{}", diagram.to_matrix());
            for w in diagram.monotonicity_warnings() {
                eprintln!("warning: {w}");
            }
            report_files(&diagram.write(&out)?);
        }
        Command::Verify => {
            let report = run_verify(&config)?;
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Info => "info",
                    CheckStatus::Skipped => "skip",
                };
                let bound = c.bound.map(|b| format!(" (bound {b:e})")).unwrap_or_default();
                println!("{status} {:<28} {:e}{bound} {}", c.name, c.value, c.note);
            }
            report_files(&report.write(&out)?);
            if !report.passed() {
                return Err(Failure::Check);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
