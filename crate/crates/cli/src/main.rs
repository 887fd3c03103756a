use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use onebit_core::harness::{emit_csv, load_config, run_suite};
use onebit_core::numerics::{parse_vector_text, vector_to_text};
use onebit_core::theory::evaluate;
use onebit_core::{
    biht, gaussian_matrix, noisy_sign_map, random_sparse_unit_signal, BihtConfig, DenseMatrix,
    Error, ObjectiveVariant, PrngStream, Result, SignVector,
};

#[derive(Parser)]
#[command(name = "onebit", version, about = "1-bit compressive sensing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    L1,
    L2,
    Hinge,
    Hybrid,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an i.i.d. standard Gaussian matrix.
    GenMatrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a random sparse unit-norm signal.
    GenSignal {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        sparsity: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Take sign measurements of a signal, optionally with Gaussian noise.
    Measure {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a sparse unit signal with BIHT.
    Reconstruct {
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        sparsity: usize,
        #[arg(long, value_enum, default_value = "l1")]
        variant: Variant,
        /// Margin of the hinge objective.
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        sphere_projection: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a closed-form bound and print it as a JSON line.
    Bounds {
        #[arg(long)]
        name: String,
        /// Comma-separated `key=value` pairs.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Run the experiments of a JSON config and write their CSV table.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_params(raw: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for pair in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("expected key=value, got {pair:?}")))?;
        if map
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Error::Parameter(format!("parameter {k:?} given twice")));
        }
    }
    Ok(map)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenMatrix {
            rows,
            cols,
            seed,
            out,
        } => {
            let phi = gaussian_matrix(rows, cols, &mut PrngStream::new(seed))?;
            write(&out, &phi.to_text())
        }
        Command::GenSignal {
            dim,
            sparsity,
            seed,
            out,
        } => {
            let x = random_sparse_unit_signal(dim, sparsity, &mut PrngStream::new(seed))?;
            write(&out, &vector_to_text(&x.to_dense())?)
        }
        Command::Measure {
            matrix,
            signal,
            sigma,
            seed,
            out,
        } => {
            let phi = DenseMatrix::parse_text(&read(&matrix)?)?;
            let x = parse_vector_text(&read(&signal)?)?;
            let y = noisy_sign_map(&phi, &x, sigma, &mut PrngStream::new(seed))?;
            write(&out, &y.to_text())
        }
        Command::Reconstruct {
            measurements,
            matrix,
            sparsity,
            variant,
            kappa,
            tau,
            max_iter,
            sphere_projection,
            out,
        } => {
            let y = SignVector::parse_text(&read(&measurements)?)?;
            let phi = DenseMatrix::parse_text(&read(&matrix)?)?;
            let variant = match variant {
                Variant::L1 => ObjectiveVariant::OneSidedL1,
                Variant::L2 => ObjectiveVariant::OneSidedL2,
                Variant::Hinge => ObjectiveVariant::Hinge { kappa },
                Variant::Hybrid => ObjectiveVariant::Hybrid,
            };
            let config = BihtConfig {
                variant,
                tau,
                max_iter,
                sphere_projection,
                ..BihtConfig::default()
            };
            let r = biht(&y, &phi, sparsity, &config)?;
            eprintln!(
                "iterations {} consistent {} hamming {:.6}",
                r.iterations_run, r.consistent, r.final_hamming
            );
            write(&out, &vector_to_text(&r.estimate.to_dense())?)
        }
        Command::Bounds { name, params } => {
            let report = evaluate(&name, &parse_params(&params)?)?;
            println!("{}", report.to_json_line());
            Ok(())
        }
        Command::Experiment { config, out } => {
            let configs = load_config(&config)?;
            emit_csv(&run_suite(&configs)?, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
