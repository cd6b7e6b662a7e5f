//! `nucleon` — batch front-end for the mixed-norm / time-frequency /
//! nuclear-trace numerics.
//!
//! Every run is a pure function of its flags plus the `--seed` where
//! randomness is involved; outputs are byte-reproducible. Exit codes:
//! 0 success, 2 validation error, 3 numerical-check failure (aliasing,
//! truncation, solver or trace-consistency guards).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CmdError;

#[derive(Parser)]
#[command(name = "nucleon", version, about = "Mixed-norm and nuclear-trace numerics")]
struct Cli {
    /// Write the artifact to this path (atomically) in addition to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted mixed norm of a sampled or simple function (CSV row).
    Norm {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated exponents, innermost axis first, e.g. `1,2`.
        #[arg(long)]
        exponents: String,
        /// Weight tag: `const:<c>`, `poly:<s>` or `freq:<s>`.
        #[arg(long, default_value = "const:1")]
        weight: String,
    },
    /// Weighted sequence norm of stored lattice coefficients (CSV row).
    SeqNorm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    /// Short-time Fourier transform on a symmetric TF grid (JSON).
    Stft {
        #[arg(long)]
        input: PathBuf,
        /// `gaussian` or a path to a sampled window.
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, default_value_t = 6.0)]
        x_extent: f64,
        #[arg(long, default_value_t = 0.25)]
        x_step: f64,
        #[arg(long, default_value_t = 6.0)]
        xi_extent: f64,
        #[arg(long, default_value_t = 0.25)]
        xi_step: f64,
    },
    /// Modulation norm `‖f‖_{M_s^{p,q}}` (CSV row).
    ModNorm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 8.0)]
        x_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        x_step: f64,
        #[arg(long, default_value_t = 8.0)]
        xi_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        xi_step: f64,
    },
    /// Wiener-amalgam norm through the Fourier transform (CSV row).
    WienerNorm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 8.0)]
        x_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        x_step: f64,
        #[arg(long, default_value_t = 8.0)]
        xi_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        xi_step: f64,
        #[arg(long, default_value_t = 10.0)]
        freq_extent: f64,
        #[arg(long, default_value_t = 0.01)]
        freq_step: f64,
    },
    /// Gabor-lattice coefficients with restricted weight values (JSON).
    Gabor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        kmax: i64,
        #[arg(long)]
        lmax: i64,
        #[arg(long, default_value = "const:1")]
        weight: String,
    },
    /// Lattice-to-continuous norm equivalence ratio (JSON).
    Equivalence {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "const:1")]
        weight: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        kmax: i64,
        #[arg(long)]
        lmax: i64,
        #[arg(long, default_value_t = 8.0)]
        x_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        x_step: f64,
        #[arg(long, default_value_t = 8.0)]
        xi_extent: f64,
        #[arg(long, default_value_t = 0.125)]
        xi_step: f64,
    },
    /// Randomized contraction certificate of the finite-rank operator
    /// (JSON).
    Approx {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        exponents: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Trace, eigenvalue sum, nuclear bound and Schatten quasi-norm of a
    /// factored kernel (JSON).
    NuclearTrace {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        symmetric: bool,
    },
    /// Representation trace against the discretized eigenvalue sum (JSON).
    Lidskii {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        symmetric: bool,
    },
    /// Schatten quasi-norm of the discretized kernel (JSON).
    Schatten {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        symmetric: bool,
    },
    /// Spectral trace of `F(-Δ+|x|²)` with its tail bound (CSV row).
    HoscTrace {
        /// `exp:<t>`, `power:-<N>` or `table:<path.csv>`.
        #[arg(long = "F")]
        f: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Per-axis maximum Hermite index, inclusive.
        #[arg(long = "K")]
        k: usize,
    },
    /// Nuclearity-criterion table on modulation spaces (CSV).
    HoscNuclearity {
        #[arg(long = "F")]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        tf_extent: Option<f64>,
        #[arg(long)]
        tf_step: Option<f64>,
    },
}

fn configure_threads() -> Result<(), CmdError> {
    if let Ok(value) = std::env::var("NUCLEON_THREADS") {
        let n: usize = value.parse().map_err(|_| {
            CmdError::validation(format!("NUCLEON_THREADS must be a positive integer, got `{value}`"))
        })?;
        if n == 0 {
            return Err(CmdError::validation("NUCLEON_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CmdError::validation(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String, CmdError> {
    configure_threads()?;
    match &cli.command {
        Command::Norm {
            input,
            exponents,
            weight,
        } => commands::norm(input, exponents, weight),
        Command::SeqNorm { input, p, q } => commands::seq_norm(input, *p, *q),
        Command::Stft {
            input,
            window,
            x_extent,
            x_step,
            xi_extent,
            xi_step,
        } => commands::stft_cmd(input, window, *x_extent, *x_step, *xi_extent, *xi_step),
        Command::ModNorm {
            input,
            window,
            p,
            q,
            s,
            x_extent,
            x_step,
            xi_extent,
            xi_step,
        } => commands::mod_norm(
            input, window, *p, *q, *s, *x_extent, *x_step, *xi_extent, *xi_step,
        ),
        Command::WienerNorm {
            input,
            window,
            p,
            q,
            s,
            x_extent,
            x_step,
            xi_extent,
            xi_step,
            freq_extent,
            freq_step,
        } => commands::wiener_norm(
            input,
            window,
            *p,
            *q,
            *s,
            *x_extent,
            *x_step,
            *xi_extent,
            *xi_step,
            *freq_extent,
            *freq_step,
        ),
        Command::Gabor {
            input,
            window,
            alpha,
            beta,
            kmax,
            lmax,
            weight,
        } => commands::gabor(input, window, *alpha, *beta, *kmax, *lmax, weight),
        Command::Equivalence {
            input,
            window,
            p,
            q,
            weight,
            alpha,
            beta,
            kmax,
            lmax,
            x_extent,
            x_step,
            xi_extent,
            xi_step,
        } => commands::equivalence(
            input, window, *p, *q, weight, *alpha, *beta, *kmax, *lmax, *x_extent, *x_step,
            *xi_extent, *xi_step,
        ),
        Command::Approx {
            partition,
            exponents,
            trials,
            seed,
        } => commands::approx(partition, exponents, *trials, *seed),
        Command::NuclearTrace {
            rep,
            grid,
            r,
            symmetric,
        } => commands::nuclear_trace(rep, grid, *r, *symmetric),
        Command::Lidskii {
            rep,
            grid,
            symmetric,
        } => commands::lidskii(rep, grid, *symmetric),
        Command::Schatten {
            rep,
            grid,
            r,
            symmetric,
        } => commands::schatten(rep, grid, *r, *symmetric),
        Command::HoscTrace { f, d, k } => commands::hosc_trace(f, *d, *k),
        Command::HoscNuclearity {
            f,
            r,
            s,
            p,
            q,
            k,
            tf_extent,
            tf_step,
        } => commands::hosc_nuclearity(f, *r, *s, *p, *q, *k, *tf_extent, *tf_step),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(artifact) => {
            if let Some(path) = &cli.out {
                if let Err(message) = io::write_atomic(path, &artifact) {
                    eprintln!("error: {message}");
                    return ExitCode::from(2);
                }
            }
            print!("{artifact}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
