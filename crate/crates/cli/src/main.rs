use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use critline::oracle::LemmaId;
use critline_cli::report::Timing;
use critline_cli::{
    cmd_bound, cmd_optimize, cmd_oracle, cmd_scan, cmd_verify, CliError, CliResult, OracleArgs,
    OracleWhat, Outcome, RunConfigFile,
};
use num_complex::Complex64;

/// Lower bounds for the proportion of zeta zeros on the critical line.
#[derive(Parser, Debug)]
#[command(name = "critline", version)]
struct Cli {
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate kappa for a configuration.
    Bound {
        /// Config file, or `theorem1` / `corollary1`.
        config: String,
    },
    /// Search the free coefficients for a larger kappa.
    Optimize {
        config: String,
        /// Where to write the best configuration (default: `<config>.best.toml`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add this to every free coefficient before starting.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Evaluate kappa on a grid of one parameter.
    Scan {
        config: String,
        #[arg(long, default_value = "R")]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, allow_hyphen_values = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
        /// Write the table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the auxiliary lemmas numerically.
    Verify {
        /// Comma-separated ids (L3..L9, conv116) or `all`.
        #[arg(long, default_value = "all")]
        lemmas: String,
        #[arg(long, default_value = "1e6")]
        y: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare brute-force sums with their main terms.
    Oracle {
        /// `e_alpha` or `sigma`.
        #[arg(long)]
        what: OracleWhat,
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value_t = 1)]
        j: u64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        /// Config file (default: the bundled `theorem1`).
        #[arg(long, default_value = "theorem1")]
        config: String,
        /// Run past the cost guards.
        #[arg(long)]
        force: bool,
        /// Skip the quadratic direct gcd sum for `sigma`.
        #[arg(long)]
        no_direct: bool,
    },
}

/// Integer from text such as `1000000` or `1e6`.
fn parse_count(s: &str, flag: &str) -> CliResult<u64> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::parse(format!("{flag}: cannot read `{s}` as a count")))?;
    if v.fract() != 0.0 || v < 0.0 || v > u64::MAX as f64 {
        return Err(CliError::parse(format!("{flag}: `{s}` is not a whole number")));
    }
    Ok(v as u64)
}

fn parse_complex(s: &str, flag: &str) -> CliResult<Complex64> {
    s.parse()
        .map_err(|_| CliError::parse(format!("{flag}: cannot read `{s}` as a complex number")))
}

fn parse_lemmas(s: &str) -> CliResult<Vec<LemmaId>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(LemmaId::ALL.to_vec());
    }
    s.split(',')
        .map(|t| t.parse().map_err(|e: String| CliError::parse(format!("--lemmas: {e}"))))
        .collect()
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CRITLINE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::parse(format!("CRITLINE_THREADS: `{v}` is not a positive count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn sidecar_path(config: &str) -> PathBuf {
    let stem = Path::new(config)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "config".into());
    PathBuf::from(format!("{stem}.best.toml"))
}

fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Bound { config } => cmd_bound(&RunConfigFile::load(config)?),
        Command::Optimize {
            config,
            out,
            perturb,
            seed,
            restarts,
            max_iters,
        } => {
            let mut file = RunConfigFile::load(config)?;
            if let Some(s) = seed {
                file.optimize.seed = *s;
            }
            if let Some(r) = restarts {
                file.optimize.restarts = *r;
            }
            if let Some(m) = max_iters {
                file.optimize.max_iters = *m;
            }
            let out = out.clone().unwrap_or_else(|| sidecar_path(config));
            cmd_optimize(&file, *perturb, &out)
        }
        Command::Scan {
            config,
            param,
            min,
            max,
            steps,
            ..
        } => cmd_scan(&RunConfigFile::load(config)?, param, *min, *max, *steps),
        Command::Verify { lemmas, y, seed } => {
            cmd_verify(&parse_lemmas(lemmas)?, parse_count(y, "--y")?, *seed)
        }
        Command::Oracle {
            what,
            y,
            j,
            alpha,
            beta,
            config,
            force,
            no_direct,
        } => {
            let args = OracleArgs {
                what: *what,
                y: y.as_deref().map(|s| parse_count(s, "--y")).transpose()?,
                j: *j,
                alpha: parse_complex(alpha, "--alpha")?,
                beta: parse_complex(beta, "--beta")?,
                force: *force,
                direct: !no_direct,
            };
            cmd_oracle(&RunConfigFile::load(config)?, &args)
        }
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> CliResult<()> {
    init_threads()?;
    let started = Instant::now();
    let mut outcome = dispatch(&cli.command)?;
    if cli.timing {
        outcome.report.timing = Some(Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
        });
    }
    if let Some(path) = &cli.report {
        write(path, &outcome.report.to_json())?;
    }
    if let Some((path, text)) = &outcome.sidecar {
        write(path, text)?;
    }
    print!("{}", outcome.summary);
    if let Some(csv) = &outcome.csv {
        match &cli.command {
            Command::Scan { csv: Some(path), .. } => write(path, csv)?,
            _ => print!("{csv}"),
        }
    }
    if cli.timing {
        println!("wall time         {:.3} s", started.elapsed().as_secs_f64());
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("critline: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
