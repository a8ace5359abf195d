use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twisted_cli::commands::{self, TableP};
use twisted_cli::output::{ensure_dir, write_text};
use twisted_cli::{CliError, CliResult, RunConfig};

/// Spectral experiments for the twisted Laplacian.
#[derive(Parser, Debug)]
#[command(name = "twisted", version, about)]
struct Cli {
    /// JSON run configuration (defaults apply when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for random fields; overrides `seed` of the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads. Affects speed only, never output bytes.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print kappa_p, s_q and kappa_{p,q} for every (n, p, q).
    KappaTable {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<usize>,
        /// Exponents p; `inf` and `threshold` (the branch point) are accepted.
        #[arg(long, value_delimiter = ',', default_value = "2,threshold,10,inf")]
        p: Vec<TableP>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        q: Vec<f64>,
    },
    /// Run the check blocks of the config and write verify_report.json.
    Verify,
    /// Run the sweep blocks of the config, one CSV and fit JSON per block.
    Sweep,
    /// Propagate a TWF1 sample file by e^{-itL}.
    Propagate {
        /// Time, e.g. `1.5`, `pi` or `2pi`.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to <out>/propagated.twf.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the basis of the config and store it as a TWL1 cache.
    BasisCache {
        /// Defaults to <out>/basis.twl.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::KappaTable { n, p, q } => {
            let csv = commands::kappa_table(n, p, q)?;
            print!("{csv}");
            if let Some(out) = &cli.out {
                ensure_dir(out)?;
                write_text(&out.join("kappa_table.csv"), &csv)?;
            }
            Ok(Outcome::Pass)
        }
        Command::Verify => {
            let cfg = load_config(cli)?;
            let outcomes = commands::verify(&cfg, &cfg.output_dir)?;
            for o in &outcomes {
                println!(
                    "{} {} observed={:e} tolerance={:e} {}",
                    if o.pass { "PASS" } else { "FAIL" },
                    o.check,
                    o.observed,
                    o.tolerance,
                    o.detail
                );
            }
            println!("report: {}", cfg.output_dir.join(commands::VERIFY_REPORT).display());
            Ok(if outcomes.iter().all(|o| o.pass) { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Sweep => {
            let cfg = load_config(cli)?;
            for s in commands::sweep(&cfg, &cfg.output_dir)? {
                for notice in &s.notices {
                    eprintln!("notice: {}: {notice}", s.name);
                }
                let slope = s.fit.map_or("n/a".to_string(), |f| format!("{:.6}", f.slope));
                println!(
                    "{}: {} records, slope {slope}, band {:.6} -> {}",
                    s.name,
                    s.records.len(),
                    s.band,
                    s.csv.display()
                );
            }
            Ok(Outcome::Pass)
        }
        Command::Propagate { t, input, output } => {
            let cfg = load_config(cli)?;
            let t = commands::parse_time(t).map_err(CliError::Usage)?;
            let output = output.clone().unwrap_or_else(|| cfg.output_dir.join("propagated.twf"));
            commands::propagate_file(&cfg, t, input, &output)?;
            println!("wrote {}", output.display());
            Ok(Outcome::Pass)
        }
        Command::BasisCache { output } => {
            let cfg = load_config(cli)?;
            let output = output.clone().unwrap_or_else(|| cfg.output_dir.join("basis.twl"));
            commands::basis_cache(&cfg, &output)?;
            println!("wrote {}", output.display());
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
