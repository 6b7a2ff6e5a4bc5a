use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use speclab::report::{self, RunConfig};
use speclab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "speclab",
    version,
    about = "Dirichlet eigenvalue ratios on rasterized domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the lowest eigenpairs.
    Spectrum(RunArgs),
    /// Evaluate every applicable bound.
    Check(RunArgs),
    /// Randomized trials of the algebraic identities.
    Identities {
        #[arg(long, default_value_t = report::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = report::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = report::DEFAULT_M_MAX)]
        m_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Eigenvalues over halving spacings with Richardson extrapolation.
    Convergence {
        #[arg(long)]
        domain: String,
        /// Comma-separated spacings, coarse to fine.
        #[arg(long, default_value = "1/32,1/64,1/128")]
        h: String,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-form spectrum (interval, rectangle, box, disk, ball).
    Oracle {
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Path prefix for `.json` and `.csv` outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Relative discretization allowance (skips the refinement study).
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => {
                let domain = self
                    .domain
                    .as_deref()
                    .ok_or_else(|| Error::Precondition("--domain or --config is required".into()))?;
                let h = self
                    .h
                    .as_deref()
                    .ok_or_else(|| Error::Precondition("--h or --config is required".into()))?;
                RunConfig::new(report::parse_domain(domain)?, report::parse_spacing(h)?)
            }
        };
        if self.config.is_some() {
            if let Some(d) = &self.domain {
                c.domain = report::parse_domain(d)?;
            }
            if let Some(h) = &self.h {
                c.h = report::parse_spacing(h)?;
            }
        }
        c.k = self.k.or(c.k);
        c.l = self.l.or(c.l);
        c.i = self.i.or(c.i);
        c.t = self.t.or(c.t);
        c.slack = self.slack.or(c.slack);
        c.seed = self.seed.unwrap_or(c.seed);
        c.output = self.out.out.clone().or(c.output);
        Ok(c)
    }
}

fn emit(format: Format, json: &impl Serialize, csv: &str) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(json)?),
        Format::Csv => print!("{csv}"),
    }
    Ok(())
}

fn save(out: &OutArgs, json: &impl Serialize, csv: &str) -> Result<()> {
    if let Some(prefix) = &out.out {
        report::write_outputs(prefix, json, Some(csv))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum(args) => {
            let run = report::cmd_spectrum(&args.config()?)?;
            emit(args.out.format, &run, &run.csv)?;
            Ok(true)
        }
        Command::Check(args) => {
            let r = report::cmd_check(&args.config()?)?;
            emit(args.out.format, &r, &r.to_csv())?;
            for f in r.failures() {
                eprintln!(
                    "FAIL {}: lhs {:.9} rhs {:.9} margin {:.3e}",
                    f.name, f.lhs, f.rhs, f.margin
                );
            }
            Ok(r.pass)
        }
        Command::Identities {
            seed,
            trials,
            m_max,
            out,
        } => {
            let s = report::cmd_identities(seed, trials, m_max)?;
            let w = &s.worst;
            let csv = format!(
                "identity,worst_relative_error\nlayered,{:e}\nrecursion,{:e}\nregrouped,{:e}\npartial,{:e}\n",
                w.layered, w.recursion, w.regrouped, w.partial
            );
            save(&out, &s, &csv)?;
            emit(out.format, &s, &csv)?;
            Ok(s.pass)
        }
        Command::Convergence { domain, h, k, out } => {
            let study = report::cmd_convergence(&report::parse_domain(&domain)?, &report::parse_spacing_list(&h)?, k)?;
            let csv = study.to_csv();
            save(&out, &study, &csv)?;
            emit(out.format, &study, &csv)?;
            Ok(true)
        }
        Command::Oracle { domain, k, out } => {
            let o = report::cmd_oracle(&report::parse_domain(&domain)?, k)?;
            let mut csv = String::from("index,eigenvalue\n");
            for (j, v) in o.values.iter().enumerate() {
                csv.push_str(&format!("{},{v:.15e}\n", j + 1));
            }
            save(&out, &o, &csv)?;
            emit(out.format, &o, &csv)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
