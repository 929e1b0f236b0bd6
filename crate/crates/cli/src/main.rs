//! `hcrecover`: counting checks, seeded recoveries, rate sweeps and width tables.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hcrecover::experiment::{self, CountKind, ExperimentConfig};
use hcrecover::recovery::UKind;
use hcrecover::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_NONCONVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "hcrecover", version, about = "Universal sampling recovery on hyperbolic crosses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hyperbolic-cross size or sublevel counts, with the growth-rate ratio.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: Option<f64>,
        /// Count the hyperbolic cross (the default).
        #[arg(long, conflicts_with_all = ["mixed", "sum"])]
        hc: bool,
        /// Mixed exponents, e.g. `1,2`.
        #[arg(long, conflicts_with = "sum")]
        mixed: Option<String>,
        /// Sum exponents, e.g. `2,2`.
        #[arg(long)]
        sum: Option<String>,
        /// Only strictly positive multi-indices (mixed counts).
        #[arg(long)]
        positive: bool,
    },
    /// One seeded recovery; prints a JSON report.
    Recover {
        #[command(flatten)]
        common: Common,
        /// `zero`, `sparse:S` or `extremal`.
        #[arg(long)]
        function: Option<String>,
    },
    /// Error-vs-budget sweep over classes, m grid and seeds; prints CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Width sandwich table for the first class; prints CSV.
    Widths {
        #[command(flatten)]
        common: Common,
        /// Spectrum length (default `2 max(m) + 1`).
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma list such as `64,128,256`.
    #[arg(long)]
    m_grid: Option<String>,
    /// Comma list or half-open range such as `0..10`.
    #[arg(long)]
    seeds: Option<String>,
    /// Smoothness classes such as `mixed:1,1;sum:2,2` (separated by `;`).
    #[arg(long)]
    classes: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// `loglog`, `log` or `const:V`.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    c_prime: Option<f64>,
    /// Largest admissible index set.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 4 if any solve fails to converge.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(g) = &self.m_grid {
            cfg.m_grid = experiment::parse_u64_list(g)?;
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = experiment::parse_u64_list(s)?;
        }
        if let Some(c) = &self.classes {
            cfg.classes = c.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            if let (None, Some(first)) = (self.d, cfg.classes.first()) {
                if let Some((_, e)) = first.split_once(':') {
                    cfg.d = e.split(',').count();
                }
            }
        }
        if let Some(e) = self.epsilon {
            cfg.recovery.epsilon = e;
        }
        if let Some(u) = &self.u {
            cfg.recovery.u_kind = UKind::parse(u)?;
        }
        if let Some(c) = self.c_prime {
            cfg.recovery.c_prime = c;
        }
        if let Some(c) = self.cap {
            cfg.recovery.max_index_set_size = c;
        }
        if let Some(n) = self.max_iters {
            cfg.recovery.solver.max_iters = n;
        }
        if let Some(t) = self.tol {
            cfg.recovery.solver.tol = t;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

struct Outcome {
    text: String,
    nonconverged: usize,
    out: Option<PathBuf>,
}

fn run(command: &Command) -> Result<(Outcome, &Common), Error> {
    match command {
        Command::Count {
            common,
            r,
            mixed,
            sum,
            positive,
            ..
        } => {
            let mut cfg = common.resolve()?;
            if let Some(r) = r {
                cfg.r = *r;
            }
            if let Some(a) = mixed {
                cfg.count_kind = CountKind::Mixed;
                cfg.classes = vec![format!("mixed:{a}")];
            } else if let Some(b) = sum {
                cfg.count_kind = CountKind::Sum;
                cfg.classes = vec![format!("sum:{b}")];
            } else if common.config.is_none() {
                cfg.count_kind = CountKind::Hc;
            }
            if let (None, Some(e)) = (common.d, mixed.as_ref().or(sum.as_ref())) {
                cfg.d = e.split(',').count();
            }
            if *positive {
                cfg.positive_only = true;
            }
            let text = experiment::cmd_count(&cfg)?;
            Ok((Outcome { text, nonconverged: 0, out: cfg.out }, common))
        }
        Command::Recover { common, function } => {
            let mut cfg = common.resolve()?;
            if let Some(f) = function {
                cfg.function = f.clone();
            }
            let (text, report) = experiment::cmd_recover(&cfg)?;
            let nonconverged = usize::from(!report.solver.converged);
            Ok((Outcome { text, nonconverged, out: cfg.out }, common))
        }
        Command::Sweep { common } => {
            let cfg = common.resolve()?;
            let (text, out) = experiment::cmd_rate_sweep(&cfg)?;
            for s in &out.summaries {
                let slope = s.slope.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
                eprintln!("{}: slope {slope} (expected {:.3})", s.class, s.expected_slope);
            }
            let nonconverged = out.nonconverged();
            Ok((Outcome { text, nonconverged, out: cfg.out }, common))
        }
        Command::Widths { common, k } => {
            let mut cfg = common.resolve()?;
            if let Some(k) = k {
                cfg.spectrum_len = *k;
            }
            let text = experiment::cmd_widths(&cfg)?;
            Ok((Outcome { text, nonconverged: 0, out: cfg.out }, common))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Io(_) => 1,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (outcome, common) = match run(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    if common.strict && outcome.nonconverged > 0 {
        eprintln!("error: {} solve(s) did not converge", outcome.nonconverged);
        return ExitCode::from(EXIT_NONCONVERGED);
    }
    ExitCode::SUCCESS
}
