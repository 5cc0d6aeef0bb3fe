use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use majority_lab::analysis::{bounds_row, TABLE_EPSILONS};
use majority_lab::bruteforce::{depth_report, QueryFamily};
use majority_lab::experiments::{
    default_unknown_rate, emit_results, run_experiment, ExperimentConfig, InputClass, OutputFormat,
    DEFAULT_MAX_N,
};
use majority_lab::quantum::xor_gadget;
use majority_lab::verify::{quantum_compilation, run_suite, Status, Suite};
use majority_lab::Algorithm;

#[derive(Parser)]
#[command(name = "majority-lab", version, about = "XOR decision trees for MAJORITY")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Fixed,
    Balanced,
    Uniform,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of a randomized algorithm.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "balanced")]
        class: ClassArg,
        /// Number of ones for `--class fixed`.
        #[arg(long)]
        ones: Option<usize>,
        #[arg(long, value_enum, default_value = "greedy")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "MAJORITY_LAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 3.0)]
        d: f64,
        /// Tail parameter; repeat for several.
        #[arg(long)]
        r: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Exhaustive and exact checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Optimal decision-tree depth by exhaustive minimax.
    Optimal {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "xor")]
        family: QueryFamily,
    },
    /// XOR gadget outcomes and compiled-run costs.
    Quantum {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Table of closed-form bounds.
    Bounds {
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[arg(long, default_value_t = 3.0)]
        d: f64,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every asserted invariant held.
fn execute(command: Command) -> Result<bool, Box<dyn std::error::Error>> {
    match command {
        Command::Simulate {
            n,
            class,
            ones,
            algorithm,
            trials,
            seed,
            epsilon,
            d,
            r,
            max_n,
            out,
            format,
        } => {
            let class = match (class, ones) {
                (ClassArg::Fixed, Some(ones)) => InputClass::Fixed { ones },
                (ClassArg::Fixed, None) => return Err("--class fixed needs --ones".into()),
                (_, Some(_)) => return Err("--ones only applies to --class fixed".into()),
                (ClassArg::Balanced, None) => InputClass::Balanced,
                (ClassArg::Uniform, None) => InputClass::Uniform,
            };
            let mut config = ExperimentConfig::new(n, class, algorithm, trials, seed);
            config.epsilon = epsilon;
            config.d = d;
            config.r_values = r;
            config.max_n = max_n;
            let report = run_experiment(&config)?;
            let unknown = default_unknown_rate(&config)?;
            let s = &report.stats;
            eprintln!(
                "comparisons: mean {:.3} sd {:.3} min {} p50 {} p99 {} max {}",
                s.mean,
                s.std_dev(),
                s.min,
                s.p50,
                s.p99,
                s.max
            );
            eprintln!(
                "truncated at budget {}: unknown rate {} ({} of {}), no wrong verdicts",
                unknown.budget, unknown.rate, unknown.unknown, unknown.trials
            );
            for (r, t) in config.r_values.iter().zip(&report.tails) {
                eprintln!(
                    "tail r={r}: P[C >= {}] = {} vs cap {}{}",
                    t.threshold,
                    t.empirical,
                    t.cap,
                    if !t.is_asserted() {
                        " (not asserted)"
                    } else if t.pass {
                        " ok"
                    } else {
                        " FAILED"
                    }
                );
            }
            let rows = [report.row.clone()];
            match out {
                Some(path) => emit_results(&rows, &report.tails, &path, format)?,
                None => match format {
                    OutputFormat::Csv => print!("{}", majority_lab::experiments::results_csv(&rows, &report.tails)?),
                    OutputFormat::Json => print!("{}", majority_lab::experiments::results_json(&rows, &report.tails)),
                },
            }
            Ok(report.asserted_tail_failures() == 0)
        }
        Command::Verify { suite } => {
            let checks = run_suite(suite);
            for c in &checks {
                println!("{c}");
            }
            let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
            println!(
                "{} passed, {} failed, {} findings",
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Finding)
            );
            Ok(count(Status::Fail) == 0)
        }
        Command::Optimal { n, family } => {
            let report = depth_report(n, family)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.matched_formula)
        }
        Command::Quantum { max_n } => {
            let mut ok = true;
            for (x0, x1) in [(false, false), (false, true), (true, false), (true, true)] {
                let g = xor_gadget::<f64>(x0, x1);
                println!(
                    "X0={} X1={} -> {} with {} oracle call(s), wrong-outcome probability {:e}",
                    u8::from(x0),
                    u8::from(x1),
                    u8::from(g.answer),
                    g.queries,
                    g.wrong_probability
                );
                ok &= g.answer == (x0 ^ x1) && g.queries == 1 && g.wrong_probability <= 1e-18;
            }
            let c = quantum_compilation(max_n);
            println!("{c}");
            Ok(ok && c.status == Status::Pass)
        }
        Command::Bounds { n_max, d } => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let mut header = vec![
                "N".to_string(),
                "w".into(),
                "exact_cost".into(),
                "ars_average".into(),
                "classical_error_lb".into(),
            ];
            header.extend(TABLE_EPSILONS.iter().map(|e| format!("budget_eps_{e}")));
            w.write_record(&header)?;
            for n in 1..=n_max {
                let row = bounds_row(n, d);
                let mut rec = vec![
                    row.n.to_string(),
                    row.w.to_string(),
                    row.exact_cost.to_string(),
                    format!("{:.9}", row.ars_average),
                    row.classical_error_lb,
                ];
                rec.extend(row.budgets.iter().map(|(_, b)| b.to_string()));
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(true)
        }
    }
}
