use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nashmg::harness::{
    bench_solvers, cmd_compare, cmd_exploit_eval, cmd_generate_env, cmd_solve_exact, cmd_train, ApproxConfig, Artifacts,
    EvalMode, ExperimentConfig, ExploitEvalOptions,
};
use nashmg::oracle::DEFAULT_NODE_BUDGET;
use nashmg::Error;

/// Tabular zero-sum Markov games: generate, solve, train and compare.
#[derive(Debug, Parser)]
#[command(name = "nashmg", version)]
struct Cli {
    /// Directory that every relative path is resolved against.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    #[value(alias = "approx_exploiter")]
    Approx,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random environment file.
    GenerateEnv {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        actions_max: usize,
        #[arg(long)]
        actions_min: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the game value and write an equilibrium policy pair.
    SolveExact {
        #[arg(long)]
        env: PathBuf,
        #[arg(long, default_value = "nash_policy.json")]
        policy_out: PathBuf,
    },
    /// Train one algorithm and log its exploitability.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Train several algorithms on the same environment and plot them.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the exploitability of a saved policy pair.
    ExploitEval {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        env: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Q-learning episodes per exploiter (approx mode).
        #[arg(long, default_value_t = 5000)]
        exploiter_episodes: u64,
        /// Monte-Carlo rollouts per value estimate (approx mode).
        #[arg(long, default_value_t = 10_000)]
        eval_episodes: u64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: usize,
    },
    /// Time the LP and MWU matrix-game solvers on random matrices.
    BenchSolvers {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn report(artifacts: &Artifacts) {
    println!("wrote {}", artifacts.csv.display());
    if let Some(svg) = &artifacts.svg {
        println!("wrote {}", svg.display());
    }
    for p in &artifacts.policies {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> nashmg::Result<()> {
    let base = cli.output_dir;
    let at = |p: &PathBuf| base.join(p);
    match cli.command {
        Command::GenerateEnv {
            states,
            actions_max,
            actions_min,
            horizon,
            seed,
            out,
        } => {
            if let Some(parent) = at(&out).parent() {
                std::fs::create_dir_all(parent)?;
            }
            cmd_generate_env(states, actions_max, actions_min, horizon, seed, &at(&out))?;
        }
        Command::SolveExact { env, policy_out } => {
            println!("{}", fixed6(cmd_solve_exact(&at(&env), &at(&policy_out))?));
        }
        Command::Train { config } => report(&cmd_train(&ExperimentConfig::load(&at(&config))?, &base)?),
        Command::Compare { config } => report(&cmd_compare(&ExperimentConfig::load(&at(&config))?, &base)?),
        Command::ExploitEval {
            policy,
            env,
            mode,
            exploiter_episodes,
            eval_episodes,
            alpha,
            seed,
            node_budget,
        } => {
            let opts = ExploitEvalOptions {
                mode: match mode {
                    Mode::Exact => EvalMode::Exact,
                    Mode::Approx => EvalMode::ApproxExploiter,
                },
                node_budget,
                approx: ApproxConfig {
                    exploiter_episodes,
                    eval_episodes,
                    alpha,
                },
                seed,
            };
            println!("{}", fixed6(cmd_exploit_eval(&at(&policy), &at(&env), &opts)?));
        }
        Command::BenchSolvers { m, n, samples, seed } => {
            print!("{}", bench_solvers(m as usize, n as usize, samples as usize, seed)?.to_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidArgument(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
