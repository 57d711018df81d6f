use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use dampflow_cli::commands::DEFAULT_MAX_RUNS;
use dampflow_cli::{cmd_check, cmd_run, cmd_sweep, load_config, resolve_out_dir, Axis, Suite};

#[derive(Parser)]
#[command(name = "dampflow", version, about = "Damped compressible Euler runs, sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write run.csv, summary.json and charts.
    Run {
        config: PathBuf,
        /// Output directory (overrides DAMPFLOW_OUT_DIR and the config).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the cartesian product of the --vary lists and write sweep.csv.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...` with key one of mu, lambda, epsilon, law.
        #[arg(long = "vary", required = true)]
        vary: Vec<Axis>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(short, long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_RUNS)]
        max_runs: usize,
    },
    /// Run an acceptance suite and print a pass/fail table.
    Check {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let dir = resolve_out_dir(&cfg, out.as_deref());
            let (res, code) = cmd_run(&cfg, &dir)?;
            let sup = res.energy.sup_ratio();
            println!(
                "{}: t={:.4} steps={} sup ratio={sup:.4} fps margin={:.4} -> {}",
                res.status.label(),
                res.final_state.t,
                res.steps,
                res.fps_margin,
                dir.display()
            );
            if let dampflow::RunStatus::Error { message } = &res.status {
                eprintln!("error: {message}");
            }
            Ok(code)
        }
        Command::Sweep { config, vary, out, jobs, max_runs } => {
            let cfg = load_config(&config)?;
            let dir = resolve_out_dir(&cfg, out.as_deref());
            let (rows, code) = cmd_sweep(&cfg, &vary, &dir, jobs, max_runs)?;
            for r in &rows {
                println!(
                    "{:>3} mu={} lambda={} epsilon={} law={} -> {}",
                    r.run, r.mu, r.lambda, r.epsilon, r.law, r.status
                );
            }
            println!("{} runs -> {}", rows.len(), dir.join("sweep.csv").display());
            Ok(code)
        }
        Command::Check { suite } => Ok(cmd_check(suite, &mut std::io::stdout())?.1),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap would exit with 2 on usage errors, which is the blowup code here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
