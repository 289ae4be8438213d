use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xlirs_cli::error::EXIT_PARTIAL;
use xlirs_cli::eval::{format_report, has_nonconvergence};
use xlirs_cli::presets::run_figure;
use xlirs_cli::{init_thread_pool, load_scenario, run_eval, run_sweep, Axis, Result, Scale, SweepSpec, SweepStatus};

#[derive(Parser)]
#[command(
    name = "xlirs",
    version,
    about = "Near-field SNR of links aided by large reflecting surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every SNR quantity for one scenario file.
    Eval { config: PathBuf },
    /// Sweep one parameter and write a CSV.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        /// Output file.
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Reproduce a figure preset (fig6a, fig6b, fig6c, fig7, fig8, fig9).
    Figure {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Eval { config } => {
            let cfg = load_scenario(&config)?;
            let report = run_eval(&cfg);
            print!("{}", format_report(&report));
            Ok(if has_nonconvergence(&report) { EXIT_PARTIAL } else { 0 })
        }
        Command::Sweep {
            config,
            axis,
            from,
            to,
            points,
            log,
            out,
        } => {
            let cfg = load_scenario(&config)?;
            let scale = if log { Scale::Log } else { Scale::Linear };
            let spec = SweepSpec::new(axis, from, to, points, scale)?;
            let status = run_sweep(&cfg, &spec, &out)?;
            println!("{}", out.display());
            Ok(if status == SweepStatus::Partial {
                EXIT_PARTIAL
            } else {
                0
            })
        }
        Command::Figure { name, out } => {
            let (paths, status) = run_figure(&name, &out)?;
            for p in paths {
                println!("{}", p.display());
            }
            Ok(if status == SweepStatus::Partial {
                EXIT_PARTIAL
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match init_thread_pool().and_then(|()| run(Cli::parse())) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
