//! `qbattery` — command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid configuration, 3 for runtime
//! failures (integrator aborts, unphysical states, I/O while writing).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qbattery::cli::{cmd_run, describe_config, resolve_config, CliOverrides};

#[derive(Parser)]
#[command(
    name = "qbattery",
    version,
    about = "Spin-chain quantum battery simulator with finite-memory photon loss"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write trajectory/summary CSVs (and optional plots)
    Run(RunArgs),
    /// Resolve and echo the configuration without integrating
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Bundled scenario preset (fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig5c)
    #[arg(long)]
    preset: Option<String>,

    /// TOML config file (preset or [scenario] table, plus overrides)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: out)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Integration step size
    #[arg(long = "h")]
    h: Option<f64>,

    /// End time of the integration
    #[arg(long)]
    tmax: Option<f64>,

    /// Initial state: paper-vacuum | fock:<n> | product:<l0,l1,...>
    #[arg(long)]
    initial: Option<String>,

    /// Emit an SVG plot of W(t) alongside the CSVs
    #[arg(long)]
    plots: bool,
}

impl From<RunArgs> for CliOverrides {
    fn from(args: RunArgs) -> Self {
        CliOverrides {
            preset: args.preset,
            config: args.config,
            out: args.out,
            h: args.h,
            t_max: args.tmax,
            initial: args.initial,
            plots: args.plots,
        }
    }
}

fn execute(cli: Cli) -> qbattery::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve_config(&args.into())?;
            let outputs = cmd_run(&cfg)?;
            for path in &outputs.files {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Validate(args) => {
            let cfg = resolve_config(&args.into())?;
            print!("{}", describe_config(&cfg));
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        // Every error variant embeds its cause in its display form.
        eprintln!("error: {e}");
        std::process::exit(if e.is_config_error() { 2 } else { 3 });
    }
}
