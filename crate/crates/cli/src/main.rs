use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amm_cli::{converge, parse_config, run, CliError, RunConfig, CONFIG_HELP};
use amm_core::harness::RunOptions;
use clap::{Args, Parser, Subcommand};

/// Bound-preserving finite-volume runs on adaptive moving meshes.
///
/// Exit status: 0 on success, 2 for configuration errors, 3 when a run
/// stops early (admissibility failure, step-halving or step limit), 1 for
/// I/O errors.
#[derive(Parser)]
#[command(name = "amm-bp", version, after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem and write solution.csv, mesh.csv, bounds.csv and diagnostics.csv.
    Run(Common),
    /// Run a convergence study and write table.csv and table.md.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Cell counts, e.g. 40,80,160.
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    config: PathBuf,
    /// Disable the bound-preserving limiter.
    #[arg(long)]
    no_limiter: bool,
    /// Keep the mesh fixed.
    #[arg(long)]
    uniform_mesh: bool,
    /// Output directory; overrides the `out` key.
    #[arg(long, env = "AMM_BP_OUT")]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<(RunOptions, PathBuf), CliError> {
        let text = fs::read_to_string(&self.config).map_err(|source| CliError::Io {
            path: self.config.clone(),
            source,
        })?;
        let (config, warnings): (RunConfig, _) = parse_config(&text)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        let mut options = config.options()?;
        if self.no_limiter {
            options.limiter = false;
        }
        if self.uniform_mesh {
            options.moving = false;
        }
        let dir = self
            .out
            .clone()
            .or(config.out)
            .unwrap_or_else(|| Path::new("amm-out").to_path_buf());
        Ok((options, dir))
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(common) => {
            let (options, dir) = common.load()?;
            let out = run(&options, &dir)?;
            println!(
                "{}: N = {}, t = {}, {} steps, {} halvings, theta_min = {:.3}",
                out.problem,
                out.mesh.n_cells(),
                out.t,
                out.steps,
                out.total_halvings(),
                out.theta_min()
            );
            for (name, _) in &out.report_names {
                println!("  {name} = {:?}", out.report(name).unwrap_or(f64::NAN));
            }
            println!("wrote {}", dir.display());
        }
        Command::Converge { common, ns } => {
            let (options, dir) = common.load()?;
            let rows = converge(&options, &ns, &dir)?;
            print!("{}", amm_core::harness::output::table_md(&rows));
            println!("wrote {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
