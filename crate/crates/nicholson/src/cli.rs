use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, Context};
use crate::config;
use crate::error::{CliError, EXIT_CONFIG, EXIT_OK};
use crate::output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "nicholson", version, about = "Simulate and certify N-species Nicholson delay systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true, default_value = "config.json")]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "NICHOLSON_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Integrate from a constant history and write the trajectory.
    Simulate,
    /// Certify the configured hypotheses.
    Check,
    /// Estimate the persistence floor over a random ensemble.
    Persistence,
    /// Verify decay to zero over a random ensemble.
    Attractor,
    /// Search for periodic orbits and check them against the a priori box.
    Periodic,
    /// Check Miranda sign conditions of the averaged field.
    Miranda,
    /// Run checks and simulations over a parameter grid.
    Sweep,
}

impl Cli {
    pub fn execute(&self) -> Result<i32, CliError> {
        let loaded = config::load(&self.config)?;
        let out = OutputDir::new(&self.out, self.force);
        let ctx = Context {
            loaded: &loaded,
            config_path: &self.config,
            out: &out,
            seed: self.seed.unwrap_or(loaded.config.seed),
        };
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            pool = pool.num_threads(n);
        }
        let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        pool.install(|| match self.command {
            Command::Simulate => commands::simulate(&ctx),
            Command::Check => commands::check(&ctx),
            Command::Persistence => commands::persistence(&ctx),
            Command::Attractor => commands::attractor(&ctx),
            Command::Periodic => commands::periodic(&ctx),
            Command::Miranda => commands::miranda(&ctx),
            Command::Sweep => commands::sweep(&ctx),
        })
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
