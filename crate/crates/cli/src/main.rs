use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use citeclass::{Format, Measure};
use citeclass_cli::commands;
use citeclass_cli::config::{FactorCount, PipelineConfig, TransformKind};
use clap::{Args, Parser, Subcommand};

/// Journal classification from aggregated citation matrices.
#[derive(Debug, Parser)]
#[command(name = "citeclass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-journal distribution summaries and decile histograms.
    Stats,
    /// Correlation, scree, Kaiser count and rotated loadings.
    Classify,
    /// Rank-size power-law fit per journal, with log-log plots.
    Powerlaw,
    /// Thresholded similarity map laid out as SVG, DOT and Pajek.
    Map,
    /// Print the two-variable Pearson/cosine table.
    Table5,
    /// Write the bundled synthetic 21-journal matrix.
    Demo,
    /// Run every step in sequence.
    Pipeline,
}

/// Flags override values read from `--config`.
#[derive(Debug, Args)]
struct Flags {
    /// Citation matrix (csv, tsv or Pajek .net).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// none, log or arcsinh.
    #[arg(long, global = true)]
    transform: Option<TransformKind>,
    /// Base of the log transform.
    #[arg(long, global = true)]
    log_base: Option<f64>,
    /// Added to every cell before the log.
    #[arg(long, global = true)]
    offset: Option<f64>,
    /// pearson or cosine.
    #[arg(long, global = true)]
    measure: Option<Measure>,
    /// `kaiser` or a fixed factor count.
    #[arg(long, global = true)]
    factors: Option<FactorCount>,
    /// Report unrotated loadings.
    #[arg(long, global = true)]
    no_rotate: bool,
    /// Loadings below this magnitude are blanked in the table.
    #[arg(long, global = true)]
    suppress: Option<f64>,
    /// Minimum similarity for a map edge.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Layout seed; also seeds `demo`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for every written artifact.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// `key = value` file with defaults for any of the above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.format = Some(v);
        }
        if let Some(v) = self.transform {
            cfg.transform = v;
        }
        if let Some(v) = self.log_base {
            cfg.log_base = v;
        }
        if let Some(v) = self.offset {
            cfg.offset = v;
        }
        if let Some(v) = self.measure {
            cfg.measure = v;
        }
        if let Some(v) = self.factors {
            cfg.factors = v;
        }
        if self.no_rotate {
            cfg.rotate = false;
        }
        if let Some(v) = self.suppress {
            cfg.suppress = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.flags.resolve()?;
    let written = match cli.command {
        Command::Stats => commands::cmd_stats(&cfg, &commands::load_matrix(&cfg)?)?,
        Command::Classify => commands::cmd_classify(&cfg, &commands::load_matrix(&cfg)?)?,
        Command::Powerlaw => commands::cmd_powerlaw(&cfg, &commands::load_matrix(&cfg)?)?,
        Command::Map => commands::cmd_map(&cfg, &commands::load_matrix(&cfg)?)?,
        Command::Demo => commands::cmd_demo(&cfg)?,
        Command::Pipeline => commands::cmd_pipeline(&cfg)?,
        Command::Table5 => {
            print!("{}", commands::table5());
            Vec::new()
        }
    };
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
