mod commands;
mod exit;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vpc_core::analysis::{GroupingMode, DEFAULT_OUTLIER_K};
use vpc_core::bundle::write_bundle;
use vpc_core::corpus::DEFAULT_WINDOW;
use vpc_core::mds::MdsMethod;
use vpc_core::synthetic::{layer_trend_bundle, LayerTrendConfig};

use commands::analyze::AnalyzeArgs;
use commands::corpus::CorpusArgs;
use exit::CliError;

#[derive(Parser)]
#[command(
    name = "vpc",
    version,
    about = "Layer-wise analysis of verb-particle construction embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MdsArg {
    Classical,
    Smacof,
}

impl From<MdsArg> for MdsMethod {
    fn from(m: MdsArg) -> Self {
        match m {
            MdsArg::Classical => MdsMethod::Classical,
            MdsArg::Smacof => MdsMethod::Smacof,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract labeled construction samples from plain-text documents.
    Corpus {
        /// Directory of UTF-8 text files, one document per file.
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Query file: `verb<TAB>particle[<TAB>inflections]` per line.
        /// Defaults to the base form of all eleven constructions.
        #[arg(long, value_name = "FILE")]
        queries: Option<PathBuf>,
        /// Context tokens kept on each side of the construction.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run the per-layer analysis of a bundle and write a report directory.
    Analyze {
        #[arg(long, value_name = "DIR")]
        bundle: PathBuf,
        /// `all`, `by_category` or `within_category:<cat>[,<cat>...]`.
        /// Repeatable; defaults to `all`.
        #[arg(long = "grouping", value_name = "MODE")]
        groupings: Vec<String>,
        #[arg(long, value_enum, default_value_t = MdsArg::Classical)]
        mds: MdsArg,
        /// Half-z-score every dimension before computing MDS distances.
        #[arg(long)]
        rescale_mds: bool,
        /// SMACOF iteration cap.
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        /// SMACOF relative stress-decrease tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_OUTLIER_K)]
        outlier_k: f64,
        /// Fail unless the bundle's model_id matches.
        #[arg(long, value_name = "MODEL_ID")]
        expect_model: Option<String>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Write a synthetic bundle whose class separation peaks at one layer.
    Synthetic {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        layers: usize,
        #[arg(long, default_value_t = 6)]
        peak_layer: usize,
        #[arg(long, default_value_t = 12)]
        samples_per_construction: usize,
        #[arg(long, default_value_t = 16)]
        hidden_dim: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the built-in numerical checks.
    Selftest,
}

fn parse_groupings(raw: &[String]) -> Result<Vec<GroupingMode>, CliError> {
    if raw.is_empty() {
        return Ok(vec![GroupingMode::ByConstructionAll]);
    }
    let mut out = Vec::new();
    for r in raw {
        out.extend(GroupingMode::parse_list(r).map_err(CliError::from)?);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Corpus {
            input,
            queries,
            window,
            out,
        } => {
            commands::corpus::run(&CorpusArgs {
                input,
                queries,
                window,
                out,
            })?;
        }
        Command::Analyze {
            bundle,
            groupings,
            mds,
            rescale_mds,
            max_iter,
            tol,
            outlier_k,
            expect_model,
            out,
        } => {
            let args = AnalyzeArgs {
                bundle,
                groupings: parse_groupings(&groupings)?,
                mds: mds.into(),
                rescale_mds,
                max_iter,
                tol,
                outlier_k,
                expect_model,
                out,
            };
            commands::analyze::run(&args)?;
        }
        Command::Synthetic {
            out,
            layers,
            peak_layer,
            samples_per_construction,
            hidden_dim,
            seed,
        } => {
            let config = LayerTrendConfig {
                num_layers: layers,
                peak_layer,
                samples_per_construction,
                hidden_dim,
                seed,
                ..LayerTrendConfig::default()
            };
            let bundle = layer_trend_bundle(&config);
            write_bundle(&bundle, &out)?;
            println!(
                "wrote {} x {} bundle to {}",
                bundle.num_samples(),
                bundle.num_layers(),
                out.display()
            );
        }
        Command::Selftest => {
            if !commands::selftest::run() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.code() as u8)
        }
    }
}
