//! Command-line surface: a TOML experiment config, flag overrides and one
//! subcommand per experiment step. Artifacts go under the output directory
//! with a manifest.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_cv, cmd_eval, cmd_gradcheck, cmd_pipeline, cmd_recognize, cmd_stats, cmd_synth, cmd_train, cmd_validate,
    embeddings_for, load_corpus, Manifest, RecognizeReport, Recognizer, TrainReport, ValidateReport, CLASSIFIER_KIND,
    RECOGNIZER_KIND,
};
pub use config::{CorpusSection, EmbeddingSource, ExperimentConfig, LinkedConfig, SplitChoice, DATA_ROOT_ENV};

use crate::classifiers::ModelKind;
use crate::error::Result;
use crate::eval::Axis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pdtb-lab", version, about = "Implicit discourse relation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Experiment config (TOML).
    #[arg(long, short)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Location,
    Linkage,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RecognizerArg {
    Intra,
    Linked,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the corpus and trees and check every invariant.
    Validate(Common),
    /// Sense distribution by location or linkage.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "location")]
        axis: AxisArg,
    },
    /// Train a sense classifier and score it on the test split.
    Train(Common),
    /// Score a saved classifier.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Cross-validation over section groups.
    Cv {
        #[command(flatten)]
        common: Common,
        #[arg(long, short, default_value_t = 12)]
        k: usize,
    },
    /// Train a recognizer and compare it with the majority baseline.
    Recognize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        which: RecognizerArg,
    },
    /// Linked recognizer followed by sense classification.
    Pipeline(Common),
    /// Finite-difference gradient check of every layer.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic corpus with a matching config.
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of documents.
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Common {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if let Some(lr) = self.lr {
            cfg.train.lr = lr;
        }
        if let Some(e) = self.max_epochs {
            cfg.train.max_epochs = e;
        }
        if let Some(h) = self.hidden {
            cfg.train.hidden = h;
        }
        Ok(cfg)
    }
}

const GRADCHECK_TOLERANCE: f64 = 1e-4;

/// Run one command, printing a short summary. Returns the exit code.
pub fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Validate(c) => {
            let r = cmd_validate(&c.resolve()?)?;
            println!("documents {} (parsed {})", r.documents, r.parsed_documents);
            println!("relations {}", r.relations);
            for (t, n) in &r.by_type {
                println!("  {t} {n}");
            }
            println!("implicit inter {} intra {}", r.implicit_inter, r.implicit_intra);
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Stats { common, axis } => {
            let axis = match axis {
                AxisArg::Location => Axis::Location,
                AxisArg::Linkage => Axis::Linkage,
            };
            print!("{}", cmd_stats(&common.resolve()?, axis)?.render());
        }
        Command::Train(c) => {
            let (_, r) = cmd_train(&c.resolve()?)?;
            println!(
                "{}: micro F1 {:.4} (inter {:.4}, intra {:.4}, weighted {:.4}) after {} epochs",
                r.model, r.metrics.micro_f1, r.metrics.inter.micro_f1, r.metrics.intra.micro_f1, r.metrics.overall_micro, r.epochs
            );
            println!("chi-squared {:.4}, p {:.4}", r.chi_square.statistic, r.chi_square.p_value);
        }
        Command::Eval { common, checkpoint } => {
            let m = cmd_eval(&common.resolve()?, &checkpoint)?;
            println!("micro F1 {:.4} macro F1 {:.4} weighted {:.4}", m.micro_f1, m.macro_f1, m.overall_micro);
        }
        Command::Cv { common, k } => {
            let r = cmd_cv(&common.resolve()?, k)?;
            for f in &r.folds {
                println!("fold {} (test {:?}): {:.4}", f.fold, f.test_sections, f.score);
            }
            println!("mean {:.4}", r.mean);
        }
        Command::Recognize { common, which } => {
            let which = match which {
                RecognizerArg::Intra => Recognizer::Intra,
                RecognizerArg::Linked => Recognizer::Linked,
            };
            let r = cmd_recognize(&common.resolve()?, which)?;
            for (name, b) in [("baseline", r.baseline), ("model", r.model)] {
                println!(
                    "{name}: accuracy {:.4} precision {:.4} recall {:.4} F1 {:.4}",
                    b.accuracy, b.precision, b.recall, b.f1
                );
            }
        }
        Command::Pipeline(c) => {
            let r = cmd_pipeline(&c.resolve()?)?;
            println!("recognized {} matched {} all intra {}", r.recognized, r.matched, r.all_intra);
            match &r.sense {
                Some(s) => println!("sense micro F1 {:.4}", s.micro_f1),
                None => println!("sense F1 n/a"),
            }
            println!(
                "end to end P {:.4} R {:.4} F1 {:.4}",
                r.end_to_end_precision, r.end_to_end_recall, r.end_to_end_f1
            );
        }
        Command::Gradcheck { seed } => {
            let mut worst: f64 = 0.0;
            for (name, c) in cmd_gradcheck(seed)? {
                println!("{name:<16} {:.3e} over {} values", c.max_rel_error, c.checked);
                worst = worst.max(c.max_rel_error);
            }
            println!("max relative error {worst:.3e}");
            if !(worst < GRADCHECK_TOLERANCE) {
                return Ok(EXIT_FAILURE);
            }
        }
        Command::Synth { seed, size, out } => {
            cmd_synth(seed, size, &out)?;
            println!("wrote {} documents to {}", size, out.display());
        }
    }
    Ok(EXIT_OK)
}

/// Parse arguments and run. Usage errors exit 2, failures 1.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
