use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use fstgec_cli::{
    cmd_correct, cmd_fst_compile, cmd_fst_compose, cmd_fst_print, cmd_report, cmd_train_lm,
    cmd_tune, Metric,
};

/// Lattice-based grammatical error correction and WFST utilities.
#[derive(Parser)]
#[command(name = "fstgec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correct a tokenized corpus, one sentence per line.
    Correct {
        /// Pipeline configuration file.
        #[arg(short, long)]
        config: PathBuf,
        /// Input sentences, whitespace-tokenized, one per line.
        input: PathBuf,
    },
    /// Tune the λ parameters on a development corpus and write them back
    /// into the config file.
    Tune {
        #[arg(short, long)]
        config: PathBuf,
        /// Development sources, one sentence per line.
        dev_src: PathBuf,
        /// Development references, parallel to the sources.
        dev_ref: PathBuf,
        /// Gold edits file ("sent_id<TAB>start<TAB>end<TAB>replacement").
        #[arg(long)]
        gold_edits: Option<PathBuf>,
        /// Objective metric: gleu or f05.
        #[arg(long, default_value = "gleu")]
        metric: Metric,
        /// Powell sweeps per restart; 0 keeps the initial values.
        #[arg(long, default_value_t = 5)]
        sweeps: usize,
    },
    /// Evaluate the configured system on a test corpus.
    Report {
        #[arg(short, long)]
        config: PathBuf,
        test_src: PathBuf,
        test_ref: PathBuf,
        #[arg(long)]
        gold_edits: Option<PathBuf>,
    },
    /// Train a backoff n-gram model and write it in ARPA format.
    TrainLm {
        /// Training corpus, whitespace-tokenized, one sentence per line.
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, default_value_t = 0.7)]
        discount: f64,
        /// Output ARPA file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Text-FST debugging utilities.
    #[command(subcommand)]
    Fst(FstCommand),
}

#[derive(Subcommand)]
enum FstCommand {
    /// Echo a text FST with a state/arc summary.
    Print {
        fst: PathBuf,
        #[arg(long)]
        isyms: PathBuf,
        #[arg(long)]
        osyms: Option<PathBuf>,
    },
    /// Validate a text FST against its symbol tables and normalize it.
    Compile {
        fst: PathBuf,
        #[arg(long)]
        isyms: PathBuf,
        #[arg(long)]
        osyms: Option<PathBuf>,
    },
    /// Compose two text FSTs: a maps isyms→pivot, b maps pivot→osyms.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        isyms: PathBuf,
        #[arg(long)]
        pivot: PathBuf,
        #[arg(long)]
        osyms: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Correct { config, input } => {
            for line in cmd_correct(&config, &input)? {
                println!("{}", line);
            }
        }
        Command::Tune {
            config,
            dev_src,
            dev_ref,
            gold_edits,
            metric,
            sweeps,
        } => {
            let outcome = cmd_tune(
                &config,
                &dev_src,
                &dev_ref,
                gold_edits.as_deref(),
                metric,
                sweeps,
            )?;
            for (i, v) in outcome.sweep_values.iter().enumerate() {
                println!("sweep {}  best metric {:.4}", i + 1, v);
            }
            println!("tuned metric {:.4}", outcome.best_value);
            println!("tuned lambdas written to {}", config.display());
        }
        Command::Report {
            config,
            test_src,
            test_ref,
            gold_edits,
        } => {
            let report = cmd_report(&config, &test_src, &test_ref, gold_edits.as_deref())?;
            print!("{}", report.render());
        }
        Command::TrainLm {
            corpus,
            order,
            discount,
            out,
        } => cmd_train_lm(&corpus, order, discount, &out)?,
        Command::Fst(sub) => {
            let text = match sub {
                FstCommand::Print { fst, isyms, osyms } => {
                    cmd_fst_print(&fst, &isyms, osyms.as_deref())?
                }
                FstCommand::Compile { fst, isyms, osyms } => {
                    cmd_fst_compile(&fst, &isyms, osyms.as_deref())?
                }
                FstCommand::Compose {
                    a,
                    b,
                    isyms,
                    pivot,
                    osyms,
                } => cmd_fst_compose(&a, &b, &isyms, &pivot, osyms.as_deref())?,
            };
            print!("{}", text);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {:#}", e);
        std::process::exit(1);
    }
}
