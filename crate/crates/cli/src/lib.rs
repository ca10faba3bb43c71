//! Command-line driver: one subcommand per stage plus `pipeline`, which
//! runs every stage in order into an output directory.
//!
//! Exit codes: 0 success, 2 undefined tau, 64 usage, 70 stage failure.

mod config;
mod pipeline;
mod stages;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use risekit::evaluation::TauVariant;
use risekit::negatives::{AugmentRecipe, DEFAULT_P_DROP, DEFAULT_P_SWAP};
use risekit::trainer::{gradient_check, random_instance, HardNegativeScope, TrainingConfig, DEFAULT_EPSILON};

pub use config::parse_config;
pub use pipeline::PipelineConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNDEFINED_TAU: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FAILURE: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "risekit", version, about = "Contrastive dual-encoder summary scoring")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a vocabulary from a pairs file.
    BuildVocab(BuildVocabArgs),
    /// Generate lexical negatives for each pair.
    Augment(AugmentArgs),
    /// Mine the most similar other summaries under a trained encoder.
    Mine(MineArgs),
    /// Train the dual encoder.
    Train(TrainArgs),
    /// Compare analytic and finite-difference gradients on a random instance.
    GradCheck(GradCheckArgs),
    /// Score every cell of an evaluation file.
    Score(ScoreArgs),
    /// Correlate per-system scores with human ratings.
    Evaluate(EvaluateArgs),
    /// Run every stage end to end.
    Pipeline(pipeline::PipelineArgs),
}

#[derive(Debug, Args)]
struct BuildVocabArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    #[arg(long, default_value_t = 50_000)]
    max_size: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long)]
    pairs: PathBuf,
    /// Comma-separated KIND:COUNT entries, KIND one of SE, SW, DW, DC, SA.
    #[arg(long, default_value = "SE:5,DW:5")]
    recipe: String,
    #[arg(long, default_value_t = DEFAULT_P_SWAP)]
    p_swap: f64,
    #[arg(long, default_value_t = DEFAULT_P_DROP)]
    p_drop: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Antonym lexicon ("word: a,b" lines); the bundled one by default.
    #[arg(long)]
    antonyms: Option<PathBuf>,
    /// Sentence-initial stopword list for the entity heuristic.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, default_value_t = 5)]
    top_n: usize,
    /// Append the mined negatives to this training-examples file instead of
    /// writing them alone.
    #[arg(long)]
    combine_with: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    examples: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.05)]
    temperature: f64,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// One set of weights for both towers.
    #[arg(long)]
    shared_towers: bool,
    #[arg(long, default_value = "own_document")]
    hard_neg_scope: HardNegativeScope,
    /// Train on in-batch negatives only.
    #[arg(long)]
    no_hard_negatives: bool,
    #[arg(long, default_value_t = risekit::textproc::DEFAULT_MAX_DOC_LEN)]
    max_doc_len: usize,
    #[arg(long, default_value_t = risekit::textproc::DEFAULT_MAX_SUM_LEN)]
    max_sum_len: usize,
    #[arg(long)]
    out_checkpoint: PathBuf,
    /// Per-epoch TSV log.
    #[arg(long)]
    log: PathBuf,
}

#[derive(Debug, Args)]
struct GradCheckArgs {
    #[arg(long, default_value_t = 50)]
    vocab_size: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, default_value_t = 4)]
    batch_size: usize,
    /// Hard negatives per example; 0 checks the in-batch loss alone.
    #[arg(long, default_value_t = 3)]
    hard_negatives: usize,
    #[arg(long, default_value_t = 0.05)]
    temperature: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long, default_value = "own_document")]
    hard_neg_scope: HardNegativeScope,
    #[arg(long)]
    separate_towers: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    eval: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    eval: PathBuf,
    #[arg(long, default_value = "tau_b")]
    variant: TauVariant,
    #[arg(long)]
    out: PathBuf,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Stage { stage: &'static str, error: anyhow::Error },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Stage { error, .. } => {
                let undefined = error
                    .chain()
                    .any(|e| matches!(e.downcast_ref::<risekit::Error>(), Some(risekit::Error::UndefinedTau(_))));
                if undefined {
                    EXIT_UNDEFINED_TAU
                } else {
                    EXIT_FAILURE
                }
            }
        }
    }
}

/// Runs `f` as the stage named `stage`.
pub(crate) fn stage<T>(stage: &'static str, f: impl FnOnce() -> anyhow::Result<T>) -> Result<T, Failure> {
    log::debug!("stage {stage}");
    f().map_err(|error| Failure::Stage { stage, error })
}

fn require_seed(seed: Option<u64>) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage("seed required (pass --seed)".into()))
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = cli.threads;
    let outcome = if threads == 0 {
        Err(Failure::Usage("--threads must be at least 1".into()))
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Stage {
                stage: "setup",
                error: e.into(),
            }),
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}\n\nFor usage, run `risekit --help`."),
                Failure::Stage { stage, error } => eprintln!("error: stage {stage} failed: {error:#}"),
            }
            failure.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::BuildVocab(a) => {
            stage("build-vocab", || stages::build_vocab(&a.pairs, a.min_count, a.max_size, &a.out))?;
        }
        Command::Augment(a) => {
            let seed = require_seed(a.seed)?;
            let recipe = AugmentRecipe::parse(&a.recipe, a.p_swap, a.p_drop).map_err(|e| Failure::Usage(e.to_string()))?;
            stage("augment", || {
                let res = stages::resources(a.antonyms.as_deref(), a.stopwords.as_deref())?;
                stages::augment(&a.pairs, &recipe, &res, seed, &a.out)
            })?;
        }
        Command::Mine(a) => {
            stage("mine", || {
                stages::mine(&a.pairs, &a.checkpoint, &a.vocab, a.top_n, a.combine_with.as_deref(), &a.out)
            })?;
        }
        Command::Train(a) => {
            let seed = require_seed(a.seed)?;
            let spec = stages::TrainSpec {
                config: TrainingConfig {
                    batch_size: a.batch_size,
                    temperature: a.temperature,
                    learning_rate: a.lr,
                    epochs: a.epochs,
                    seed,
                    max_doc_len: a.max_doc_len,
                    max_sum_len: a.max_sum_len,
                    use_hard_negatives: !a.no_hard_negatives,
                    hard_negative_scope: a.hard_neg_scope,
                },
                dim: a.dim,
                shared_towers: a.shared_towers,
            };
            spec.config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            stage("train", || stages::train_model(&a.examples, &a.vocab, &spec, &a.out_checkpoint, &a.log))?;
        }
        Command::GradCheck(a) => grad_check(&a)?,
        Command::Score(a) => {
            stage("score", || stages::score(&a.checkpoint, &a.vocab, &a.eval, &a.out))?;
        }
        Command::Evaluate(a) => {
            let report = stage("evaluate", || stages::evaluate(&a.scores, &a.eval, a.variant, &a.out))?;
            print!("{}", report.to_table());
        }
        Command::Pipeline(a) => pipeline::run_pipeline(a)?,
    }
    Ok(())
}

fn grad_check(a: &GradCheckArgs) -> Result<(), Failure> {
    let report = stage("grad-check", || {
        let (params, vocab, batch) =
            random_instance(a.vocab_size, a.dim, a.batch_size, a.hard_negatives, !a.separate_towers, a.seed)?;
        let config = TrainingConfig {
            batch_size: a.batch_size,
            temperature: a.temperature,
            use_hard_negatives: a.hard_negatives > 0,
            hard_negative_scope: a.hard_neg_scope,
            ..TrainingConfig::default()
        };
        Ok(gradient_check(&params, &vocab, &batch, &config, a.epsilon, a.seed)?)
    })?;
    println!(
        "max relative error {:.3e} over {} coordinates (loss {:.6}, threshold {:.0e})",
        report.max_relative_error, report.coordinates_checked, report.loss, a.threshold
    );
    if report.max_relative_error < a.threshold {
        Ok(())
    } else {
        Err(Failure::Stage {
            stage: "grad-check",
            error: anyhow::anyhow!(
                "max relative error {:.3e} exceeds threshold {:.0e}",
                report.max_relative_error,
                a.threshold
            ),
        })
    }
}
