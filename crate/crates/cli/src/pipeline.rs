//! End-to-end driver over a flat config file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use risekit::evaluation::TauVariant;
use risekit::negatives::{AugmentRecipe, DEFAULT_P_DROP, DEFAULT_P_SWAP};
use risekit::textproc::{DEFAULT_MAX_DOC_LEN, DEFAULT_MAX_SUM_LEN};
use risekit::trainer::{HardNegativeScope, TrainingConfig};

use crate::config::load_config;
use crate::stages::{self, TrainSpec};
use crate::{stage, Failure};

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Flat `key = value` config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long)]
    eval: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extra `KEY=VALUE` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Every pipeline setting after merging the config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub pairs: PathBuf,
    pub eval: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub min_count: usize,
    pub max_vocab: usize,
    pub recipe: String,
    pub p_swap: f64,
    pub p_drop: f64,
    pub antonyms: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub top_n: usize,
    pub dim: usize,
    pub batch_size: usize,
    pub temperature: f64,
    pub lr: f64,
    pub epochs: usize,
    pub shared_towers: bool,
    pub use_hard_negatives: bool,
    pub hard_neg_scope: HardNegativeScope,
    pub max_doc_len: usize,
    pub max_sum_len: usize,
    pub variant: TauVariant,
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn get<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T, String>
    where
        T::Err: Display,
    {
        match self.0.remove(key) {
            Some(v) => v.parse().map_err(|e| format!("{key}: cannot parse {v:?}: {e}")),
            None => default.ok_or_else(|| format!("{key} required")),
        }
    }

    fn optional(&mut self, key: &str) -> Option<PathBuf> {
        self.0.remove(key).filter(|v| !v.is_empty()).map(PathBuf::from)
    }
}

impl PipelineConfig {
    /// Resolves settings from `key = value` pairs, applying defaults.
    pub fn from_map(map: BTreeMap<String, String>) -> Result<Self, String> {
        let mut k = Keys(map);
        if !k.0.contains_key("seed") {
            return Err("seed required".into());
        }
        let cfg = Self {
            pairs: k.get("pairs", None)?,
            eval: k.get("eval", None)?,
            out_dir: k.get("out_dir", None)?,
            seed: k.get("seed", None)?,
            min_count: k.get("min_count", Some(1))?,
            max_vocab: k.get("max_vocab", Some(50_000))?,
            recipe: k.get("recipe", Some("SE:5,DW:5".to_string()))?,
            p_swap: k.get("p_swap", Some(DEFAULT_P_SWAP))?,
            p_drop: k.get("p_drop", Some(DEFAULT_P_DROP))?,
            antonyms: k.optional("antonyms"),
            stopwords: k.optional("stopwords"),
            top_n: k.get("top_n", Some(5))?,
            dim: k.get("dim", Some(32))?,
            batch_size: k.get("batch_size", Some(8))?,
            temperature: k.get("temperature", Some(0.05))?,
            lr: k.get("lr", Some(0.1))?,
            epochs: k.get("epochs", Some(10))?,
            shared_towers: k.get("shared_towers", Some(true))?,
            use_hard_negatives: k.get("use_hard_negatives", Some(true))?,
            hard_neg_scope: k.get("hard_neg_scope", Some(HardNegativeScope::OwnDocument))?,
            max_doc_len: k.get("max_doc_len", Some(DEFAULT_MAX_DOC_LEN))?,
            max_sum_len: k.get("max_sum_len", Some(DEFAULT_MAX_SUM_LEN))?,
            variant: k.get("variant", Some(TauVariant::TauB))?,
        };
        if let Some(key) = k.0.keys().next() {
            return Err(format!("unknown config key {key:?}"));
        }
        let paths = [&cfg.pairs, &cfg.eval, &cfg.out_dir];
        if paths[0] == paths[1] || paths[0] == paths[2] || paths[1] == paths[2] {
            return Err("pairs, eval and out_dir must be distinct paths".into());
        }
        Ok(cfg)
    }

    fn training(&self) -> TrainingConfig {
        TrainingConfig {
            batch_size: self.batch_size,
            temperature: self.temperature,
            learning_rate: self.lr,
            epochs: self.epochs,
            seed: self.seed,
            max_doc_len: self.max_doc_len,
            max_sum_len: self.max_sum_len,
            use_hard_negatives: self.use_hard_negatives,
            hard_negative_scope: self.hard_neg_scope,
        }
    }

    /// Settings as `key = value` lines, without the output directory so
    /// that runs into different directories stay byte-identical.
    fn to_text(&self) -> String {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let lines = [
            ("pairs", self.pairs.display().to_string()),
            ("eval", self.eval.display().to_string()),
            ("seed", self.seed.to_string()),
            ("min_count", self.min_count.to_string()),
            ("max_vocab", self.max_vocab.to_string()),
            ("recipe", self.recipe.clone()),
            ("p_swap", self.p_swap.to_string()),
            ("p_drop", self.p_drop.to_string()),
            ("antonyms", opt(&self.antonyms)),
            ("stopwords", opt(&self.stopwords)),
            ("top_n", self.top_n.to_string()),
            ("dim", self.dim.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("temperature", self.temperature.to_string()),
            ("lr", self.lr.to_string()),
            ("epochs", self.epochs.to_string()),
            ("shared_towers", self.shared_towers.to_string()),
            ("use_hard_negatives", self.use_hard_negatives.to_string()),
            ("hard_neg_scope", self.hard_neg_scope.to_string()),
            ("max_doc_len", self.max_doc_len.to_string()),
            ("max_sum_len", self.max_sum_len.to_string()),
            ("variant", self.variant.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn resolve(args: PipelineArgs) -> Result<PipelineConfig, Failure> {
    let mut map = match &args.config {
        Some(path) => load_config(path).map_err(|e| Failure::Usage(format!("{e:#}")))?,
        None => BTreeMap::new(),
    };
    for item in &args.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    let paths = [("pairs", &args.pairs), ("eval", &args.eval), ("out_dir", &args.out_dir)];
    for (key, value) in paths {
        if let Some(p) = value {
            map.insert(key.into(), p.display().to_string());
        }
    }
    if let Some(seed) = args.seed {
        map.insert("seed".into(), seed.to_string());
    }
    PipelineConfig::from_map(map).map_err(Failure::Usage)
}

pub fn run_pipeline(args: PipelineArgs) -> Result<(), Failure> {
    let cfg = resolve(args)?;
    let recipe = AugmentRecipe::parse(&cfg.recipe, cfg.p_swap, cfg.p_drop).map_err(|e| Failure::Usage(e.to_string()))?;
    let training = cfg.training();
    training.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let spec = TrainSpec {
        config: training,
        dim: cfg.dim,
        shared_towers: cfg.shared_towers,
    };

    let dir = &cfg.out_dir;
    let out = |name: &str| dir.join(name);
    stage("setup", || {
        fs::create_dir_all(dir)?;
        fs::write(out("config.txt"), cfg.to_text())?;
        Ok(())
    })?;

    stage("build-vocab", || stages::build_vocab(&cfg.pairs, cfg.min_count, cfg.max_vocab, &out("vocab.txt")))?;
    stage("augment", || {
        let res = stages::resources(cfg.antonyms.as_deref(), cfg.stopwords.as_deref())?;
        stages::augment(&cfg.pairs, &recipe, &res, cfg.seed, &out("lexical.jsonl"))
    })?;
    stage("train-lexical", || {
        stages::train_model(
            &out("lexical.jsonl"),
            &out("vocab.txt"),
            &spec,
            &out("model_lexical.ckpt"),
            &out("train_lexical.tsv"),
        )
    })?;
    stage("mine", || {
        stages::mine(
            &cfg.pairs,
            &out("model_lexical.ckpt"),
            &out("vocab.txt"),
            cfg.top_n,
            None,
            &out("mined.jsonl"),
        )
    })?;
    stage("combine", || stages::combine(&out("lexical.jsonl"), &out("mined.jsonl"), &out("combined.jsonl")))?;
    // The final model starts from a fresh initialisation.
    stage("train-final", || {
        stages::train_model(
            &out("combined.jsonl"),
            &out("vocab.txt"),
            &spec,
            &out("model_final.ckpt"),
            &out("train_final.tsv"),
        )
    })?;
    stage("score", || stages::score(&out("model_final.ckpt"), &out("vocab.txt"), &cfg.eval, &out("scores.tsv")))?;
    let report = stage("evaluate", || stages::evaluate(&out("scores.tsv"), &cfg.eval, cfg.variant, &out("report.txt")))?;
    println!("{}", report.to_json_line());
    print!("{}", report.to_table());
    Ok(())
}
