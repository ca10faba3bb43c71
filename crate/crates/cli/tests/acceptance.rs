//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always appear in test output.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use risekit::corpus::{load_pairs, DocumentSummaryPair, Negative, Origin, TrainingExample};
use risekit::encoder::{
    decode_checkpoint, embed_str, init_params, load_checkpoint, save_checkpoint, similarity, EncoderParams,
    Tower,
};
use risekit::evaluation::{kendall_tau, score_summary, TauVariant};
use risekit::negatives::{drop_chars, drop_words, mine_model_negatives, shuffle_words, swap_antonyms, swap_entities, MiningConfig};
use risekit::rng::SeededRng;
use risekit::textproc::{detokenize, tokenize, AntonymLexicon, EntityDetector, LengthLimits, Vocabulary};
use risekit::trainer::{batch_loss, in_batch_accuracy, train, TrainingConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

fn fixture(name: &str) -> PathBuf {
    Path::new(FIXTURES).join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("{what} took {elapsed:.2?}, limit {limit_s} s"))
}

fn gradient_check() -> Check {
    let start = Instant::now();
    let cases: [(&str, &[&str], f64); 3] = [
        ("hard negatives", &[], 1e-4),
        ("in-batch only", &["--hard-negatives", "0"], 1e-4),
        ("tau 0.01", &["--temperature", "0.01", "--threshold", "1e-3"], 1e-3),
    ];
    let mut summary = Vec::new();
    for (name, extra, limit) in cases {
        let mut worst = 0.0f64;
        for seed in 0..3 {
            let out = Command::new(env!("CARGO_BIN_EXE_risekit"))
                .args(["grad-check", "--vocab-size", "50", "--dim", "8", "--batch-size", "4", "--seed"])
                .arg(seed.to_string())
                .args(extra)
                .env("RUST_LOG", "off")
                .output()
                .map_err(|e| e.to_string())?;
            let stdout = String::from_utf8_lossy(&out.stdout);
            ensure(out.status.success(), || format!("{name} seed {seed}: exit {:?}: {stdout}", out.status.code()))?;
            let err: f64 = stdout
                .split_whitespace()
                .nth(3)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| format!("unparseable output {stdout:?}"))?;
            ensure(err < limit, || format!("{name} seed {seed}: {err:e} >= {limit:e}"))?;
            worst = worst.max(err);
        }
        summary.push(format!("{name} {worst:.1e}"));
    }
    within(start.elapsed(), 10.0, "gradient checks")?;
    Ok(format!("{} in {:.2?}", summary.join(", "), start.elapsed()))
}

fn closed_form_loss() -> Check {
    let mut worst = 0.0f64;
    for (b, h) in [(2usize, 0usize), (4, 0), (1, 1), (4, 10)] {
        let batch: Vec<TrainingExample> = (0..b)
            .map(|i| TrainingExample {
                pair: DocumentSummaryPair {
                    id: format!("e{i}"),
                    document: format!("doc words {i}"),
                    summary: format!("summary {i}"),
                },
                negatives: (0..h)
                    .map(|k| Negative::lexical(format!("neg {k} of {i}"), Origin::DropWords))
                    .collect(),
            })
            .collect();
        let words: Vec<String> = batch
            .iter()
            .flat_map(|e| {
                let mut t = tokenize(&e.pair.document);
                t.extend(tokenize(&e.pair.summary));
                t.extend(e.negatives.iter().flat_map(|n| tokenize(&n.text)));
                t
            })
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        let mut list = vec!["<pad>".to_string(), "<unk>".to_string()];
        let mut words = words;
        words.sort();
        list.extend(words);
        let vocab = Vocabulary::from_list(list).map_err(|e| e.to_string())?;
        let mut params = init_params(vocab.len(), 5, 1, false).map_err(|e| e.to_string())?;
        for tower in params.towers_mut() {
            let row = tower.embedding.row(3).to_vec();
            for r in tower.embedding.as_mut_slice().chunks_mut(5) {
                r.copy_from_slice(&row);
            }
        }
        let cfg = TrainingConfig {
            use_hard_negatives: h > 0,
            ..TrainingConfig::default()
        };
        let loss = batch_loss(&params, &vocab, &batch, &cfg).map_err(|e| e.to_string())?.loss;
        let err = (loss - ((b + h) as f64).ln()).abs();
        ensure(err < 1e-9, || format!("B={b} H={h}: loss {loss}, error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max |loss - ln(B+H)| = {worst:.1e}"))
}

fn naive_top_n(
    params: &EncoderParams,
    vocab: &Vocabulary,
    pairs: &[DocumentSummaryPair],
    n: usize,
) -> Vec<Vec<(String, String)>> {
    let lim = LengthLimits::default();
    let sums: Vec<_> = pairs
        .iter()
        .map(|c| embed_str(params, vocab, &c.summary, Tower::Summary, lim.max_sum_len).unwrap())
        .collect();
    pairs
        .iter()
        .map(|p| {
            let doc = embed_str(params, vocab, &p.document, Tower::Document, lim.max_doc_len).unwrap();
            let mut all: Vec<(f64, &DocumentSummaryPair)> = pairs
                .iter()
                .zip(&sums)
                .filter(|(c, _)| c.id != p.id && c.summary != p.summary)
                .map(|(c, e)| (similarity(&doc, e).unwrap(), c))
                .collect();
            all.sort_by(|a, b| match b.0.partial_cmp(&a.0).unwrap() {
                Ordering::Equal => a.1.id.cmp(&b.1.id),
                o => o,
            });
            let mut seen = HashSet::new();
            all.into_iter()
                .filter(|(_, c)| seen.insert(c.summary.clone()))
                .take(n)
                .map(|(_, c)| (c.summary.clone(), c.id.clone()))
                .collect()
        })
        .collect()
}

fn mining_oracle() -> Check {
    let start = Instant::now();
    let mut rng = SeededRng::new(2025);
    let mut compared = 0usize;
    for instance in 0..20u64 {
        let n_pairs = 2 + rng.index(511);
        let mut order: Vec<usize> = (0..n_pairs).collect();
        rng.shuffle(&mut order);
        let mut pairs: Vec<DocumentSummaryPair> = order
            .into_iter()
            .map(|id| {
                let (dl, sl) = (3 + rng.index(9), 1 + rng.index(4));
                let mut text = |len: usize| (0..len).map(|_| format!("t{}", rng.index(60))).collect::<Vec<_>>().join(" ");
                let document = text(dl);
                let summary = text(sl);
                DocumentSummaryPair {
                    id: format!("q{id:04}"),
                    document,
                    summary,
                }
            })
            .collect();
        for i in (1..n_pairs).step_by(5) {
            pairs[i].summary = pairs[i - 1].summary.clone();
        }
        let vocab = Vocabulary::build(&pairs, 1, 1000).map_err(|e| e.to_string())?;
        let params = init_params(vocab.len(), 8, instance, instance % 2 == 1).map_err(|e| e.to_string())?;
        for n in [1, 5, 20, n_pairs - 1] {
            let mined = mine_model_negatives(&params, &vocab, &pairs, &MiningConfig { top_n: n }, LengthLimits::default())
                .map_err(|e| e.to_string())?;
            for (p, want) in pairs.iter().zip(naive_top_n(&params, &vocab, &pairs, n)) {
                let got: Vec<(String, String)> = mined[&p.id]
                    .iter()
                    .map(|m| (m.text.clone(), m.source_id.clone().unwrap_or_default()))
                    .collect();
                ensure(got == want, || format!("instance {instance} n={n} pair {} differs", p.id))?;
                compared += 1;
            }
        }
    }
    within(start.elapsed(), 30.0, "mining oracle")?;
    Ok(format!("20 instances, {compared} rankings identical in {:.2?}", start.elapsed()))
}

fn brute_tau(x: &[f64], y: &[f64]) -> (f64, Option<f64>) {
    let n = x.len();
    let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let sx = x[i].partial_cmp(&x[j]).unwrap();
            let sy = y[i].partial_cmp(&y[j]).unwrap();
            match (sx, sy) {
                (Ordering::Equal, Ordering::Equal) => {}
                (Ordering::Equal, _) => tx += 1,
                (_, Ordering::Equal) => ty += 1,
                (a, b) if a == b => c += 1,
                _ => d += 1,
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let denom = ((c + d + tx) * (c + d + ty)) as f64;
    ((c - d) as f64 / total, (denom > 0.0).then(|| (c - d) as f64 / denom.sqrt()))
}

fn kendall_oracle() -> Check {
    let mut rng = SeededRng::new(31);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let n = 2 + rng.index(29);
        let levels = 1 + rng.index(n);
        let mut draw = || (0..n).map(|_| rng.index(levels) as f64).collect::<Vec<f64>>();
        let (x, y) = (draw(), draw());
        let (a, b) = brute_tau(&x, &y);
        let got_a = kendall_tau(&x, &y, TauVariant::TauA).map_err(|e| e.to_string())?;
        worst = worst.max((got_a - a).abs());
        match (kendall_tau(&x, &y, TauVariant::TauB), b) {
            (Ok(g), Some(w)) => worst = worst.max((g - w).abs()),
            (Err(_), None) => {}
            (g, w) => return Err(format!("case {case}: tau_b {g:?} vs oracle {w:?}")),
        }
        ensure(worst <= 1e-12, || format!("case {case}: deviation {worst:e}"))?;
    }
    let up: Vec<f64> = (0..12).map(f64::from).collect();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    for v in [TauVariant::TauA, TauVariant::TauB] {
        let hi = kendall_tau(&up, &up, v).map_err(|e| e.to_string())?;
        let lo = kendall_tau(&up, &down, v).map_err(|e| e.to_string())?;
        ensure(hi == 1.0 && lo == -1.0, || format!("{v} endpoints {hi}, {lo}"))?;
    }
    Ok(format!("1000 vectors, max deviation {worst:.1e}, endpoints +-1"))
}

fn training_efficacy() -> Check {
    let start = Instant::now();
    let pairs = load_pairs(fixture("separable_train.jsonl")).map_err(|e| e.to_string())?;
    let heldout = load_pairs(fixture("separable_heldout.jsonl")).map_err(|e| e.to_string())?;
    let vocab = Vocabulary::build(&pairs, 1, 100_000).map_err(|e| e.to_string())?;
    let data: Vec<TrainingExample> = pairs.into_iter().map(TrainingExample::without_negatives).collect();
    let mut notes = Vec::new();
    for seed in [1u64, 2, 3] {
        let cfg = TrainingConfig {
            batch_size: 8,
            temperature: 0.05,
            learning_rate: 0.5,
            epochs: 200,
            seed,
            ..TrainingConfig::default()
        };
        let init = init_params(vocab.len(), 32, seed, true).map_err(|e| e.to_string())?;
        let (params, _) = train(&init, &vocab, &data, &cfg).map_err(|e| e.to_string())?;
        let acc = in_batch_accuracy(&params, &vocab, &data, &cfg).map_err(|e| e.to_string())?;
        ensure(acc >= 0.9, || format!("seed {seed}: accuracy@1 {acc}"))?;
        let mut rng = SeededRng::new(100 + seed);
        let mut wins = 0;
        for p in &heldout {
            let mut toks = tokenize(&p.summary);
            rng.shuffle(&mut toks);
            let shuffled = detokenize(&toks);
            let lim = LengthLimits::default();
            let t = score_summary(&params, &vocab, &p.document, &p.summary, lim).map_err(|e| e.to_string())?;
            let s = score_summary(&params, &vocab, &p.document, &shuffled, lim).map_err(|e| e.to_string())?;
            wins += usize::from(t > s);
        }
        let rate = wins as f64 / heldout.len() as f64;
        ensure(rate >= 0.8, || format!("seed {seed}: true > shuffled in {rate}"))?;
        notes.push(format!("seed {seed}: acc {acc:.3}, shuffle {rate:.3}"));
    }
    within(start.elapsed(), 120.0, "training")?;
    Ok(format!("{} in {:.2?}", notes.join("; "), start.elapsed()))
}

fn augmentation_contracts() -> Check {
    let summary = (0..25).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
    let n = tokenize(&summary).len() as f64;
    let kept: f64 = (0..10_000u64)
        .map(|seed| tokenize(&drop_words(&summary, &mut SeededRng::new(seed), 0.2).text).len() as f64 / n)
        .sum::<f64>()
        / 10_000.0;
    ensure((kept - 0.8).abs() <= 0.04, || format!("DW kept fraction {kept}"))?;

    let detector = EntityDetector::default();
    let doc = "Arsenal hosted Chelsea. Everton, Fulham and Leeds watched from Wembley.";
    let sum = "Arsenal beat Chelsea at Wembley.";
    let mut swaps = [0usize; 3];
    let trials = 10_000u64;
    for seed in 0..trials {
        let toks = tokenize(&swap_entities(doc, sum, &detector, &mut SeededRng::new(seed), 0.5).text);
        for (k, (pos, name)) in [(0usize, "Arsenal"), (2, "Chelsea"), (4, "Wembley")].into_iter().enumerate() {
            swaps[k] += usize::from(toks[pos] != name);
        }
    }
    let freqs: Vec<f64> = swaps.iter().map(|s| *s as f64 / trials as f64).collect();
    ensure(freqs.iter().all(|f| (f - 0.5).abs() <= 0.03), || format!("SE frequencies {freqs:?}"))?;

    let lex = AntonymLexicon::bundled();
    let text = "Fleetwood won an easy early game and stayed strong in a good season.";
    let run = |seed: u64| {
        let mut rng = SeededRng::new(seed);
        (
            swap_entities(doc, sum, &detector, &mut rng, 0.5),
            shuffle_words(text, &mut rng),
            drop_words(text, &mut rng, 0.2),
            drop_chars(text, &mut rng, 0.2),
            swap_antonyms(text, lex, &mut rng, 0.5),
        )
    };
    for seed in 0..200 {
        ensure(run(seed) == run(seed), || format!("seed {seed} not reproducible"))?;
    }
    Ok(format!("DW kept {kept:.4}, SE swap rates {freqs:.3?}, 5 augmenters reproducible"))
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn pipeline_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    let mut times = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_risekit"))
            .args(["--threads", "1", "pipeline", "--seed", "1", "--pairs"])
            .arg(fixture("pairs_100.jsonl"))
            .arg("--eval")
            .arg(fixture("eval_pipeline.jsonl"))
            .arg("--out-dir")
            .arg(&out)
            .env("RUST_LOG", "off")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || format!("run {run} exited {:?}", status.status.code()))?;
        within(start.elapsed(), 60.0, "pipeline")?;
        times.push(start.elapsed());
        trees.push(tree(&out));
    }
    ensure(trees[0] == trees[1], || "output trees differ".into())?;
    ensure(trees[0].iter().any(|(n, _)| n == "report.txt"), || "no report".into())?;
    Ok(format!("{} files byte-identical, runs {:.2?} and {:.2?}", trees[0].len(), times[0], times[1]))
}

fn checkpoint_round_trip() -> Check {
    let pairs = load_pairs(fixture("separable_train.jsonl")).map_err(|e| e.to_string())?;
    let vocab = Vocabulary::build(&pairs, 1, 100_000).map_err(|e| e.to_string())?;
    let data: Vec<TrainingExample> = pairs.into_iter().take(16).map(TrainingExample::without_negatives).collect();
    let cfg = TrainingConfig {
        epochs: 2,
        learning_rate: 0.5,
        seed: 7,
        ..TrainingConfig::default()
    };
    let init = init_params(vocab.len(), 16, 7, false).map_err(|e| e.to_string())?;
    let (params, _) = train(&init, &vocab, &data, &cfg).map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = tmp.path().join("m.ckpt");
    save_checkpoint(&params, &vocab, serde_json::to_value(&cfg).unwrap(), &path).map_err(|e| e.to_string())?;
    let loaded = load_checkpoint(&path, &vocab).map_err(|e| e.to_string())?;
    let bits = |p: &EncoderParams| -> Vec<u32> {
        p.towers()
            .iter()
            .flat_map(|t| {
                t.embedding
                    .as_slice()
                    .iter()
                    .chain(t.projection.as_slice())
                    .chain(&t.position_logits)
                    .map(|v| v.to_bits())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    ensure(bits(&params) == bits(&loaded), || "reloaded parameters differ".into())?;
    let bytes = fs::read(&path).map_err(|e| e.to_string())?;
    let mut rejected = 0;
    let step = (bytes.len() / 500).max(1);
    for len in (0..bytes.len()).step_by(step) {
        ensure(decode_checkpoint(&bytes[..len]).is_err(), || format!("truncation to {len} accepted"))?;
        rejected += 1;
    }
    for pos in (0..bytes.len()).step_by(step) {
        let mut bad = bytes.clone();
        bad[pos] = bad[pos].wrapping_add(1);
        ensure(decode_checkpoint(&bad).is_err(), || format!("corruption at byte {pos} accepted"))?;
        rejected += 1;
    }
    Ok(format!("{} parameters bit-exact, {rejected} damaged files rejected", bits(&params).len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("gradient check", gradient_check),
        ("loss closed forms", closed_form_loss),
        ("mining oracle", mining_oracle),
        ("kendall tau oracle", kendall_oracle),
        ("training efficacy", training_efficacy),
        ("augmentation contracts", augmentation_contracts),
        ("pipeline determinism", pipeline_determinism),
        ("checkpoint round-trip", checkpoint_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {}. {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
