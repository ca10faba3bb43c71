use std::cmp::Ordering;
use std::time::Instant;

use risekit::corpus::{DocumentSummaryPair, Origin};
use risekit::encoder::{embed_str, init_params, similarity, Tower};
use risekit::negatives::{
    drop_words, generate_dataset, mine_model_negatives, swap_entities, AugmentRecipe, LexicalResources,
    MiningConfig,
};
use risekit::rng::SeededRng;
use risekit::textproc::{tokenize, EntityDetector, LengthLimits, Vocabulary};

fn random_text(rng: &mut SeededRng, words: usize, len: usize) -> String {
    (0..len).map(|_| format!("w{}", rng.index(words))).collect::<Vec<_>>().join(" ")
}

fn random_pairs(rng: &mut SeededRng, n: usize) -> Vec<DocumentSummaryPair> {
    let mut ids: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut ids);
    let mut pairs: Vec<DocumentSummaryPair> = ids
        .into_iter()
        .map(|id| {
            let (doc_len, sum_len) = (4 + rng.index(8), 1 + rng.index(3));
            DocumentSummaryPair {
                id: format!("p{id:04}"),
                document: random_text(rng, 40, doc_len),
                summary: random_text(rng, 40, sum_len),
            }
        })
        .collect();
    // Repeated summaries under different ids force exact similarity ties.
    for i in (1..n).step_by(7) {
        pairs[i].summary = pairs[i - 1].summary.clone();
        pairs[i].document = pairs[i].document.clone() + " extra";
    }
    pairs
}

/// Full scan: score every candidate, sort by (similarity desc, id asc).
fn naive_mine(
    params: &risekit::encoder::EncoderParams,
    vocab: &Vocabulary,
    pairs: &[DocumentSummaryPair],
    n: usize,
) -> Vec<Vec<(String, String)>> {
    let limits = LengthLimits::default();
    let sums: Vec<_> = pairs
        .iter()
        .map(|c| embed_str(params, vocab, &c.summary, Tower::Summary, limits.max_sum_len).unwrap())
        .collect();
    pairs
        .iter()
        .map(|p| {
            let doc = embed_str(params, vocab, &p.document, Tower::Document, limits.max_doc_len).unwrap();
            let mut cands: Vec<(f64, &DocumentSummaryPair)> = pairs
                .iter()
                .zip(&sums)
                .filter(|(c, _)| c.id != p.id && c.summary != p.summary)
                .map(|(c, s)| (similarity(&doc, s).unwrap(), c))
                .collect();
            cands.sort_by(|a, b| match b.0.partial_cmp(&a.0).unwrap() {
                Ordering::Equal => a.1.id.cmp(&b.1.id),
                o => o,
            });
            let mut seen = std::collections::HashSet::new();
            cands
                .into_iter()
                .filter(|(_, c)| seen.insert(c.summary.clone()))
                .take(n)
                .map(|(_, c)| (c.summary.clone(), c.id.clone()))
                .collect()
        })
        .collect()
}

#[test]
fn mining_matches_full_scan() {
    let start = Instant::now();
    let mut rng = SeededRng::new(77);
    for instance in 0..20u64 {
        let n_pairs = 2 + rng.index(511);
        let pairs = random_pairs(&mut rng, n_pairs);
        let vocab = Vocabulary::build(&pairs, 1, 1000).unwrap();
        let params = init_params(vocab.len(), 8, instance, instance % 2 == 0).unwrap();
        for top_n in [1, 5, 20, n_pairs - 1] {
            let mined = mine_model_negatives(
                &params,
                &vocab,
                &pairs,
                &MiningConfig { top_n },
                LengthLimits::default(),
            )
            .unwrap();
            let oracle = naive_mine(&params, &vocab, &pairs, top_n);
            for (p, want) in pairs.iter().zip(oracle) {
                let got: Vec<(String, String)> = mined[&p.id]
                    .iter()
                    .map(|neg| {
                        assert_eq!(neg.origin, Origin::Mined);
                        (neg.text.clone(), neg.source_id.clone().unwrap())
                    })
                    .collect();
                assert_eq!(got, want, "instance {instance}, n {top_n}, pair {}", p.id);
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "{:?}", start.elapsed());
}

#[test]
fn word_drop_keeps_eighty_percent_on_average() {
    let summary = (0..20).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ");
    let total = tokenize(&summary).len() as f64;
    let mean = (0..10_000u64)
        .map(|seed| tokenize(&drop_words(&summary, &mut SeededRng::new(seed), 0.2).text).len() as f64 / total)
        .sum::<f64>()
        / 10_000.0;
    assert!((mean - 0.8).abs() <= 0.04, "mean kept fraction {mean}");
}

#[test]
fn entity_swap_frequency_is_half() {
    let document = "Arsenal met Chelsea while Everton and Fulham watched from Leeds.";
    let summary = "Arsenal beat Chelsea in Leeds.";
    let detector = EntityDetector::default();
    let originals = ["Arsenal", "Chelsea", "Leeds"];
    let trials = 10_000;
    let mut swapped = [0usize; 3];
    for seed in 0..trials {
        let out = swap_entities(document, summary, &detector, &mut SeededRng::new(seed), 0.5);
        let toks = tokenize(&out.text);
        for (k, (pos, orig)) in [0usize, 2, 4].iter().zip(originals).enumerate() {
            swapped[k] += usize::from(toks[*pos] != orig);
        }
    }
    for (k, s) in swapped.iter().enumerate() {
        let freq = *s as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.03, "entity {k}: {freq}");
    }
}

#[test]
fn dataset_augmentation_is_bit_reproducible() {
    let pairs = risekit::corpus::load_pairs(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/pairs_100.jsonl")).unwrap();
    let recipe = AugmentRecipe::parse("SE:2,SW:2,DW:2,DC:2,SA:2", 0.5, 0.2).unwrap();
    let res = LexicalResources::default();
    let (a, wa) = generate_dataset(&pairs, &recipe, &res, 1);
    let (b, wb) = generate_dataset(&pairs, &recipe, &res, 1);
    assert_eq!(a, b);
    assert_eq!(wa, wb);
    let (c, _) = generate_dataset(&pairs, &recipe, &res, 2);
    assert_ne!(a, c);
    for ex in &a {
        ex.validate().unwrap();
    }
}
