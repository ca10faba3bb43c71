use std::collections::HashMap;

use regex::Regex;
use risekit::corpus::load_pairs;
use risekit::textproc::{detect_entities, detokenize, tokenize, Vocabulary, PAD_TOKEN, UNK_TOKEN};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

/// Regex restatement of the tokenizer: whitespace split, then edge
/// punctuation peeled into single characters.
fn regex_tokenize(text: &str) -> Vec<String> {
    let punct = r"[!-/:-@\[-`{-~‘’“”–—…«»¿¡]";
    let chunk = Regex::new(&format!(r"^({punct}*)(.*?)({punct}*)$")).unwrap();
    let mut out = Vec::new();
    for piece in Regex::new(r"\s+").unwrap().split(text).filter(|p| !p.is_empty()) {
        let caps = chunk.captures(piece).unwrap();
        let core = &caps[2];
        if core.is_empty() {
            out.extend(piece.chars().map(String::from));
            continue;
        }
        out.extend(caps[1].chars().map(String::from));
        out.push(core.to_string());
        out.extend(caps[3].chars().map(String::from));
    }
    out
}

#[test]
fn tokenizer_matches_regex_oracle() {
    let text = std::fs::read_to_string(format!("{FIXTURES}/tokenizer_1000.txt")).unwrap();
    assert_eq!(text.split_whitespace().count(), 1000);
    let tokens = tokenize(&text);
    assert_eq!(tokens, regex_tokenize(&text));
    assert_eq!(tokenize(&detokenize(&tokens)), tokens);
}

#[test]
fn vocabulary_matches_brute_force_count() {
    let pairs = load_pairs(format!("{FIXTURES}/pairs_100.jsonl")).unwrap();
    let all: Vec<String> = pairs
        .iter()
        .flat_map(|p| tokenize(&p.document).into_iter().chain(tokenize(&p.summary)))
        .map(|t| t.to_lowercase())
        .collect();
    let mut distinct: Vec<&String> = all.iter().collect();
    distinct.sort();
    distinct.dedup();
    let mut counted: Vec<(usize, &String)> = distinct
        .into_iter()
        .map(|t| (all.iter().filter(|u| *u == t).count(), t))
        .filter(|(c, _)| *c >= 2)
        .collect();
    counted.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));

    for max_size in [50, 100_000] {
        let vocab = Vocabulary::build(&pairs, 2, max_size).unwrap();
        let mut expected = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
        expected.extend(counted.iter().take(max_size - 2).map(|(_, t)| t.to_string()));
        assert_eq!(vocab.tokens(), expected.as_slice());
    }

    let counts: HashMap<&str, usize> = counted.iter().map(|(c, t)| (t.as_str(), *c)).collect();
    let vocab = Vocabulary::build(&pairs, 1, 100_000).unwrap();
    for w in vocab.tokens()[2..].windows(2) {
        let (a, b) = (counts.get(w[0].as_str()).unwrap_or(&1), counts.get(w[1].as_str()).unwrap_or(&1));
        assert!(a > b || (a == b && w[0] < w[1]));
    }
}

#[test]
fn entity_spans_on_hand_labelled_sentences() {
    let cases: [(&str, &[&str]); 20] = [
        ("Fleetwood beat Scunthorpe at Highbury.", &["Fleetwood", "Scunthorpe", "Highbury"]),
        ("The Cod Army stay top of League One.", &["Cod Army", "League One"]),
        ("Graham Alexander praised his side.", &["Graham Alexander"]),
        ("However, Bradford lost.", &["Bradford"]),
        ("I think Manchester United will win.", &["Manchester United"]),
        ("after the match, Rochdale fans left.", &["Rochdale"]),
        ("It rained. Then Leeds scored.", &["Leeds"]),
        ("Samuel Reid, the Wigan manager, was happy.", &["Samuel Reid", "Wigan"]),
        ("no entities here at all.", &[]),
        ("Despite the rain, New York Times reporters stayed.", &["New York Times"]),
        ("The Times reported that The Guardian agreed.", &["Times", "The Guardian"]),
        ("Arsenal! Chelsea? Everton.", &["Arsenal", "Chelsea", "Everton"]),
        ("Before kickoff, Paris Saint-Germain arrived.", &["Paris Saint-Germain"]),
        ("Mr Smith met Dr Jones in London on Monday.", &["Mr Smith", "Dr Jones", "London", "Monday"]),
        ("Yesterday BBC Sport confirmed it.", &["BBC Sport"]),
        ("(Liverpool) won 2-0.", &["Liverpool"]),
        ("“Brilliant,” said Klopp.", &["Brilliant", "Klopp"]),
        ("Who scored? Nobody knows.", &["Nobody"]),
        ("Many fans of Real Madrid travelled to Lisbon.", &["Real Madrid", "Lisbon"]),
        ("The end.", &[]),
    ];
    for (sentence, expected) in cases {
        let tokens = tokenize(sentence);
        let spans = detect_entities(&tokens);
        let surfaces: Vec<&str> = spans.iter().map(|s| s.surface.as_str()).collect();
        assert_eq!(surfaces, expected, "{sentence}");
        for s in &spans {
            assert_eq!(tokens[s.start_token..s.end_token].join(" "), s.surface);
        }
    }
}
