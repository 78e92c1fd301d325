#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use neutralize::lexicon::GenderClass;
use neutralize::lm::NGramModel;
use neutralize::text::{tokenize, TokenizedSentence};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn lines(name: &str) -> Vec<String> {
    read(name).lines().map(str::to_string).collect()
}

/// Trigram model over the bundled standard-English sample.
pub fn sample_lm() -> NGramModel {
    NGramModel::train(read("lm_sample.txt").lines(), 3, 2).expect("sample trains")
}

pub struct GoldRow {
    pub source: String,
    pub reference: String,
    pub gender: GenderClass,
    pub domain: String,
}

pub fn gold() -> Vec<GoldRow> {
    read("gold_50.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            GoldRow { source: f[0].into(), reference: f[1].into(), gender: f[2].parse().unwrap(), domain: f[3].into() }
        })
        .collect()
}

pub struct AgreementCase {
    pub sentence: TokenizedSentence,
    /// Token indices of the marked subject pronouns.
    pub pronouns: Vec<usize>,
    /// Gold (pronoun token, verb token) links.
    pub links: BTreeSet<(usize, usize)>,
}

/// Parse one `{k:pronoun} [k:verb]` annotated line.
pub fn parse_agreement(line: &str) -> AgreementCase {
    let mut plain = String::new();
    let mut marks: Vec<(char, u32, usize)> = Vec::new();
    let mut rest = line;
    while let Some(pos) = rest.find(['{', '[']) {
        plain.push_str(&rest[..pos]);
        let open = rest.as_bytes()[pos] as char;
        let close = if open == '{' { '}' } else { ']' };
        let end = rest[pos..].find(close).expect("closed mark") + pos;
        let (id, word) = rest[pos + 1..end].split_once(':').expect("k:word");
        marks.push((open, id.parse().unwrap(), plain.len()));
        plain.push_str(word);
        rest = &rest[end + 1..];
    }
    plain.push_str(rest);

    let sentence = tokenize(&plain);
    let mut starts = Vec::new();
    let mut offset = sentence.leading_ws.len();
    for t in &sentence.tokens {
        starts.push(offset);
        offset += t.surface.len() + t.trailing_ws.len();
    }
    let token_at = |byte: usize| starts.iter().position(|&s| s == byte).expect("mark on token start");
    let mut pronouns = Vec::new();
    let mut by_id = std::collections::BTreeMap::new();
    for &(kind, id, at) in &marks {
        if kind == '{' {
            let t = token_at(at);
            pronouns.push(t);
            by_id.insert(id, t);
        }
    }
    let links = marks.iter().filter(|m| m.0 == '[').map(|&(_, id, at)| (by_id[&id], token_at(at))).collect();
    AgreementCase { sentence, pronouns, links }
}

pub fn agreement_cases() -> Vec<AgreementCase> {
    read("agreement_100.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(parse_agreement)
        .collect()
}

/// Log-probabilities from `scripts/kn_oracle.py` on the toy corpus.
pub const FROZEN_KN: [(usize, &str, f64); 10] = [
    (2, "The cat sat on the mat.", -8.914023893262318),
    (2, "The dog saw the cat.", -10.549756625958155),
    (2, "A dog sat on a log.", -15.682454414839805),
    (2, "the zebra sat.", -9.583536055304197),
    (2, "cat", -6.050395980016365),
    (3, "The cat sat on the mat.", -6.118195341872067),
    (3, "The dog saw the cat.", -11.159373715861733),
    (3, "A dog sat on a log.", -15.648400764222236),
    (3, "the zebra sat.", -9.793051065385209),
    (3, "cat", -6.338078052468145),
];

pub fn permutations(items: &[&'static str]) -> Vec<Vec<&'static str>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}
