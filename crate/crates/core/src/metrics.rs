//! Corpus BLEU, word error rate and mistake classification.
//!
//! All metrics work on the tokenizer's token surfaces, case-sensitively.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{GenderClass, Lexicon};
use crate::syntax::VerbLexicon;
use crate::text::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub source: String,
    pub reference: String,
    pub hypothesis: String,
    pub source_gender: GenderClass,
    pub domain: String,
}

impl EvalRecord {
    pub fn new(source: &str, reference: &str, hypothesis: &str, gender: GenderClass, domain: &str) -> Self {
        EvalRecord {
            source: source.to_string(),
            reference: reference.to_string(),
            hypothesis: hypothesis.to_string(),
            source_gender: gender,
            domain: domain.to_string(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no records to score")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuOptions {
    /// Add one to numerator and denominator of the 2..4-gram precisions.
    pub smoothing: bool,
}

const MAX_N: usize = 4;

fn surfaces(text: &str) -> Vec<String> {
    tokenize(text).tokens.into_iter().map(|t| t.surface).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_default() += 1;
        }
    }
    counts
}

/// Clipped n-gram matches and hypothesis n-gram totals, per order, plus
/// hypothesis and reference lengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; MAX_N],
    pub totals: [usize; MAX_N],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn of(reference: &str, hypothesis: &str) -> Self {
        let (r, h) = (surfaces(reference), surfaces(hypothesis));
        let mut s = BleuStats { hyp_len: h.len(), ref_len: r.len(), ..Default::default() };
        for n in 1..=MAX_N {
            let rc = ngram_counts(&r, n);
            for (g, c) in ngram_counts(&h, n) {
                s.matches[n - 1] += c.min(rc.get(g).copied().unwrap_or(0));
                s.totals[n - 1] += c;
            }
        }
        s
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_N {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU on a 0..100 scale. Orders with no hypothesis n-grams at all
    /// (every hypothesis shorter than n) are left out of the geometric mean.
    pub fn score(&self, opts: BleuOptions) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut orders = 0;
        for n in 0..MAX_N {
            let (mut m, mut t) = (self.matches[n] as f64, self.totals[n] as f64);
            if opts.smoothing && n > 0 {
                m += 1.0;
                t += 1.0;
            }
            if t == 0.0 {
                continue;
            }
            if m == 0.0 {
                return 0.0;
            }
            log_sum += (m / t).ln();
            orders += 1;
        }
        let bp =
            if self.hyp_len >= self.ref_len { 1.0 } else { (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp() };
        100.0 * bp * (log_sum / orders as f64).exp()
    }
}

pub fn corpus_bleu_with(records: &[EvalRecord], opts: BleuOptions) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut total = BleuStats::default();
    for r in records {
        total.add(&BleuStats::of(&r.reference, &r.hypothesis));
    }
    Ok(total.score(opts))
}

pub fn corpus_bleu(records: &[EvalRecord]) -> Result<f64, MetricsError> {
    corpus_bleu_with(records, BleuOptions::default())
}

/// Token-level Levenshtein distance.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Word-level edits and reference length for one record.
pub fn wer_counts(reference: &str, hypothesis: &str) -> (usize, usize) {
    let (r, h) = (surfaces(reference), surfaces(hypothesis));
    (edit_distance(&r, &h), r.len())
}

/// Micro-averaged WER in percent.
pub fn corpus_wer(records: &[EvalRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let (edits, len) = records
        .iter()
        .map(|r| wer_counts(&r.reference, &r.hypothesis))
        .fold((0, 0), |(e, l), (de, dl)| (e + de, l + dl));
    Ok(if len == 0 { 0.0 } else { 100.0 * edits as f64 / len as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Match(usize, usize),
    Sub(usize, usize),
    Ins(usize),
    Del(usize),
}

/// One canonical minimal edit script. The backtrace prefers match, then
/// substitution, then insertion, then deletion, so among equal-cost scripts
/// deletions come before insertions in forward order.
pub fn align<T: PartialEq>(r: &[T], h: &[T]) -> Vec<Op> {
    let (n, m) = (r.len(), h.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[i - 1][j - 1] + usize::from(r[i - 1] != h[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    let mut ops = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && r[i - 1] == h[j - 1] && d[i][j] == d[i - 1][j - 1] {
            ops.push(Op::Match(i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1 {
            ops.push(Op::Sub(i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if j > 0 && d[i][j] == d[i][j - 1] + 1 {
            ops.push(Op::Ins(j - 1));
            j -= 1;
        } else {
            ops.push(Op::Del(i - 1));
            i -= 1;
        }
    }
    ops.reverse();
    ops
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MistakeKind {
    Pronoun,
    Verb,
    WhitespaceSymbol,
    Other,
}

impl MistakeKind {
    pub const ALL: [MistakeKind; 4] =
        [MistakeKind::Pronoun, MistakeKind::Verb, MistakeKind::WhitespaceSymbol, MistakeKind::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            MistakeKind::Pronoun => "pronoun",
            MistakeKind::Verb => "verb",
            MistakeKind::WhitespaceSymbol => "whitespace_symbol",
            MistakeKind::Other => "other",
        }
    }
}

fn is_spacing_kind(t: &Token) -> bool {
    matches!(t.kind, TokenKind::Symbol | TokenKind::Emoji)
}

/// Classify the token-level mistakes between one reference and hypothesis.
pub fn record_mistakes(reference: &str, hypothesis: &str, lex: &Lexicon, vlex: &VerbLexicon) -> Vec<MistakeKind> {
    let (r, h) = (tokenize(reference).tokens, tokenize(hypothesis).tokens);
    let rs: Vec<&str> = r.iter().map(|t| t.surface.as_str()).collect();
    let hs: Vec<&str> = h.iter().map(|t| t.surface.as_str()).collect();
    let ops = align(&rs, &hs);
    let sets = lex.pronoun_sets();
    let classify = |op: Op| -> MistakeKind {
        let (main, other) = match op {
            Op::Sub(i, j) => (&r[i], Some(&h[j])),
            Op::Del(i) => (&r[i], None),
            Op::Ins(j) => (&h[j], None),
            Op::Match(..) => unreachable!(),
        };
        if sets.is_pronoun(&main.lower) {
            MistakeKind::Pronoun
        } else if main.kind.is_lexical() && vlex.is_verb_form(&main.lower) {
            MistakeKind::Verb
        } else if is_spacing_kind(main) || other.is_some_and(is_spacing_kind) {
            MistakeKind::WhitespaceSymbol
        } else {
            MistakeKind::Other
        }
    };

    let mut out = Vec::new();
    let mut k = 0;
    while k < ops.len() {
        if let Op::Match(i, j) = ops[k] {
            if r[i].trailing_ws != h[j].trailing_ws && i + 1 < r.len() && j + 1 < h.len() {
                out.push(MistakeKind::WhitespaceSymbol);
            }
            k += 1;
            continue;
        }
        let end = (k..ops.len()).find(|&e| matches!(ops[e], Op::Match(..))).unwrap_or(ops.len());
        let region = &ops[k..end];
        let (mut rj, mut hj) = (String::new(), String::new());
        for op in region {
            match *op {
                Op::Sub(i, j) => {
                    rj.push_str(rs[i]);
                    hj.push_str(hs[j]);
                }
                Op::Del(i) => rj.push_str(rs[i]),
                Op::Ins(j) => hj.push_str(hs[j]),
                Op::Match(..) => {}
            }
        }
        let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        if strip(&rj) == strip(&hj) {
            out.extend(region.iter().map(|_| MistakeKind::WhitespaceSymbol));
        } else {
            out.extend(region.iter().map(|&op| classify(op)));
        }
        k = end;
    }
    out
}

/// Mistake counts over all records, with every kind present.
pub fn classify_mistakes(records: &[EvalRecord], lex: &Lexicon, vlex: &VerbLexicon) -> BTreeMap<MistakeKind, usize> {
    let mut counts: BTreeMap<MistakeKind, usize> = MistakeKind::ALL.iter().map(|&k| (k, 0)).collect();
    for r in records {
        for m in record_mistakes(&r.reference, &r.hypothesis, lex, vlex) {
            *counts.get_mut(&m).unwrap() += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketScore {
    pub records: usize,
    pub bleu: f64,
    pub wer: f64,
    pub word_edits: usize,
    pub reference_words: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub records: usize,
    pub bleu: f64,
    pub wer: f64,
    pub per_gender: BTreeMap<String, BucketScore>,
    pub per_domain: BTreeMap<String, BucketScore>,
    /// Fraction of mistakes per kind; all zero when there are none.
    pub mistake_distribution: BTreeMap<String, f64>,
    pub mistake_counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

fn bucket(records: &[&EvalRecord], opts: BleuOptions) -> BucketScore {
    let mut stats = BleuStats::default();
    let (mut edits, mut len) = (0, 0);
    for r in records {
        stats.add(&BleuStats::of(&r.reference, &r.hypothesis));
        let (e, l) = wer_counts(&r.reference, &r.hypothesis);
        edits += e;
        len += l;
    }
    BucketScore {
        records: records.len(),
        bleu: stats.score(opts),
        wer: if len == 0 { 0.0 } else { 100.0 * edits as f64 / len as f64 },
        word_edits: edits,
        reference_words: len,
    }
}

fn group<'r, F: Fn(&EvalRecord) -> String>(
    records: &'r [EvalRecord],
    key: F,
    opts: BleuOptions,
) -> BTreeMap<String, BucketScore> {
    let mut groups: BTreeMap<String, Vec<&'r EvalRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    groups.into_iter().map(|(k, v)| (k, bucket(&v, opts))).collect()
}

/// Share above which masculine/feminine counts are reported as unbalanced.
pub const BALANCE_TOLERANCE: f64 = 0.10;

pub fn evaluate(records: &[EvalRecord], lex: &Lexicon, vlex: &VerbLexicon) -> EvalReport {
    evaluate_with(records, lex, vlex, BleuOptions::default())
}

pub fn evaluate_with(records: &[EvalRecord], lex: &Lexicon, vlex: &VerbLexicon, opts: BleuOptions) -> EvalReport {
    let all: Vec<&EvalRecord> = records.iter().collect();
    let overall = bucket(&all, opts);
    let per_gender = group(records, |r| r.source_gender.as_str().to_string(), opts);
    let per_domain = group(records, |r| r.domain.clone(), opts);
    let counts = classify_mistakes(records, lex, vlex);
    let total: usize = counts.values().sum();
    let mistake_distribution = counts
        .iter()
        .map(|(k, &c)| (k.as_str().to_string(), if total == 0 { 0.0 } else { c as f64 / total as f64 }))
        .collect();
    let mistake_counts = counts.iter().map(|(k, &c)| (k.as_str().to_string(), c)).collect();

    let mut warnings = Vec::new();
    let count = |g: GenderClass| per_gender.get(g.as_str()).map_or(0, |b| b.records);
    let (m, f) = (count(GenderClass::Masculine), count(GenderClass::Feminine));
    if m.abs_diff(f) as f64 > BALANCE_TOLERANCE * m.max(f) as f64 {
        warnings.push(format!("unbalanced test set: {m} masculine vs {f} feminine records"));
    }
    EvalReport {
        records: records.len(),
        bleu: if records.is_empty() { 0.0 } else { overall.bleu },
        wer: overall.wer,
        per_gender,
        per_domain,
        mistake_distribution,
        mistake_counts,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(r: &str, h: &str) -> EvalRecord {
        EvalRecord::new(r, r, h, GenderClass::Masculine, "news")
    }

    #[test]
    fn bleu_hand_example() {
        let s = BleuStats::of("they walk their dog", "they walk his dog");
        assert_eq!(s.matches, [3, 1, 0, 0]);
        assert_eq!(s.totals, [4, 3, 2, 1]);
        assert_eq!(corpus_bleu(&[rec("they walk their dog", "they walk his dog")]).unwrap(), 0.0);
        assert_eq!(corpus_bleu(&[rec("they walk their dog", "they walk their dog")]).unwrap(), 100.0);
    }

    #[test]
    fn short_sentences_can_be_perfect() {
        assert_eq!(corpus_bleu(&[rec("They ran.", "They ran.")]).unwrap(), 100.0);
    }

    #[test]
    fn smoothing_lifts_zero_scores() {
        let recs = [rec("they walk their dog", "they walk his dog")];
        let smoothed = corpus_bleu_with(&recs, BleuOptions { smoothing: true }).unwrap();
        // (3/4 * 2/4 * 1/3 * 1/2) ^ (1/4)
        let expected = 100.0 * (0.75f64 * 0.5 * (1.0 / 3.0) * 0.5).powf(0.25);
        assert!((smoothed - expected).abs() < 1e-9);
    }

    #[test]
    fn wer_examples() {
        let r = "a b c d e f g h i j";
        assert_eq!(corpus_wer(&[rec(r, r)]).unwrap(), 0.0);
        assert_eq!(corpus_wer(&[rec(r, "a b c d e f g h i x")]).unwrap(), 10.0);
        assert_eq!(corpus_wer(&[rec(r, "a b c d e f g h i x"), rec(r, r)]).unwrap(), 5.0);
        assert_eq!(corpus_wer(&[]), Err(MetricsError::Empty));
    }

    #[test]
    fn alignment_puts_deletions_first() {
        let ops = align(&["a", "b"], &["c"]);
        assert_eq!(ops, [Op::Del(0), Op::Sub(1, 0)]);
        let ops = align(&["x"], &["y", "z"]);
        assert_eq!(ops, [Op::Ins(0), Op::Sub(0, 1)]);
    }

    #[test]
    fn mistake_examples() {
        let (lex, vlex) = (Lexicon::default(), VerbLexicon::builtin());
        let m = |r, h| record_mistakes(r, h, &lex, &vlex);
        assert_eq!(m("it cost them their job", "it cost them theirjob"), [MistakeKind::WhitespaceSymbol; 2]);
        assert_eq!(m("They dance.", "They dances."), [MistakeKind::Verb]);
        assert_eq!(m("Give it to them.", "Give it to their."), [MistakeKind::Pronoun]);
        assert_eq!(m("Nice day 😂", "Nice day"), [MistakeKind::WhitespaceSymbol]);
        assert_eq!(m("a red car", "a blue car"), [MistakeKind::Other]);
        assert_eq!(m("a  car", "a car"), [MistakeKind::WhitespaceSymbol]);
        assert!(m("same", "same").is_empty());
    }

    #[test]
    fn report_buckets() {
        let (lex, vlex) = (Lexicon::default(), VerbLexicon::builtin());
        let recs = vec![rec("They run.", "They run."), rec("Their dog.", "Their dog.")];
        let rep = evaluate(&recs, &lex, &vlex);
        assert_eq!(rep.bleu, 100.0);
        assert_eq!(rep.per_domain.len(), 1);
        assert_eq!(rep.per_domain["news"].wer, rep.wer);
        assert_eq!(rep.mistake_distribution.len(), 4);
        assert!(rep.mistake_distribution.values().all(|&v| v == 0.0));
        assert_eq!(rep.warnings.len(), 1);
    }
}
