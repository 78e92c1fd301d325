//! Interpolated Kneser-Ney n-gram language model.
//!
//! Training computes the interpolated estimate directly and then stores it
//! in backoff form: every observed n-gram keeps its full interpolated
//! probability, every observed history keeps the weight `D * N1+(h .) / c(h)`
//! given to the lower order. Scoring reads only these tables, so a model
//! loaded from disk scores exactly like the one that was saved.
//!
//! The highest order uses raw counts. Lower orders use continuation counts:
//! the number of distinct words seen to the left of the n-gram. The unigram
//! level is interpolated with a uniform distribution over the vocabulary
//! (minus `<s>`), which keeps every in-vocabulary probability positive.
//!
//! # File format
//!
//! ```text
//! NNLM v1 order=3 vocab=1234
//! \1-grams:<TAB>1234
//! -2.5<TAB>cat<TAB>-0.3
//! ...
//! \2-grams:<TAB>5678
//! -0.7<TAB>the cat<TAB>-0.2
//! ...
//! \end\
//! ```
//!
//! Each entry is `log10 prob<TAB>w1 ... wk<TAB>log10 backoff`. Histories that
//! never occur as n-grams in their own right (`<s> <s>`) have prob `-inf`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::text::{tokenize, TokenizedSentence};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const DISCOUNT: f64 = 0.75;

const HEADER: &str = "NNLM v1";
const LN_10: f64 = std::f64::consts::LN_10;

#[derive(Debug, Error)]
pub enum LmError {
    #[error("training corpus has no non-empty lines")]
    EmptyCorpus,
    #[error("n-gram order must be at least 2, got {0}")]
    BadOrder(usize),
    #[error("cannot score an empty sentence")]
    EmptySentence,
    #[error("bad model header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("malformed model file at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("model file i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    log10_prob: f64,
    log10_backoff: f64,
}

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    unk_threshold: usize,
    words: Vec<String>,
    ids: HashMap<String, u32>,
    /// `tables[k - 1]` holds the k-grams.
    tables: Vec<HashMap<Vec<u32>, Entry>>,
    /// Raw n-gram frequencies from training, per order. Not persisted.
    raw_counts: Vec<HashMap<Vec<u32>, u64>>,
}

/// Models are equal when they hold the same entries, whatever their word ids.
impl PartialEq for NGramModel {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.words.len() == other.words.len() && self.canonical() == other.canonical()
    }
}

fn lm_words(s: &TokenizedSentence) -> Vec<String> {
    s.lm_words().into_iter().map(str::to_string).collect()
}

impl NGramModel {
    /// Train on raw text lines. Blank lines are skipped.
    pub fn train<I, S>(corpus: I, order: usize, unk_threshold: usize) -> Result<Self, LmError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sentences: Vec<Vec<String>> =
            corpus.into_iter().map(|l| lm_words(&tokenize(l.as_ref()))).filter(|w| !w.is_empty()).collect();
        Self::train_words(&sentences, order, unk_threshold)
    }

    /// Train on pre-split, case-folded sentences.
    pub fn train_words<S: AsRef<str>>(
        sentences: &[Vec<S>],
        order: usize,
        unk_threshold: usize,
    ) -> Result<Self, LmError> {
        if order < 2 {
            return Err(LmError::BadOrder(order));
        }
        if sentences.iter().all(|s| s.is_empty()) {
            return Err(LmError::EmptyCorpus);
        }
        let mut freq: HashMap<&str, usize> = HashMap::new();
        for w in sentences.iter().flatten() {
            *freq.entry(w.as_ref()).or_default() += 1;
        }
        let kept: BTreeSet<&str> = freq
            .iter()
            .filter(|(w, &c)| c >= unk_threshold && !matches!(**w, BOS | EOS | UNK))
            .map(|(w, _)| *w)
            .collect();
        let mut words = vec![BOS.to_string(), EOS.to_string(), UNK.to_string()];
        words.extend(kept.into_iter().map(str::to_string));
        let ids: HashMap<String, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let (bos, eos, unk) = (0u32, 1u32, 2u32);

        // raw counts of every order, over predicted positions only
        let mut raw_counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            let mut seq = vec![bos; order - 1];
            seq.extend(s.iter().map(|w| *ids.get(w.as_ref()).unwrap_or(&unk)));
            seq.push(eos);
            for i in order - 1..seq.len() {
                for k in 1..=order {
                    *raw_counts[k - 1].entry(seq[i + 1 - k..=i].to_vec()).or_default() += 1;
                }
            }
        }

        // modified counts: raw at the top order, continuation counts below
        let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        counts[order - 1] = raw_counts[order - 1].clone();
        for k in (1..order).rev() {
            let mut cc: HashMap<Vec<u32>, u64> = HashMap::new();
            for gram in counts[k].keys() {
                *cc.entry(gram[1..].to_vec()).or_default() += 1;
            }
            counts[k - 1] = cc;
        }

        let mut model =
            NGramModel { order, unk_threshold, words, ids, tables: vec![HashMap::new(); order], raw_counts };

        // unigrams
        let total: u64 = counts[0].values().sum();
        let types = counts[0].len() as f64;
        let predictable = (model.words.len() - 1) as f64;
        let uniform = DISCOUNT * types / total as f64 / predictable;
        for id in 1..model.words.len() as u32 {
            let c = counts[0].get(&vec![id]).copied().unwrap_or(0) as f64;
            let p = (c - DISCOUNT).max(0.0) / total as f64 + uniform;
            model.tables[0].insert(vec![id], Entry { log10_prob: p.log10(), log10_backoff: 0.0 });
        }
        model.tables[0].insert(vec![bos], Entry { log10_prob: f64::NEG_INFINITY, log10_backoff: 0.0 });

        for k in 2..=order {
            let mut denom: HashMap<&[u32], (u64, u64)> = HashMap::new();
            for (gram, &c) in &counts[k - 1] {
                let e = denom.entry(&gram[..k - 1]).or_default();
                e.0 += c;
                e.1 += 1;
            }
            let mut level = HashMap::with_capacity(counts[k - 1].len());
            for (gram, &c) in &counts[k - 1] {
                let (d, n1) = denom[&gram[..k - 1]];
                let lower = model.score_ids(&gram[1..k - 1], gram[k - 1]);
                let p = (c as f64 - DISCOUNT).max(0.0) / d as f64 + DISCOUNT * n1 as f64 / d as f64 * 10f64.powf(lower);
                level.insert(gram.clone(), Entry { log10_prob: p.log10(), log10_backoff: 0.0 });
            }
            model.tables[k - 1] = level;
            for (hist, (d, n1)) in denom {
                let gamma = (DISCOUNT * n1 as f64 / d as f64).log10();
                model.tables[k - 2]
                    .entry(hist.to_vec())
                    .or_insert(Entry { log10_prob: f64::NEG_INFINITY, log10_backoff: 0.0 })
                    .log10_backoff = gamma;
            }
        }
        Ok(model)
    }

    fn canonical(&self) -> Vec<BTreeMap<Vec<&str>, (u64, u64)>> {
        self.tables
            .iter()
            .map(|t| {
                t.iter()
                    .map(|(g, e)| {
                        let words = g.iter().map(|&i| self.words[i as usize].as_str()).collect();
                        (words, (e.log10_prob.to_bits(), e.log10_backoff.to_bits()))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Training threshold; 0 for models loaded from disk.
    pub fn unk_threshold(&self) -> usize {
        self.unk_threshold
    }

    /// Vocabulary size including `<s>`, `</s>` and `<unk>`.
    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn vocab(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ids.contains_key(word)
    }

    fn id(&self, word: &str) -> u32 {
        self.ids.get(word).copied().unwrap_or_else(|| self.ids[UNK])
    }

    /// Raw training frequency of an n-gram (words already case-folded,
    /// OOV mapped to `<unk>`). `None` for models loaded from disk.
    pub fn count(&self, ngram: &[&str]) -> Option<u64> {
        if self.raw_counts.is_empty() || ngram.is_empty() || ngram.len() > self.order {
            return None;
        }
        let key: Vec<u32> = ngram.iter().map(|w| self.id(w)).collect();
        Some(self.raw_counts[key.len() - 1].get(&key).copied().unwrap_or(0))
    }

    /// log10 p(w | history), backing off through stored weights.
    fn score_ids(&self, history: &[u32], w: u32) -> f64 {
        let history = &history[history.len().saturating_sub(self.order - 1)..];
        let mut backoff = 0.0;
        for start in 0..=history.len() {
            let h = &history[start..];
            let mut key = h.to_vec();
            key.push(w);
            if let Some(e) = self.tables[key.len() - 1].get(&key) {
                if e.log10_prob.is_finite() {
                    return backoff + e.log10_prob;
                }
            }
            if !h.is_empty() {
                if let Some(e) = self.tables[h.len() - 1].get(h) {
                    backoff += e.log10_backoff;
                }
            }
        }
        f64::NEG_INFINITY
    }

    /// Conditional probability p(word | history) for case-folded words.
    pub fn prob(&self, history: &[&str], word: &str) -> f64 {
        let h: Vec<u32> = history.iter().map(|w| self.id(w)).collect();
        10f64.powf(self.score_ids(&h, self.id(word)))
    }

    /// Natural-log probability of a case-folded word sequence, padded with
    /// `<s>` and `</s>`.
    pub fn log_prob_words<S: AsRef<str>>(&self, words: &[S]) -> f64 {
        let mut seq = vec![self.ids[BOS]; self.order - 1];
        seq.extend(words.iter().map(|w| self.id(w.as_ref())));
        seq.push(self.ids[EOS]);
        (self.order - 1..seq.len()).map(|i| self.score_ids(&seq[i + 1 - self.order..i], seq[i])).sum::<f64>() * LN_10
    }

    pub fn log_prob(&self, s: &TokenizedSentence) -> f64 {
        self.log_prob_words(&s.lm_words())
    }

    pub fn perplexity_words<S: AsRef<str>>(&self, words: &[S]) -> Result<f64, LmError> {
        if words.is_empty() {
            return Err(LmError::EmptySentence);
        }
        Ok((-self.log_prob_words(words) / (words.len() + 1) as f64).exp())
    }

    pub fn perplexity(&self, s: &TokenizedSentence) -> Result<f64, LmError> {
        self.perplexity_words(&s.lm_words())
    }

    /// Every history with at least one stored continuation, as words.
    pub fn histories(&self) -> Vec<Vec<&str>> {
        let mut set: BTreeSet<Vec<&str>> = BTreeSet::new();
        for table in &self.tables {
            for gram in table.keys() {
                set.insert(gram[..gram.len() - 1].iter().map(|&i| self.words[i as usize].as_str()).collect());
            }
        }
        set.into_iter().collect()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut buf = String::new();
        writeln!(buf, "{HEADER} order={} vocab={}", self.order, self.words.len()).unwrap();
        for (k, table) in self.tables.iter().enumerate() {
            let mut rows: Vec<(String, &Entry)> = table
                .iter()
                .map(|(g, e)| {
                    let words: Vec<&str> = g.iter().map(|&i| self.words[i as usize].as_str()).collect();
                    (words.join(" "), e)
                })
                .collect();
            rows.sort_by(|a, b| a.0.cmp(&b.0));
            writeln!(buf, "\\{}-grams:\t{}", k + 1, rows.len()).unwrap();
            for (g, e) in rows {
                writeln!(buf, "{}\t{}\t{}", e.log10_prob, g, e.log10_backoff).unwrap();
            }
        }
        buf.push_str("\\end\\\n");
        out.write_all(buf.as_bytes())?;
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LmError> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LmError> {
        Self::read_from(BufReader::new(std::fs::File::open(path)?))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, LmError> {
        let mut lines = input.lines().enumerate().map(|(i, l)| l.map(|l| (i + 1, l)));
        let fmt = |line: usize, message: &str| LmError::Format { line, message: message.to_string() };

        let (_, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| LmError::Header { expected: format!("{HEADER} order=K vocab=V"), found: String::new() })?;
        let (order, vocab) = parse_header(&header)
            .ok_or_else(|| LmError::Header { expected: format!("{HEADER} order=K vocab=V"), found: header.clone() })?;
        if order < 2 {
            return Err(LmError::BadOrder(order));
        }

        let mut words: Vec<String> = Vec::new();
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut tables: Vec<HashMap<Vec<u32>, Entry>> = Vec::with_capacity(order);
        let mut last = 1;
        for k in 1..=order {
            let (n, marker) = lines.next().transpose()?.ok_or_else(|| fmt(last + 1, "file truncated"))?;
            last = n;
            let count: usize = marker
                .strip_prefix(&format!("\\{k}-grams:\t"))
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| fmt(n, &format!("expected `\\{k}-grams:<TAB>count`")))?;
            let mut table = HashMap::with_capacity(count);
            for _ in 0..count {
                let (n, line) = lines.next().transpose()?.ok_or_else(|| fmt(last + 1, "file truncated"))?;
                last = n;
                let mut fields = line.split('\t');
                let (Some(p), Some(g), Some(b), None) = (fields.next(), fields.next(), fields.next(), fields.next())
                else {
                    return Err(fmt(n, "expected three tab-separated fields"));
                };
                let log10_prob: f64 = p.parse().map_err(|_| fmt(n, "bad probability"))?;
                let log10_backoff: f64 = b.parse().map_err(|_| fmt(n, "bad backoff"))?;
                let gram: Vec<&str> = g.split(' ').collect();
                if gram.len() != k {
                    return Err(fmt(n, &format!("expected {k} words")));
                }
                let key = if k == 1 {
                    let id = words.len() as u32;
                    if ids.insert(gram[0].to_string(), id).is_some() {
                        return Err(fmt(n, "duplicate unigram"));
                    }
                    words.push(gram[0].to_string());
                    vec![id]
                } else {
                    gram.iter()
                        .map(|w| ids.get(*w).copied().ok_or_else(|| fmt(n, &format!("unknown word `{w}`"))))
                        .collect::<Result<Vec<u32>, _>>()?
                };
                table.insert(key, Entry { log10_prob, log10_backoff });
            }
            tables.push(table);
        }
        match lines.next().transpose()? {
            Some((_, l)) if l == "\\end\\" => {}
            _ => return Err(fmt(last + 1, "missing `\\end\\` marker; file truncated")),
        }
        if words.len() != vocab {
            return Err(fmt(1, &format!("header declares vocab={vocab}, found {} unigrams", words.len())));
        }
        for reserved in [BOS, EOS, UNK] {
            if !ids.contains_key(reserved) {
                return Err(fmt(1, &format!("reserved token {reserved} missing")));
            }
        }
        Ok(NGramModel { order, unk_threshold: 0, words, ids, tables, raw_counts: Vec::new() })
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix(HEADER)?.strip_prefix(' ')?;
    let (o, v) = rest.split_once(' ')?;
    Some((o.strip_prefix("order=")?.parse().ok()?, v.strip_prefix("vocab=")?.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = include_str!("../data/toy_corpus.txt");

    fn toy(order: usize, threshold: usize) -> NGramModel {
        NGramModel::train(TOY.lines(), order, threshold).unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NGramModel::train(["a b"], 1, 1), Err(LmError::BadOrder(1))));
        assert!(matches!(NGramModel::train(["", "  "], 3, 1), Err(LmError::EmptyCorpus)));
        let m = toy(3, 1);
        assert!(matches!(m.perplexity_words::<&str>(&[]), Err(LmError::EmptySentence)));
    }

    #[test]
    fn high_threshold_maps_everything_to_unk() {
        let m = toy(2, 1000);
        assert_eq!(m.vocab_size(), 3);
        assert_eq!(m.count(&["<s>", "<unk>"]), Some(3));
    }

    #[test]
    fn one_word_sentence_unrolls() {
        let m = toy(3, 1);
        let lp = m.log_prob_words(&["cat"]);
        let expect = m.prob(&["<s>", "<s>"], "cat").ln() + m.prob(&["<s>", "cat"], "</s>").ln();
        assert!((lp - expect).abs() < 1e-12);
    }

    #[test]
    fn additive_over_tokens() {
        let m = toy(3, 1);
        let words = ["the", "cat", "sat", "on", "the", "log", "."];
        let mut seq = vec!["<s>", "<s>"];
        seq.extend(words);
        seq.push("</s>");
        let sum: f64 = (2..seq.len()).map(|i| m.prob(&seq[i - 2..i], seq[i]).ln()).sum();
        assert!((m.log_prob_words(&words) - sum).abs() < 1e-9);
    }

    #[test]
    fn scoring_is_case_folded() {
        let m = toy(3, 1);
        assert_eq!(m.log_prob(&tokenize("The CAT sat.")), m.log_prob(&tokenize("the cat sat.")));
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let m = toy(3, 1);
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let back = NGramModel::read_from(&buf[..]).unwrap();
        assert_eq!(back, m);
        for line in TOY.lines().chain(["a dog sat on a cat", "zebra"]) {
            let s = tokenize(line);
            assert_eq!(m.log_prob(&s).to_bits(), back.log_prob(&s).to_bits(), "{line}");
        }
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn truncation_and_header_errors() {
        let mut buf = Vec::new();
        toy(3, 1).write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() / 2];
        assert!(matches!(NGramModel::read_from(cut.as_bytes()), Err(LmError::Format { .. })));
        let no_end = text.trim_end().strip_suffix("\\end\\").unwrap();
        assert!(matches!(NGramModel::read_from(no_end.as_bytes()), Err(LmError::Format { .. })));
        let bad = text.replacen("NNLM v1", "NNLM v2", 1);
        match NGramModel::read_from(bad.as_bytes()) {
            Err(LmError::Header { expected, found }) => {
                assert!(expected.starts_with("NNLM v1"));
                assert!(found.starts_with("NNLM v2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_model_perplexity_is_vocab_size() {
        let v = 8usize;
        let lp = (1.0 / v as f64).log10();
        let mut f = format!("NNLM v1 order=2 vocab={}\n\\1-grams:\t{}\n-inf\t<s>\t0\n", v + 1, v + 1);
        let mut words = vec!["</s>".to_string(), "<unk>".to_string()];
        words.extend((0..v - 2).map(|i| format!("w{i}")));
        for w in &words {
            f.push_str(&format!("{lp}\t{w}\t0\n"));
        }
        f.push_str("\\2-grams:\t0\n\\end\\\n");
        let m = NGramModel::read_from(f.as_bytes()).unwrap();
        for s in [vec!["w0"], vec!["w1", "w3", "w0", "nonsense"]] {
            assert!((m.perplexity_words(&s).unwrap() - v as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn probabilities_are_positive_for_vocab() {
        let m = toy(3, 1);
        for h in m.histories() {
            for w in m.vocab().filter(|w| *w != BOS) {
                assert!(m.prob(&h, w) > 0.0);
            }
        }
    }
}
