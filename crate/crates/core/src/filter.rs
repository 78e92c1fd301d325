//! Corpus filter: keep lines that mention exactly one binary gender.
//!
//! A line is masculine when some token is in the masculine pronoun set and
//! none is in the feminine set (and vice versa). Matching is per token, so
//! `shed` never counts as `she`. Gendered nouns do not participate.

use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{GenderClass, Lexicon};
use crate::text::{tokenize, TokenizedSentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceGender {
    Masculine,
    Feminine,
    None,
    Mixed,
}

impl SentenceGender {
    pub fn as_class(self) -> Option<GenderClass> {
        match self {
            SentenceGender::Masculine => Some(GenderClass::Masculine),
            SentenceGender::Feminine => Some(GenderClass::Feminine),
            SentenceGender::None => Some(GenderClass::None),
            SentenceGender::Mixed => None,
        }
    }
}

/// First masculine and first feminine token positions seen in a sentence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenderEvidence {
    pub masculine: Option<usize>,
    pub feminine: Option<usize>,
}

impl GenderEvidence {
    pub fn gender(&self) -> SentenceGender {
        match (self.masculine, self.feminine) {
            (Some(_), Some(_)) => SentenceGender::Mixed,
            (Some(_), None) => SentenceGender::Masculine,
            (None, Some(_)) => SentenceGender::Feminine,
            (None, None) => SentenceGender::None,
        }
    }
}

pub fn gender_evidence(s: &TokenizedSentence, lex: &Lexicon) -> GenderEvidence {
    let sets = lex.pronoun_sets();
    let mut ev = GenderEvidence::default();
    for (i, t) in s.tokens.iter().enumerate() {
        if !t.kind.is_lexical() {
            continue;
        }
        match sets.classify(&t.lower) {
            GenderClass::Masculine if ev.masculine.is_none() => ev.masculine = Some(i),
            GenderClass::Feminine if ev.feminine.is_none() => ev.feminine = Some(i),
            _ => {}
        }
    }
    ev
}

pub fn detect_gender(s: &TokenizedSentence, lex: &Lexicon) -> SentenceGender {
    gender_evidence(s, lex).gender()
}

/// Convenience wrapper over [`detect_gender`] for raw text.
pub fn detect_gender_str(text: &str, lex: &Lexicon) -> SentenceGender {
    detect_gender(&tokenize(text), lex)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub total: u64,
    pub kept_masculine: u64,
    pub kept_feminine: u64,
    pub dropped_mixed: u64,
    pub dropped_neutral: u64,
}

impl FilterStats {
    pub fn record(&mut self, g: SentenceGender) {
        self.total += 1;
        match g {
            SentenceGender::Masculine => self.kept_masculine += 1,
            SentenceGender::Feminine => self.kept_feminine += 1,
            SentenceGender::Mixed => self.dropped_mixed += 1,
            SentenceGender::None => self.dropped_neutral += 1,
        }
    }

    pub fn kept(&self) -> u64 {
        self.kept_masculine + self.kept_feminine
    }

    /// Share of kept lines that are masculine; `None` when nothing was kept.
    pub fn masculine_share(&self) -> Option<f64> {
        (self.kept() > 0).then(|| self.kept_masculine as f64 / self.kept() as f64)
    }
}

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("read failed at line {line} (byte offset {offset}): {source}")]
    Read {
        line: u64,
        offset: u64,
        #[source]
        source: io::Error,
    },
    #[error("write failed at input line {line}: {source}")]
    Write {
        line: u64,
        #[source]
        source: io::Error,
    },
}

const CHUNK: usize = 4096;

/// Stream `input` line by line, writing gendered lines to `gendered` and
/// lines with no gendered pronoun to `neutral`; mixed lines are dropped.
///
/// Output order follows input order. Blank lines are counted as neutral but
/// not written. With `jobs > 1` classification runs on a thread pool.
pub fn filter_corpus<R, G, N>(
    input: R,
    lex: &Lexicon,
    mut gendered: G,
    mut neutral: N,
    jobs: usize,
) -> Result<FilterStats, FilterError>
where
    R: BufRead,
    G: Write,
    N: Write,
{
    let mut stats = FilterStats::default();
    let mut reader = LineReader::new(input);
    let pool = thread_pool(jobs);
    loop {
        let chunk = reader.next_chunk(CHUNK)?;
        if chunk.is_empty() {
            break;
        }
        let classes: Vec<SentenceGender> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().map(|(_, l)| detect_gender_str(l, lex)).collect()),
            None => chunk.iter().map(|(_, l)| detect_gender_str(l, lex)).collect(),
        };
        for ((line_no, line), class) in chunk.iter().zip(classes) {
            stats.record(class);
            let write = match class {
                SentenceGender::Masculine | SentenceGender::Feminine => writeln!(gendered, "{line}"),
                SentenceGender::None if !line.trim().is_empty() => writeln!(neutral, "{line}"),
                _ => Ok(()),
            };
            write.map_err(|source| FilterError::Write { line: *line_no, source })?;
        }
    }
    gendered.flush().map_err(|source| FilterError::Write { line: reader.line, source })?;
    neutral.flush().map_err(|source| FilterError::Write { line: reader.line, source })?;
    Ok(stats)
}

/// In-memory variant used by tests and the dataset builder.
pub fn filter_lines<S: AsRef<str>>(lines: &[S], lex: &Lexicon) -> (Vec<String>, Vec<String>, FilterStats) {
    let mut gendered = Vec::new();
    let mut neutral = Vec::new();
    let mut stats = FilterStats::default();
    for line in lines {
        let line = line.as_ref();
        let class = detect_gender_str(line, lex);
        stats.record(class);
        match class {
            SentenceGender::Masculine | SentenceGender::Feminine => gendered.push(line.to_string()),
            SentenceGender::None if !line.trim().is_empty() => neutral.push(line.to_string()),
            _ => {}
        }
    }
    (gendered, neutral, stats)
}

pub(crate) fn thread_pool(jobs: usize) -> Option<rayon::ThreadPool> {
    (jobs > 1).then(|| rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool"))
}

/// Reads lines in chunks, tracking line numbers and byte offsets for errors.
pub(crate) struct LineReader<R> {
    inner: R,
    pub(crate) line: u64,
    offset: u64,
}

impl<R: BufRead> LineReader<R> {
    pub(crate) fn new(inner: R) -> Self {
        LineReader { inner, line: 0, offset: 0 }
    }

    pub(crate) fn next_line(&mut self) -> Result<Option<(u64, String)>, FilterError> {
        let mut buf = String::new();
        let n = self.inner.read_line(&mut buf).map_err(|source| FilterError::Read {
            line: self.line + 1,
            offset: self.offset,
            source,
        })?;
        if n == 0 {
            return Ok(None);
        }
        self.line += 1;
        self.offset += n as u64;
        if buf.ends_with('\n') {
            buf.pop();
            if buf.ends_with('\r') {
                buf.pop();
            }
        }
        Ok(Some((self.line, buf)))
    }

    pub(crate) fn next_chunk(&mut self, max: usize) -> Result<Vec<(u64, String)>, FilterError> {
        let mut chunk = Vec::new();
        while chunk.len() < max {
            match self.next_line()? {
                Some(l) => chunk.push(l),
                None => break,
            }
        }
        Ok(chunk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::default()
    }

    #[test]
    fn detects_examples() {
        let lex = lex();
        assert_eq!(detect_gender_str("Does she know what happened to her friend?", &lex), SentenceGender::Feminine);
        assert_eq!(detect_gender_str("The pen is blue.", &lex), SentenceGender::None);
        assert_eq!(detect_gender_str("She walks his dog", &lex), SentenceGender::Mixed);
        assert_eq!(detect_gender_str("HE ran", &lex), SentenceGender::Masculine);
        assert_eq!(detect_gender_str("he's happy", &lex), SentenceGender::Masculine);
    }

    #[test]
    fn word_boundaries() {
        let lex = lex();
        assert_eq!(detect_gender_str("The shed is old, the theme is here.", &lex), SentenceGender::None);
        assert_eq!(detect_gender_str("The fireman arrived.", &lex), SentenceGender::None);
        assert_eq!(detect_gender_str("see https://x.com/she", &lex), SentenceGender::None);
    }

    #[test]
    fn toy_corpus_buckets() {
        let input = "He runs.\nShe sings.\nShe walks his dog.\nThe pen is blue.\n";
        let (mut g, mut n) = (Vec::new(), Vec::new());
        let stats = filter_corpus(input.as_bytes(), &lex(), &mut g, &mut n, 1).unwrap();
        assert_eq!(String::from_utf8(g).unwrap(), "He runs.\nShe sings.\n");
        assert_eq!(String::from_utf8(n).unwrap(), "The pen is blue.\n");
        assert_eq!(stats.dropped_mixed, 1);
        assert_eq!(stats.kept(), 2);
        assert_eq!(stats.dropped_neutral, 1);
        assert_eq!(
            stats.total,
            stats.kept_masculine + stats.kept_feminine + stats.dropped_mixed + stats.dropped_neutral
        );
    }

    #[test]
    fn empty_input() {
        let (mut g, mut n) = (Vec::new(), Vec::new());
        let stats = filter_corpus(&b""[..], &lex(), &mut g, &mut n, 1).unwrap();
        assert_eq!(stats, FilterStats::default());
        assert!(g.is_empty() && n.is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let lines: Vec<String> = (0..10_000)
            .map(|i| match i % 4 {
                0 => format!("He said {i}."),
                1 => format!("Her cat {i} sleeps."),
                2 => format!("She met him {i} times."),
                _ => format!("Line {i} has no pronoun."),
            })
            .collect();
        let input = lines.join("\n");
        let run = |jobs| {
            let (mut g, mut n) = (Vec::new(), Vec::new());
            let stats = filter_corpus(input.as_bytes(), &lex(), &mut g, &mut n, jobs).unwrap();
            (g, n, stats)
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn masculine_share() {
        let mut lines = vec!["He ran."; 70];
        lines.extend(vec!["She ran."; 30]);
        let (_, _, stats) = filter_lines(&lines, &lex());
        assert!((stats.masculine_share().unwrap() - 0.70).abs() < 1e-12);
    }

    #[test]
    fn crlf_lines_are_trimmed() {
        let (mut g, mut n) = (Vec::new(), Vec::new());
        filter_corpus(&b"He ran.\r\nok\r\n"[..], &lex(), &mut g, &mut n, 1).unwrap();
        assert_eq!(g, b"He ran.\n");
        assert_eq!(n, b"ok\n");
    }
}
