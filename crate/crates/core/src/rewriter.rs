//! Gendered-to-neutral sentence rewriting.
//!
//! The pipeline runs in a fixed order:
//!
//! 1. tokenize;
//! 2. replace every unambiguous lexicon hit, keeping case and apostrophe style;
//! 3. link the verbs agreeing with each replaced subject pronoun and
//!    pluralize them;
//! 4. fill ambiguous slots (`her` as `their`/`them`, `his` as
//!    `their`/`theirs`, `he's` as `they're`/`they've`) by scoring whole-sentence
//!    variants with the language model;
//! 5. detokenize.
//!
//! Only the ambiguous slots vary between scored candidates; verbs are fixed
//! before ranking. Up to [`DEFAULT_CANDIDATE_CAP`] variants are scored
//! exhaustively. Past that, slots are resolved greedily left to right.

use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{gender_evidence, thread_pool, FilterError, LineReader, SentenceGender};
use crate::lexicon::{GenderClass, Lexicon, Role};
use crate::lm::NGramModel;
use crate::morph::{inflect_pronoun, pluralize_verb};
use crate::syntax::{find_agreeing_verbs, VerbLexicon};
use crate::text::{match_apostrophe, match_case, tokenize, TokenizedSentence};

pub const DEFAULT_CANDIDATE_CAP: usize = 64;
/// Perplexities closer than this are treated as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditCategory {
    Pronoun,
    Verb,
    Noun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edit {
    pub position: usize,
    pub before: String,
    pub after: String,
    pub category: EditCategory,
    pub ambiguous: bool,
    pub alternatives_considered: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub source: String,
    pub output: String,
    pub edits: Vec<Edit>,
    pub candidates_scored: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chosen_perplexity: Option<f64>,
}

impl RewriteTrace {
    /// Re-apply the edits to a fresh tokenization of `source`.
    pub fn replay(&self) -> String {
        let mut s = tokenize(&self.source);
        for e in &self.edits {
            s.replace(e.position, &e.after);
        }
        s.detokenize()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("empty input")]
    Empty,
    #[error("mixed-gender sentence: masculine `{masculine}` and feminine `{feminine}`")]
    Mixed { masculine: String, feminine: String },
    #[error("no gendered pronoun found")]
    NotGendered,
    #[error("inflection target must be masculine or feminine, got {0}")]
    BadTarget(GenderClass),
    #[error("expected a {expected} sentence, found {found}")]
    WrongGender { expected: GenderClass, found: GenderClass },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteOptions {
    pub candidate_cap: usize,
    /// Reject sentences with no gendered pronoun. When off, such sentences
    /// are rewritten anyway (usually to themselves).
    pub require_gendered: bool,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions { candidate_cap: DEFAULT_CANDIDATE_CAP, require_gendered: true }
    }
}

/// An ambiguous token whose surface is chosen by the language model.
#[derive(Debug, Clone)]
struct Slot {
    position: usize,
    before: String,
    options: Vec<String>,
}

/// Bundles the resources a rewrite needs. Cheap to copy and `Sync`.
#[derive(Clone, Copy)]
pub struct Rewriter<'a> {
    pub lexicon: &'a Lexicon,
    pub verbs: &'a VerbLexicon,
    pub lm: &'a NGramModel,
    pub options: RewriteOptions,
}

impl<'a> Rewriter<'a> {
    pub fn new(lexicon: &'a Lexicon, verbs: &'a VerbLexicon, lm: &'a NGramModel) -> Self {
        Rewriter { lexicon, verbs, lm, options: RewriteOptions::default() }
    }

    pub fn with_options(mut self, options: RewriteOptions) -> Self {
        self.options = options;
        self
    }

    fn check(&self, s: &TokenizedSentence, allow_neutral: bool) -> Result<SentenceGender, RewriteError> {
        if s.is_empty() {
            return Err(RewriteError::Empty);
        }
        let ev = gender_evidence(s, self.lexicon);
        match ev.gender() {
            SentenceGender::Mixed => Err(RewriteError::Mixed {
                masculine: s.tokens[ev.masculine.unwrap()].surface.clone(),
                feminine: s.tokens[ev.feminine.unwrap()].surface.clone(),
            }),
            SentenceGender::None if !allow_neutral => Err(RewriteError::NotGendered),
            g => Ok(g),
        }
    }

    /// Rewrite one sentence into gender-neutral form.
    pub fn rewrite(&self, text: &str) -> Result<RewriteTrace, RewriteError> {
        let original = tokenize(text);
        self.check(&original, !self.options.require_gendered)?;
        let mut s = original.clone();
        let mut edits = Vec::new();
        let mut slots = Vec::new();

        for (i, t) in original.tokens.iter().enumerate() {
            if !t.kind.is_lexical() {
                continue;
            }
            let Some(entry) = self.lexicon.lookup(&t.lower) else { continue };
            let options: Vec<String> =
                entry.alternatives.iter().map(|a| match_apostrophe(&t.surface, &match_case(&t.surface, a))).collect();
            let category = if entry.role == Role::Noun { EditCategory::Noun } else { EditCategory::Pronoun };
            if entry.ambiguous {
                slots.push(Slot { position: i, before: t.surface.clone(), options });
                continue;
            }
            let after = options[0].clone();
            if after != t.surface {
                s.replace(i, &after);
                edits.push(Edit {
                    position: i,
                    before: t.surface.clone(),
                    after,
                    category,
                    ambiguous: false,
                    alternatives_considered: options,
                });
            }
        }

        // verb agreement, decided on the untouched source tokens
        let mut verb_positions: Vec<usize> = original
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t.lower.as_str(), "he" | "she" | "he's" | "she's"))
            .filter(|(_, t)| self.lexicon.lookup(&t.lower).is_some())
            .flat_map(|(i, _)| find_agreeing_verbs(&original, i, self.verbs).verb_indices)
            .collect();
        verb_positions.sort_unstable();
        verb_positions.dedup();
        for v in verb_positions {
            let before = &original.tokens[v].surface;
            let after = pluralize_verb(before, self.verbs.rules());
            if &after != before {
                s.replace(v, &after);
                edits.push(Edit {
                    position: v,
                    before: before.clone(),
                    after: after.clone(),
                    category: EditCategory::Verb,
                    ambiguous: false,
                    alternatives_considered: vec![after],
                });
            }
        }

        let (scored, perplexity) = self.resolve_slots(&mut s, &slots, &mut edits);
        edits.sort_by_key(|e| e.position);
        Ok(RewriteTrace {
            source: text.to_string(),
            output: s.detokenize(),
            edits,
            candidates_scored: scored,
            chosen_perplexity: perplexity,
        })
    }

    /// Swap every pronoun into `target` gender. Verbs and nouns are left
    /// alone; ambiguous swaps are ranked like rewrite slots.
    pub fn inflect(&self, text: &str, target: GenderClass) -> Result<RewriteTrace, RewriteError> {
        let original = tokenize(text);
        let found = self.check(&original, false)?;
        let expected = match target {
            GenderClass::Masculine | GenderClass::Feminine => target.opposite().expect("binary gender"),
            other => return Err(RewriteError::BadTarget(other)),
        };
        let found = found.as_class().unwrap_or(GenderClass::None);
        if found != expected {
            return Err(RewriteError::WrongGender { expected, found });
        }
        let mut s = original.clone();
        let mut edits = Vec::new();
        let mut slots = Vec::new();
        for (i, t) in original.tokens.iter().enumerate() {
            if !t.kind.is_lexical() || self.lexicon.pronoun_sets().classify(&t.lower) != expected {
                continue;
            }
            let Ok(forms) = inflect_pronoun(&t.lower, target) else { continue };
            let options: Vec<String> =
                forms.iter().map(|a| match_apostrophe(&t.surface, &match_case(&t.surface, a))).collect();
            if options.len() > 1 {
                slots.push(Slot { position: i, before: t.surface.clone(), options });
            } else if options[0] != t.surface {
                s.replace(i, &options[0]);
                edits.push(Edit {
                    position: i,
                    before: t.surface.clone(),
                    after: options[0].clone(),
                    category: EditCategory::Pronoun,
                    ambiguous: false,
                    alternatives_considered: options,
                });
            }
        }
        let (scored, perplexity) = self.resolve_slots(&mut s, &slots, &mut edits);
        edits.sort_by_key(|e| e.position);
        Ok(RewriteTrace {
            source: text.to_string(),
            output: s.detokenize(),
            edits,
            candidates_scored: scored,
            chosen_perplexity: perplexity,
        })
    }

    fn perplexity(&self, s: &TokenizedSentence) -> f64 {
        self.lm.perplexity(s).expect("candidate sentences are non-empty")
    }

    /// Fill `slots` in `s` with the lowest-perplexity choice. Returns the
    /// number of candidates scored and the chosen perplexity.
    fn resolve_slots(&self, s: &mut TokenizedSentence, slots: &[Slot], edits: &mut Vec<Edit>) -> (usize, Option<f64>) {
        if slots.is_empty() {
            return (0, None);
        }
        let total = slots.iter().try_fold(1usize, |acc, sl| acc.checked_mul(sl.options.len()));
        let (choice, scored, best) = match total {
            Some(n) if n <= self.options.candidate_cap => self.exhaustive(s, slots, n),
            _ => self.greedy(s, slots),
        };
        apply_choice(s, slots, &choice);
        for (slot, &c) in slots.iter().zip(&choice) {
            let after = slot.options[c].clone();
            if after != slot.before {
                edits.push(Edit {
                    position: slot.position,
                    before: slot.before.clone(),
                    after,
                    category: EditCategory::Pronoun,
                    ambiguous: true,
                    alternatives_considered: slot.options.clone(),
                });
            }
        }
        (scored, Some(best))
    }

    fn exhaustive(&self, s: &TokenizedSentence, slots: &[Slot], n: usize) -> (Vec<usize>, usize, f64) {
        let mut work = s.clone();
        let mut best: Option<(Vec<usize>, f64)> = None;
        for choice in Odometer::new(slots.iter().map(|sl| sl.options.len()).collect()) {
            apply_choice(&mut work, slots, &choice);
            let p = self.perplexity(&work);
            if best.as_ref().is_none_or(|(_, b)| p < b - TIE_EPSILON) {
                best = Some((choice, p));
            }
        }
        let (choice, p) = best.expect("at least one candidate");
        (choice, n, p)
    }

    fn greedy(&self, s: &TokenizedSentence, slots: &[Slot]) -> (Vec<usize>, usize, f64) {
        let mut work = s.clone();
        let mut choice = vec![0; slots.len()];
        let mut scored = 0;
        let mut best_p = f64::INFINITY;
        for k in 0..slots.len() {
            let mut best: Option<(usize, f64)> = None;
            for o in 0..slots[k].options.len() {
                choice[k] = o;
                apply_choice(&mut work, slots, &choice);
                let p = self.perplexity(&work);
                scored += 1;
                if best.is_none_or(|(_, b)| p < b - TIE_EPSILON) {
                    best = Some((o, p));
                }
            }
            let (o, p) = best.unwrap();
            choice[k] = o;
            best_p = p;
        }
        (choice, scored, best_p)
    }

    /// Rewrite a line stream. Each item is handed to `sink` in input order;
    /// per-line failures are reported in the item, not returned.
    pub fn rewrite_batch<R, F>(&self, input: R, jobs: usize, sink: F) -> Result<BatchSummary, BatchError>
    where
        R: BufRead,
        F: FnMut(BatchItem) -> std::io::Result<()>,
    {
        self.batch(input, jobs, |l| self.rewrite(l), sink)
    }

    /// [`Rewriter::rewrite_batch`] for [`Rewriter::inflect`].
    pub fn inflect_batch<R, F>(
        &self,
        input: R,
        target: GenderClass,
        jobs: usize,
        sink: F,
    ) -> Result<BatchSummary, BatchError>
    where
        R: BufRead,
        F: FnMut(BatchItem) -> std::io::Result<()>,
    {
        self.batch(input, jobs, |l| self.inflect(l, target), sink)
    }

    fn batch<R, O, F>(&self, input: R, jobs: usize, op: O, mut sink: F) -> Result<BatchSummary, BatchError>
    where
        R: BufRead,
        O: Fn(&str) -> Result<RewriteTrace, RewriteError> + Sync,
        F: FnMut(BatchItem) -> std::io::Result<()>,
    {
        let mut reader = LineReader::new(input);
        let pool = thread_pool(jobs);
        let mut summary = BatchSummary::default();
        loop {
            let chunk = reader.next_chunk(1024)?;
            if chunk.is_empty() {
                break;
            }
            let results: Vec<Result<RewriteTrace, RewriteError>> = match &pool {
                Some(pool) => pool.install(|| chunk.par_iter().map(|(_, l)| op(l)).collect()),
                None => chunk.iter().map(|(_, l)| op(l)).collect(),
            };
            for ((line, source), result) in chunk.into_iter().zip(results) {
                summary.total += 1;
                match &result {
                    Ok(_) => summary.rewritten += 1,
                    Err(_) => summary.rejected += 1,
                }
                sink(BatchItem { line, source, result }).map_err(|source| BatchError::Sink { line, source })?;
            }
        }
        Ok(summary)
    }
}

fn apply_choice(s: &mut TokenizedSentence, slots: &[Slot], choice: &[usize]) {
    for (slot, &c) in slots.iter().zip(choice) {
        s.replace(slot.position, &slot.options[c]);
    }
}

/// Mixed-radix counter yielding index vectors in lexicographic order.
struct Odometer {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let next = radices.iter().all(|&r| r > 0).then(|| vec![0; radices.len()]);
        Odometer { radices, next }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[derive(Debug)]
pub struct BatchItem {
    /// 1-based input line number.
    pub line: u64,
    pub source: String,
    pub result: Result<RewriteTrace, RewriteError>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub total: u64,
    pub rewritten: u64,
    pub rejected: u64,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Read(#[from] FilterError),
    #[error("output failed at input line {line}: {source}")]
    Sink {
        line: u64,
        #[source]
        source: std::io::Error,
    },
}

/// One-shot rewrite with default options.
pub fn rewrite(
    text: &str,
    lex: &Lexicon,
    vlex: &VerbLexicon,
    lm: &NGramModel,
) -> Result<(String, RewriteTrace), RewriteError> {
    let trace = Rewriter::new(lex, vlex, lm).rewrite(text)?;
    Ok((trace.output.clone(), trace))
}

/// One-shot gender inflection with default options.
pub fn inflect_sentence(
    text: &str,
    target: GenderClass,
    lex: &Lexicon,
    vlex: &VerbLexicon,
    lm: &NGramModel,
) -> Result<String, RewriteError> {
    Ok(Rewriter::new(lex, vlex, lm).inflect(text, target)?.output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm() -> NGramModel {
        NGramModel::train(
            [
                "this is their pen .",
                "this is their book .",
                "it belongs to them .",
                "i gave it to them .",
                "they grow up fast .",
                "their dream is big .",
                "i saw him yesterday .",
                "his pen is red .",
            ],
            3,
            1,
        )
        .unwrap()
    }

    fn run(text: &str) -> RewriteTrace {
        let (lex, vlex, lm) = (Lexicon::default(), VerbLexicon::builtin(), lm());
        Rewriter::new(&lex, &vlex, &lm).rewrite(text).unwrap()
    }

    #[test]
    fn odometer_is_lexicographic() {
        let all: Vec<Vec<usize>> = Odometer::new(vec![2, 3]).collect();
        assert_eq!(all, [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]]);
        assert_eq!(Odometer::new(vec![]).count(), 1);
    }

    #[test]
    fn replaces_and_repairs_verbs() {
        let t = run("His dream is to be a fireman when he grows up");
        assert_eq!(t.output, "Their dream is to be a firefighter when they grow up");
        let cats: Vec<EditCategory> = t.edits.iter().map(|e| e.category).collect();
        assert_eq!(cats, [EditCategory::Pronoun, EditCategory::Noun, EditCategory::Pronoun, EditCategory::Verb]);
        assert_eq!(t.replay(), t.output);
    }

    #[test]
    fn her_is_ranked() {
        let t = run("This is her pen.");
        assert_eq!(t.output, "This is their pen.");
        assert_eq!(t.candidates_scored, 2);
        assert!(t.chosen_perplexity.is_some());
        assert!(t.edits[0].ambiguous);
        assert_eq!(run("It belongs to her.").output, "It belongs to them.");
    }

    #[test]
    fn case_and_apostrophes_survive() {
        assert_eq!(run("HE RUNS.").output, "THEY RUN.");
        assert_eq!(run("She’ll go.").output, "They’ll go.");
    }

    #[test]
    fn rejections() {
        let (lex, vlex, lm) = (Lexicon::default(), VerbLexicon::builtin(), lm());
        let r = Rewriter::new(&lex, &vlex, &lm);
        assert_eq!(r.rewrite("   "), Err(RewriteError::Empty));
        assert_eq!(
            r.rewrite("She walks his dog"),
            Err(RewriteError::Mixed { masculine: "his".into(), feminine: "She".into() })
        );
        assert_eq!(r.rewrite("The pen is blue."), Err(RewriteError::NotGendered));
        let bypass = r.with_options(RewriteOptions { require_gendered: false, ..Default::default() });
        assert_eq!(bypass.rewrite("The pen is blue.").unwrap().output, "The pen is blue.");
    }

    #[test]
    fn greedy_beyond_cap() {
        let (lex, vlex, lm) = (Lexicon::default(), VerbLexicon::builtin(), lm());
        let r =
            Rewriter::new(&lex, &vlex, &lm).with_options(RewriteOptions { candidate_cap: 1, require_gendered: true });
        let t = r.rewrite("This is her pen and it belongs to her.").unwrap();
        assert_eq!(t.candidates_scored, 4);
        let full = Rewriter::new(&lex, &vlex, &lm).rewrite("This is her pen and it belongs to her.").unwrap();
        assert_eq!(full.candidates_scored, 4);
    }

    #[test]
    fn inflection() {
        let (lex, vlex, lm) = (Lexicon::default(), VerbLexicon::builtin(), lm());
        let r = Rewriter::new(&lex, &vlex, &lm);
        assert_eq!(r.inflect("She sings.", GenderClass::Masculine).unwrap().output, "He sings.");
        assert_eq!(
            r.inflect("He sings.", GenderClass::Masculine),
            Err(RewriteError::WrongGender { expected: GenderClass::Feminine, found: GenderClass::Masculine })
        );
    }

    #[test]
    fn batch_isolates_failures() {
        let (lex, vlex, lm) = (Lexicon::default(), VerbLexicon::builtin(), lm());
        let r = Rewriter::new(&lex, &vlex, &lm);
        let mut out = Vec::new();
        let summary = r
            .rewrite_batch("He runs.\nShe walks his dog.\nShe sings.\n".as_bytes(), 1, |item| {
                out.push(item);
                Ok(())
            })
            .unwrap();
        assert_eq!(summary, BatchSummary { total: 3, rewritten: 2, rejected: 1 });
        assert_eq!(out[1].line, 2);
        assert!(out[1].result.is_err());
    }
}
