//! Verb re-conjugation and pronoun gender inflection.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lexicon::GenderClass;
use crate::text::{fold, match_apostrophe, match_case};

/// One ordered suffix rule: strip `strip` characters from a word ending in
/// `suffix`, then append `append`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: &'static str,
    pub strip: usize,
    pub append: &'static str,
    /// Minimum length of the word before `suffix` for the rule to fire.
    pub min_stem: usize,
    /// Require a consonant immediately before `suffix`.
    pub after_consonant: bool,
}

impl SuffixRule {
    const fn new(suffix: &'static str, strip: usize, append: &'static str) -> Self {
        SuffixRule { suffix, strip, append, min_stem: 1, after_consonant: false }
    }

    fn apply(&self, word: &str) -> Option<String> {
        let stem = word.strip_suffix(self.suffix)?;
        if stem.chars().count() < self.min_stem {
            return None;
        }
        if self.after_consonant && !stem.chars().last().is_some_and(is_consonant) {
            return None;
        }
        let keep = word.len() - self.strip;
        Some(format!("{}{}", &word[..keep], self.append))
    }
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Third-person singular to plural rewrite table.
#[derive(Debug, Clone)]
pub struct ConjugationRules {
    pub irregulars: BTreeMap<String, String>,
    pub suffix_rules: Vec<SuffixRule>,
    /// Endings that mark a word as already plural (`guess`, `kiss`).
    pub fixed_endings: Vec<&'static str>,
}

impl Default for ConjugationRules {
    fn default() -> Self {
        let irregulars = [
            ("is", "are"),
            ("was", "were"),
            ("has", "have"),
            ("does", "do"),
            ("goes", "go"),
            ("isn't", "aren't"),
            ("wasn't", "weren't"),
            ("hasn't", "haven't"),
            ("doesn't", "don't"),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        let suffix_rules = vec![
            SuffixRule { min_stem: 2, after_consonant: true, ..SuffixRule::new("ies", 3, "y") },
            SuffixRule::new("ches", 2, ""),
            SuffixRule::new("shes", 2, ""),
            SuffixRule::new("sses", 2, ""),
            SuffixRule::new("xes", 2, ""),
            // buzzes -> buzz, but realizes -> realize
            SuffixRule::new("zzes", 2, ""),
            SuffixRule::new("oes", 2, ""),
            SuffixRule::new("s", 1, ""),
        ];
        ConjugationRules { irregulars, suffix_rules, fixed_endings: vec!["ss", "us", "'s"] }
    }
}

impl ConjugationRules {
    /// Plural form of a lower-case finite 3sg verb, or the word unchanged.
    pub fn pluralize_lower(&self, lower: &str) -> String {
        if let Some(p) = self.irregulars.get(lower) {
            return p.clone();
        }
        if self.fixed_endings.iter().any(|e| lower.ends_with(e)) {
            return lower.to_string();
        }
        self.suffix_rules.iter().find_map(|r| r.apply(lower)).unwrap_or_else(|| lower.to_string())
    }
}

/// Re-conjugate a verb the caller has identified as finite third-person
/// singular, preserving casing and apostrophe style.
pub fn pluralize_verb(surface: &str, rules: &ConjugationRules) -> String {
    let plural = rules.pluralize_lower(&fold(surface));
    match_apostrophe(surface, &match_case(surface, &plural))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphError {
    #[error("`{0}` is not a gendered pronoun")]
    NotGendered(String),
    #[error("inflection target must be masculine or feminine, got {0}")]
    BadTarget(GenderClass),
}

/// Candidate opposite-gender forms for a gendered pronoun, most likely first.
///
/// `her` is ambiguous between object and determiner readings and yields
/// `him`, `his`; `his` yields `her`, `hers`. A pronoun already in the target
/// gender maps to itself.
pub fn inflect_pronoun(lower: &str, target: GenderClass) -> Result<Vec<String>, MorphError> {
    const TO_FEMININE: [(&str, &[&str]); 7] = [
        ("he", &["she"]),
        ("him", &["her"]),
        ("his", &["her", "hers"]),
        ("himself", &["herself"]),
        ("he's", &["she's"]),
        ("he'll", &["she'll"]),
        ("he'd", &["she'd"]),
    ];
    const TO_MASCULINE: [(&str, &[&str]); 7] = [
        ("she", &["he"]),
        ("her", &["him", "his"]),
        ("hers", &["his"]),
        ("herself", &["himself"]),
        ("she's", &["he's"]),
        ("she'll", &["he'll"]),
        ("she'd", &["he'd"]),
    ];
    let (table, same) = match target {
        GenderClass::Feminine => (&TO_FEMININE, &TO_MASCULINE),
        GenderClass::Masculine => (&TO_MASCULINE, &TO_FEMININE),
        other => return Err(MorphError::BadTarget(other)),
    };
    let lower = fold(lower);
    if let Some((_, candidates)) = table.iter().find(|(w, _)| *w == lower) {
        return Ok(candidates.iter().map(|c| c.to_string()).collect());
    }
    if same.iter().any(|(w, _)| *w == lower) {
        return Ok(vec![lower]);
    }
    Err(MorphError::NotGendered(lower))
}
