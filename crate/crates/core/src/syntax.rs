//! Shallow subject-verb linking.
//!
//! Finds the finite third-person singular verbs whose subject is a given
//! `he`/`she` token, without a parse tree. The linker looks at four
//! patterns:
//!
//! * the verb in the slot right after the pronoun (adverbs and
//!   comma-delimited parentheticals may intervene): `she often sings`
//! * verbs coordinated with an already linked verb: `sings ... and dances`
//! * subject-auxiliary inversion: `Does she know`, `..., doesn't he?`
//! * nothing else. A verb whose nearest subject is a noun phrase
//!   (`His dream is`) is never linked.
//!
//! Scanning never crosses a clause boundary: sentence punctuation,
//! subordinating conjunctions, relative pronouns, or a comma or coordinator
//! followed by a new subject.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morph::ConjugationRules;
use crate::text::{Token, TokenKind, TokenizedSentence};

const BUNDLED_VERBS: &str = include_str!("../data/verbs.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbEntry {
    pub base: String,
    pub third_singular: String,
    pub past: String,
    /// Whether the surface this entry was looked up by is a finite 3sg form.
    pub is_finite_3sg: bool,
}

#[derive(Debug, Error)]
pub enum VerbLexiconError {
    #[error("line {line}: expected `base,third_singular,past`, got `{text}`")]
    Parse { line: usize, text: String },
    #[error("cannot read verb lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Irregular finite forms that are not rows of the verb table.
const FINITE_3SG: [&str; 9] = ["is", "was", "has", "does", "goes", "isn't", "wasn't", "hasn't", "doesn't"];
const OTHER_FINITE: [&str; 28] = [
    "am",
    "are",
    "were",
    "have",
    "do",
    "did",
    "had",
    "aren't",
    "weren't",
    "haven't",
    "don't",
    "didn't",
    "hadn't",
    "can",
    "could",
    "will",
    "would",
    "shall",
    "should",
    "may",
    "might",
    "must",
    "can't",
    "couldn't",
    "won't",
    "wouldn't",
    "shouldn't",
    "mustn't",
];

/// Verb forms: base, third-person singular and past for each known verb.
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    rows: Vec<(String, String, String)>,
    by_base: HashMap<String, usize>,
    by_third: HashMap<String, usize>,
    by_past: HashMap<String, usize>,
    rules: ConjugationRules,
}

impl VerbLexicon {
    /// The verb table shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUNDLED_VERBS).expect("bundled verb table is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VerbLexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| VerbLexiconError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, VerbLexiconError> {
        let mut lex = VerbLexicon {
            rows: Vec::new(),
            by_base: HashMap::new(),
            by_third: HashMap::new(),
            by_past: HashMap::new(),
            rules: ConjugationRules::default(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [base, third, past] = fields[..] else {
                return Err(VerbLexiconError::Parse { line: i + 1, text: raw.to_string() });
            };
            if base.is_empty() || third.is_empty() || past.is_empty() {
                return Err(VerbLexiconError::Parse { line: i + 1, text: raw.to_string() });
            }
            let idx = lex.rows.len();
            lex.rows.push((base.to_lowercase(), third.to_lowercase(), past.to_lowercase()));
            let (b, t, p) = lex.rows[idx].clone();
            lex.by_base.entry(b).or_insert(idx);
            lex.by_third.entry(t).or_insert(idx);
            lex.by_past.entry(p).or_insert(idx);
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// All `(base, third_singular, past)` rows in file order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.rows.iter().map(|(b, t, p)| (b.as_str(), t.as_str(), p.as_str()))
    }

    pub fn rules(&self) -> &ConjugationRules {
        &self.rules
    }

    pub fn lookup(&self, lower: &str) -> Option<VerbEntry> {
        let (idx, finite) = if let Some(&i) = self.by_third.get(lower) {
            (i, true)
        } else if let Some(&i) = self.by_base.get(lower) {
            (i, false)
        } else {
            (*self.by_past.get(lower)?, false)
        };
        let (base, third, past) = &self.rows[idx];
        Some(VerbEntry { base: base.clone(), third_singular: third.clone(), past: past.clone(), is_finite_3sg: finite })
    }

    /// Finite third-person singular present form, including the negated
    /// auxiliaries and -s forms of known bases.
    pub fn is_finite_3sg_lower(&self, lower: &str) -> bool {
        if FINITE_3SG.contains(&lower) || self.by_third.contains_key(lower) {
            return true;
        }
        if !lower.ends_with('s') || lower.ends_with("ss") {
            return false;
        }
        let base = self.rules.pluralize_lower(lower);
        base != lower && self.by_base.contains_key(&base)
    }

    pub fn is_finite_3sg(&self, token: &Token) -> bool {
        token.kind.is_lexical() && self.is_finite_3sg_lower(&token.lower)
    }

    /// Any recognised verb form, finite or not, including auxiliaries and modals.
    pub fn is_verb_form(&self, lower: &str) -> bool {
        FINITE_3SG.contains(&lower)
            || OTHER_FINITE.contains(&lower)
            || matches!(lower, "be" | "been" | "being")
            || self.by_base.contains_key(lower)
            || self.by_past.contains_key(lower)
            || self.is_finite_3sg_lower(lower)
    }
}

impl Default for VerbLexicon {
    fn default() -> Self {
        Self::builtin()
    }
}

pub fn is_finite_3sg(token: &Token, vlex: &VerbLexicon) -> bool {
    vlex.is_finite_3sg(token)
}

/// A subject pronoun and the finite verbs that agree with it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AgreementLink {
    pub pronoun_index: usize,
    pub verb_indices: Vec<usize>,
}

const ADVERBS: [&str; 62] = [
    "also",
    "always",
    "never",
    "often",
    "sometimes",
    "usually",
    "still",
    "just",
    "even",
    "only",
    "already",
    "now",
    "then",
    "too",
    "ever",
    "rarely",
    "seldom",
    "really",
    "actually",
    "finally",
    "probably",
    "certainly",
    "definitely",
    "clearly",
    "simply",
    "barely",
    "hardly",
    "almost",
    "nearly",
    "generally",
    "typically",
    "apparently",
    "obviously",
    "basically",
    "literally",
    "honestly",
    "allegedly",
    "reportedly",
    "alone",
    "again",
    "once",
    "soon",
    "today",
    "mostly",
    "rather",
    "quite",
    "constantly",
    "frequently",
    "occasionally",
    "immediately",
    "suddenly",
    "quickly",
    "slowly",
    "gladly",
    "openly",
    "regularly",
    "secretly",
    "supposedly",
    "allegedly",
    "himself",
    "herself",
    "not",
];

const SUBORDINATORS: [&str; 27] = [
    "that", "when", "while", "because", "if", "although", "though", "since", "unless", "until", "after", "before",
    "whereas", "whether", "so", "once", "who", "whom", "whose", "which", "where", "what", "why", "how", "whenever",
    "wherever", "whoever",
];

const COORDINATORS: [&str; 4] = ["and", "or", "but", "nor"];

const SUBJECT_STARTERS: [&str; 31] = [
    "i", "you", "we", "they", "he", "she", "it", "there", "the", "a", "an", "this", "that", "these", "those", "my",
    "your", "his", "her", "its", "our", "their", "some", "every", "each", "no", "any", "all", "someone", "everyone",
    "nobody",
];

const INVERSION_TRIGGERS: [&str; 18] = [
    "what", "why", "how", "where", "when", "who", "whom", "which", "so", "nor", "neither", "and", "or", "but",
    "nowhere", "rarely", "seldom", "never",
];

/// Noun/verb homographs that are only read as verbs when coordination makes
/// the verb reading clear.
const HOMOGRAPHS: [&str; 47] = [
    "plants", "works", "plays", "watches", "flies", "runs", "walks", "dances", "books", "films", "flowers", "waters",
    "faces", "hands", "heads", "marks", "points", "records", "reports", "rests", "rings", "signs", "sounds", "stamps",
    "stores", "trips", "turns", "visits", "waves", "wishes", "dreams", "drinks", "lights", "orders", "kisses", "fires",
    "trains", "guides", "tours", "prints", "fences", "walls", "pictures", "boxes", "roots", "bills", "shows",
];

/// Words ending in -s that never head a verb phrase.
const NON_VERBS_IN_S: [&str; 24] = [
    "perhaps",
    "thus",
    "nevertheless",
    "nonetheless",
    "towards",
    "afterwards",
    "besides",
    "always",
    "sometimes",
    "nowadays",
    "unless",
    "whereas",
    "its",
    "his",
    "hers",
    "this",
    "yes",
    "plus",
    "upstairs",
    "downstairs",
    "indoors",
    "outdoors",
    "anyways",
    "regardless",
];

/// A lowercase word missing from the verb table that still looks like a
/// third-person singular form. Only trusted straight after the subject.
fn unlisted_finite_3sg(t: &Token, vlex: &VerbLexicon) -> bool {
    let w = t.lower.as_str();
    t.kind == TokenKind::Word
        && !t.surface.chars().any(char::is_uppercase)
        && w.len() > 3
        && w.ends_with('s')
        && !w.ends_with("ss")
        && !w.ends_with("us")
        && !w.ends_with("is")
        && !NON_VERBS_IN_S.contains(&w)
        && !vlex.is_verb_form(w)
        && vlex.rules().pluralize_lower(w) != w
}

fn is_adverb(t: &Token, vlex: &VerbLexicon) -> bool {
    if !t.kind.is_lexical() {
        return false;
    }
    let w = t.lower.as_str();
    ADVERBS.contains(&w) || (w.len() > 4 && w.ends_with("ly") && !vlex.is_verb_form(w))
}

fn is_sentence_break(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation
        && t.surface
            .chars()
            .any(|c| matches!(c, '.' | '!' | '?' | ';' | ':' | '"' | '\u{201C}' | '\u{201D}' | '(' | ')'))
}

fn is_comma(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && matches!(t.surface.as_str(), "," | "\u{2013}" | "\u{2014}" | "-")
}

fn starts_subject(t: &Token, index: usize) -> bool {
    if !t.kind.is_lexical() {
        return false;
    }
    SUBJECT_STARTERS.contains(&t.lower.as_str())
        || (index > 0 && t.surface.chars().next().is_some_and(char::is_uppercase))
}

/// Skip adverbs starting at `i`; also skips one comma-delimited parenthetical
/// when `allow_parenthetical` is set. Returns the first other index.
fn skip_modifiers(tokens: &[Token], mut i: usize, vlex: &VerbLexicon, allow_parenthetical: bool) -> usize {
    let mut parenthetical_used = !allow_parenthetical;
    while i < tokens.len() {
        let t = &tokens[i];
        if is_adverb(t, vlex) {
            i += 1;
            continue;
        }
        // "no longer"
        if t.lower == "no" && tokens.get(i + 1).is_some_and(|n| n.lower == "longer") {
            i += 2;
            continue;
        }
        if is_comma(t) && !parenthetical_used {
            parenthetical_used = true;
            let close = (i + 1..tokens.len().min(i + 10))
                .take_while(|&j| !is_sentence_break(&tokens[j]))
                .find(|&j| is_comma(&tokens[j]));
            if let Some(j) = close {
                i = j + 1;
                continue;
            }
        }
        break;
    }
    i
}

fn looks_plural_noun(t: &Token) -> bool {
    t.kind == TokenKind::Word && t.lower.len() > 3 && t.lower.ends_with('s') && !t.lower.ends_with("ss")
}

/// Follow coordinated verbs starting after the linked verb at `from`.
fn coordinated_verbs(tokens: &[Token], from: usize, vlex: &VerbLexicon, out: &mut Vec<usize>) {
    let mut i = from + 1;
    while i < tokens.len() {
        let t = &tokens[i];
        if is_sentence_break(t) || (t.kind.is_lexical() && SUBORDINATORS.contains(&t.lower.as_str())) {
            return;
        }
        let coordinator = t.kind.is_lexical() && COORDINATORS.contains(&t.lower.as_str());
        if !(coordinator || is_comma(t)) {
            i += 1;
            continue;
        }
        // the token before the coordinator, unless it is itself a linked verb
        let before = (i > 0 && !out.contains(&(i - 1)) && i - 1 != from).then(|| &tokens[i - 1]);
        // skip ", and" / "and then" / adverbs
        let mut j = i + 1;
        loop {
            j = skip_modifiers(tokens, j, vlex, false);
            match tokens.get(j) {
                Some(n) if is_comma(n) || (n.kind.is_lexical() && COORDINATORS.contains(&n.lower.as_str())) => j += 1,
                _ => break,
            }
        }
        let Some(next) = tokens.get(j) else { return };
        let inverted = tokens
            .get(j + 1)
            .is_some_and(|n| matches!(n.lower.as_str(), "he" | "she" | "it" | "there" | "i" | "you" | "we" | "they"));
        if inverted {
            return;
        }
        if vlex.is_finite_3sg(next) {
            let homograph = HOMOGRAPHS.contains(&next.lower.as_str());
            let noun_list = before.is_some_and(looks_plural_noun);
            if !(homograph && noun_list) {
                out.push(j);
                i = j + 1;
                continue;
            }
        }
        if starts_subject(next, j) {
            return;
        }
        i = j.max(i + 1);
    }
}

/// Link the finite verbs agreeing with the subject pronoun at `pronoun_index`.
///
/// For `he's`/`she's` the contraction already carries the finite verb, so
/// only verbs coordinated with it are returned. `he'll` and `he'd` are
/// followed by bare forms and never link anything.
pub fn find_agreeing_verbs(s: &TokenizedSentence, pronoun_index: usize, vlex: &VerbLexicon) -> AgreementLink {
    let tokens = &s.tokens;
    let mut link = AgreementLink { pronoun_index, verb_indices: Vec::new() };
    let Some(pronoun) = tokens.get(pronoun_index) else {
        return link;
    };
    match pronoun.lower.as_str() {
        "he" | "she" => {}
        "he's" | "she's" => {
            coordinated_verbs(tokens, pronoun_index, vlex, &mut link.verb_indices);
            return link;
        }
        _ => return link,
    }

    // inversion: "Does she know", "..., isn't he?"
    if pronoun_index > 0 {
        let aux = &tokens[pronoun_index - 1];
        if aux.kind.is_lexical() && FINITE_3SG.contains(&aux.lower.as_str()) && is_inverted(tokens, pronoun_index - 1) {
            link.verb_indices.push(pronoun_index - 1);
        }
    }

    let slot = skip_modifiers(tokens, pronoun_index + 1, vlex, true);
    if let Some(t) = tokens.get(slot) {
        if vlex.is_finite_3sg(t) || unlisted_finite_3sg(t, vlex) {
            link.verb_indices.push(slot);
            coordinated_verbs(tokens, slot, vlex, &mut link.verb_indices);
        }
    }
    link.verb_indices.sort_unstable();
    link.verb_indices.dedup();
    link
}

fn is_inverted(tokens: &[Token], aux: usize) -> bool {
    let question = tokens
        .iter()
        .rev()
        .find(|t| t.kind == TokenKind::Punctuation || t.kind.is_lexical())
        .is_some_and(|t| t.surface.contains('?'));
    let prev = tokens[..aux].iter().rev().find(|t| t.kind != TokenKind::Emoji && t.kind != TokenKind::Symbol);
    match prev {
        None => true,
        Some(p) if is_sentence_break(p) => true,
        Some(p) if p.kind.is_lexical() && INVERSION_TRIGGERS.contains(&p.lower.as_str()) => true,
        Some(p) if is_comma(p) => question,
        Some(_) => question && aux_starts_clause(tokens, aux),
    }
}

/// `Why on earth does he ...?` style: the auxiliary follows a wh-phrase.
fn aux_starts_clause(tokens: &[Token], aux: usize) -> bool {
    tokens[..aux].iter().rev().take(4).any(|t| {
        t.kind.is_lexical() && ["what", "why", "how", "where", "when", "who", "which"].contains(&t.lower.as_str())
    })
}

/// Every subject pronoun in `s` with its links, in token order.
pub fn link_all(s: &TokenizedSentence, vlex: &VerbLexicon) -> Vec<AgreementLink> {
    let mut seen = HashSet::new();
    s.tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind.is_lexical() && matches!(t.lower.as_str(), "he" | "she" | "he's" | "she's"))
        .map(|(i, _)| find_agreeing_verbs(s, i, vlex))
        .map(|mut l| {
            l.verb_indices.retain(|v| seen.insert(*v));
            l
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn verbs_of(text: &str, pronoun: &str) -> Vec<String> {
        let vlex = VerbLexicon::builtin();
        let s = tokenize(text);
        let idx = s.tokens.iter().position(|t| t.lower == pronoun).unwrap();
        find_agreeing_verbs(&s, idx, &vlex).verb_indices.iter().map(|&i| s.tokens[i].surface.clone()).collect()
    }

    #[test]
    fn relative_clause_with_noun_subject() {
        assert_eq!(verbs_of("His dream is to be a fireman when he grows up", "he"), ["grows"]);
    }

    #[test]
    fn inversion() {
        assert_eq!(verbs_of("Does she know what happened to her friend?", "she"), ["Does"]);
        assert_eq!(verbs_of("He likes it, doesn't he?", "he").len(), 1);
        assert!(verbs_of("The problem is he never listens.", "he").contains(&"listens".to_string()));
        assert!(!verbs_of("The problem is he never listens.", "he").contains(&"is".to_string()));
    }

    #[test]
    fn coordination() {
        assert_eq!(verbs_of("She sings in the shower and dances in the dark.", "she"), ["sings", "dances"]);
        assert_eq!(verbs_of("He runs, jumps, and swims.", "he"), ["runs", "jumps", "swims"]);
        assert_eq!(verbs_of("She sings and the dog barks.", "she"), ["sings"]);
        assert_eq!(verbs_of("She sells flowers and plants.", "she"), ["sells"]);
        assert_eq!(verbs_of("He sings and dances the tango.", "he"), ["sings", "dances"]);
    }

    #[test]
    fn clause_locality() {
        assert_eq!(verbs_of("He thinks the dog likes him.", "he"), ["thinks"]);
        assert_eq!(verbs_of("He likes the song that plays on the radio.", "he"), ["likes"]);
        assert!(verbs_of("He said his father works hard.", "he").is_empty());
        assert_eq!(verbs_of("He, however, thinks so.", "he"), ["thinks"]);
    }

    #[test]
    fn unlisted_verb_after_subject() {
        assert_eq!(verbs_of("He just micromanages everything.", "he"), ["micromanages"]);
        assert!(verbs_of("He perhaps knew.", "he").is_empty());
        assert!(verbs_of("She Jones was there.", "she").is_empty());
        // not trusted inside coordination
        assert_eq!(verbs_of("He paints walls and fences.", "he"), ["paints"]);
    }

    #[test]
    fn contractions() {
        assert_eq!(verbs_of("She's tall and plays tennis.", "she's"), ["plays"]);
        assert!(verbs_of("He'll come and see.", "he'll").is_empty());
    }

    #[test]
    fn finite_3sg_classification() {
        let vlex = VerbLexicon::builtin();
        let tok = |w: &str| tokenize(w).tokens.remove(0);
        assert!(is_finite_3sg(&tok("grows"), &vlex));
        assert!(!is_finite_3sg(&tok("shower"), &vlex));
        assert!(is_finite_3sg(&tok("doesn't"), &vlex));
        assert!(is_finite_3sg(&tok("is"), &vlex));
        assert!(!is_finite_3sg(&tok("grow"), &vlex));
        assert!(!is_finite_3sg(&tok("guess"), &vlex));
        assert!(!is_finite_3sg(&tok("walked"), &vlex));
    }

    #[test]
    fn productive_morphology_over_known_base() {
        let vlex = VerbLexicon::parse("frobnicate,frobnicate_,frobnicated\n").unwrap();
        assert!(vlex.is_finite_3sg_lower("frobnicates"));
        assert!(!vlex.is_finite_3sg_lower("frobnicated"));
    }

    #[test]
    fn parse_errors_report_line() {
        let err = VerbLexicon::parse("# header\nwalk,walks\n").unwrap_err();
        assert!(matches!(err, VerbLexiconError::Parse { line: 2, .. }));
    }

    #[test]
    fn bundled_table_size() {
        assert!(VerbLexicon::builtin().len() >= 500);
    }
}
