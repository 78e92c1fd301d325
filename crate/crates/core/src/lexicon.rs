//! Gendered-to-neutral surface mappings.
//!
//! The built-in table covers the subject, object, possessive and reflexive
//! pronouns, the pronoun contractions, and a small list of stereotypically
//! gendered nouns. Users extend it with a plain-text file:
//!
//! ```text
//! # source -> alternative | alternative , role
//! spokeswoman -> spokesperson, noun
//! firemen -> firefighters, noun
//! ```
//!
//! `→` is accepted in place of `->`. The role is optional and defaults to
//! `noun`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderClass {
    Masculine,
    Feminine,
    Neutral,
    None,
}

impl GenderClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GenderClass::Masculine => "masculine",
            GenderClass::Feminine => "feminine",
            GenderClass::Neutral => "neutral",
            GenderClass::None => "none",
        }
    }

    /// The other binary gender; `None` for non-binary classes.
    pub fn opposite(self) -> Option<GenderClass> {
        match self {
            GenderClass::Masculine => Some(GenderClass::Feminine),
            GenderClass::Feminine => Some(GenderClass::Masculine),
            _ => None,
        }
    }
}

impl fmt::Display for GenderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "masculine" | "m" | "male" => Ok(GenderClass::Masculine),
            "feminine" | "f" | "female" => Ok(GenderClass::Feminine),
            "neutral" => Ok(GenderClass::Neutral),
            "none" | "" => Ok(GenderClass::None),
            other => Err(format!("unknown gender class `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    SubjectPronoun,
    ObjectPronoun,
    PossDeterminer,
    PossPronoun,
    Reflexive,
    Contraction,
    Noun,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::SubjectPronoun => "subject_pronoun",
            Role::ObjectPronoun => "object_pronoun",
            Role::PossDeterminer => "poss_determiner",
            Role::PossPronoun => "poss_pronoun",
            Role::Reflexive => "reflexive",
            Role::Contraction => "contraction",
            Role::Noun => "noun",
        }
    }

    pub fn is_pronoun(self) -> bool {
        self != Role::Noun
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "subject_pronoun" => Role::SubjectPronoun,
            "object_pronoun" => Role::ObjectPronoun,
            "poss_determiner" => Role::PossDeterminer,
            "poss_pronoun" => Role::PossPronoun,
            "reflexive" => Role::Reflexive,
            "contraction" => Role::Contraction,
            "noun" => Role::Noun,
            other => return Err(format!("unknown role `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub source: String,
    pub alternatives: Vec<String>,
    pub role: Role,
    pub ambiguous: bool,
}

impl LexiconEntry {
    pub fn new(source: &str, alternatives: &[&str], role: Role) -> Self {
        assert!(!alternatives.is_empty(), "entry for `{source}` has no alternatives");
        LexiconEntry {
            source: source.to_string(),
            alternatives: alternatives.iter().map(|s| s.to_string()).collect(),
            role,
            ambiguous: alternatives.len() > 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflexiveStyle {
    #[default]
    Themselves,
    Themself,
}

impl ReflexiveStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            ReflexiveStyle::Themselves => "themselves",
            ReflexiveStyle::Themself => "themself",
        }
    }
}

impl FromStr for ReflexiveStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "themselves" => Ok(ReflexiveStyle::Themselves),
            "themself" => Ok(ReflexiveStyle::Themself),
            other => Err(format!("unknown reflexive style `{other}`")),
        }
    }
}

pub const MASCULINE: [&str; 7] = ["he", "him", "his", "himself", "he's", "he'll", "he'd"];
pub const FEMININE: [&str; 7] = ["she", "her", "hers", "herself", "she's", "she'll", "she'd"];
pub const NEUTRAL: [&str; 10] =
    ["they", "them", "their", "theirs", "themselves", "themself", "they're", "they've", "they'll", "they'd"];

/// The masculine, feminine and neutral pronoun word sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounSets {
    pub masculine: BTreeSet<String>,
    pub feminine: BTreeSet<String>,
    pub neutral: BTreeSet<String>,
}

impl Default for PronounSets {
    fn default() -> Self {
        let set = |words: &[&str]| words.iter().map(|w| w.to_string()).collect();
        PronounSets { masculine: set(&MASCULINE), feminine: set(&FEMININE), neutral: set(&NEUTRAL) }
    }
}

impl PronounSets {
    pub fn classify(&self, lower: &str) -> GenderClass {
        if self.masculine.contains(lower) {
            GenderClass::Masculine
        } else if self.feminine.contains(lower) {
            GenderClass::Feminine
        } else if self.neutral.contains(lower) {
            GenderClass::Neutral
        } else {
            GenderClass::None
        }
    }

    pub fn is_pronoun(&self, lower: &str) -> bool {
        self.classify(lower) != GenderClass::None
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: `{word}` is a neutral word and cannot be remapped")]
    Protected { line: usize, word: String },
    #[error("line {line}: replacement `{word}` is itself a lexicon source")]
    ReplacementIsSource { line: usize, word: String },
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    pronoun_sets: PronounSets,
}

/// Stereotypically gendered nouns and their neutral counterparts.
pub const GENDERED_NOUNS: [(&str, &str); 12] = [
    ("mankind", "humanity"),
    ("layman", "layperson"),
    ("laymen", "lay people"),
    ("policeman", "police officer"),
    ("policewoman", "police officer"),
    ("policemen", "police officers"),
    ("policewomen", "police officers"),
    ("stewardess", "flight attendant"),
    ("weatherman", "weather reporter"),
    ("fireman", "firefighter"),
    ("chairman", "chair"),
    ("spokesman", "spokesperson"),
];

impl Lexicon {
    pub fn builtin(reflexive: ReflexiveStyle) -> Self {
        use Role::*;
        let reflexive = reflexive.as_str();
        let mut lex = Lexicon { entries: BTreeMap::new(), pronoun_sets: PronounSets::default() };
        let pronouns: [(&str, &[&str], Role); 14] = [
            ("he", &["they"], SubjectPronoun),
            ("she", &["they"], SubjectPronoun),
            ("him", &["them"], ObjectPronoun),
            ("his", &["their", "theirs"], PossDeterminer),
            ("her", &["their", "them"], PossDeterminer),
            ("hers", &["theirs"], PossPronoun),
            ("himself", &[reflexive], Reflexive),
            ("herself", &[reflexive], Reflexive),
            ("he's", &["they're", "they've"], Contraction),
            ("she's", &["they're", "they've"], Contraction),
            ("he'll", &["they'll"], Contraction),
            ("she'll", &["they'll"], Contraction),
            ("he'd", &["they'd"], Contraction),
            ("she'd", &["they'd"], Contraction),
        ];
        for (source, alternatives, role) in pronouns {
            lex.insert(LexiconEntry::new(source, alternatives, role));
        }
        for (source, target) in GENDERED_NOUNS {
            lex.insert(LexiconEntry::new(source, &[target], Noun));
        }
        lex
    }

    fn insert(&mut self, entry: LexiconEntry) {
        self.entries.insert(entry.source.clone(), entry);
    }

    /// Exact-match lookup on a case-folded form.
    pub fn lookup(&self, lower: &str) -> Option<&LexiconEntry> {
        self.entries.get(lower)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pronoun_sets(&self) -> &PronounSets {
        &self.pronoun_sets
    }

    pub fn load(path: impl AsRef<Path>, base: Lexicon) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
        base.extend_from_str(&text)
    }

    /// Apply user rows on top of this lexicon; later rows override earlier ones.
    pub fn extend_from_str(mut self, text: &str) -> Result<Self, LexiconError> {
        let mut added_at = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let entry = parse_row(content).map_err(|message| LexiconError::Parse { line, message })?;
            if self.pronoun_sets.neutral.contains(&entry.source) {
                return Err(LexiconError::Protected { line, word: entry.source });
            }
            added_at.insert(entry.source.clone(), line);
            self.insert(entry);
        }
        // replacements must fall outside the lexicon's domain
        for entry in self.entries.values() {
            for alt in &entry.alternatives {
                if self.entries.contains_key(alt.as_str()) {
                    let line = added_at.get(alt.as_str()).or_else(|| added_at.get(&entry.source)).copied().unwrap_or(0);
                    return Err(LexiconError::ReplacementIsSource { line, word: alt.clone() });
                }
            }
        }
        Ok(self)
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::builtin(ReflexiveStyle::default())
    }
}

fn parse_row(content: &str) -> Result<LexiconEntry, String> {
    let (source, rhs) = content
        .split_once("->")
        .or_else(|| content.split_once('→'))
        .ok_or_else(|| "expected `source -> alternative`".to_string())?;
    let source = crate::text::fold(source.trim());
    if source.is_empty() || source.contains(char::is_whitespace) {
        return Err(format!("source `{source}` must be a single word"));
    }
    let (alts, role) = match rhs.rsplit_once(',') {
        Some((alts, role)) => (alts, role.trim().parse::<Role>()?),
        None => (rhs, Role::Noun),
    };
    let alternatives: Vec<String> =
        alts.split('|').map(|a| a.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()).collect();
    if alternatives.iter().any(|a| a.is_empty()) {
        return Err("empty alternative".to_string());
    }
    if role.is_pronoun() && alternatives.iter().any(|a| a.contains(' ')) {
        return Err(format!("pronoun entry `{source}` must map to single words"));
    }
    if alternatives.contains(&source) {
        return Err(format!("`{source}` maps to itself"));
    }
    let refs: Vec<&str> = alternatives.iter().map(String::as_str).collect();
    Ok(LexiconEntry::new(&source, &refs, role))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_pronouns() {
        let lex = Lexicon::default();
        let she = lex.lookup("she").unwrap();
        assert_eq!(she.alternatives, ["they"]);
        assert_eq!(she.role, Role::SubjectPronoun);
        assert!(!she.ambiguous);

        let her = lex.lookup("her").unwrap();
        assert_eq!(her.alternatives, ["their", "them"]);
        assert!(her.ambiguous);
        assert_eq!(lex.lookup("his").unwrap().alternatives, ["their", "theirs"]);
        for c in ["he's", "she's"] {
            assert_eq!(lex.lookup(c).unwrap().alternatives, ["they're", "they've"]);
        }
        assert_eq!(lex.lookup("himself").unwrap().alternatives, ["themselves"]);
        assert!(lex.lookup("pen").is_none());
    }

    #[test]
    fn reflexive_switch() {
        let lex = Lexicon::builtin(ReflexiveStyle::Themself);
        assert_eq!(lex.lookup("herself").unwrap().alternatives, ["themself"]);
    }

    #[test]
    fn appendix_nouns() {
        let lex = Lexicon::default();
        assert_eq!(lex.lookup("fireman").unwrap().alternatives, ["firefighter"]);
        assert_eq!(lex.lookup("laymen").unwrap().alternatives, ["lay people"]);
        for (source, target) in GENDERED_NOUNS {
            assert_eq!(lex.lookup(source).unwrap().alternatives, [target]);
        }
    }

    #[test]
    fn neutral_words_are_fixed_points() {
        let lex = Lexicon::default();
        for w in NEUTRAL {
            assert!(lex.lookup(w).is_none(), "{w}");
        }
    }

    #[test]
    fn ambiguity_flag_matches_alternatives() {
        for e in Lexicon::default().entries() {
            assert_eq!(e.ambiguous, e.alternatives.len() > 1);
            if e.role.is_pronoun() {
                assert!(e.alternatives.iter().all(|a| !a.contains(' ')));
            }
        }
    }

    #[test]
    fn user_rows_extend_and_override() {
        let lex = Lexicon::default()
            .extend_from_str("# extras\nspokeswoman→spokesperson,noun\nchairman -> chairperson , noun\n")
            .unwrap();
        assert_eq!(lex.lookup("spokeswoman").unwrap().alternatives, ["spokesperson"]);
        assert_eq!(lex.lookup("chairman").unwrap().alternatives, ["chairperson"]);
    }

    #[test]
    fn rejects_neutral_sources() {
        let err = Lexicon::default().extend_from_str("they→he").unwrap_err();
        assert!(matches!(err, LexiconError::Protected { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_file_is_identity() {
        let base = Lexicon::default();
        let n = base.len();
        assert_eq!(base.extend_from_str("").unwrap().len(), n);
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = Lexicon::default().extend_from_str("\n\nwoman man\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 3, .. }), "{err}");
        let err = Lexicon::default().extend_from_str("x -> y, verb").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 1, .. }));
        let err = Lexicon::default().extend_from_str("zir -> they them, object_pronoun").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { .. }));
    }

    #[test]
    fn replacement_cannot_be_a_source() {
        let err = Lexicon::default().extend_from_str("chair -> seat, noun").unwrap_err();
        assert!(matches!(err, LexiconError::ReplacementIsSource { .. }), "{err}");
    }

    #[test]
    fn pronoun_sets_classify() {
        let sets = PronounSets::default();
        assert_eq!(sets.classify("he'd"), GenderClass::Masculine);
        assert_eq!(sets.classify("hers"), GenderClass::Feminine);
        assert_eq!(sets.classify("their"), GenderClass::Neutral);
        assert_eq!(sets.classify("pen"), GenderClass::None);
    }
}
