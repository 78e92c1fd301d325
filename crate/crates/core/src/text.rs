//! Lossless tokenization.
//!
//! Every token keeps its exact surface form and the whitespace that follows
//! it, so `detokenize(tokenize(s)) == s` for any input. Rewrites edit token
//! surfaces in place and never touch the recorded whitespace.
//!
//! ```text
//! "Does she know?"  ->  [Does]" " [she]" " [know]"" [?]""
//! ```

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

/// Coarse lexical class of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Contraction,
    Punctuation,
    Number,
    Symbol,
    Url,
    Emoji,
}

impl TokenKind {
    /// Kinds that may be rewritten. URLs, emoji and symbols are opaque.
    pub fn is_lexical(self) -> bool {
        matches!(self, TokenKind::Word | TokenKind::Contraction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Exact original characters.
    pub surface: String,
    /// Case-folded form with typographic apostrophes folded to `'`.
    pub lower: String,
    /// Verbatim whitespace following the token (possibly empty).
    pub trailing_ws: String,
    pub kind: TokenKind,
}

impl Token {
    fn new(surface: &str, kind: TokenKind) -> Self {
        Token { surface: surface.to_string(), lower: fold(surface), trailing_ws: String::new(), kind }
    }
}

/// A tokenized line together with the text it came from.
///
/// Whitespace before the first token lives in `leading_ws`; all other
/// whitespace is attached to the token it follows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedSentence {
    pub tokens: Vec<Token>,
    pub source_text: String,
    pub leading_ws: String,
}

impl TokenizedSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Replace the surface of token `index`, keeping its trailing whitespace.
    ///
    /// A multi-word replacement is stored as one surface with single spaces
    /// between its words.
    pub fn replace(&mut self, index: usize, surface: &str) {
        let token = &mut self.tokens[index];
        token.surface = surface.split_whitespace().collect::<Vec<_>>().join(" ");
        token.lower = fold(&token.surface);
    }

    /// Case-folded words as seen by the language model. Multi-word surfaces
    /// produced by a replacement contribute one word each.
    pub fn lm_words(&self) -> Vec<&str> {
        self.tokens.iter().flat_map(|t| t.lower.split(' ')).filter(|w| !w.is_empty()).collect()
    }

    pub fn detokenize(&self) -> String {
        detokenize(self)
    }
}

/// Case-fold a surface for lookup: lower-case and map `’` to `'`.
pub fn fold(surface: &str) -> String {
    surface.chars().map(|c| if c == '\u{2019}' { '\'' } else { c }).collect::<String>().to_lowercase()
}

pub fn tokenize(text: &str) -> TokenizedSentence {
    let mut tokens: Vec<Token> = Vec::new();
    let mut leading_ws = String::new();
    let mut pos = 0;

    while pos < text.len() {
        let rest = &text[pos..];
        let grapheme = rest.graphemes(true).next().expect("non-empty rest");
        let first = grapheme.chars().next().expect("non-empty grapheme");

        if first.is_whitespace() {
            let end = rest.char_indices().find(|(_, c)| !c.is_whitespace()).map(|(i, _)| i).unwrap_or(rest.len());
            match tokens.last_mut() {
                Some(t) => t.trailing_ws.push_str(&rest[..end]),
                None => leading_ws.push_str(&rest[..end]),
            }
            pos += end;
            continue;
        }

        if let Some(len) = url_len(rest) {
            tokens.push(Token::new(&rest[..len], TokenKind::Url));
            pos += len;
            continue;
        }

        if is_emoji_grapheme(grapheme) {
            tokens.push(Token::new(grapheme, TokenKind::Emoji));
            pos += grapheme.len();
            continue;
        }

        if (first == '@' || first == '#') && rest[1..].chars().next().is_some_and(is_word_char) {
            let len = 1 + rest[1..]
                .char_indices()
                .find(|&(_, c)| !(is_word_char(c) || c == '_'))
                .map(|(i, _)| i)
                .unwrap_or(rest.len() - 1);
            tokens.push(Token::new(&rest[..len], TokenKind::Symbol));
            pos += len;
            continue;
        }

        if is_word_char(first) {
            let len = word_len(rest);
            let surface = &rest[..len];
            tokens.push(Token::new(surface, classify_word(surface)));
            pos += len;
            continue;
        }

        if is_punctuation(first) {
            // ellipses and runs of sentence-final marks stay together
            let len = if matches!(first, '.' | '!' | '?') {
                rest.char_indices().find(|&(_, c)| !matches!(c, '.' | '!' | '?')).map(|(i, _)| i).unwrap_or(rest.len())
            } else {
                grapheme.len()
            };
            tokens.push(Token::new(&rest[..len], TokenKind::Punctuation));
            pos += len;
            continue;
        }

        tokens.push(Token::new(grapheme, TokenKind::Symbol));
        pos += grapheme.len();
    }

    TokenizedSentence { tokens, source_text: text.to_string(), leading_ws }
}

pub fn detokenize(s: &TokenizedSentence) -> String {
    let mut out = String::with_capacity(s.source_text.len() + 16);
    out.push_str(&s.leading_ws);
    for t in &s.tokens {
        out.push_str(&t.surface);
        out.push_str(&t.trailing_ws);
    }
    out
}

/// Carry the casing pattern of `template` over to `word`.
///
/// All-caps templates (two or more letters) upper-case the word, a leading
/// capital title-cases it, anything else leaves it as given.
pub fn match_case(template: &str, word: &str) -> String {
    let letters: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    let Some(&first) = letters.first() else {
        return word.to_string();
    };
    if letters.len() >= 2 && letters.iter().all(|c| !c.is_lowercase()) {
        return word.to_uppercase();
    }
    if first.is_uppercase() {
        let mut chars = word.chars();
        return match chars.next() {
            Some(c) => c.to_uppercase().chain(chars).collect(),
            None => String::new(),
        };
    }
    word.to_string()
}

/// Use the template's apostrophe style (`’` vs `'`) in the replacement.
pub fn match_apostrophe(template: &str, word: &str) -> String {
    if template.contains('\u{2019}') {
        word.replace('\'', "\u{2019}")
    } else {
        word.to_string()
    }
}

const CLITICS: [&str; 5] = ["s", "re", "ve", "ll", "d"];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_joiner(c: char) -> bool {
    is_apostrophe(c) || c == '-' || c == '_'
}

fn word_len(rest: &str) -> usize {
    let chars: Vec<(usize, char)> = rest.char_indices().collect();
    let numeric = chars[0].1.is_ascii_digit();
    let mut end = 0;
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        // combining marks belong to the preceding letter
        let continues = is_word_char(c) || is_combining(c);
        if continues {
            end = at + c.len_utf8();
            i += 1;
            continue;
        }
        let next_is_word = chars.get(i + 1).is_some_and(|&(_, n)| is_word_char(n));
        let prev_is_word = i > 0 && is_word_char(chars[i - 1].1);
        if prev_is_word && next_is_word {
            if is_joiner(c) {
                i += 1;
                continue;
            }
            // 3.14, 1,000
            let digits_around = chars[i - 1].1.is_ascii_digit() && chars[i + 1].1.is_ascii_digit() && numeric;
            if (c == '.' || c == ',') && digits_around {
                i += 1;
                continue;
            }
        }
        break;
    }
    end
}

fn classify_word(surface: &str) -> TokenKind {
    if surface.chars().next().is_some_and(|c| c.is_ascii_digit())
        && surface.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
    {
        return TokenKind::Number;
    }
    let apostrophes: Vec<usize> = surface.char_indices().filter(|&(_, c)| is_apostrophe(c)).map(|(i, _)| i).collect();
    if let [at] = apostrophes[..] {
        let head = &surface[..at];
        let tail = fold(&surface[at + surface[at..].chars().next().unwrap().len_utf8()..]);
        let negation = tail == "t" && head.to_lowercase().ends_with('n') && head.len() > 1;
        if !head.is_empty() && (negation || CLITICS.contains(&tail.as_str())) {
            return TokenKind::Contraction;
        }
    }
    TokenKind::Word
}

fn is_combining(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

fn is_punctuation(c: char) -> bool {
    matches!(
        c,
        '.' | ','
            | '!'
            | '?'
            | ';'
            | ':'
            | '\''
            | '"'
            | '('
            | ')'
            | '['
            | ']'
            | '{'
            | '}'
            | '-'
            | '\u{2018}'
            | '\u{2019}'
            | '\u{201C}'
            | '\u{201D}'
            | '\u{00AB}'
            | '\u{00BB}'
            | '\u{2026}'
            | '\u{2013}'
            | '\u{2014}'
            | '\u{00A1}'
            | '\u{00BF}'
            | '\u{3001}'
            | '\u{3002}'
            | '\u{FF0C}'
            | '\u{FF01}'
            | '\u{FF1F}'
    )
}

fn is_emoji_char(c: char) -> bool {
    matches!(
        c as u32,
        0x1F000..=0x1FAFF
            | 0x2600..=0x27BF
            | 0x231A..=0x231B
            | 0x2328
            | 0x23CF
            | 0x23E9..=0x23FA
            | 0x2B05..=0x2B07
            | 0x2B1B..=0x2B1C
            | 0x2B50
            | 0x2B55
            | 0x3030
            | 0x303D
            | 0x3297
            | 0x3299
    )
}

fn is_emoji_grapheme(g: &str) -> bool {
    let mut chars = g.chars();
    let first = chars.next().unwrap_or(' ');
    is_emoji_char(first) || g.contains('\u{20E3}') || (g.contains('\u{FE0F}') && !first.is_alphabetic())
}

/// Length in bytes of a URL starting at the beginning of `rest`, if any.
fn url_len(rest: &str) -> Option<usize> {
    let scheme_end = rest.find("://");
    let has_scheme = match scheme_end {
        Some(i) if i > 0 => {
            let scheme = &rest[..i];
            scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '.' | '-'))
        }
        _ => false,
    };
    let www = rest.len() > 4 && rest.get(..4).is_some_and(|p| p.eq_ignore_ascii_case("www."));
    if !has_scheme && !www {
        return None;
    }
    let mut end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let min = if has_scheme { scheme_end.unwrap() + 3 } else { 4 };
    while end > min {
        let c = rest[..end].chars().next_back().unwrap();
        if matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | ')' | ']' | '}' | '"' | '\'' | '\u{201D}' | '\u{2019}') {
            end -= c.len_utf8();
        } else {
            break;
        }
    }
    if end <= min {
        return None;
    }
    Some(end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &TokenizedSentence) -> Vec<&str> {
        s.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn splits_words_and_punctuation() {
        let s = tokenize("Does she know?");
        assert_eq!(surfaces(&s), ["Does", "she", "know", "?"]);
        assert_eq!(s.tokens[0].trailing_ws, " ");
        assert_eq!(s.tokens[2].trailing_ws, "");
        assert_eq!(s.detokenize(), "Does she know?");
    }

    #[test]
    fn contractions_stay_whole() {
        let s = tokenize("she's");
        assert_eq!(s.len(), 1);
        assert_eq!(s.tokens[0].kind, TokenKind::Contraction);
        for w in ["doesn't", "they're", "he'll", "She’d", "we've", "can't"] {
            let s = tokenize(w);
            assert_eq!(s.len(), 1, "{w}");
            assert_eq!(s.tokens[0].kind, TokenKind::Contraction, "{w}");
        }
        assert_eq!(tokenize("rock'n'roll").tokens[0].kind, TokenKind::Word);
        assert_eq!(tokenize("She’s").tokens[0].lower, "she's");
    }

    #[test]
    fn urls_are_opaque() {
        let s = tokenize("cost him his job https://t.co/x");
        assert_eq!(surfaces(&s), ["cost", "him", "his", "job", "https://t.co/x"]);
        assert_eq!(s.tokens[4].kind, TokenKind::Url);

        let s = tokenize("see www.example.com/he.");
        assert_eq!(surfaces(&s), ["see", "www.example.com/he", "."]);
    }

    #[test]
    fn emoji_handles_and_numbers() {
        let s = tokenize("@jo 3.14 costs $5 👍🏽😂 #blessed");
        let kinds: Vec<TokenKind> = s.tokens.iter().map(|t| t.kind).collect();
        assert_eq!(surfaces(&s), ["@jo", "3.14", "costs", "$", "5", "👍🏽", "😂", "#blessed"]);
        assert_eq!(
            kinds,
            [
                TokenKind::Symbol,
                TokenKind::Number,
                TokenKind::Word,
                TokenKind::Symbol,
                TokenKind::Number,
                TokenKind::Emoji,
                TokenKind::Emoji,
                TokenKind::Symbol
            ]
        );
    }

    #[test]
    fn hyphenated_words_are_one_token() {
        assert_eq!(surfaces(&tokenize("a well-known fact")), ["a", "well-known", "fact"]);
    }

    #[test]
    fn replacement_keeps_whitespace() {
        let mut s = tokenize("a policeman ran");
        s.replace(1, "police officer");
        assert_eq!(s.detokenize(), "a police officer ran");

        let mut s = tokenize("tab\tseparated");
        s.replace(0, "TAB");
        assert_eq!(s.detokenize(), "TAB\tseparated");
    }

    #[test]
    fn leading_whitespace_round_trips() {
        for text in ["  \thello", "   ", "", "\u{00A0}x\u{3000}"] {
            assert_eq!(tokenize(text).detokenize(), text);
        }
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn match_case_examples() {
        assert_eq!(match_case("His", "their"), "Their");
        assert_eq!(match_case("his", "their"), "their");
        assert_eq!(match_case("HIS", "their"), "THEIR");
        assert_eq!(match_case("Policeman", "police officer"), "Police officer");
        assert_eq!(match_case("I", "x"), "X");
    }

    #[test]
    fn apostrophe_style_follows_template() {
        assert_eq!(match_apostrophe("she’s", "they're"), "they’re");
        assert_eq!(match_apostrophe("she's", "they're"), "they're");
    }
}
