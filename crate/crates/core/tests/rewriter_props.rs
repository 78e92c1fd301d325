mod common;

use std::sync::OnceLock;

use neutralize::filter::detect_gender_str;
use neutralize::rewriter::RewriteOptions;
use neutralize::{
    find_agreeing_verbs, tokenize, EditCategory, Lexicon, NGramModel, RewriteError, Rewriter, SentenceGender,
    VerbLexicon,
};
use proptest::prelude::*;

struct Fixture {
    lex: Lexicon,
    vlex: VerbLexicon,
    lm: NGramModel,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| Fixture { lex: Lexicon::default(), vlex: VerbLexicon::builtin(), lm: common::sample_lm() })
}

const MASC: [&str; 7] = ["he", "him", "his", "himself", "he's", "he'll", "He"];
const FEM: [&str; 8] = ["she", "her", "hers", "herself", "she's", "she'll", "She", "Her"];
const OTHER: [&str; 30] = [
    "the", "dog", "likes", "runs", "and", "to", "book", "gave", "a", "is", "was", "says", "friend", "walks", "home",
    ",", ".", "?", "that", "knows", "waiter", "fireman", "always", "with", "car", "them", "it", "does", "plays",
    "mother",
];

/// A single-gender word salad with at least one pronoun.
fn sentence() -> impl Strategy<Value = String> {
    (any::<bool>(), prop::collection::vec((any::<bool>(), 0usize..30, 0usize..8), 1..12)).prop_map(|(masc, words)| {
        let pool: &[&str] = if masc { &MASC } else { &FEM };
        let mut out: Vec<&str> = vec![pool[0]];
        for (pronoun, o, p) in words {
            out.push(if pronoun { pool[p % pool.len()] } else { OTHER[o] });
        }
        out.join(" ")
    })
}

/// Lowest-perplexity fill of the ambiguous slots, enumerated independently
/// of the rewriter. Ties keep the first candidate in lexicographic order.
fn brute_force(f: &Fixture, source: &str, fixed: &[(usize, String)]) -> (String, f64, usize) {
    let base = {
        let mut s = tokenize(source);
        for (i, after) in fixed {
            s.replace(*i, after);
        }
        s
    };
    let slots: Vec<(usize, Vec<String>)> = tokenize(source)
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind.is_lexical())
        .filter_map(|(i, t)| f.lex.lookup(&t.lower).filter(|e| e.ambiguous).map(|e| (i, e.alternatives.clone())))
        .collect();
    let mut candidates: Vec<Vec<usize>> = vec![vec![]];
    for (_, opts) in &slots {
        candidates = candidates
            .into_iter()
            .flat_map(|c| {
                (0..opts.len()).map(move |o| {
                    let mut c = c.clone();
                    c.push(o);
                    c
                })
            })
            .collect();
    }
    let mut best: Option<(String, f64)> = None;
    for c in &candidates {
        let mut s = base.clone();
        for ((i, opts), &o) in slots.iter().zip(c) {
            let surface = &tokenize(source).tokens[*i].surface;
            let upper = surface.chars().next().is_some_and(char::is_uppercase);
            let mut word = opts[o].clone();
            if upper {
                word = word[..1].to_uppercase() + &word[1..];
            }
            s.replace(*i, &word);
        }
        let p = f.lm.perplexity(&s).unwrap();
        if best.as_ref().is_none_or(|(_, b)| p < b - 1e-12) {
            best = Some((s.detokenize(), p));
        }
    }
    let (text, p) = best.unwrap();
    (text, p, candidates.len())
}

#[test]
fn ranking_matches_brute_force_on_known_cases() {
    let f = fixture();
    let rw = Rewriter::new(&f.lex, &f.vlex, &f.lm);
    for text in ["This is her pen", "This pen belongs to her", "I gave her her book.", "Her mother told her so."] {
        let t = rw.rewrite(text).unwrap();
        let fixed: Vec<_> = t.edits.iter().filter(|e| !e.ambiguous).map(|e| (e.position, e.after.clone())).collect();
        let (best, p, n) = brute_force(f, text, &fixed);
        assert_eq!(t.output, best, "{text}");
        assert_eq!(t.candidates_scored, n);
        assert!((t.chosen_perplexity.unwrap() - p).abs() < 1e-9);
    }
}

#[test]
fn greedy_beyond_cap_is_never_better_than_exhaustive() {
    let f = fixture();
    let text = "She told her that her friend saw her with her dog.";
    let full = Rewriter::new(&f.lex, &f.vlex, &f.lm).rewrite(text).unwrap();
    let greedy = Rewriter::new(&f.lex, &f.vlex, &f.lm)
        .with_options(RewriteOptions { candidate_cap: 1, ..Default::default() })
        .rewrite(text)
        .unwrap();
    assert_eq!(full.candidates_scored, 16);
    assert_eq!(greedy.candidates_scored, 8);
    assert!(greedy.chosen_perplexity.unwrap() >= full.chosen_perplexity.unwrap() - 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn output_is_neutral_and_stable(text in sentence()) {
        let f = fixture();
        let rw = Rewriter::new(&f.lex, &f.vlex, &f.lm);
        let t = rw.rewrite(&text).unwrap();
        prop_assert_eq!(detect_gender_str(&t.output, &f.lex), SentenceGender::None);
        let again = Rewriter::new(&f.lex, &f.vlex, &f.lm)
            .with_options(RewriteOptions { require_gendered: false, ..Default::default() });
        prop_assert_eq!(again.rewrite(&t.output).unwrap().output, t.output.clone());
        prop_assert_eq!(
            Rewriter::new(&f.lex, &f.vlex, &f.lm).rewrite(&t.output),
            Err(RewriteError::NotGendered)
        );
    }

    #[test]
    fn edits_are_minimal(text in sentence()) {
        let f = fixture();
        let t = Rewriter::new(&f.lex, &f.vlex, &f.lm).rewrite(&text).unwrap();
        prop_assert_eq!(t.replay(), t.output.clone());
        let source = tokenize(&text);
        let linked: Vec<usize> = (0..source.tokens.len())
            .flat_map(|i| find_agreeing_verbs(&source, i, &f.vlex).verb_indices)
            .collect();
        for e in &t.edits {
            prop_assert_eq!(&source.tokens[e.position].surface, &e.before);
            prop_assert_ne!(&e.before, &e.after);
            match e.category {
                EditCategory::Verb => prop_assert!(linked.contains(&e.position)),
                _ => prop_assert!(f.lex.lookup(&source.tokens[e.position].lower).is_some()),
            }
        }
        let mut positions: Vec<usize> = t.edits.iter().map(|e| e.position).collect();
        positions.dedup();
        prop_assert_eq!(positions.len(), t.edits.len());
    }

    #[test]
    fn exhaustive_ranking_matches_brute_force(text in sentence()) {
        let f = fixture();
        let t = Rewriter::new(&f.lex, &f.vlex, &f.lm).rewrite(&text).unwrap();
        let fixed: Vec<_> = t.edits.iter().filter(|e| !e.ambiguous).map(|e| (e.position, e.after.clone())).collect();
        let (best, p, n) = brute_force(f, &text, &fixed);
        if n > 1 && n <= 64 {
            prop_assert_eq!(&t.output, &best);
            prop_assert_eq!(t.candidates_scored, n);
            prop_assert!((t.chosen_perplexity.unwrap() - p).abs() < 1e-9);
        }
    }
}
