use neutralize::metrics::{align, corpus_bleu_with, edit_distance, wer_counts, BleuOptions, Op};
use neutralize::{corpus_bleu, corpus_wer, evaluate, EvalRecord, GenderClass, Lexicon, VerbLexicon};
use proptest::prelude::*;

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "they", "their", "run", "."]), 0..10)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn record(r: &[String], h: &[String], gender: GenderClass) -> EvalRecord {
    EvalRecord::new(&r.join(" "), &r.join(" "), &h.join(" "), gender, "news")
}

/// Plain Levenshtein by full table, no backtrace.
fn reference_distance(a: &[String], b: &[String]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn edit_distance_is_a_metric(a in words(), b in words(), c in words()) {
        let d = |x: &[String], y: &[String]| edit_distance(x, y);
        prop_assert_eq!(d(&a, &b), reference_distance(&a, &b));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b) == 0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn alignment_cost_equals_distance(a in words(), b in words()) {
        let ops = align(&a, &b);
        let cost = ops.iter().filter(|o| !matches!(o, Op::Match(..))).count();
        prop_assert_eq!(cost, edit_distance(&a, &b));
        let used_ref = ops.iter().filter(|o| !matches!(o, Op::Ins(_))).count();
        let used_hyp = ops.iter().filter(|o| !matches!(o, Op::Del(_))).count();
        prop_assert_eq!(used_ref, a.len());
        prop_assert_eq!(used_hyp, b.len());
    }

    #[test]
    fn bleu_is_bounded_and_order_free(pairs in prop::collection::vec((words(), words()), 1..6), smoothing in any::<bool>()) {
        prop_assume!(pairs.iter().any(|(r, _)| !r.is_empty()));
        let recs: Vec<_> = pairs.iter().map(|(r, h)| record(r, h, GenderClass::Masculine)).collect();
        let opts = BleuOptions { smoothing };
        let score = corpus_bleu_with(&recs, opts).unwrap();
        prop_assert!((0.0..=100.0 + 1e-9).contains(&score));
        let mut reversed = recs.clone();
        reversed.reverse();
        prop_assert!((corpus_bleu_with(&reversed, opts).unwrap() - score).abs() < 1e-9);
        let wer = corpus_wer(&recs).unwrap();
        prop_assert!((corpus_wer(&reversed).unwrap() - wer).abs() < 1e-9);
    }

    #[test]
    fn identical_corpus_is_perfect(refs in prop::collection::vec(words(), 1..6)) {
        prop_assume!(refs.iter().any(|r| !r.is_empty()));
        let recs: Vec<_> = refs.iter().map(|r| record(r, r, GenderClass::Feminine)).collect();
        prop_assert_eq!(corpus_bleu(&recs).unwrap(), 100.0);
        prop_assert_eq!(corpus_wer(&recs).unwrap(), 0.0);
    }

    #[test]
    fn micro_wer_pools_counts(pairs in prop::collection::vec((words(), words()), 1..6)) {
        prop_assume!(pairs.iter().any(|(r, _)| !r.is_empty()));
        let recs: Vec<_> = pairs.iter().map(|(r, h)| record(r, h, GenderClass::Masculine)).collect();
        let (edits, n) = pairs.iter().fold((0, 0), |(e, n), (r, h)| {
            let (de, dn) = wer_counts(&r.join(" "), &h.join(" "));
            (e + de, n + dn)
        });
        prop_assert!((corpus_wer(&recs).unwrap() - 100.0 * edits as f64 / n as f64).abs() < 1e-9);
    }
}

#[test]
fn report_splits_by_gender_and_domain() {
    let (lex, vlex) = (Lexicon::default(), VerbLexicon::builtin());
    let recs = vec![
        EvalRecord::new("He runs.", "They run.", "They run.", GenderClass::Masculine, "news"),
        EvalRecord::new("She runs.", "They run.", "They runs.", GenderClass::Feminine, "jokes"),
    ];
    let rep = evaluate(&recs, &lex, &vlex);
    assert_eq!(rep.per_gender["masculine"].wer, 0.0);
    assert!((rep.per_gender["feminine"].wer - 100.0 / 3.0).abs() < 1e-9);
    assert_eq!(rep.per_domain.len(), 2);
    assert_eq!(rep.mistake_counts["verb"], 1);
    assert!(rep.warnings.is_empty());
}
