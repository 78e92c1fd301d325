use neutralize::text::fold;
use neutralize::{detokenize, tokenize};
use proptest::prelude::*;

fn noisy() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-zA-Z]{1,8}",
        Just("don't".to_string()),
        Just("she’s".to_string()),
        Just("https://example.com/a?b=1".to_string()),
        Just("@user_1".to_string()),
        Just("#tag".to_string()),
        Just("😂".to_string()),
        Just("👩‍👩‍👧".to_string()),
        "[0-9]{1,4}([.,][0-9]{1,3})?",
        "[.,!?;:\"'()-]{1,3}",
        "[ \t\u{a0}]{1,3}",
    ];
    prop::collection::vec(piece, 0..20).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_text_round_trips(text in any::<String>()) {
        prop_assert_eq!(detokenize(&tokenize(&text)), text);
    }

    #[test]
    fn noisy_text_round_trips(text in noisy()) {
        let s = tokenize(&text);
        prop_assert_eq!(detokenize(&s), text.clone());
        prop_assert!(s.leading_ws.chars().all(char::is_whitespace));
        for t in &s.tokens {
            prop_assert!(!t.surface.is_empty());
            prop_assert!(!t.surface.chars().any(char::is_whitespace), "{:?}", t.surface);
            prop_assert!(t.trailing_ws.chars().all(char::is_whitespace));
            prop_assert_eq!(&t.lower, &fold(&t.surface));
        }
    }

    #[test]
    fn replace_only_touches_one_token(text in noisy(), word in "[a-z]{1,6}( [a-z]{1,6})?") {
        let s = tokenize(&text);
        prop_assume!(!s.tokens.is_empty());
        let i = s.tokens.len() / 2;
        let mut r = s.clone();
        r.replace(i, &word);
        let expected: String = s.leading_ws.clone()
            + &s.tokens.iter().enumerate().map(|(j, t)| {
                let surface = if j == i { word.as_str() } else { t.surface.as_str() };
                format!("{surface}{}", t.trailing_ws)
            }).collect::<String>();
        prop_assert_eq!(detokenize(&r), expected);
        prop_assert_eq!(r.tokens.len(), s.tokens.len());
    }
}
