//! Rewrite gendered English sentences into gender-neutral form.

pub mod dataset;
pub mod filter;
pub mod lexicon;
pub mod lm;
pub mod metrics;
pub mod morph;
pub mod rewriter;
pub mod syntax;
pub mod text;

pub use dataset::{build_dataset, split_dev, Dataset, DatasetOptions, Manifest, ParallelPair, Provenance};
pub use filter::{detect_gender, filter_corpus, FilterStats, SentenceGender};
pub use lexicon::{GenderClass, Lexicon, LexiconEntry, Role};
pub use lm::NGramModel;
pub use metrics::{corpus_bleu, corpus_wer, evaluate, EvalRecord, EvalReport};
pub use morph::{inflect_pronoun, pluralize_verb, ConjugationRules};
pub use rewriter::{inflect_sentence, rewrite, Edit, EditCategory, RewriteError, RewriteTrace, Rewriter};
pub use syntax::{find_agreeing_verbs, is_finite_3sg, AgreementLink, VerbLexicon};
pub use text::{detokenize, tokenize, Token, TokenKind, TokenizedSentence};
