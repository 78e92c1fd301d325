use std::path::{Path, PathBuf};

use clap::Args;
use neutralize::lexicon::ReflexiveStyle;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Settings shared by every subcommand. Values come from `--config`, then
/// flags on the command line override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lexicon_path: Option<PathBuf>,
    pub verb_lexicon_path: Option<PathBuf>,
    pub model_path: Option<PathBuf>,
    pub reflexive_style: ReflexiveStyle,
    pub ngram_order: usize,
    pub unk_threshold: usize,
    pub seed: u64,
    pub ratio: f64,
    pub inflect_fraction: f64,
    pub candidate_cap: usize,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            lexicon_path: None,
            verb_lexicon_path: None,
            model_path: None,
            reflexive_style: ReflexiveStyle::default(),
            ngram_order: 3,
            unk_threshold: 2,
            seed: 0,
            ratio: 0.7,
            inflect_fraction: 0.5,
            candidate_cap: neutralize::rewriter::DEFAULT_CANDIDATE_CAP,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Extra lexicon rows (`source -> alt1|alt2, role`) layered over the built-in table
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Verb table (`base,third_singular,past`) replacing the built-in one
    #[arg(long, global = true, value_name = "FILE")]
    pub verb_lexicon: Option<PathBuf>,
    /// Language model file written by `train-lm`
    #[arg(long, global = true, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Neutral reflexive: themselves or themself
    #[arg(long, global = true, value_name = "STYLE")]
    pub reflexive: Option<ReflexiveStyle>,
    /// N-gram order for `train-lm` (at least 2) [default: 3]
    #[arg(long, global = true, value_name = "N")]
    pub order: Option<usize>,
    /// Words seen fewer times than this become <unk> [default: 2]
    #[arg(long, global = true, value_name = "N")]
    pub unk_threshold: Option<usize>,
    /// Random seed for dataset building and splitting [default: 0]
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Share of non-identity pairs in a built dataset [default: 0.7]
    #[arg(long, global = true, value_name = "R")]
    pub ratio: Option<f64>,
    /// Share of rewritten lines that also get an inflected twin [default: 0.5]
    #[arg(long, global = true, value_name = "R")]
    pub inflect_fraction: Option<f64>,
    /// Most candidates scored exhaustively before falling back to greedy [default: 64]
    #[arg(long, global = true, value_name = "N")]
    pub candidate_cap: Option<usize>,
    /// Worker threads for per-line work; output order is kept [default: 1]
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

impl GlobalArgs {
    pub fn resolve(&self, base: Config) -> Config {
        Config {
            lexicon_path: self.lexicon.clone().or(base.lexicon_path),
            verb_lexicon_path: self.verb_lexicon.clone().or(base.verb_lexicon_path),
            model_path: self.model.clone().or(base.model_path),
            reflexive_style: self.reflexive.unwrap_or(base.reflexive_style),
            ngram_order: self.order.unwrap_or(base.ngram_order),
            unk_threshold: self.unk_threshold.unwrap_or(base.unk_threshold),
            seed: self.seed.unwrap_or(base.seed),
            ratio: self.ratio.unwrap_or(base.ratio),
            inflect_fraction: self.inflect_fraction.unwrap_or(base.inflect_fraction),
            candidate_cap: self.candidate_cap.unwrap_or(base.candidate_cap),
            jobs: self.jobs.unwrap_or(base.jobs),
        }
    }
}

pub fn read_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
