//! Parallel corpus construction: rewritten, inflected and identity pairs.
//!
//! Each gendered line yields a rewritten pair. A seeded subset also yields
//! an inflected twin: the line with its pronouns swapped to the other gender,
//! paired with the same neutral target. Twins stay adjacent to their
//! rewritten pair. Identity pairs (neutral line to itself) are then added
//! until non-identity pairs make up `ratio` of the output, and all units are
//! shuffled together with a seeded RNG.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead, Write};

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{detect_gender_str, thread_pool, SentenceGender};
use crate::lexicon::{GenderClass, Lexicon};
use crate::rewriter::{RewriteTrace, Rewriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Rewritten,
    Identity,
    Inflected,
}

impl Provenance {
    pub const ALL: [Provenance; 3] = [Provenance::Rewritten, Provenance::Identity, Provenance::Inflected];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Rewritten => "rewritten",
            Provenance::Identity => "identity",
            Provenance::Inflected => "inflected",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Provenance::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| format!("unknown provenance `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub source: String,
    pub target: String,
    pub provenance: Provenance,
    pub source_gender: GenderClass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetOptions {
    pub seed: u64,
    /// Share of non-identity pairs in the output.
    pub ratio: f64,
    /// Share of successfully rewritten lines that also get an inflected twin.
    pub inflect_fraction: f64,
    pub jobs: usize,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions { seed: 0, ratio: 0.7, inflect_fraction: 0.5, jobs: 1 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("ratio must lie strictly between 0 and 1, got {0}")]
    BadRatio(f64),
    #[error("inflect fraction must lie in [0, 1], got {0}")]
    BadInflectFraction(f64),
    #[error("not enough neutral lines: {required} identity pairs needed, {available} available")]
    Shortfall { required: usize, available: usize },
    #[error("dev fraction must lie strictly between 0 and 0.5, got {0}")]
    BadDevFraction(f64),
    #[error("split of {total} pairs at fraction {fraction} leaves an empty side")]
    DegenerateSplit { total: usize, fraction: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipCounts {
    pub rewrite_failed: u64,
    pub inflect_failed: u64,
    pub neutral_rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub ratio: f64,
    pub inflect_fraction: f64,
    /// provenance -> source gender -> pairs
    pub counts: BTreeMap<String, BTreeMap<String, u64>>,
    pub total: u64,
    /// Observed share of non-identity pairs.
    pub achieved_ratio: f64,
    pub skipped: SkipCounts,
}

impl Manifest {
    pub fn count(&self, p: Provenance) -> u64 {
        self.counts.get(p.as_str()).map_or(0, |m| m.values().sum())
    }

    /// Manifest counts for `pairs`, as a recount would produce them.
    pub fn tally(pairs: &[ParallelPair]) -> BTreeMap<String, BTreeMap<String, u64>> {
        let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for p in Provenance::ALL {
            let genders = [GenderClass::Masculine, GenderClass::Feminine, GenderClass::None];
            counts.insert(p.as_str().into(), genders.iter().map(|g| (g.as_str().to_string(), 0)).collect());
        }
        for pair in pairs {
            *counts
                .get_mut(pair.provenance.as_str())
                .unwrap()
                .entry(pair.source_gender.as_str().to_string())
                .or_default() += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub pairs: Vec<ParallelPair>,
    pub manifest: Manifest,
}

fn gender_of(g: SentenceGender) -> GenderClass {
    g.as_class().unwrap_or(GenderClass::None)
}

pub fn build_dataset<G, N>(
    gendered: &[G],
    neutral: &[N],
    rewriter: &Rewriter<'_>,
    opts: &DatasetOptions,
) -> Result<Dataset, DatasetError>
where
    G: AsRef<str> + Sync,
    N: AsRef<str>,
{
    if !(opts.ratio > 0.0 && opts.ratio < 1.0) {
        return Err(DatasetError::BadRatio(opts.ratio));
    }
    if !(0.0..=1.0).contains(&opts.inflect_fraction) {
        return Err(DatasetError::BadInflectFraction(opts.inflect_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut skipped = SkipCounts::default();
    let lex: &Lexicon = rewriter.lexicon;

    let rewrite_one = |line: &G| rewriter.rewrite(line.as_ref());
    let traces: Vec<Result<RewriteTrace, _>> = match thread_pool(opts.jobs) {
        Some(pool) => pool.install(|| gendered.par_iter().map(rewrite_one).collect()),
        None => gendered.iter().map(rewrite_one).collect(),
    };
    let mut units: Vec<Vec<ParallelPair>> = Vec::new();
    for trace in traces {
        match trace {
            Ok(t) if detect_gender_str(&t.output, lex) == SentenceGender::None => {
                let gender = gender_of(detect_gender_str(&t.source, lex));
                units.push(vec![ParallelPair {
                    source: t.source,
                    target: t.output,
                    provenance: Provenance::Rewritten,
                    source_gender: gender,
                }]);
            }
            _ => {
                skipped.rewrite_failed += 1;
                log::debug!("skipping line that failed to rewrite");
            }
        }
    }

    let want = (opts.inflect_fraction * units.len() as f64).round() as usize;
    let mut chosen = index::sample(&mut rng, units.len(), want.min(units.len())).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let base = &units[i][0];
        let Some(target) = base.source_gender.opposite() else { continue };
        match rewriter.inflect(&base.source, target) {
            Ok(t) if t.output != base.source => {
                let pair = ParallelPair {
                    source: t.output,
                    target: base.target.clone(),
                    provenance: Provenance::Inflected,
                    source_gender: target,
                };
                units[i].push(pair);
            }
            _ => skipped.inflect_failed += 1,
        }
    }

    let non_identity: usize = units.iter().map(Vec::len).sum();
    let required = (non_identity as f64 * (1.0 - opts.ratio) / opts.ratio).round() as usize;
    let usable: Vec<&str> = neutral
        .iter()
        .map(AsRef::as_ref)
        .filter(|l| {
            let ok = !l.trim().is_empty() && detect_gender_str(l, lex) == SentenceGender::None;
            if !ok {
                skipped.neutral_rejected += 1;
            }
            ok
        })
        .collect();
    if usable.len() < required {
        return Err(DatasetError::Shortfall { required, available: usable.len() });
    }
    let mut picked = index::sample(&mut rng, usable.len(), required).into_vec();
    picked.sort_unstable();
    units.extend(picked.into_iter().map(|i| {
        vec![ParallelPair {
            source: usable[i].to_string(),
            target: usable[i].to_string(),
            provenance: Provenance::Identity,
            source_gender: GenderClass::None,
        }]
    }));
    units.shuffle(&mut rng);
    let pairs: Vec<ParallelPair> = units.into_iter().flatten().collect();

    let total = pairs.len() as u64;
    let manifest = Manifest {
        seed: opts.seed,
        ratio: opts.ratio,
        inflect_fraction: opts.inflect_fraction,
        counts: Manifest::tally(&pairs),
        total,
        achieved_ratio: if total == 0 { 0.0 } else { non_identity as f64 / total as f64 },
        skipped,
    };
    Ok(Dataset { pairs, manifest })
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// Write pairs as `source<TAB>target<TAB>provenance`, escaping `\`, tabs
/// and newlines inside fields.
pub fn write_pairs_tsv<W: Write>(pairs: &[ParallelPair], mut out: W) -> io::Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}\t{}", escape(&p.source), escape(&p.target), p.provenance.as_str())?;
    }
    out.flush()
}

#[derive(Debug, Error)]
pub enum TsvError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Read pairs written by [`write_pairs_tsv`]. Source gender is recomputed.
pub fn read_pairs_tsv<R: BufRead>(input: R, lex: &Lexicon) -> Result<Vec<ParallelPair>, TsvError> {
    let mut pairs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [source, target, provenance] = fields[..] else {
            return Err(TsvError::Parse { line: i + 1, message: format!("expected 3 fields, got {}", fields.len()) });
        };
        let provenance: Provenance = provenance.parse().map_err(|message| TsvError::Parse { line: i + 1, message })?;
        let source = unescape(source);
        let source_gender = match provenance {
            Provenance::Identity => GenderClass::None,
            _ => gender_of(detect_gender_str(&source, lex)),
        };
        pairs.push(ParallelPair { source, target: unescape(target), provenance, source_gender });
    }
    Ok(pairs)
}

/// Split pairs into train and dev sets.
///
/// Pairs sharing a source string always land on the same side. Within each
/// provenance, groups are shuffled and taken into dev until that stratum's
/// share is reached. Both outputs keep input order.
pub fn split_dev(
    pairs: &[ParallelPair],
    dev_fraction: f64,
    seed: u64,
) -> Result<(Vec<ParallelPair>, Vec<ParallelPair>), DatasetError> {
    if !(dev_fraction > 0.0 && dev_fraction < 0.5) {
        return Err(DatasetError::BadDevFraction(dev_fraction));
    }
    let mut group_of: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        let g = *group_of.entry(p.source.as_str()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let mut strata: BTreeMap<Provenance, Vec<usize>> = BTreeMap::new();
    for (g, members) in groups.iter().enumerate() {
        strata.entry(pairs[members[0]].provenance).or_default().push(g);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_dev = vec![false; pairs.len()];
    for (_, mut gs) in strata {
        let size: usize = gs.iter().map(|&g| groups[g].len()).sum();
        let target = (dev_fraction * size as f64).round() as usize;
        gs.shuffle(&mut rng);
        let mut taken = 0;
        for g in gs {
            if taken >= target {
                break;
            }
            if taken + groups[g].len() <= target {
                taken += groups[g].len();
                for &i in &groups[g] {
                    in_dev[i] = true;
                }
            }
        }
    }
    let (dev, train): (Vec<_>, Vec<_>) = pairs.iter().zip(&in_dev).partition(|(_, &d)| d);
    if dev.is_empty() || train.is_empty() {
        return Err(DatasetError::DegenerateSplit { total: pairs.len(), fraction: dev_fraction });
    }
    let unzip = |v: Vec<(&ParallelPair, &bool)>| v.into_iter().map(|(p, _)| p.clone()).collect();
    Ok((unzip(train), unzip(dev)))
}
