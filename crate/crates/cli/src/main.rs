mod config;

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use neutralize::dataset::{read_pairs_tsv, write_pairs_tsv, DatasetError, TsvError};
use neutralize::lexicon::LexiconError;
use neutralize::lm::LmError;
use neutralize::metrics::{evaluate_with, BleuOptions};
use neutralize::rewriter::{BatchError, BatchItem, BatchSummary, RewriteOptions};
use neutralize::syntax::VerbLexiconError;
use neutralize::{
    build_dataset, filter_corpus, split_dev, DatasetOptions, EvalRecord, GenderClass, Lexicon, NGramModel, Rewriter,
    VerbLexicon,
};
use serde_json::json;

use config::{read_config, Config, GlobalArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad input data or a validation failure.
    Usage(String),
    Io(String),
    /// Too many lines were rejected.
    Threshold(String),
}

impl CliError {
    pub fn io(path: &Path, e: io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Threshold(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Threshold(m) => f.write_str(m),
        }
    }
}

impl From<LmError> for CliError {
    fn from(e: LmError) -> Self {
        match e {
            LmError::Io(e) => CliError::Io(format!("language model: {e}")),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(format!("lexicon: {other}")),
        }
    }
}

impl From<VerbLexiconError> for CliError {
    fn from(e: VerbLexiconError) -> Self {
        match e {
            VerbLexiconError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(format!("verb lexicon: {other}")),
        }
    }
}

impl From<TsvError> for CliError {
    fn from(e: TsvError) -> Self {
        match e {
            TsvError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BatchError> for CliError {
    fn from(e: BatchError) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "neutralize", version, about = "Rewrite gendered English sentences with singular they")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a corpus into single-gender lines and lines with no gendered pronoun
    Filter(FilterArgs),
    /// Train a Kneser-Ney n-gram model on a corpus
    TrainLm(TrainLmArgs),
    /// Rewrite gendered lines into neutral form
    Rewrite(RewriteArgs),
    /// Swap the pronouns of each line to the other gender
    Inflect(InflectArgs),
    /// Build a parallel gendered-to-neutral training set
    BuildDataset(BuildDatasetArgs),
    /// Split a parallel set into train and dev parts
    SplitDev(SplitDevArgs),
    /// Score hypotheses against references
    Evaluate(EvaluateArgs),
    /// Print the effective configuration as JSON
    DumpConfig,
}

#[derive(Args)]
struct FilterArgs {
    /// Input corpus, one sentence per line [default: stdin]
    input: Option<PathBuf>,
    /// Where single-gender lines go [default: stdout]
    #[arg(long, value_name = "FILE")]
    gendered: Option<PathBuf>,
    /// Where lines without gendered pronouns go [default: discarded]
    #[arg(long, value_name = "FILE")]
    neutral: Option<PathBuf>,
    /// Only print the statistics
    #[arg(long)]
    stats_only: bool,
}

#[derive(Args)]
struct TrainLmArgs {
    /// Training corpus, one sentence per line [default: stdin]
    input: Option<PathBuf>,
    /// Model file to write [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    /// Input lines [default: stdin]
    input: Option<PathBuf>,
    /// Output lines; rejected lines are copied through unchanged [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// JSON-lines trace: one object per accepted line, plus one per rejection
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Sidecar for rejected lines [default: OUTPUT.rejected when OUTPUT is a file]
    #[arg(long, value_name = "FILE")]
    rejected: Option<PathBuf>,
    /// Exit with code 3 when the share of rejected lines is above this
    #[arg(long, value_name = "R")]
    max_reject_rate: Option<f64>,
}

#[derive(Args)]
struct RewriteArgs {
    #[command(flatten)]
    batch: BatchArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Masculine,
    Feminine,
}

#[derive(Args)]
struct InflectArgs {
    /// Gender to inflect into
    #[arg(long, value_enum)]
    to: Target,
    #[command(flatten)]
    batch: BatchArgs,
}

#[derive(Args)]
struct BuildDatasetArgs {
    /// Single-gender lines, as written by `filter --gendered`
    #[arg(long, value_name = "FILE")]
    gendered: PathBuf,
    /// Lines without gendered pronouns, as written by `filter --neutral`
    #[arg(long, value_name = "FILE")]
    neutral: PathBuf,
    /// Pairs as `source<TAB>target<TAB>provenance` [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Manifest JSON [default: OUTPUT.manifest.json, or stderr when writing to stdout]
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SplitDevArgs {
    /// Pairs written by `build-dataset` [default: stdin]
    input: Option<PathBuf>,
    /// Share of pairs that go to dev
    #[arg(long, default_value_t = 0.1, value_name = "R")]
    dev_fraction: f64,
    /// Train pairs output
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    /// Dev pairs output
    #[arg(long, value_name = "FILE")]
    dev: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordFormat {
    /// `source<TAB>reference<TAB>hypothesis<TAB>gender<TAB>domain`
    Tsv,
    /// One JSON object per line with the same five fields (`source_gender` for gender)
    Jsonl,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Records to score [default: stdin]; not used with --gold
    input: Option<PathBuf>,
    /// Record format
    #[arg(long, value_enum, default_value_t = RecordFormat::Tsv)]
    format: RecordFormat,
    /// Gold set as `source<TAB>reference<TAB>gender<TAB>domain`
    #[arg(long, value_name = "FILE", conflicts_with = "input")]
    gold: Option<PathBuf>,
    /// One hypothesis per gold row; without it the gold sources are rewritten with --model
    #[arg(long, value_name = "FILE", requires = "gold")]
    hypotheses: Option<PathBuf>,
    /// Add-one smoothing for BLEU precisions above unigrams
    #[arg(long)]
    smoothing: bool,
    /// Report file [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn is_stdio(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, CliError> {
    match path {
        Some(p) if !is_stdio(Some(p)) => Ok(Box::new(BufReader::new(File::open(p).map_err(|e| CliError::io(p, e))?))),
        _ => Ok(Box::new(io::stdin().lock())),
    }
}

fn create_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) if !is_stdio(Some(p)) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let text = String::from_utf8(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn write_json(out: &mut dyn Write, value: &impl serde::Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()
}

fn stdout_json(value: &impl serde::Serialize) -> Result<(), CliError> {
    write_json(&mut io::stdout().lock(), value).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn stderr_json(value: &impl serde::Serialize) {
    // a closed stderr is not worth failing over
    let _ = write_json(&mut io::stderr().lock(), value);
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

struct Resources {
    lexicon: Lexicon,
    verbs: VerbLexicon,
}

impl Resources {
    fn load(cfg: &Config) -> Result<Self, CliError> {
        let mut lexicon = Lexicon::builtin(cfg.reflexive_style);
        if let Some(p) = &cfg.lexicon_path {
            lexicon = Lexicon::load(p, lexicon)?;
        }
        let verbs = match &cfg.verb_lexicon_path {
            Some(p) => VerbLexicon::load(p)?,
            None => VerbLexicon::builtin(),
        };
        Ok(Resources { lexicon, verbs })
    }
}

fn load_model(cfg: &Config) -> Result<NGramModel, CliError> {
    let path = cfg
        .model_path
        .as_ref()
        .ok_or_else(|| CliError::Usage("no language model given; train one with `train-lm` and pass --model".into()))?;
    Ok(NGramModel::load(path)?)
}

fn rewriter<'a>(cfg: &Config, res: &'a Resources, lm: &'a NGramModel) -> Rewriter<'a> {
    Rewriter::new(&res.lexicon, &res.verbs, lm)
        .with_options(RewriteOptions { candidate_cap: cfg.candidate_cap, ..Default::default() })
}

fn validate(cfg: &Config) -> Result<(), CliError> {
    if cfg.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if cfg.candidate_cap == 0 {
        return Err(CliError::Usage("--candidate-cap must be at least 1".into()));
    }
    Ok(())
}

fn cmd_filter(cfg: &Config, args: &FilterArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let input = open_input(args.input.as_deref())?;
    let (gendered, neutral): (Box<dyn Write>, Box<dyn Write>) = if args.stats_only {
        (Box::new(io::sink()), Box::new(io::sink()))
    } else {
        let neutral: Box<dyn Write> = match &args.neutral {
            Some(p) => create_output(Some(p))?,
            None => Box::new(io::sink()),
        };
        (create_output(args.gendered.as_deref())?, neutral)
    };
    let stats =
        filter_corpus(input, &res.lexicon, gendered, neutral, cfg.jobs).map_err(|e| CliError::Io(e.to_string()))?;
    let report = json!({ "stats": stats, "masculine_share": stats.masculine_share() });
    if args.stats_only || !is_stdio(args.gendered.as_deref()) {
        stdout_json(&report)
    } else {
        stderr_json(&report);
        Ok(())
    }
}

fn cmd_train_lm(cfg: &Config, args: &TrainLmArgs) -> Result<(), CliError> {
    if cfg.ngram_order < 2 {
        return Err(CliError::Usage(format!("--order must be at least 2, got {}", cfg.ngram_order)));
    }
    let mut lines = Vec::new();
    let mut input = open_input(args.input.as_deref())?;
    let mut buf = String::new();
    loop {
        buf.clear();
        match input.read_line(&mut buf) {
            Ok(0) => break,
            Ok(_) => lines.push(buf.trim_end_matches(['\n', '\r']).to_string()),
            Err(e) => return Err(CliError::Io(format!("line {}: {e}", lines.len() + 1))),
        }
    }
    let model = NGramModel::train(&lines, cfg.ngram_order, cfg.unk_threshold)?;
    let mut out = create_output(args.output.as_deref())?;
    model.write_to(&mut out).and_then(|()| out.flush()).map_err(|e| CliError::Io(format!("writing model: {e}")))?;
    log::info!("trained order-{} model with {} words", model.order(), model.vocab_size());
    Ok(())
}

/// Lazily created sidecar, so a run without rejections leaves no file.
struct Sidecar {
    path: Option<PathBuf>,
    file: Option<BufWriter<File>>,
}

impl Sidecar {
    fn write_line(&mut self, line: &str) -> io::Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        if self.file.is_none() {
            self.file = Some(BufWriter::new(File::create(path)?));
        }
        writeln!(self.file.as_mut().unwrap(), "{line}")
    }

    fn finish(self) -> io::Result<()> {
        match self.file {
            Some(mut f) => f.flush(),
            None => Ok(()),
        }
    }
}

fn run_batch<F>(args: &BatchArgs, run: F) -> Result<(), CliError>
where
    F: FnOnce(Box<dyn BufRead>, &mut dyn FnMut(BatchItem) -> io::Result<()>) -> Result<BatchSummary, BatchError>,
{
    if let Some(r) = args.max_reject_rate {
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Usage(format!("--max-reject-rate must be in [0, 1], got {r}")));
        }
    }
    let input = open_input(args.input.as_deref())?;
    let mut out = create_output(args.output.as_deref())?;
    let mut trace = match &args.trace {
        Some(p) => Some(create_output(Some(p))?),
        None => None,
    };
    let sidecar_path = args.rejected.clone().or_else(|| {
        (!is_stdio(args.output.as_deref())).then(|| with_suffix(args.output.as_ref().unwrap(), ".rejected"))
    });
    let mut sidecar = Sidecar { path: sidecar_path, file: None };

    let mut sink = |item: BatchItem| -> io::Result<()> {
        match &item.result {
            Ok(t) => {
                writeln!(out, "{}", t.output)?;
                if let Some(tr) = trace.as_mut() {
                    let mut v = serde_json::to_value(t)?;
                    v["line"] = json!(item.line);
                    writeln!(tr, "{v}")?;
                }
            }
            Err(e) => {
                log::debug!("line {}: {e}", item.line);
                writeln!(out, "{}", item.source)?;
                sidecar.write_line(&item.source)?;
                if let Some(tr) = trace.as_mut() {
                    writeln!(tr, "{}", json!({ "line": item.line, "source": item.source, "rejected": e.to_string() }))?;
                }
            }
        }
        Ok(())
    };
    let summary = run(input, &mut sink)?;
    out.flush().map_err(|e| CliError::Io(format!("output: {e}")))?;
    if let Some(mut tr) = trace {
        tr.flush().map_err(|e| CliError::Io(format!("trace: {e}")))?;
    }
    sidecar.finish().map_err(|e| CliError::Io(format!("rejected sidecar: {e}")))?;
    stderr_json(&summary);

    if summary.total > 0 && summary.rewritten == 0 {
        return Err(CliError::Usage(format!("all {} lines were rejected", summary.total)));
    }
    if let Some(limit) = args.max_reject_rate {
        let rate = if summary.total == 0 { 0.0 } else { summary.rejected as f64 / summary.total as f64 };
        if rate > limit {
            return Err(CliError::Threshold(format!("rejected {rate:.4} of lines, above the limit of {limit}")));
        }
    }
    Ok(())
}

fn cmd_rewrite(cfg: &Config, args: &RewriteArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let lm = load_model(cfg)?;
    let rw = rewriter(cfg, &res, &lm);
    run_batch(&args.batch, |input, sink| rw.rewrite_batch(input, cfg.jobs, sink))
}

fn cmd_inflect(cfg: &Config, args: &InflectArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let lm = load_model(cfg)?;
    let rw = rewriter(cfg, &res, &lm);
    let target = match args.to {
        Target::Masculine => GenderClass::Masculine,
        Target::Feminine => GenderClass::Feminine,
    };
    run_batch(&args.batch, |input, sink| rw.inflect_batch(input, target, cfg.jobs, sink))
}

fn cmd_build_dataset(cfg: &Config, args: &BuildDatasetArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let lm = load_model(cfg)?;
    let rw = rewriter(cfg, &res, &lm);
    let gendered = read_lines(&args.gendered)?;
    let neutral = read_lines(&args.neutral)?;
    let opts =
        DatasetOptions { seed: cfg.seed, ratio: cfg.ratio, inflect_fraction: cfg.inflect_fraction, jobs: cfg.jobs };
    let ds = build_dataset(&gendered, &neutral, &rw, &opts)?;

    let mut out = create_output(args.output.as_deref())?;
    write_pairs_tsv(&ds.pairs, &mut out).map_err(|e| CliError::Io(format!("dataset: {e}")))?;
    let manifest_path = args.manifest.clone().or_else(|| {
        (!is_stdio(args.output.as_deref())).then(|| with_suffix(args.output.as_ref().unwrap(), ".manifest.json"))
    });
    match manifest_path {
        Some(p) => {
            let mut f = create_output(Some(&p))?;
            write_json(&mut f, &ds.manifest).map_err(|e| CliError::io(&p, e))?;
        }
        None => stderr_json(&ds.manifest),
    }
    Ok(())
}

fn cmd_split_dev(cfg: &Config, args: &SplitDevArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let pairs = read_pairs_tsv(open_input(args.input.as_deref())?, &res.lexicon)?;
    let (train, dev) = split_dev(&pairs, args.dev_fraction, cfg.seed)?;
    for (path, part) in [(&args.train, &train), (&args.dev, &dev)] {
        let mut out = create_output(Some(path))?;
        write_pairs_tsv(part, &mut out).map_err(|e| CliError::io(path, e))?;
    }
    stderr_json(&json!({ "train": train.len(), "dev": dev.len() }));
    Ok(())
}

fn parse_gender(field: &str, line: usize) -> Result<GenderClass, CliError> {
    field.parse().map_err(|e| CliError::Usage(format!("line {line}: {e}")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    open_input(path)?.read_to_string(&mut text).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(text)
}

fn parse_records(text: &str, format: RecordFormat) -> Result<Vec<EvalRecord>, CliError> {
    data_lines(text)
        .map(|(line, l)| match format {
            RecordFormat::Jsonl => serde_json::from_str(l).map_err(|e| CliError::Usage(format!("line {line}: {e}"))),
            RecordFormat::Tsv => {
                let f: Vec<&str> = l.split('\t').collect();
                let [source, reference, hypothesis, gender, domain] = f[..] else {
                    return Err(CliError::Usage(format!("line {line}: expected 5 fields, got {}", f.len())));
                };
                Ok(EvalRecord::new(source, reference, hypothesis, parse_gender(gender, line)?, domain))
            }
        })
        .collect()
}

fn gold_records(
    cfg: &Config,
    gold: &Path,
    hypotheses: Option<&Path>,
    res: &Resources,
) -> Result<Vec<EvalRecord>, CliError> {
    let text = read_text(Some(gold))?;
    let mut rows = Vec::new();
    for (line, l) in data_lines(&text) {
        let f: Vec<&str> = l.split('\t').collect();
        let [source, reference, gender, domain] = f[..] else {
            return Err(CliError::Usage(format!("{}:{line}: expected 4 fields, got {}", gold.display(), f.len())));
        };
        rows.push((source, reference, parse_gender(gender, line)?, domain));
    }
    let hyps: Vec<String> = match hypotheses {
        Some(p) => read_lines(p)?,
        None => {
            let lm = load_model(cfg)?;
            let rw = rewriter(cfg, res, &lm);
            rows.iter().map(|r| rw.rewrite(r.0).map(|t| t.output).unwrap_or_else(|_| r.0.to_string())).collect()
        }
    };
    if hyps.len() != rows.len() {
        return Err(CliError::Usage(format!("{} gold rows but {} hypotheses", rows.len(), hyps.len())));
    }
    Ok(rows.iter().zip(&hyps).map(|((s, r, g, d), h)| EvalRecord::new(s, r, h, *g, d)).collect())
}

fn cmd_evaluate(cfg: &Config, args: &EvaluateArgs) -> Result<(), CliError> {
    let res = Resources::load(cfg)?;
    let records = match &args.gold {
        Some(gold) => gold_records(cfg, gold, args.hypotheses.as_deref(), &res)?,
        None => parse_records(&read_text(args.input.as_deref())?, args.format)?,
    };
    if records.is_empty() {
        return Err(CliError::Usage("no records to evaluate".into()));
    }
    let report = evaluate_with(&records, &res.lexicon, &res.verbs, BleuOptions { smoothing: args.smoothing });
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let mut out = create_output(args.output.as_deref())?;
    write_json(&mut out, &report).map_err(|e| CliError::Io(format!("report: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.global.config {
        Some(p) => read_config(p)?,
        None => Config::default(),
    };
    let cfg = cli.global.resolve(base);
    validate(&cfg)?;
    match &cli.command {
        Command::Filter(a) => cmd_filter(&cfg, a),
        Command::TrainLm(a) => cmd_train_lm(&cfg, a),
        Command::Rewrite(a) => cmd_rewrite(&cfg, a),
        Command::Inflect(a) => cmd_inflect(&cfg, a),
        Command::BuildDataset(a) => cmd_build_dataset(&cfg, a),
        Command::SplitDev(a) => cmd_split_dev(&cfg, a),
        Command::Evaluate(a) => cmd_evaluate(&cfg, a),
        Command::DumpConfig => stdout_json(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
