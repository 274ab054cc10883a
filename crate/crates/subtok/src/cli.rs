//! The `subtok` command line.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error. Payload goes to the
//! output stream, diagnostics to stderr. `-` names a standard stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subtok_core::bpe::{count_words, learn_bpe, DEFAULT_CONTINUATION_MARKER};
use subtok_core::corpus::{split_corpus, vocab_stats, SplitSpec};
use subtok_core::metrics::bleu_lines;
use subtok_core::tokenize::{Strictness, DEFAULT_SPACE_MARKER};
use subtok_core::{BpeConfig, MarkerConfig, Scheme, Smoothing};

use crate::merges;
use crate::pipeline::{Pipeline, SIDES};
use crate::schemes::{detokenize_line, LineTokenizer};
use crate::segmenter::SegmenterSpec;
use crate::text::{self, vocab_text, Lines, ParallelCorpus};

pub const SEED_ENV: &str = "SUBTOK_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "subtok",
    version,
    about = "Korean/English tokenization lab: jamo, morpheme and BPE schemes, splits and BLEU"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize one sentence per line.
    Tokenize(TokenizeArgs),
    /// Undo `tokenize`, line by line.
    Detokenize(DetokenizeArgs),
    /// Learn a BPE merge table from text.
    LearnBpe(LearnBpeArgs),
    /// Split a parallel corpus into train/valid/test files.
    Split(SplitArgs),
    /// Corpus BLEU of a hypothesis file against one or more references.
    Bleu(BleuArgs),
    /// Token frequency table of a token file.
    Stats(StatsArgs),
    /// Run a full split/learn/tokenize pipeline from a TOML config.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Input file, `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct MarkerArgs {
    /// Character standing for a space in alphabet and morpheme output.
    #[arg(long, default_value_t = DEFAULT_SPACE_MARKER)]
    space_marker: char,
    /// What to do with input that already contains the space marker.
    #[arg(long, default_value_t = Strictness::Reject)]
    strictness: Strictness,
    /// Suffix on every non-final BPE subword.
    #[arg(long, default_value = DEFAULT_CONTINUATION_MARKER)]
    continuation_marker: String,
    /// Split words at letter/punctuation boundaries before BPE (lossy).
    #[arg(long)]
    pretok: bool,
}

impl MarkerArgs {
    fn marker(&self) -> MarkerConfig {
        MarkerConfig {
            space_marker: self.space_marker,
            strictness: self.strictness,
        }
    }

    fn bpe(&self) -> Result<BpeConfig, Failure> {
        let cfg = BpeConfig {
            continuation_marker: self.continuation_marker.clone(),
            pretokenize: self.pretok,
            ..BpeConfig::default()
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct TokenizeArgs {
    /// `alphabet`, `morpheme` or `bpe`
    #[arg(long)]
    scheme: Scheme,
    /// `rule`, `identity` or `cmd:<shell command>`; morpheme only.
    #[arg(long)]
    segmenter: Option<SegmenterSpec>,
    /// Seconds to wait for each external segmenter reply.
    #[arg(long, default_value_t = 10.0)]
    segmenter_timeout: f64,
    /// Merge-table file; bpe only.
    #[arg(long, value_name = "FILE")]
    merges: Option<PathBuf>,
    #[command(flatten)]
    markers: MarkerArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct DetokenizeArgs {
    /// `alphabet`, `morpheme` or `bpe`
    #[arg(long)]
    scheme: Scheme,
    #[command(flatten)]
    markers: MarkerArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct LearnBpeArgs {
    /// Number of merges to learn at most.
    #[arg(long = "merges", default_value_t = subtok_core::bpe::DEFAULT_NUM_MERGES)]
    num_merges: usize,
    /// Stop once the best pair occurs fewer times than this.
    #[arg(long, default_value_t = subtok_core::bpe::DEFAULT_MIN_PAIR_FREQUENCY)]
    min_freq: u64,
    /// Learn on letter/punctuation-split words, as `tokenize --pretok` applies.
    #[arg(long)]
    pretok: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Source-side sentences, one per line.
    #[arg(required_unless_present = "tsv", requires = "target")]
    source: Option<PathBuf>,
    /// Target-side sentences aligned with the source.
    target: Option<PathBuf>,
    /// A single `source<TAB>target` file instead of two files.
    #[arg(long, conflicts_with_all = ["source", "target"])]
    tsv: Option<PathBuf>,
    /// Part weights as train:valid:test.
    #[arg(long, value_parser = parse_ratio, conflicts_with = "counts")]
    ratio: Option<[u64; 3]>,
    /// Exact part sizes as train,valid,test.
    #[arg(long, value_parser = parse_counts)]
    counts: Option<[usize; 3]>,
    #[arg(long, env = SEED_ENV)]
    seed: u64,
    /// Output prefix; writes `<prefix>.<part>.<side>` for all six files.
    #[arg(long)]
    prefix: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Line,
    Text,
}

#[derive(Debug, Args)]
struct BleuArgs {
    /// Hypothesis file.
    hypothesis: PathBuf,
    /// Reference files, aligned with the hypotheses.
    #[arg(required = true)]
    references: Vec<PathBuf>,
    /// `none` or `eps:<value>`.
    #[arg(long, default_value = "none")]
    smoothing: Smoothing,
    /// Detokenize the hypothesis with this scheme before scoring.
    #[arg(long)]
    detok_scheme: Option<Scheme>,
    /// Detokenize the references with this scheme before scoring.
    #[arg(long)]
    ref_detok_scheme: Option<Scheme>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Line)]
    format: ReportFormat,
    #[command(flatten)]
    markers: MarkerArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Token file, `-` for stdin.
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// TOML run configuration
    config: PathBuf,
    /// Overrides the config's split seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_triple<T: std::str::FromStr>(s: &str, sep: char) -> Result<[T; 3], String> {
    let parts: Vec<&str> = s.split(sep).collect();
    let bad = || format!("expected three numbers separated by '{sep}', got {s:?}");
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.trim().parse::<T>().map_err(|_| bad())?);
    }
    out.try_into().map_err(|_| bad())
}

fn parse_ratio(s: &str) -> Result<[u64; 3], String> {
    parse_triple(s, ':')
}

fn parse_counts(s: &str) -> Result<[usize; 3], String> {
    parse_triple(s, ',')
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn data(e: impl std::fmt::Display) -> Self {
        Self::Data(e.to_string())
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Tokenize(a) => tokenize(a),
        Command::Detokenize(a) => detokenize(a),
        Command::LearnBpe(a) => learn(a),
        Command::Split(a) => split(a),
        Command::Bleu(a) => bleu(a),
        Command::Stats(a) => stats(a),
        Command::Pipeline(a) => pipeline(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("subtok: usage: {m}");
            2
        }
        Err(Failure::Data(m)) => {
            eprintln!("subtok: error: {m}");
            1
        }
    }
}

fn warn(message: &str) {
    eprintln!("subtok: warning: {message}");
}

fn shown(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

fn input_lines(path: &Path) -> Result<Lines<Box<dyn std::io::BufRead>>, Failure> {
    Ok(Lines::new(
        text::open(path).map_err(Failure::data)?,
        shown(path),
    ))
}

fn output(path: &Path) -> Result<Box<dyn Write>, Failure> {
    text::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_line(out: &mut dyn Write, line: &str) -> Result<(), Failure> {
    out.write_all(line.as_bytes())
        .and_then(|()| out.write_all(b"\n"))
        .map_err(|e| Failure::Data(format!("writing output: {e}")))
}

fn finish(mut out: Box<dyn Write>) -> Result<(), Failure> {
    out.flush()
        .map_err(|e| Failure::Data(format!("writing output: {e}")))
}

fn tokenize(a: TokenizeArgs) -> Result<(), Failure> {
    if a.segmenter.is_some() && a.scheme != Scheme::Morpheme {
        return Err(Failure::Usage(
            "--segmenter applies to --scheme morpheme only".into(),
        ));
    }
    if a.merges.is_some() && a.scheme != Scheme::Bpe {
        return Err(Failure::Usage(
            "--merges applies to --scheme bpe only".into(),
        ));
    }
    let mut tokenizer = match a.scheme {
        Scheme::Alphabet => LineTokenizer::Alphabet(a.markers.marker()),
        Scheme::Morpheme => {
            let spec = a
                .segmenter
                .ok_or_else(|| Failure::Usage("--scheme morpheme requires --segmenter".into()))?;
            if !(a.segmenter_timeout.is_finite() && a.segmenter_timeout > 0.0) {
                return Err(Failure::Usage(
                    "--segmenter-timeout must be positive".into(),
                ));
            }
            let seg = spec
                .build(None, Duration::from_secs_f64(a.segmenter_timeout))
                .map_err(Failure::data)?;
            LineTokenizer::Morpheme(a.markers.marker(), seg)
        }
        Scheme::Bpe => {
            let path = a
                .merges
                .ok_or_else(|| Failure::Usage("--scheme bpe requires --merges".into()))?;
            let table = merges::load(&path)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            LineTokenizer::Bpe(table, a.markers.bpe()?)
        }
    };
    let mut out = output(&a.io.output)?;
    for item in input_lines(&a.io.input)? {
        let (number, line) = item.map_err(Failure::data)?;
        let ts = tokenizer
            .tokenize(&line)
            .map_err(|e| Failure::Data(format!("{}: line {number}: {e}", shown(&a.io.input))))?;
        write_line(&mut out, &ts.to_string())?;
    }
    finish(out)?;
    if !tokenizer.surface_preserving() {
        warn("the segmenter changed some words; detokenized output will differ from the input");
    }
    Ok(())
}

fn detokenize(a: DetokenizeArgs) -> Result<(), Failure> {
    let marker = a.markers.marker();
    let bpe = a.markers.bpe()?;
    let mut out = output(&a.io.output)?;
    for item in input_lines(&a.io.input)? {
        let (number, line) = item.map_err(Failure::data)?;
        let d = detokenize_line(a.scheme, &line, &marker, &bpe);
        if d.dangling_marker {
            warn(&format!(
                "{}: line {number}: dropped a trailing continuation marker",
                shown(&a.io.input)
            ));
        }
        write_line(&mut out, &d.text)?;
    }
    finish(out)
}

fn learn(a: LearnBpeArgs) -> Result<(), Failure> {
    let lines = text::read_lines(&a.io.input).map_err(Failure::data)?;
    let cfg = BpeConfig {
        num_merges: a.num_merges,
        min_pair_frequency: a.min_freq,
        pretokenize: a.pretok,
        ..BpeConfig::default()
    };
    let table = learn_bpe(&count_words(&lines, cfg.pretokenize), &cfg);
    let mut out = output(&a.io.output)?;
    out.write_all(merges::to_text(&table).as_bytes())
        .map_err(|e| Failure::Data(format!("writing output: {e}")))?;
    finish(out)
}

fn split(a: SplitArgs) -> Result<(), Failure> {
    let corpus = match (&a.tsv, &a.source, &a.target) {
        (Some(tsv), _, _) => ParallelCorpus::read_tsv(tsv),
        (None, Some(s), Some(t)) => {
            if s.as_os_str() == "-" && t.as_os_str() == "-" {
                return Err(Failure::Usage("only one input can be stdin".into()));
            }
            ParallelCorpus::read_aligned(s, t)
        }
        _ => return Err(Failure::Usage("give SOURCE and TARGET, or --tsv".into())),
    }
    .map_err(Failure::data)?;
    let spec = match a.counts {
        Some([x, y, z]) => SplitSpec::counts(x, y, z, a.seed),
        None => {
            let [x, y, z] = a.ratio.unwrap_or([98, 1, 1]);
            SplitSpec::ratio(x, y, z, a.seed)
        }
    };
    let parts = split_corpus(corpus.len(), &spec).map_err(|e| match e {
        subtok_core::corpus::SplitError::ZeroRatioPart(..) => Failure::Usage(e.to_string()),
        _ => Failure::Data(e.to_string()),
    })?;
    for (name, ids) in parts.parts() {
        for (side, lines) in SIDES.iter().zip([&corpus.source, &corpus.target]) {
            let mut path = a.prefix.clone().into_os_string();
            path.push(format!(".{name}.{side}"));
            let path = PathBuf::from(path);
            let selected: Vec<&str> = ids.iter().map(|&i| lines[i].as_str()).collect();
            let out = output(&path)?;
            text::write_lines(out, &selected)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        }
    }
    let [x, y, z] = parts.sizes();
    eprintln!(
        "subtok: split {} lines into train={x} valid={y} test={z}",
        corpus.len()
    );
    Ok(())
}

fn bleu(a: BleuArgs) -> Result<(), Failure> {
    let stdin_inputs = std::iter::once(&a.hypothesis)
        .chain(&a.references)
        .filter(|p| p.as_os_str() == "-")
        .count();
    if stdin_inputs > 1 {
        return Err(Failure::Usage("only one input can be stdin".into()));
    }
    let marker = a.markers.marker();
    let bpe = a.markers.bpe()?;
    let read = |path: &Path, detok: Option<Scheme>| -> Result<Vec<String>, Failure> {
        let lines = text::read_lines(path).map_err(Failure::data)?;
        Ok(match detok {
            Some(scheme) => lines
                .iter()
                .map(|l| detokenize_line(scheme, l, &marker, &bpe).text)
                .collect(),
            None => lines,
        })
    };
    let hyps = read(&a.hypothesis, a.detok_scheme)?;
    let refs = a
        .references
        .iter()
        .map(|p| read(p, a.ref_detok_scheme))
        .collect::<Result<Vec<_>, _>>()?;
    let report = bleu_lines(&hyps, &refs, a.smoothing).map_err(Failure::data)?;
    match a.format {
        ReportFormat::Line => println!("{report}"),
        ReportFormat::Text => print!("{}", report.to_text()),
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<(), Failure> {
    let lines = text::read_lines(&a.input).map_err(Failure::data)?;
    let report = vocab_stats(&lines);
    let mut out = output(&a.output)?;
    out.write_all(vocab_text(&report).as_bytes())
        .map_err(|e| Failure::Data(format!("writing output: {e}")))?;
    finish(out)
}

fn pipeline(a: PipelineArgs) -> Result<(), Failure> {
    let default_seed = match std::env::var(SEED_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not a 64-bit seed")))?,
        ),
        Err(_) => None,
    };
    let p = Pipeline::load(&a.config, a.seed, default_seed).map_err(|e| {
        if e.is_config() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    })?;
    let manifest = p.run().map_err(Failure::data)?;
    print!("{manifest}");
    Ok(())
}
