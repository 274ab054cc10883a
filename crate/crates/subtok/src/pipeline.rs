//! Split → learn BPE on the training part → tokenize every part → write
//! token files, merge tables, vocabularies and a manifest.
//!
//! Configuration is TOML; relative paths resolve against the config file's
//! directory:
//!
//! ```toml
//! [input]
//! source = "ko.txt"        # or: tsv = "pairs.tsv"
//! target = "en.txt"
//!
//! [output]
//! dir = "out"
//!
//! [split]
//! ratio = [98, 1, 1]       # or: counts = [798000, 1000, 1000]
//! seed = 42
//!
//! [source]
//! scheme = "morpheme"
//! segmenter = "rule"
//!
//! [target]
//! scheme = "bpe"
//! num_merges = 32000
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use subtok_core::bpe::{count_words, learn_bpe};
use subtok_core::corpus::{
    split_corpus, vocab_stats, CorpusSplit, SplitError, SplitMode, SplitSpec, SHUFFLE_ALGORITHM,
};
use subtok_core::{BpeConfig, MarkerConfig, Scheme};
use thiserror::Error;

use crate::merges;
use crate::schemes::{LineError, LineTokenizer};
use crate::segmenter::{SegmenterSpec, DEFAULT_TIMEOUT};
use crate::text::{vocab_text, ParallelCorpus, ReadError};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const NORMALIZATION: &str = "trim, collapse whitespace runs to one space";
pub const SIDES: [&str; 2] = ["source", "target"];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("read: {0}")]
    Read(#[from] ReadError),
    #[error("split: {0}")]
    Split(#[from] SplitError),
    #[error("segmenter ({side}): {message}")]
    Segmenter { side: &'static str, message: String },
    #[error("tokenize ({side}): corpus line {line}: {source}")]
    Tokenize {
        side: &'static str,
        line: usize,
        source: LineError,
    },
    #[error("write {path}: {source}")]
    Write { path: String, source: io::Error },
}

impl PipelineError {
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config { .. })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    pub output: OutputConfig,
    pub split: SplitConfig,
    pub source: SideConfig,
    pub target: SideConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub source: Option<PathBuf>,
    pub target: Option<PathBuf>,
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub ratio: Option<[u64; 3]>,
    pub counts: Option<[usize; 3]>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideConfig {
    pub scheme: String,
    pub space_marker: Option<char>,
    pub strictness: Option<String>,
    pub segmenter: Option<String>,
    pub segmenter_timeout_ms: Option<u64>,
    pub num_merges: Option<usize>,
    pub min_pair_frequency: Option<u64>,
    pub pretokenize: Option<bool>,
    pub continuation_marker: Option<String>,
}

/// A side's scheme with its parameters filled in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideScheme {
    Alphabet(MarkerConfig),
    Morpheme {
        marker: MarkerConfig,
        segmenter: SegmenterSpec,
        timeout: Duration,
    },
    Bpe(BpeConfig),
}

impl SideScheme {
    pub fn scheme(&self) -> Scheme {
        match self {
            Self::Alphabet(_) => Scheme::Alphabet,
            Self::Morpheme { .. } => Scheme::Morpheme,
            Self::Bpe(_) => Scheme::Bpe,
        }
    }

    fn resolve(side: &SideConfig) -> Result<Self, String> {
        let scheme: Scheme = side.scheme.parse().map_err(|e| format!("{e}"))?;
        let mut stray = Vec::new();
        if scheme != Scheme::Bpe {
            let bpe_keys = [
                ("num_merges", side.num_merges.is_some()),
                ("min_pair_frequency", side.min_pair_frequency.is_some()),
                ("pretokenize", side.pretokenize.is_some()),
                ("continuation_marker", side.continuation_marker.is_some()),
            ];
            stray.extend(bpe_keys.iter().filter(|k| k.1).map(|k| k.0));
        }
        if scheme != Scheme::Morpheme {
            if side.segmenter.is_some() {
                stray.push("segmenter");
            }
            if side.segmenter_timeout_ms.is_some() {
                stray.push("segmenter_timeout_ms");
            }
        }
        if scheme == Scheme::Bpe {
            if side.space_marker.is_some() {
                stray.push("space_marker");
            }
            if side.strictness.is_some() {
                stray.push("strictness");
            }
        }
        if !stray.is_empty() {
            return Err(format!(
                "{} does not apply to scheme {scheme}",
                stray.join(", ")
            ));
        }

        let mut marker = MarkerConfig::default();
        if let Some(c) = side.space_marker {
            marker.space_marker = c;
        }
        if let Some(s) = &side.strictness {
            marker.strictness = s.parse().map_err(|e| format!("{e}"))?;
        }
        Ok(match scheme {
            Scheme::Alphabet => Self::Alphabet(marker),
            Scheme::Morpheme => Self::Morpheme {
                marker,
                segmenter: side
                    .segmenter
                    .as_deref()
                    .ok_or("scheme morpheme needs a segmenter")?
                    .parse()?,
                timeout: side
                    .segmenter_timeout_ms
                    .map_or(DEFAULT_TIMEOUT, Duration::from_millis),
            },
            Scheme::Bpe => {
                let mut cfg = BpeConfig::default();
                if let Some(n) = side.num_merges {
                    cfg.num_merges = n;
                }
                if let Some(f) = side.min_pair_frequency {
                    cfg.min_pair_frequency = f;
                }
                if let Some(p) = side.pretokenize {
                    cfg.pretokenize = p;
                }
                if let Some(m) = &side.continuation_marker {
                    cfg.continuation_marker = m.clone();
                }
                cfg.validate().map_err(|e| e.to_string())?;
                Self::Bpe(cfg)
            }
        })
    }

    fn describe(&self) -> String {
        match self {
            Self::Alphabet(m) => format!("scheme=alphabet {}", describe_marker(m)),
            Self::Morpheme {
                marker, segmenter, ..
            } => format!(
                "scheme=morpheme segmenter={segmenter} {}",
                describe_marker(marker)
            ),
            Self::Bpe(cfg) => format!(
                "scheme=bpe num_merges={} min_pair_frequency={} pretokenize={} continuation_marker={}",
                cfg.num_merges, cfg.min_pair_frequency, cfg.pretokenize, cfg.continuation_marker
            ),
        }
    }
}

fn describe_marker(m: &MarkerConfig) -> String {
    format!(
        "space_marker=U+{:04X} strictness={}",
        m.space_marker as u32, m.strictness
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Aligned { source: PathBuf, target: PathBuf },
    Tsv(PathBuf),
}

/// A validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config_path: PathBuf,
    pub config_sha256: String,
    /// Input paths as written in the config.
    pub input: Input,
    pub base_dir: PathBuf,
    pub output_dir: PathBuf,
    pub split: SplitSpec,
    pub sides: [SideScheme; 2],
}

impl Pipeline {
    /// `seed` overrides the config's seed; `default_seed` applies when
    /// neither is given.
    pub fn load(
        path: &Path,
        seed: Option<u64>,
        default_seed: Option<u64>,
    ) -> Result<Self, PipelineError> {
        let config_error = |message: String| PipelineError::Config {
            path: path.display().to_string(),
            message,
        };
        let bytes = fs::read(path).map_err(|e| config_error(e.to_string()))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| config_error(e.to_string()))?;
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| config_error(e.to_string()))?;

        let input = match (
            &config.input.source,
            &config.input.target,
            &config.input.tsv,
        ) {
            (Some(s), Some(t), None) => Input::Aligned {
                source: s.clone(),
                target: t.clone(),
            },
            (None, None, Some(tsv)) => Input::Tsv(tsv.clone()),
            _ => {
                return Err(config_error(
                    "[input] needs either source and target, or tsv".into(),
                ))
            }
        };
        let seed = seed
            .or(config.split.seed)
            .or(default_seed)
            .ok_or_else(|| config_error("no split seed given".into()))?;
        let mode = match (config.split.ratio, config.split.counts) {
            (Some([a, b, c]), None) => SplitMode::Ratio(a, b, c),
            (None, Some([a, b, c])) => SplitMode::Counts(a, b, c),
            _ => {
                return Err(config_error(
                    "[split] needs exactly one of ratio, counts".into(),
                ))
            }
        };
        if let SplitMode::Ratio(a, b, c) = mode {
            if a == 0 || b == 0 || c == 0 {
                return Err(config_error(SplitError::ZeroRatioPart(a, b, c).to_string()));
            }
        }
        let sides = [
            SideScheme::resolve(&config.source)
                .map_err(|m| config_error(format!("[source] {m}")))?,
            SideScheme::resolve(&config.target)
                .map_err(|m| config_error(format!("[target] {m}")))?,
        ];
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."))
            .to_path_buf();
        Ok(Self {
            config_path: path.to_path_buf(),
            config_sha256: sha256_hex(&bytes),
            input,
            output_dir: base_dir.join(&config.output.dir),
            base_dir,
            split: SplitSpec { mode, seed },
            sides,
        })
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    pub fn run(&self) -> Result<Manifest, PipelineError> {
        let mut stages = vec!["read".to_owned()];
        let (corpus, inputs) = match &self.input {
            Input::Aligned { source, target } => (
                ParallelCorpus::read_aligned(&self.resolve(source), &self.resolve(target))?,
                vec![("input.source", source), ("input.target", target)],
            ),
            Input::Tsv(tsv) => (
                ParallelCorpus::read_tsv(&self.resolve(tsv))?,
                vec![("input.tsv", tsv)],
            ),
        };

        stages.push("split".into());
        let split = split_corpus(corpus.len(), &self.split)?;

        let mut outputs = Outputs::new(&self.output_dir)?;
        for (name, ids) in split.parts() {
            let lines: Vec<String> = ids.iter().map(|i| (i + 1).to_string()).collect();
            outputs.write_lines(&format!("{name}.ids"), &lines)?;
        }

        let mut side_notes = Vec::new();
        for (s, side) in SIDES.iter().copied().enumerate() {
            let lines = if s == 0 {
                &corpus.source
            } else {
                &corpus.target
            };
            let (note, side_stages) =
                self.run_side(side, &self.sides[s], lines, &split, &mut outputs)?;
            side_notes.push(note);
            stages.extend(side_stages);
        }

        let mut m = Manifest::default();
        m.push(
            "config",
            self.config_path.file_name().map_or_else(
                || self.config_path.display().to_string(),
                |f| f.to_string_lossy().into_owned(),
            ),
        );
        m.push("config_sha256", &self.config_sha256);
        for (key, path) in inputs {
            let bytes = fs::read(self.resolve(path)).map_err(|source| ReadError::Io {
                path: path.display().to_string(),
                source,
            })?;
            m.push(
                key,
                format!("{} sha256={}", path.display(), sha256_hex(&bytes)),
            );
        }
        m.push("normalization", NORMALIZATION);
        m.push("corpus_lines", corpus.len());
        m.push("seed", self.split.seed);
        m.push("shuffle", SHUFFLE_ALGORITHM);
        m.push("split", self.split.mode);
        let [a, b, c] = split.sizes();
        m.push("split_sizes", format!("train={a} valid={b} test={c}"));
        m.push(
            "split_ids",
            "{split}.ids lists 1-based input line numbers in output line order",
        );
        m.push("stages", stages.join(" "));
        for (side, note) in SIDES.iter().zip(side_notes) {
            m.push(&format!("side.{side}"), note);
        }
        for (name, sha, lines) in &outputs.written {
            m.push(
                &format!("output.{name}"),
                format!("sha256={sha} lines={lines}"),
            );
        }
        outputs.write_raw(MANIFEST_FILE, m.to_string().as_bytes(), false)?;
        Ok(m)
    }

    fn run_side(
        &self,
        side: &'static str,
        scheme: &SideScheme,
        lines: &[String],
        split: &CorpusSplit,
        outputs: &mut Outputs,
    ) -> Result<(String, Vec<String>), PipelineError> {
        let mut stages = Vec::new();
        let mut note = scheme.describe();
        let mut tokenizer = match scheme {
            SideScheme::Alphabet(marker) => LineTokenizer::Alphabet(*marker),
            SideScheme::Morpheme {
                marker,
                segmenter,
                timeout,
            } => {
                let seg = segmenter
                    .build(Some(&self.base_dir), *timeout)
                    .map_err(|e| PipelineError::Segmenter {
                        side,
                        message: e.to_string(),
                    })?;
                LineTokenizer::Morpheme(*marker, seg)
            }
            SideScheme::Bpe(cfg) => {
                stages.push(format!("learn-bpe:{side}"));
                let train = split.train.iter().map(|&i| lines[i].as_str());
                let table = learn_bpe(&count_words(train, cfg.pretokenize), cfg);
                let _ = write!(note, " learned_merges={}", table.len());
                outputs.write_raw(
                    &format!("{side}.merges"),
                    merges::to_text(&table).as_bytes(),
                    true,
                )?;
                LineTokenizer::Bpe(table, cfg.clone())
            }
        };

        stages.push(format!("tokenize:{side}"));
        let mut train_tokens = Vec::new();
        for (name, ids) in split.parts() {
            let mut out = Vec::with_capacity(ids.len());
            for &i in ids {
                let ts =
                    tokenizer
                        .tokenize(&lines[i])
                        .map_err(|source| PipelineError::Tokenize {
                            side,
                            line: i + 1,
                            source,
                        })?;
                out.push(ts.to_string());
            }
            outputs.write_lines(&format!("{name}.{side}.tok"), &out)?;
            if name == "train" {
                train_tokens = out;
            }
        }
        if scheme.scheme() == Scheme::Morpheme {
            let _ = write!(
                note,
                " surface_preserving={}",
                tokenizer.surface_preserving()
            );
        }

        stages.push(format!("vocab:{side}"));
        let report = vocab_stats(&train_tokens);
        outputs.write_raw(
            &format!("{side}.vocab"),
            vocab_text(&report).as_bytes(),
            true,
        )?;
        Ok((note, stages))
    }
}

struct Outputs {
    dir: PathBuf,
    written: Vec<(String, String, usize)>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Write {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write_lines(&mut self, name: &str, lines: &[String]) -> Result<(), PipelineError> {
        let mut bytes = Vec::new();
        for line in lines {
            bytes.extend_from_slice(line.as_bytes());
            bytes.push(b'\n');
        }
        self.write_raw(name, &bytes, true)
    }

    fn write_raw(&mut self, name: &str, bytes: &[u8], record: bool) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| PipelineError::Write {
            path: path.display().to_string(),
            source,
        })?;
        if record {
            let lines = bytes.iter().filter(|&&b| b == b'\n').count();
            self.written
                .push((name.to_owned(), sha256_hex(bytes), lines));
        }
        Ok(())
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_owned(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Names of the files listed under `output.`, in write order.
    pub fn outputs(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter_map(|(k, _)| k.strip_prefix("output."))
    }
}

impl std::fmt::Display for Manifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "# subtok run manifest v1")?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
