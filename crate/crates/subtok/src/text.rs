//! Line-oriented text files: plain line files, aligned parallel corpora and
//! `source<TAB>target` files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use subtok_core::corpus::{normalize_line, VocabReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: line {line}: invalid UTF-8")]
    Utf8 { path: String, line: usize },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{source_path} has {source_lines} lines but {target_path} has {target_lines}")]
    Misaligned {
        source_path: String,
        source_lines: usize,
        target_path: String,
        target_lines: usize,
    },
}

impl ReadError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Utf8 { line, .. } | Self::Malformed { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Iterates the lines of a reader without their LF. A final line without
/// LF still counts; no line is produced for an empty input.
pub struct Lines<R> {
    reader: R,
    name: String,
    line: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> Lines<R> {
    pub fn new(reader: R, name: impl Into<String>) -> Self {
        Self {
            reader,
            name: name.into(),
            line: 0,
            buf: Vec::new(),
        }
    }
}

impl<R: BufRead> Iterator for Lines<R> {
    type Item = Result<(usize, String), ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.reader.read_until(b'\n', &mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line += 1;
                if self.buf.last() == Some(&b'\n') {
                    self.buf.pop();
                }
                Some(match String::from_utf8(std::mem::take(&mut self.buf)) {
                    Ok(s) => Ok((self.line, s)),
                    Err(_) => Err(ReadError::Utf8 {
                        path: self.name.clone(),
                        line: self.line,
                    }),
                })
            }
            Err(source) => Some(Err(ReadError::Io {
                path: self.name.clone(),
                source,
            })),
        }
    }
}

/// Opens `path` for reading; `-` is standard input.
pub fn open(path: &Path) -> Result<Box<dyn BufRead>, ReadError> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|source| ReadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Box::new(BufReader::new(file)))
}

/// Opens `path` for writing; `-` is standard output.
pub fn create(path: &Path) -> io::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::BufWriter::new(io::stdout())));
    }
    Ok(Box::new(io::BufWriter::new(File::create(path)?)))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>, ReadError> {
    let name = if path.as_os_str() == "-" {
        "<stdin>".to_owned()
    } else {
        path.display().to_string()
    };
    Lines::new(open(path)?, name)
        .map(|r| r.map(|(_, line)| line))
        .collect()
}

pub fn read_lines_from<R: Read>(reader: R, name: &str) -> Result<Vec<String>, ReadError> {
    Lines::new(BufReader::new(reader), name)
        .map(|r| r.map(|(_, line)| line))
        .collect()
}

/// Writes each line followed by LF.
pub fn write_lines<W: Write, S: AsRef<str>>(mut out: W, lines: &[S]) -> io::Result<()> {
    for line in lines {
        out.write_all(line.as_ref().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// `unique=<n> total=<t>`, then one `token<TAB>count` line per token.
pub fn vocab_text(report: &VocabReport) -> String {
    let mut out = format!(
        "unique={} total={}\n",
        report.unique_token_count(),
        report.total_tokens
    );
    for (token, count) in &report.frequencies {
        out.push_str(token);
        out.push('\t');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

/// Normalized aligned sentence pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub provenance: Vec<PathBuf>,
}

impl ParallelCorpus {
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn read_aligned(source: &Path, target: &Path) -> Result<Self, ReadError> {
        let src = read_lines(source)?;
        let tgt = read_lines(target)?;
        if src.len() != tgt.len() {
            return Err(ReadError::Misaligned {
                source_path: source.display().to_string(),
                source_lines: src.len(),
                target_path: target.display().to_string(),
                target_lines: tgt.len(),
            });
        }
        Ok(Self {
            source: src.iter().map(|l| normalize_line(l)).collect(),
            target: tgt.iter().map(|l| normalize_line(l)).collect(),
            provenance: vec![source.to_owned(), target.to_owned()],
        })
    }

    pub fn read_tsv(path: &Path) -> Result<Self, ReadError> {
        let name = path.display().to_string();
        let mut corpus = Self {
            source: Vec::new(),
            target: Vec::new(),
            provenance: vec![path.to_owned()],
        };
        for item in Lines::new(open(path)?, name.clone()) {
            let (line, text) = item?;
            let mut fields = text.split('\t');
            let (Some(src), Some(tgt), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(ReadError::Malformed {
                    path: name,
                    line,
                    message: "expected exactly one TAB".into(),
                });
            };
            corpus.source.push(normalize_line(src));
            corpus.target.push(normalize_line(tgt));
        }
        Ok(corpus)
    }
}
