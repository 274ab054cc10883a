//! The merge-table file: a `#merges v1` header line, then one
//! `<left> <right>` line per merge in learned order. LF only, trailing
//! newline required.

use std::fs;
use std::io;
use std::path::Path;

use subtok_core::MergeTable;
use thiserror::Error;

pub const HEADER: &str = "#merges v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FormatError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self::Line {
            line,
            message: message.into(),
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Line { line, .. } => Some(*line),
            Self::Io(_) => None,
        }
    }
}

pub fn to_text(table: &MergeTable) -> String {
    let mut out = String::with_capacity(HEADER.len() + 1 + table.len() * 8);
    out.push_str(HEADER);
    out.push('\n');
    for (left, right) in table.iter() {
        out.push_str(left);
        out.push(' ');
        out.push_str(right);
        out.push('\n');
    }
    out
}

pub fn parse(bytes: &[u8]) -> Result<MergeTable, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        FormatError::at(line, "invalid UTF-8")
    })?;
    let Some(body) = text.strip_suffix('\n') else {
        let line = text.lines().count().max(1);
        return Err(FormatError::at(line, "missing trailing newline"));
    };
    let mut lines = body.split('\n');
    if lines.next() != Some(HEADER) {
        return Err(FormatError::at(1, format!("expected header {HEADER:?}")));
    }
    let mut table = MergeTable::new();
    for (i, line) in lines.enumerate() {
        let number = i + 2;
        if line.contains('\r') {
            return Err(FormatError::at(
                number,
                "carriage return (CRLF line ending?)",
            ));
        }
        let mut parts = line.split(' ');
        let (Some(left), Some(right), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(FormatError::at(
                number,
                "expected exactly two symbols separated by one space",
            ));
        };
        table
            .push(left.to_owned(), right.to_owned())
            .map_err(|e| FormatError::at(number, e.to_string()))?;
    }
    Ok(table)
}

pub fn save(path: &Path, table: &MergeTable) -> io::Result<()> {
    fs::write(path, to_text(table))
}

pub fn load(path: &Path) -> Result<MergeTable, FormatError> {
    parse(&fs::read(path)?)
}
