//! Segmenter selection and the external line-protocol segmenter.
//!
//! The child process reads one word per line on stdin and answers each with
//! the word's morphemes joined by TABs on one stdout line.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use subtok_core::tokenize::{IdentitySegmenter, RuleSegmenter, Segmenter, SegmenterFailure};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

/// `rule`, `identity`, or `cmd:<shell command>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmenterSpec {
    Rule,
    Identity,
    Command(String),
}

impl FromStr for SegmenterSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule" => Ok(Self::Rule),
            "identity" => Ok(Self::Identity),
            _ => match s.strip_prefix("cmd:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(Self::Command(cmd.to_owned())),
                _ => Err(format!(
                    "unknown segmenter {s:?} (expected rule, identity or cmd:<command>)"
                )),
            },
        }
    }
}

impl fmt::Display for SegmenterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rule => f.write_str("rule"),
            Self::Identity => f.write_str("identity"),
            Self::Command(cmd) => write!(f, "cmd:{cmd}"),
        }
    }
}

impl SegmenterSpec {
    /// External commands run under `sh -c` in `dir` (or the current
    /// directory).
    pub fn build(
        &self,
        dir: Option<&Path>,
        timeout: Duration,
    ) -> Result<Box<dyn Segmenter + Send>, SegmenterFailure> {
        Ok(match self {
            Self::Rule => Box::new(RuleSegmenter),
            Self::Identity => Box::new(IdentitySegmenter),
            Self::Command(cmd) => Box::new(ExternalSegmenter::spawn(cmd, dir, timeout)?),
        })
    }
}

pub struct ExternalSegmenter {
    name: String,
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<std::io::Result<String>>,
    timeout: Duration,
    // A request went unanswered; later replies can no longer be matched
    // to their words.
    desynced: bool,
    non_preserving: u64,
}

impl ExternalSegmenter {
    pub fn spawn(
        command: &str,
        dir: Option<&Path>,
        timeout: Duration,
    ) -> Result<Self, SegmenterFailure> {
        let name = format!("cmd:{command}");
        let mut cmd = Command::new("sh");
        cmd.arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit());
        if let Some(dir) = dir {
            cmd.current_dir(dir);
        }
        let mut child = cmd.spawn().map_err(|e| SegmenterFailure::Protocol {
            name: name.clone(),
            message: format!("cannot start: {e}"),
        })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, replies) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        Ok(Self {
            name,
            child,
            stdin,
            replies,
            timeout,
            desynced: false,
            non_preserving: 0,
        })
    }

    /// Words whose morphemes did not concatenate back to the word.
    pub fn non_preserving_words(&self) -> u64 {
        self.non_preserving
    }

    fn failure(&self, message: impl Into<String>) -> SegmenterFailure {
        SegmenterFailure::Protocol {
            name: self.name.clone(),
            message: message.into(),
        }
    }

    fn exited(&mut self) -> SegmenterFailure {
        self.desynced = true;
        match self.child.try_wait() {
            Ok(Some(status)) => self.failure(format!("process exited ({status})")),
            _ => self.failure("process closed its output"),
        }
    }

    fn request(&mut self, word: &str) -> Result<String, SegmenterFailure> {
        if self.desynced {
            return Err(self.failure("unusable after an earlier protocol failure"));
        }
        let Some(stdin) = self.stdin.as_mut() else {
            return Err(self.exited());
        };
        let sent = stdin
            .write_all(word.as_bytes())
            .and_then(|()| stdin.write_all(b"\n"))
            .and_then(|()| stdin.flush());
        if sent.is_err() {
            return Err(self.exited());
        }
        match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(mut line)) => {
                if line.ends_with('\n') {
                    line.pop();
                    if line.ends_with('\r') {
                        line.pop();
                    }
                }
                Ok(line)
            }
            Ok(Err(e)) => {
                self.desynced = true;
                Err(self.failure(format!("reading reply: {e}")))
            }
            Err(RecvTimeoutError::Timeout) => {
                self.desynced = true;
                Err(self.failure(format!(
                    "no reply for {word:?} within {} ms",
                    self.timeout.as_millis()
                )))
            }
            Err(RecvTimeoutError::Disconnected) => Err(self.exited()),
        }
    }
}

impl Segmenter for ExternalSegmenter {
    fn name(&self) -> &str {
        &self.name
    }

    fn surface_preserving(&self) -> bool {
        self.non_preserving == 0
    }

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        if word.contains(['\n', '\r', '\t']) {
            return Err(self.failure(format!("word {word:?} cannot be sent over the protocol")));
        }
        let reply = self.request(word)?;
        if reply.is_empty() {
            return Err(self.failure(format!("empty reply for {word:?}")));
        }
        let morphemes: Vec<String> = reply.split('\t').map(str::to_owned).collect();
        if morphemes.concat() != word {
            self.non_preserving += 1;
        }
        Ok(morphemes)
    }
}

impl Drop for ExternalSegmenter {
    fn drop(&mut self) {
        // Closing stdin lets a well-behaved child exit on its own.
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
