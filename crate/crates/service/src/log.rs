//! Append-only JSONL event log.

use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use cxrlabel_core::events::TagEvent;

use crate::ServiceError;

pub struct EventLog {
    path: PathBuf,
    file: File,
}

impl EventLog {
    /// Open (creating if needed) and replay the log.
    ///
    /// A final line without a newline that does not parse is the remnant of
    /// an interrupted append; it is cut off. Any other unparsable line, or
    /// a non-increasing event id, is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Vec<TagEvent>), ServiceError> {
        let path = path.as_ref().to_path_buf();
        let corrupt = |line: usize, detail: String| {
            ServiceError::Log(format!("{} line {line}: {detail}", path.display()))
        };
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(ServiceError::Log(format!("{}: {e}", path.display()))),
        };

        let mut events: Vec<TagEvent> = Vec::new();
        let mut good_len = 0usize;
        let mut pending_newline = false;
        let mut offset = 0usize;
        for (i, chunk) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
            let terminated = chunk.ends_with(b"\n");
            offset += chunk.len();
            let body = std::str::from_utf8(chunk).map(str::trim);
            let parsed = match body {
                Ok("") => {
                    good_len = offset;
                    continue;
                }
                Ok(text) => serde_json::from_str::<TagEvent>(text).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            match parsed {
                Ok(ev) => {
                    if let Some(prev) = events.last() {
                        if ev.event_id <= prev.event_id {
                            return Err(corrupt(i + 1, format!("event id {} not increasing", ev.event_id)));
                        }
                    }
                    events.push(ev);
                    good_len = offset;
                    pending_newline = !terminated;
                }
                Err(_) if !terminated => break,
                Err(detail) => return Err(corrupt(i + 1, detail)),
            }
        }

        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .write(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| ServiceError::Log(format!("{}: {e}", path.display())))?;
        let io = |e: std::io::Error| ServiceError::Log(format!("{}: {e}", path.display()));
        if good_len < bytes.len() {
            tracing::warn!(path = %path.display(), dropped = bytes.len() - good_len, "discarding truncated log tail");
            file.set_len(good_len as u64).map_err(io)?;
        }
        file.seek(SeekFrom::End(0)).map_err(io)?;
        if pending_newline {
            file.write_all(b"\n").map_err(io)?;
        }
        Ok((EventLog { path, file }, events))
    }

    /// Write one event and flush it to disk before returning.
    pub fn append(&mut self, event: &TagEvent) -> Result<(), ServiceError> {
        let mut line = serde_json::to_vec(event).expect("events serialize");
        line.push(b'\n');
        let io = |e: std::io::Error| ServiceError::Log(format!("{}: {e}", self.path.display()));
        self.file.write_all(&line).map_err(io)?;
        self.file.sync_data().map_err(io)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
