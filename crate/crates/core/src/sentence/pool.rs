use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{normalize, segment, CanonicalSentence, SplitterConfig};
use crate::error::{Error, Result};
use crate::ingest::ReportCorpus;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub text: CanonicalSentence,
    /// Number of distinct reports containing the sentence.
    pub report_count: u64,
    /// Total occurrences, counting repeats within a report.
    pub occurrence_count: u64,
}

/// Unique canonical sentences ranked by descending report count, ties broken
/// by ascending text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentencePool {
    entries: Vec<PoolEntry>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolRow {
    canonical_text: String,
    report_count: u64,
    occurrence_count: u64,
    rank: usize,
}

impl SentencePool {
    fn from_counts(counts: HashMap<CanonicalSentence, (u64, u64)>) -> Self {
        let mut entries: Vec<PoolEntry> = counts
            .into_iter()
            .map(|(text, (report_count, occurrence_count))| PoolEntry {
                text,
                report_count,
                occurrence_count,
            })
            .collect();
        entries.sort_by(|a, b| b.report_count.cmp(&a.report_count).then_with(|| a.text.cmp(&b.text)));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.text.as_str().to_string(), i))
            .collect();
        SentencePool { entries, index }
    }

    /// Entries in rank order.
    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, text: &str) -> Option<&PoolEntry> {
        self.index.get(text).map(|&i| &self.entries[i])
    }

    /// 1-based rank.
    pub fn rank(&self, text: &str) -> Option<usize> {
        self.index.get(text).map(|&i| i + 1)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::NonNumeric)
            .from_writer(out);
        for (i, e) in self.entries.iter().enumerate() {
            w.serialize(PoolRow {
                canonical_text: e.text.as_str().to_string(),
                report_count: e.report_count,
                occurrence_count: e.occurrence_count,
                rank: i + 1,
            })
            .map_err(|e| Error::malformed("pool csv", None, e))?;
        }
        w.flush().map_err(|e| Error::io("<pool csv>", e))?;
        Ok(())
    }

    /// Read a pool export. Texts are re-canonicalized and the stored ranks
    /// must agree with the ranking recomputed from the counts.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let mut counts = HashMap::new();
        let mut ranks = Vec::new();
        for (i, row) in r.deserialize::<PoolRow>().enumerate() {
            let line = Some(i + 2);
            let row = row.map_err(|e| Error::malformed("pool csv", line, e))?;
            let text = normalize(&row.canonical_text)
                .ok_or_else(|| Error::malformed("pool csv", line, "degenerate sentence"))?;
            if text.as_str() != row.canonical_text {
                return Err(Error::malformed("pool csv", line, "text is not canonical"));
            }
            if row.report_count > row.occurrence_count {
                return Err(Error::malformed(
                    "pool csv",
                    line,
                    "report_count exceeds occurrence_count",
                ));
            }
            ranks.push((row.canonical_text, row.rank));
            if counts.insert(text, (row.report_count, row.occurrence_count)).is_some() {
                return Err(Error::malformed("pool csv", line, "duplicate sentence"));
            }
        }
        let pool = Self::from_counts(counts);
        for (text, rank) in ranks {
            if pool.rank(&text) != Some(rank) {
                return Err(Error::malformed(
                    "pool csv",
                    None,
                    format!("rank {rank} of {text:?} disagrees with counts"),
                ));
            }
        }
        Ok(pool)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }
}

/// Canonical sentences of one report, degenerate ones dropped.
pub fn canonical_sentences(text: &str, splitter: &SplitterConfig) -> Vec<CanonicalSentence> {
    segment(text, splitter)
        .into_iter()
        .filter_map(|s| normalize(s.raw_text))
        .collect()
}

pub fn build_sentence_pool(corpus: &ReportCorpus, splitter: &SplitterConfig) -> SentencePool {
    let counts = corpus
        .studies
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<CanonicalSentence, (u64, u64)>, study| {
            let mut in_report = HashSet::new();
            for s in canonical_sentences(&study.report_text, splitter) {
                let entry = acc.entry(s.clone()).or_insert((0, 0));
                entry.1 += 1;
                if in_report.insert(s) {
                    entry.0 += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, (r, o)) in b {
                let e = a.entry(k).or_insert((0, 0));
                e.0 += r;
                e.1 += o;
            }
            a
        });
    SentencePool::from_counts(counts)
}
