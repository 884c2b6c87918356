//! Synthetic corpus generator and process helpers shared by the CLI tests.
//!
//! Reports are assembled from a fixed vocabulary whose sentence-to-finding
//! mapping is known, so the labels every study should receive are known
//! without running the pipeline.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::Duration;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Positive sentences covered by the tag store: (text, finding names as
/// tagged, canonical findings they imply).
pub const TAGGED_POSITIVE: &[(&str, &[&str], &[&str])] = &[
    ("Cardiomegaly.", &["cardiomegaly"], &["cardiomegaly"]),
    ("The heart is enlarged.", &["cardiomegaly"], &["cardiomegaly"]),
    ("Small left pleural effusion.", &["pleural effusion"], &["pleural effusion"]),
    ("Bilateral pleural effusions.", &["pleural effusion"], &["pleural effusion"]),
    ("Right basal atelectasis.", &["atelectasis"], &["atelectasis"]),
    ("Pacemaker in situ.", &["cardiac pacer"], &["cardiac pacer"]),
    (
        "Enlarged heart with bilateral effusions.",
        &["cardiomegaly", "pleural effusion"],
        &["cardiomegaly", "pleural effusion"],
    ),
    ("Sternotomy wires.", &["sternotomy wires"], &["sternotomy wires"]),
    ("Right lower lobe consolidation.", &["consolidation"], &["consolidation"]),
    ("Hyperinflated lungs.", &["hyperinflation"], &["hyperinflation"]),
    ("Endotracheal tube in place.", &["endotracheal tube"], &["tube"]),
    ("Right PICC line with tip in the SVC.", &["picc line"], &["central line"]),
    ("Calcified granuloma in the left upper lobe.", &["granuloma"], &["granuloma"]),
    ("Degenerative changes of the thoracic spine.", &["degenerative changes"], &["degenerative changes"]),
    ("Thoracic kyphosis.", &["kyphosis"], &["kyphosis"]),
    ("Elevated right hemidiaphragm.", &["elevated diaphragm"], &["elevated diaphragm"]),
    ("Old left rib fractures.", &["rib fracture"], &["rib fracture"]),
    ("Small pulmonary nodule measuring 4.5 mm.", &["nodule"], &["nodule"]),
    ("Unfolded aorta.", &["uncoiled aorta"], &["abnormal aorta"]),
];

/// Candidate sentences tagged as carrying no finding.
pub const TAGGED_OTHER: &[(&str, &str)] = &[
    ("Minor blunting of the costophrenic angle.", "negative"),
    ("Lines and tubes as described.", "neutral"),
];

/// Sentences the filter rules dispose of without a tag.
pub const FILLER: &[&str] = &[
    "No pneumothorax.",
    "Heart size normal.",
    "The lungs are clear.",
    "PA and lateral views.",
    "Comparison made with the previous film.",
    "No evidence of pneumonia.",
];

/// Candidate sentences missing from the tag store, with the findings they
/// really describe.
pub const UNTAGGED: &[(&str, &[&str])] = &[
    ("Subtle opacity at the left base.", &["consolidation"]),
    ("Possible small nodule in the right upper zone.", &["nodule"]),
    ("Questionable widening of the mediastinum.", &["mediastinal widening"]),
];

/// Sentences that exclude a report.
pub const EXCLUDING: &[&str] = &[
    "Interval improvement of the effusion.",
    "No significant change since the previous study.",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub patient_id: String,
    /// Passes the ingestion constraints.
    pub accepted: bool,
    pub excluded: bool,
    /// Every candidate sentence is tagged.
    pub covered: bool,
    /// Canonical names of the findings the report describes.
    pub findings: BTreeSet<String>,
    /// Findings carried by tagged sentences only.
    pub tagged_findings: BTreeSet<String>,
}

pub struct Corpus {
    pub reports: String,
    pub tags: String,
    pub order: Vec<String>,
    pub truth: BTreeMap<String, Truth>,
}

impl Corpus {
    pub fn accepted(&self) -> impl Iterator<Item = (&String, &Truth)> {
        self.order
            .iter()
            .map(|id| (id, &self.truth[id]))
            .filter(|(_, t)| t.accepted)
    }
}

pub fn tag_store() -> String {
    let mut out = String::new();
    for (text, tagged, _) in TAGGED_POSITIVE {
        let line = json!({"canonical_text": text, "category": "positive", "findings": tagged, "rater_id": "gen"});
        out.push_str(&line.to_string());
        out.push('\n');
    }
    for (text, category) in TAGGED_OTHER {
        let line = json!({"canonical_text": text, "category": category, "findings": [], "rater_id": "gen"});
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

pub fn generate(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = String::new();
    let mut order = Vec::with_capacity(n);
    let mut truth = BTreeMap::new();
    let n_patients = (n * 3 / 5).max(1);
    for i in 0..n {
        let study_id = format!("S{i:06}");
        let patient_id = format!("P{:06}", rng.random_range(0..n_patients));
        let has_pa = rng.random_bool(0.99);
        let age: u32 = if rng.random_bool(0.01) { rng.random_range(1..18) } else { rng.random_range(18..95) };

        let mut sentences: Vec<&str> = Vec::new();
        let mut findings = BTreeSet::new();
        let mut tagged_findings = BTreeSet::new();
        let n_pos = *[0usize, 1, 1, 2, 2, 3].choose(&mut rng).unwrap();
        for &(text, _, canon) in TAGGED_POSITIVE.choose_multiple(&mut rng, n_pos) {
            sentences.push(text);
            for f in canon {
                findings.insert(f.to_string());
                tagged_findings.insert(f.to_string());
            }
        }
        for _ in 0..rng.random_range(1..=3) {
            sentences.push(FILLER.choose(&mut rng).unwrap());
        }
        if rng.random_bool(0.3) {
            sentences.push(TAGGED_OTHER.choose(&mut rng).unwrap().0);
        }
        let covered = !rng.random_bool(0.05);
        if !covered {
            let (text, canon) = UNTAGGED.choose(&mut rng).unwrap();
            sentences.push(text);
            findings.extend(canon.iter().map(|f| f.to_string()));
        }
        let excluded = rng.random_bool(0.03);
        if excluded {
            sentences.push(EXCLUDING.choose(&mut rng).unwrap());
        }
        sentences.dedup();
        sentences.shuffle(&mut rng);

        let record = json!({
            "study_id": study_id,
            "patient_id": patient_id,
            "age_years": age,
            "report_text": sentences.join(" "),
            "has_pa": has_pa,
            "has_lateral": rng.random_bool(0.7),
        });
        reports.push_str(&record.to_string());
        reports.push('\n');
        truth.insert(
            study_id.clone(),
            Truth {
                patient_id,
                accepted: has_pa && age >= 18,
                excluded,
                covered,
                findings,
                tagged_findings,
            },
        );
        order.push(study_id);
    }
    Corpus { reports, tags: tag_store(), order, truth }
}

/// Ratings for one evaluation set per finding: up to `per_pool` report-positive
/// and report-negative accepted studies, three raters who each disagree with
/// the report on a tenth of the studies.
pub fn ratings_jsonl(corpus: &Corpus, findings: &[&str], per_pool: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for finding in findings {
        let usable: Vec<(&String, &Truth)> = corpus.accepted().filter(|(_, t)| !t.excluded).collect();
        let pos: Vec<_> = usable.iter().filter(|(_, t)| t.findings.contains(*finding)).take(per_pool).collect();
        let neg: Vec<_> = usable.iter().filter(|(_, t)| !t.findings.contains(*finding)).take(per_pool).collect();
        for (origin, group) in [("pos_pool", &pos), ("neg_pool", &neg)] {
            for (id, t) in group.iter() {
                let opinion = t.findings.contains(*finding);
                for rater in ["r1", "r2", "r3"] {
                    let label = if rng.random_bool(0.1) { !opinion } else { opinion };
                    let line = json!({
                        "set_id": format!("eval_{}", finding.replace(' ', "_")),
                        "finding": finding,
                        "study_id": id,
                        "rater_id": rater,
                        "label": u8::from(label),
                        "pool_origin": origin,
                        "report_opinion": u8::from(opinion),
                    });
                    out.push_str(&line.to_string());
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// Model confidences for every accepted study: high for the findings the
/// report describes, low otherwise, with noise.
pub fn predictions_csv(corpus: &Corpus, finding_names: &[String], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("study_id");
    for name in finding_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (id, t) in corpus.accepted() {
        out.push_str(id);
        for name in finding_names {
            let u: f64 = rng.random();
            let p = if t.findings.contains(name) { 0.55 + 0.45 * u } else { 0.6 * u };
            out.push_str(&format!(",{p:.4}"));
        }
        out.push('\n');
    }
    out
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cxrlabel")
}

pub fn cxrlabel(args: &[&str], cwd: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .env_remove("CXRLABEL_DATA_DIR")
        .output()
        .expect("spawn cxrlabel")
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Lines of a text artifact after its provenance line.
pub fn body_lines(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    assert!(first.starts_with("# cxrlabel "), "{}: {first}", path.display());
    lines.map(str::to_string).collect()
}

/// A `serve` child process and the address it listens on.
pub struct Server {
    pub child: Child,
    pub addr: String,
}

impl Server {
    pub fn spawn(args: &[&str], cwd: &Path) -> Server {
        let mut child = Command::new(bin())
            .args(args)
            .args(["serve", "--addr", "127.0.0.1:0"])
            .current_dir(cwd)
            .env_remove("CXRLABEL_DATA_DIR")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("spawn serve");
        let stdout = child.stdout.take().unwrap();
        let mut line = String::new();
        BufReader::new(stdout).read_line(&mut line).unwrap();
        let addr = line
            .trim()
            .strip_prefix("listening on http://")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Server { child, addr }
    }

    /// Kill the process without a graceful shutdown.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }

    pub fn get(&self, path: &str) -> (u16, String) {
        http(&self.addr, "GET", path, None)
    }

    pub fn post(&self, path: &str, body: &str) -> (u16, String) {
        http(&self.addr, "POST", path, Some(body))
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Minimal HTTP/1.1 client: one request per connection.
pub fn http(addr: &str, method: &str, path: &str, body: Option<&str>) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(30))).unwrap();
    let body = body.unwrap_or("");
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();
    let text = String::from_utf8(raw).unwrap();
    let (head, rest) = text.split_once("\r\n\r\n").expect("http response");
    let status: u16 = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    let chunked = head.to_ascii_lowercase().contains("transfer-encoding: chunked");
    (status, if chunked { dechunk(rest) } else { rest.to_string() })
}

fn dechunk(mut s: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = s.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        s = &rest[n + 2..];
    }
}
