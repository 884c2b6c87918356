use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use cxrlabel_core::classify::{Classifier, FilterRuleSet, FindingId, Ontology, ReportAnalysis, TagStore};
use cxrlabel_core::eval::{
    evaluate_matrix, load_ratings, roc_auc, select_threshold, write_eval_report, Predictions, RatingMatrix, Reference,
    Resampling,
};
use cxrlabel_core::hash::stable_hash;
use cxrlabel_core::ingest::{corpus_stats, load_reports, ReportCorpus};
use cxrlabel_core::labels::{
    build_broad_test_set, build_label_sets, estimate_label_noise, load_labels_csv, partition_by_patient,
    select_validation_subset, write_labels_csv, write_noise_csv, LabeledStudy, Partition, Policy, Selection,
};
use cxrlabel_core::sentence::{build_sentence_pool, coverage_curve, SentencePool, SplitterConfig};
use cxrlabel_service::{App, EvalSets, ServiceConfig};
use serde_json::{json, Value};

use crate::artifact::Run;
use crate::config::{RunConfig, ThresholdReference};
use crate::error::CliError;

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Input keys a subcommand reads: those it cannot run without, and those it
/// uses when set.
struct Needs {
    required: &'static [&'static str],
    optional: &'static [&'static str],
}

fn input_path<'a>(config: &'a RunConfig, key: &str) -> Option<&'a PathBuf> {
    let i = &config.inputs;
    match key {
        "reports" => i.reports.as_ref(),
        "splitter" => i.splitter.as_ref(),
        "rules" => i.rules.as_ref(),
        "ontology" => i.ontology.as_ref(),
        "tags" => i.tags.as_ref(),
        "pool" => i.pool.as_ref(),
        "ratings" => i.ratings.as_ref(),
        "predictions" => i.predictions.as_ref(),
        "labels" => i.labels.as_ref(),
        "eval_sets" => i.eval_sets.as_ref(),
        "event_log" => i.event_log.as_ref(),
        "image_dir" => i.image_dir.as_ref(),
        other => unreachable!("unknown input key {other}"),
    }
}

/// Check that every input the subcommand needs is configured and present
/// before any work starts.
fn preflight(config: &RunConfig, needs: &Needs) -> Result<(), CliError> {
    for &key in needs.required {
        if input_path(config, key).is_none() {
            return Err(CliError::MissingInput(format!("inputs.{key} is not set")));
        }
    }
    for &key in needs.required.iter().chain(needs.optional) {
        if let Some(path) = input_path(config, key) {
            if !path.exists() {
                return Err(CliError::MissingInput(format!("inputs.{key}: {}", path.display())));
            }
        }
    }
    Ok(())
}

/// Loads inputs, recording the digest of each file it reads.
struct Inputs<'a> {
    config: &'a RunConfig,
}

impl Inputs<'_> {
    fn path(&self, run: &mut Run, key: &'static str) -> Result<Option<PathBuf>, CliError> {
        let Some(path) = input_path(self.config, key) else {
            return Ok(None);
        };
        run.input(key, path)?;
        Ok(Some(path.clone()))
    }

    fn required(&self, run: &mut Run, key: &'static str) -> Result<PathBuf, CliError> {
        self.path(run, key)?
            .ok_or_else(|| CliError::MissingInput(format!("inputs.{key} is not set")))
    }

    fn ontology(&self, run: &mut Run) -> Result<Ontology, CliError> {
        Ok(match self.path(run, "ontology")? {
            Some(p) => Ontology::load(p)?,
            None => Ontology::builtin(),
        })
    }

    fn splitter(&self, run: &mut Run) -> Result<SplitterConfig, CliError> {
        Ok(match self.path(run, "splitter")? {
            Some(p) => SplitterConfig::load(p)?,
            None => SplitterConfig::builtin(),
        })
    }

    fn rules(&self, run: &mut Run) -> Result<FilterRuleSet, CliError> {
        Ok(match self.path(run, "rules")? {
            Some(p) => FilterRuleSet::load(p)?,
            None => FilterRuleSet::builtin(),
        })
    }

    fn tags(&self, run: &mut Run, ontology: &Ontology) -> Result<TagStore, CliError> {
        Ok(match self.path(run, "tags")? {
            Some(p) => TagStore::load(p, ontology)?,
            None => TagStore::new(),
        })
    }

    fn corpus(&self, run: &mut Run) -> Result<ReportCorpus, CliError> {
        let path = self.required(run, "reports")?;
        Ok(load_reports(path, self.config.ingest.strict)?)
    }

    fn analyses(&self, run: &mut Run, ontology: &Ontology) -> Result<Vec<ReportAnalysis>, CliError> {
        let classifier = Classifier {
            splitter: self.splitter(run)?,
            rules: self.rules(run)?,
            tags: self.tags(run, ontology)?,
        };
        let corpus = self.corpus(run)?;
        run.lap("load");
        let analyses = classifier.classify_all(&corpus.studies);
        run.lap("classify");
        Ok(analyses)
    }
}

const CLASSIFY_INPUTS: &[&str] = &["splitter", "rules", "ontology", "tags"];

pub fn ingest(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports"], optional: &[] })?;
    let mut run = Run::start("ingest", config)?;
    let corpus = Inputs { config }.corpus(&mut run)?;
    run.lap("load");
    let rejected: Vec<Value> = corpus
        .rejected
        .iter()
        .map(|r| json!({ "line": r.line, "reason": r.reason.as_str() }))
        .collect();
    run.write_json(
        "ingest_summary.json",
        json!({ "stats": corpus_stats(&corpus), "rejected": rejected }),
    )?;
    Ok(run)
}

pub fn pool(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports"], optional: &["splitter"] })?;
    let mut run = Run::start("pool", config)?;
    let inputs = Inputs { config };
    let splitter = inputs.splitter(&mut run)?;
    let corpus = inputs.corpus(&mut run)?;
    run.lap("load");
    let pool = build_sentence_pool(&corpus, &splitter);
    run.lap("pool");
    run.write_text("pool.csv", |w| Ok(pool.write_csv(w)?))?;
    Ok(run)
}

pub fn coverage(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports"], optional: &["splitter", "rules"] })?;
    let mut run = Run::start("coverage", config)?;
    let inputs = Inputs { config };
    let splitter = inputs.splitter(&mut run)?;
    let rules = inputs.rules(&mut run)?;
    let corpus = inputs.corpus(&mut run)?;
    run.lap("load");
    let pool = build_sentence_pool(&corpus, &splitter);
    let curve = coverage_curve(&pool, &corpus, &splitter, &rules);
    run.lap("coverage");
    run.write_text("coverage.csv", |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "covered_report_count"]).map_err(csv_err)?;
        for p in &curve {
            out.write_record([p.k.to_string(), p.covered_report_count.to_string()])
                .map_err(csv_err)?;
        }
        out.flush().map_err(io_err)
    })?;
    Ok(run)
}

fn finding_list(set: cxrlabel_core::classify::FindingSet, ontology: &Ontology) -> String {
    set.iter().map(|f| ontology.name(f)).collect::<Vec<_>>().join(";")
}

pub fn classify(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports"], optional: CLASSIFY_INPUTS })?;
    let mut run = Run::start("classify", config)?;
    let inputs = Inputs { config };
    let ontology = inputs.ontology(&mut run)?;
    let analyses = inputs.analyses(&mut run, &ontology)?;
    run.write_text("analyses.csv", |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["study_id", "patient_id", "excluded", "has_unknown_candidate", "findings"])
            .map_err(csv_err)?;
        for a in &analyses {
            out.write_record([
                a.study_id.as_str(),
                a.patient_id.as_str(),
                if a.excluded { "1" } else { "0" },
                if a.has_unknown_candidate { "1" } else { "0" },
                &finding_list(a.positive_findings, &ontology),
            ])
            .map_err(csv_err)?;
        }
        out.flush().map_err(io_err)
    })?;
    Ok(run)
}

fn selection_json(studies: &[&LabeledStudy], sel: &Selection, ontology: &Ontology) -> Value {
    json!({
        "size": sel.indices.len(),
        "study_ids": sel.indices.iter().map(|&i| studies[i].study_id.as_str()).collect::<Vec<_>>(),
        "shortfall": sel.shortfall.iter().map(|s| json!({
            "finding": ontology.name(s.finding),
            "achieved": s.achieved,
        })).collect::<Vec<_>>(),
    })
}

pub fn build_labels(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports"], optional: CLASSIFY_INPUTS })?;
    let policy = config.policy;
    let mut run = Run::start("build-labels", config)?;
    let inputs = Inputs { config };
    let ontology = inputs.ontology(&mut run)?;
    let analyses = inputs.analyses(&mut run, &ontology)?;
    let mut studies = build_label_sets(&analyses, policy);
    partition_by_patient(&mut studies, config.partition, config.seed);
    run.lap("labels");

    let of = |p: Partition| -> Vec<&LabeledStudy> { studies.iter().filter(|s| s.partition == Some(p)).collect() };
    let (train, validation, test) = (of(Partition::Train), of(Partition::Validation), of(Partition::Test));
    let owned = |v: &[&LabeledStudy]| v.iter().map(|&s| s.clone()).collect::<Vec<_>>();
    let q = &config.quotas;
    let val_sel = select_validation_subset(&owned(&validation), q.validation_min_pos);
    let test_sel = build_broad_test_set(&owned(&test), q.test_base, q.test_min_pos, config.seed);
    run.lap("subsets");

    run.write_text(&format!("labels_{policy}.csv"), |w| Ok(write_labels_csv(&studies, &ontology, w)?))?;
    let mut validation_json = selection_json(&validation, &val_sel, &ontology);
    validation_json["min_pos"] = json!(q.validation_min_pos);
    let mut test_json = selection_json(&test, &test_sel, &ontology);
    test_json["base"] = json!(q.test_base);
    test_json["min_pos"] = json!(q.test_min_pos);
    run.write_json(
        &format!("subsets_{policy}.json"),
        json!({
            "policy": policy.as_str(),
            "studies": studies.len(),
            "partitions": { "train": train.len(), "validation": validation.len(), "test": test.len() },
            "validation": validation_json,
            "test": test_json,
        }),
    )?;
    Ok(run)
}

/// Studies of `part` among the labeled ones, or all of them when the file
/// carries no partition column values.
fn labeled_in(labels: &[LabeledStudy], part: Partition) -> Vec<&LabeledStudy> {
    if labels.iter().all(|s| s.partition.is_none()) {
        labels.iter().collect()
    } else {
        labels.iter().filter(|s| s.partition == Some(part)).collect()
    }
}

/// Per-finding thresholds tuned on the validation labels; `None` where no
/// validation study has a prediction.
fn label_thresholds(labels: &[LabeledStudy], preds: &Predictions) -> Result<HashMap<FindingId, f64>, CliError> {
    let tuning: Vec<&LabeledStudy> = labeled_in(labels, Partition::Validation)
        .into_iter()
        .filter(|s| preds.get(&s.study_id).is_some())
        .collect();
    let mut out = HashMap::new();
    if tuning.is_empty() {
        return Ok(out);
    }
    for f in FindingId::all() {
        let conf: Vec<f64> = tuning.iter().filter_map(|s| preds.confidence(&s.study_id, f)).collect();
        let truth: Vec<bool> = tuning.iter().map(|s| s.labels.get(f)).collect();
        out.insert(f, select_threshold(&conf, Reference::Labels(&truth))?.threshold);
    }
    Ok(out)
}

fn matrix_confidences(m: &RatingMatrix, preds: &Predictions) -> Result<Vec<f64>, CliError> {
    m.studies
        .iter()
        .map(|s| {
            preds
                .confidence(s, m.finding)
                .ok_or_else(|| CliError::Validation(format!("no prediction for study {s:?} of set {:?}", m.set_id)))
        })
        .collect()
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |v| format!("{v:.6}"))
}

pub fn eval(config: &RunConfig) -> Result<Run, CliError> {
    preflight(
        config,
        &Needs { required: &["ratings", "predictions"], optional: &["ontology", "labels"] },
    )?;
    let mut run = Run::start("eval", config)?;
    let inputs = Inputs { config };
    let ontology = inputs.ontology(&mut run)?;
    let matrices = load_ratings(inputs.required(&mut run, "ratings")?, &ontology)?;
    let preds = Predictions::load_csv(inputs.required(&mut run, "predictions")?, &ontology)?;
    let labels = match inputs.path(&mut run, "labels")? {
        Some(p) => Some(load_labels_csv(p, &ontology)?),
        None => None,
    };
    run.lap("load");

    let reference = config.eval.threshold_reference;
    let tuned = match (&labels, reference) {
        (Some(l), ThresholdReference::Labels) => label_thresholds(l, &preds)?,
        _ => HashMap::new(),
    };
    if reference == ThresholdReference::Labels && tuned.is_empty() {
        tracing::warn!(
            threshold = config.eval.fallback_threshold,
            "no validation labels with predictions; using the fallback threshold"
        );
    }
    let mut rows = Vec::with_capacity(matrices.len());
    for m in &matrices {
        let conf = matrix_confidences(m, &preds)?;
        let threshold = match reference {
            ThresholdReference::Raters => select_threshold(&conf, Reference::Raters(m))?.threshold,
            ThresholdReference::Labels => tuned.get(&m.finding).copied().unwrap_or(config.eval.fallback_threshold),
        };
        let name = ontology.name(m.finding);
        let resampling = Resampling::Random {
            n: config.bootstrap.n,
            seed: stable_hash(config.seed, &[&m.set_id, name]),
        };
        rows.push(evaluate_matrix(m, &conf, threshold, resampling, config.bootstrap.level, &ontology)?);
    }
    run.lap("agreement");
    run.write_text("eval_report.csv", |w| Ok(write_eval_report(&rows, w)?))?;

    if let Some(labels) = &labels {
        let test: Vec<&LabeledStudy> = labeled_in(labels, Partition::Test)
            .into_iter()
            .filter(|s| preds.get(&s.study_id).is_some())
            .collect();
        let mut auc_rows = Vec::new();
        for f in FindingId::all() {
            let conf: Vec<f64> = test.iter().filter_map(|s| preds.confidence(&s.study_id, f)).collect();
            let truth: Vec<bool> = test.iter().map(|s| s.labels.get(f)).collect();
            let curve = roc_auc(&conf, &truth)?;
            let positives = truth.iter().filter(|&&t| t).count();
            auc_rows.push([
                ontology.name(f).to_string(),
                truth.len().to_string(),
                positives.to_string(),
                opt_fixed(curve.auc),
                opt_fixed(curve.accuracy_at_equal_error),
            ]);
        }
        run.lap("roc");
        run.write_text("auc.csv", |w| {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["finding", "n_studies", "positives", "auc", "accuracy_at_sens_eq_spec"])
                .map_err(csv_err)?;
            for r in &auc_rows {
                out.write_record(r).map_err(csv_err)?;
            }
            out.flush().map_err(io_err)
        })?;
    }
    Ok(run)
}

pub fn noise(config: &RunConfig) -> Result<Run, CliError> {
    preflight(config, &Needs { required: &["reports", "ratings"], optional: CLASSIFY_INPUTS })?;
    let mut run = Run::start("noise", config)?;
    let inputs = Inputs { config };
    let ontology = inputs.ontology(&mut run)?;
    let matrices = load_ratings(inputs.required(&mut run, "ratings")?, &ontology)?;
    let analyses = inputs.analyses(&mut run, &ontology)?;
    let fully_covered = build_label_sets(&analyses, Policy::FullyCovered);
    let any_hit = build_label_sets(&analyses, Policy::AnyHit);
    let report = estimate_label_noise(&matrices, &fully_covered, &any_hit);
    run.lap("noise");
    run.write_text("noise_report.csv", |w| Ok(write_noise_csv(&report, &ontology, w)?))?;
    Ok(run)
}

/// Build the service from the configuration and open its event log.
pub fn service_app(config: &RunConfig) -> Result<App, CliError> {
    preflight(
        config,
        &Needs {
            required: &[],
            optional: &["ontology", "rules", "splitter", "pool", "reports", "eval_sets", "image_dir"],
        },
    )?;
    let i = &config.inputs;
    let ontology = match &i.ontology {
        Some(p) => Ontology::load(p)?,
        None => Ontology::builtin(),
    };
    let rules = match &i.rules {
        Some(p) => FilterRuleSet::load(p)?,
        None => FilterRuleSet::builtin(),
    };
    let pool = match (&i.pool, &i.reports) {
        (Some(p), _) => Some(SentencePool::load_csv(p)?),
        (None, Some(r)) => {
            let splitter = match &i.splitter {
                Some(p) => SplitterConfig::load(p)?,
                None => SplitterConfig::builtin(),
            };
            Some(build_sentence_pool(&load_reports(r, config.ingest.strict)?, &splitter))
        }
        (None, None) => None,
    };
    let eval_sets = match &i.eval_sets {
        Some(p) => EvalSets::load(p, &ontology).map_err(|e| CliError::Validation(e.to_string()))?,
        None => EvalSets::default(),
    };
    let log_path = i.event_log.clone().unwrap_or_else(|| config.out_dir.join("events.jsonl"));
    if let Some(parent) = log_path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    App::open(ServiceConfig {
        ontology,
        rules,
        pool,
        eval_sets,
        log_path,
        seed: config.seed,
        queue_coverage: config.serve.queue_coverage,
        image_dir: i.image_dir.clone(),
    })
    .map_err(|e| CliError::Validation(e.to_string()))
}

pub fn serve(config: &RunConfig) -> Result<(), CliError> {
    let app = service_app(config)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(io_err)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&config.serve.addr)
            .await
            .map_err(|e| CliError::Io(format!("bind {}: {e}", config.serve.addr)))?;
        let addr = listener.local_addr().map_err(io_err)?;
        let mut stdout = std::io::stdout();
        writeln!(stdout, "listening on http://{addr}").map_err(io_err)?;
        stdout.flush().map_err(io_err)?;
        cxrlabel_service::serve(listener, app).await.map_err(io_err)
    })
}
