//! Ground truth, interval metrics, the random baseline and the dataset
//! harness.
//!
//! A dataset is an annotations JSON array plus, for every score id, a MIDI
//! file `<scoreId>.mid` and a measure map `<scoreId>.measures.json` in the
//! MIDI directory. Images live in the image directory.

mod baseline;
mod measures;
mod metrics;

pub use baseline::{baseline_choices, query_rng, random_baseline};
pub use measures::{MeasureEntry, MeasureMap};
pub use metrics::{aggregate, duration, interval_metrics, interval_overlap, overlap, Aggregate, Interval, Metrics, Overlap};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::pipeline::{retrieve, Reference};
use crate::sheet::load_gray;
use crate::timing::StageTimings;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid measure map: {0}")]
    BadMeasureMap(String),
    #[error("measure range {first}..={last} invalid for a piece of {measures} measures")]
    BadMeasureRange { first: usize, last: usize, measures: usize },
    #[error("no ground-truth interval")]
    NoTruth,
    #[error("piece has {measures} measures, baseline needs more than {requested}")]
    PieceTooShort { measures: usize, requested: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("annotation {0}: {1}")]
    BadAnnotation(String, String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| EvalError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    #[default]
    Test,
}

/// One photo and the measures it fully shows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct QueryAnnotation {
    pub image_id: String,
    pub score_id: String,
    /// Image file name relative to the image directory; `<imageId>.png` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    /// First and last fully captured measure, 1-based and inclusive.
    pub measure_range: (usize, usize),
    /// Other passages that match the photo exactly.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternate_measure_ranges: Vec<(usize, usize)>,
    #[serde(default)]
    pub split: Split,
}

impl QueryAnnotation {
    pub fn image_file(&self) -> String {
        self.image.clone().unwrap_or_else(|| format!("{}.png", self.image_id))
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        for &(a, b) in std::iter::once(&self.measure_range).chain(&self.alternate_measure_ranges) {
            if a == 0 || a > b {
                return Err(EvalError::BadAnnotation(
                    self.image_id.clone(),
                    format!("measure range ({a}, {b})"),
                ));
            }
        }
        Ok(())
    }

    /// Time intervals of the main and alternate measure ranges.
    pub fn acceptable_intervals(&self, map: &MeasureMap) -> Result<Vec<Interval>, EvalError> {
        std::iter::once(&self.measure_range)
            .chain(&self.alternate_measure_ranges)
            .map(|&(a, b)| map.interval(a, b))
            .collect()
    }

    pub fn measure_count(&self) -> usize {
        self.measure_range.1 + 1 - self.measure_range.0
    }
}

/// Annotation list plus the directories its file names resolve against.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub annotations: Vec<QueryAnnotation>,
    pub midi_dir: PathBuf,
    pub image_dir: PathBuf,
}

impl Dataset {
    pub fn load(annotations: &Path, midi_dir: &Path, image_dir: &Path) -> Result<Self, EvalError> {
        let annotations: Vec<QueryAnnotation> = read_json(annotations)?;
        for a in &annotations {
            a.validate()?;
        }
        Ok(Self {
            annotations,
            midi_dir: midi_dir.to_path_buf(),
            image_dir: image_dir.to_path_buf(),
        })
    }

    pub fn midi_path(&self, score_id: &str) -> PathBuf {
        self.midi_dir.join(format!("{score_id}.mid"))
    }

    pub fn measure_map_path(&self, score_id: &str) -> PathBuf {
        self.midi_dir.join(format!("{score_id}.measures.json"))
    }

    pub fn image_path(&self, a: &QueryAnnotation) -> PathBuf {
        self.image_dir.join(a.image_file())
    }
}

/// Loaded material for one score; each part may be unavailable.
#[derive(Clone, Debug)]
pub struct ScoreData {
    pub reference: Result<Reference, String>,
    pub measures: Result<MeasureMap, String>,
}

fn load_score(ds: &Dataset, score_id: &str, cfg: &Config, missing: &mut Vec<String>) -> ScoreData {
    let midi_path = ds.midi_path(score_id);
    let reference = match std::fs::read(&midi_path) {
        Ok(bytes) => Reference::from_midi(&bytes, cfg).map_err(|e| format!("{}: {e}", midi_path.display())),
        Err(e) => {
            missing.push(midi_path.display().to_string());
            Err(format!("{}: {e}", midi_path.display()))
        }
    };
    let map_path = ds.measure_map_path(score_id);
    let measures = if map_path.exists() {
        read_json::<MeasureMap>(&map_path)
            .and_then(|m| m.validate().map(|_| m))
            .map_err(|e| e.to_string())
    } else {
        missing.push(map_path.display().to_string());
        Err(format!("{}: missing", map_path.display()))
    };
    ScoreData { reference, measures }
}

/// A predicted interval, or the reason there is none. Failures score as a
/// zero-duration interval.
pub type Hypothesis = Result<(Interval, StageTimings), String>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Scored {
    pub hypothesis: Interval,
    pub overlap: Overlap,
    pub metrics: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Scored {
    fn new(hyp: &Result<Interval, String>, truth: &[Interval]) -> Result<Self, EvalError> {
        let interval = *hyp.as_ref().unwrap_or(&(0.0, 0.0));
        let overlap = interval_overlap(interval, truth)?;
        Ok(Self {
            hypothesis: interval,
            overlap,
            metrics: overlap.metrics(),
            error: hyp.as_ref().err().cloned(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryResult {
    pub image_id: String,
    pub score_id: String,
    pub split: Split,
    pub truth: Vec<Interval>,
    pub pipeline: Scored,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Scored>,
    pub stage_timings: StageTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Failure {
    pub image_id: String,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SplitAggregates {
    pub all: Aggregate,
    pub train: Aggregate,
    pub test: Aggregate,
}

impl SplitAggregates {
    fn of<'a>(results: impl Iterator<Item = (Split, &'a Overlap)> + Clone) -> Self {
        let pick = |s: Option<Split>| {
            let v: Vec<Overlap> = results
                .clone()
                .filter(|(sp, _)| s.map_or(true, |s| s == *sp))
                .map(|(_, o)| *o)
                .collect();
            aggregate(&v)
        };
        Self {
            all: pick(None),
            train: pick(Some(Split::Train)),
            test: pick(Some(Split::Test)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StageStat {
    pub stage: String,
    pub total_seconds: f64,
    pub mean_seconds: f64,
    pub share: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TimingSummary {
    pub queries: usize,
    pub mean_query_seconds: f64,
    pub stages: Vec<StageStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominant_stage: Option<String>,
}

impl TimingSummary {
    fn of(results: &[QueryResult]) -> Self {
        let mut sum = StageTimings::new();
        let mut n = 0;
        for r in results.iter().filter(|r| r.stage_timings.total() > 0.0) {
            sum.extend(&r.stage_timings);
            n += 1;
        }
        if n == 0 {
            return Self::default();
        }
        let total = sum.total();
        Self {
            queries: n,
            mean_query_seconds: total / n as f64,
            stages: sum
                .iter()
                .map(|(stage, t)| StageStat {
                    stage: stage.to_string(),
                    total_seconds: t,
                    mean_seconds: t / n as f64,
                    share: if total > 0.0 { t / total } else { 0.0 },
                })
                .collect(),
            dominant_stage: sum.dominant().map(|(s, _)| s.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub config_hash: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_measures: Option<usize>,
    pub pipeline: SplitAggregates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<SplitAggregates>,
    /// Scored queries whose pipeline interval has no overlap with any truth.
    pub failures: Vec<Failure>,
    /// Queries left out of every aggregate because their truth is unknown.
    pub unscored: Vec<Failure>,
    pub missing_files: Vec<String>,
    pub queries: Vec<QueryResult>,
    pub timing: TimingSummary,
}

const TIMING_KEYS: [&str; 1] = ["timing"];

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    /// JSON with every wall-clock field removed; equal across repeat runs.
    pub fn to_json_without_timings(&self) -> String {
        let mut v = serde_json::to_value(self).expect("plain data");
        let obj = v.as_object_mut().expect("object");
        for k in TIMING_KEYS {
            obj.remove(k);
        }
        if let Some(serde_json::Value::Array(qs)) = obj.get_mut("queries") {
            for q in qs {
                if let Some(q) = q.as_object_mut() {
                    q.remove("stageTimings");
                }
            }
        }
        let mut s = serde_json::to_string_pretty(&v).expect("plain data");
        s.push('\n');
        s
    }

    /// Precision, recall and F per system and split.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, Aggregate)> = Vec::new();
        let mut push = |name: &str, agg: &SplitAggregates| {
            for (split, a) in [("train", agg.train), ("test", agg.test), ("all", agg.all)] {
                if a.count > 0 {
                    rows.push((format!("{name} {split}"), a));
                }
            }
        };
        push("Bootleg", &self.pipeline);
        if let Some(b) = &self.baseline {
            push("Random", b);
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>5} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6}",
            "system", "N", "P", "R", "F", "P(mac)", "R(mac)", "F(mac)"
        );
        for (name, a) in rows {
            let _ = writeln!(
                out,
                "{:<16} {:>5} | {:>6.3} {:>6.3} {:>6.3} | {:>6.3} {:>6.3} {:>6.3}",
                name,
                a.count,
                a.micro.precision,
                a.micro.recall,
                a.micro.f_measure,
                a.macro_.precision,
                a.macro_.recall,
                a.macro_.f_measure
            );
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
    pub random_baseline: bool,
}

/// Baseline span in measures: the configured value, or else the rounded
/// mean span of the training queries (of all queries if there are none).
pub fn baseline_span(annotations: &[QueryAnnotation], cfg: &Config) -> usize {
    if cfg.baseline_measures > 0 {
        return cfg.baseline_measures;
    }
    let train: Vec<usize> = annotations
        .iter()
        .filter(|a| a.split == Split::Train)
        .map(QueryAnnotation::measure_count)
        .collect();
    let pool: Vec<usize> = if train.is_empty() {
        annotations.iter().map(QueryAnnotation::measure_count).collect()
    } else {
        train
    };
    if pool.is_empty() {
        return 1;
    }
    let mean = pool.iter().sum::<usize>() as f64 / pool.len() as f64;
    (mean.round() as usize).max(1)
}

/// Runs the full pipeline on every image of `ds`.
pub fn evaluate_dataset(ds: &Dataset, cfg: &Config, opts: &EvalOptions) -> Result<Report, EvalError> {
    evaluate_with(ds, cfg, opts, |ds, ann, score| {
        let reference = score.reference.as_ref().map_err(Clone::clone)?;
        let gray = load_gray::<f32>(&ds.image_path(ann)).map_err(|e| format!("{}: {e}", ds.image_path(ann).display()))?;
        let r = retrieve(&gray, reference, cfg).map_err(|e| e.to_string())?;
        Ok((r.interval(), r.stage_timings))
    })
}

/// Evaluation harness with a caller-supplied hypothesis for each query.
pub fn evaluate_with<F>(ds: &Dataset, cfg: &Config, opts: &EvalOptions, hypothesize: F) -> Result<Report, EvalError>
where
    F: Fn(&Dataset, &QueryAnnotation, &ScoreData) -> Hypothesis + Sync,
{
    let mut missing = Vec::new();
    let mut scores: BTreeMap<&str, ScoreData> = BTreeMap::new();
    for a in &ds.annotations {
        if !scores.contains_key(a.score_id.as_str()) {
            let data = load_score(ds, &a.score_id, cfg, &mut missing);
            scores.insert(&a.score_id, data);
        }
    }
    let mut annotations: Vec<&QueryAnnotation> = ds.annotations.iter().collect();
    annotations.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    for a in &annotations {
        let path = ds.image_path(a);
        if !path.exists() {
            missing.push(path.display().to_string());
        }
    }
    let span = opts.random_baseline.then(|| baseline_span(&ds.annotations, cfg));

    let run = |a: &&QueryAnnotation| -> Result<QueryResult, Failure> {
        let score = &scores[a.score_id.as_str()];
        let unscored = |reason: String| Failure {
            image_id: a.image_id.clone(),
            reason,
        };
        let map = score.measures.as_ref().map_err(|e| unscored(e.clone()))?;
        let truth = a.acceptable_intervals(map).map_err(|e| unscored(e.to_string()))?;
        let hyp = hypothesize(ds, a, score);
        let (interval, stage_timings) = match hyp {
            Ok((i, t)) => (Ok(i), t),
            Err(e) => (Err(e), StageTimings::new()),
        };
        let pipeline = Scored::new(&interval, &truth).map_err(|e| unscored(e.to_string()))?;
        let baseline = match span {
            Some(n) => {
                let guess = random_baseline(map, n, &mut query_rng(cfg.seed, &a.image_id)).map_err(|e| e.to_string());
                Some(Scored::new(&guess, &truth).map_err(|e| unscored(e.to_string()))?)
            }
            None => None,
        };
        Ok(QueryResult {
            image_id: a.image_id.clone(),
            score_id: a.score_id.clone(),
            split: a.split,
            truth,
            pipeline,
            baseline,
            stage_timings,
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    let outcomes: Vec<Result<QueryResult, Failure>> = pool.install(|| annotations.par_iter().map(run).collect());

    let mut queries = Vec::new();
    let mut unscored = Vec::new();
    for o in outcomes {
        match o {
            Ok(q) => queries.push(q),
            Err(f) => unscored.push(f),
        }
    }
    let failures = queries
        .iter()
        .filter(|q| q.pipeline.overlap.overlap <= 0.0)
        .map(|q| Failure {
            image_id: q.image_id.clone(),
            reason: q.pipeline.error.clone().unwrap_or_else(|| "no overlap".into()),
        })
        .collect();
    let pipeline = SplitAggregates::of(queries.iter().map(|q| (q.split, &q.pipeline.overlap)));
    let baseline = span.map(|_| {
        SplitAggregates::of(
            queries
                .iter()
                .filter_map(|q| q.baseline.as_ref().map(|b| (q.split, &b.overlap))),
        )
    });
    missing.sort();
    missing.dedup();
    Ok(Report {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        baseline_measures: span,
        pipeline,
        baseline,
        failures,
        unscored,
        missing_files: missing,
        timing: TimingSummary::of(&queries),
        queries,
    })
}
