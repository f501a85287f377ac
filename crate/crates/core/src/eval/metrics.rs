use serde::{Deserialize, Serialize};

use super::EvalError;

/// Closed time interval `(start, end)` in seconds.
pub type Interval = (f64, f64);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl Metrics {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f_measure = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f_measure,
        }
    }
}

/// Durations behind one query's metrics, for pooled aggregation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Overlap {
    pub hyp_duration: f64,
    pub truth_duration: f64,
    pub overlap: f64,
}

impl Overlap {
    pub fn metrics(&self) -> Metrics {
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        Metrics::from_pr(ratio(self.overlap, self.hyp_duration), ratio(self.overlap, self.truth_duration))
    }
}

pub fn duration(i: Interval) -> f64 {
    (i.1 - i.0).max(0.0)
}

pub fn overlap(a: Interval, b: Interval) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// Scores `hyp` against whichever truth interval it overlaps most (the
/// earliest listed on ties).
pub fn interval_overlap(hyp: Interval, truths: &[Interval]) -> Result<Overlap, EvalError> {
    let mut best: Option<Overlap> = None;
    for &t in truths {
        let o = Overlap {
            hyp_duration: duration(hyp),
            truth_duration: duration(t),
            overlap: overlap(hyp, t),
        };
        if best.map_or(true, |b| o.overlap > b.overlap) {
            best = Some(o);
        }
    }
    best.ok_or(EvalError::NoTruth)
}

pub fn interval_metrics(hyp: Interval, truths: &[Interval]) -> Result<Metrics, EvalError> {
    Ok(interval_overlap(hyp, truths)?.metrics())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregate {
    /// Pooled durations.
    pub micro: Metrics,
    /// Mean of per-query precision, recall and F.
    #[serde(rename = "macro")]
    pub macro_: Metrics,
    pub count: usize,
}

pub fn aggregate(per_query: &[Overlap]) -> Aggregate {
    let n = per_query.len();
    if n == 0 {
        return Aggregate::default();
    }
    let (mut ov, mut hyp, mut truth) = (0.0, 0.0, 0.0);
    let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
    for q in per_query {
        ov += q.overlap;
        hyp += q.hyp_duration;
        truth += q.truth_duration;
        let m = q.metrics();
        p += m.precision;
        r += m.recall;
        f += m.f_measure;
    }
    let pooled = Overlap {
        hyp_duration: hyp,
        truth_duration: truth,
        overlap: ov,
    };
    let nf = n as f64;
    Aggregate {
        micro: pooled.metrics(),
        macro_: Metrics {
            precision: p / nf,
            recall: r / nf,
            f_measure: f / nf,
        },
        count: n,
    }
}
