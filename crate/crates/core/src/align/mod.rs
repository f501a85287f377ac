//! Query-to-reference alignment: column costs, subsequence DTW and the
//! mapping from matched columns back to MIDI time.

mod dtw;

pub use dtw::{path_cost, subsequence_dtw, DtwPath, StepWeights};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::Raster;
use crate::midi::NoteEvent;
use crate::scalar::Cost;
use crate::score::BootlegScore;
use crate::timing::StageTimings;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignError {
    #[error("empty query or reference")]
    EmptyInput,
    #[error("query longer than reference ({query} > {reference} columns)")]
    QueryLongerThanReference { query: usize, reference: usize },
    #[error("degenerate match: columns {start}..={end} contain only filler")]
    DegenerateMatch { start: usize, end: usize },
    #[error("reference event index {index} has no matching note event ({events} events)")]
    MissingEvent { index: usize, events: usize },
}

/// Negative overlap of two columns over the larger note count; 0 when
/// both counts are 0.
pub fn column_cost<T: Cost>(q_mask: u64, r_mask: u64, q_count: u16, r_count: u16) -> T {
    let norm = q_count.max(r_count);
    if norm == 0 {
        return T::zero();
    }
    let overlap = (q_mask & r_mask).count_ones();
    let num = T::from_u32(overlap).expect("small integer");
    let den = T::from_u16(norm).expect("small integer");
    T::zero() - num / den
}

/// `Q x R` matrix of [`column_cost`].
pub fn cost_matrix<T: Cost>(query: &BootlegScore, reference: &BootlegScore) -> Result<Raster<T>, AlignError> {
    let (nq, nr) = (query.len(), reference.len());
    if nq == 0 || nr == 0 {
        return Err(AlignError::EmptyInput);
    }
    let mut data = Vec::with_capacity(nq * nr);
    for (&qm, &qc) in query.columns().iter().zip(query.counts()) {
        for (&rm, &rc) in reference.columns().iter().zip(reference.counts()) {
            data.push(column_cost(qm, rm, qc, rc));
        }
    }
    Ok(Raster::new(nq, nr, data).expect("dimensions match"))
}

/// Event range `(e1, e2)` covered by reference columns `start..=end`.
pub fn matched_events(reference: &BootlegScore, start: usize, end: usize) -> Result<(usize, usize), AlignError> {
    let idx = &reference.event_index()[start..=end];
    let first = idx.iter().flatten().next();
    let last = idx.iter().rev().flatten().next();
    match (first, last) {
        (Some(&a), Some(&b)) => Ok((a as usize, b as usize)),
        _ => Err(AlignError::DegenerateMatch { start, end }),
    }
}

/// Time interval of the events matched in `start..=end`. With
/// `extend_to_next_onset`, the end is the onset following the last matched
/// event (or that event's own onset if it is the final one).
pub fn map_to_time(
    reference: &BootlegScore,
    events: &[NoteEvent],
    start: usize,
    end: usize,
    extend_to_next_onset: bool,
) -> Result<(f64, f64), AlignError> {
    let (e1, e2) = matched_events(reference, start, end)?;
    event_interval(events, e1, e2, extend_to_next_onset)
}

/// Onset of `e1` to the onset of `e2` (or of the event after it).
pub fn event_interval(
    events: &[NoteEvent],
    e1: usize,
    e2: usize,
    extend_to_next_onset: bool,
) -> Result<(f64, f64), AlignError> {
    let time = |i: usize| {
        events.get(i).map(|e| e.time).ok_or(AlignError::MissingEvent {
            index: i,
            events: events.len(),
        })
    };
    let t_start = time(e1)?;
    let t_end = if extend_to_next_onset && e2 + 1 < events.len() {
        time(e2 + 1)?
    } else {
        time(e2)?
    };
    Ok((t_start, t_end))
}

/// Reference events matched by the first and last query events.
///
/// Along the path, each reference event touched by the columns of the
/// query's first (last) event is scored by the summed column cost; the
/// cheapest wins, earliest (latest) on ties. `None` when neither end event
/// overlaps any reference event.
pub fn anchored_events(
    query: &BootlegScore,
    reference: &BootlegScore,
    costs: &Raster<f64>,
    path: &[(usize, usize)],
) -> Option<(usize, usize)> {
    let qidx = query.event_index();
    let first_q = *qidx.iter().flatten().next()?;
    let last_q = *qidx.iter().rev().flatten().next()?;
    let best = |target: u32, prefer_late: bool| -> Option<usize> {
        let mut scores: Vec<(u32, f64)> = Vec::new();
        for &(q, r) in path {
            if qidx[q] != Some(target) {
                continue;
            }
            let Some(ev) = reference.event_index()[r] else { continue };
            match scores.iter_mut().find(|(e, _)| *e == ev) {
                Some(entry) => entry.1 += costs.get(q, r),
                None => scores.push((ev, costs.get(q, r))),
            }
        }
        scores.sort_by_key(|&(e, _)| e);
        if prefer_late {
            scores.reverse();
        }
        scores
            .into_iter()
            .filter(|&(_, c)| c < 0.0)
            .fold(None, |acc: Option<(u32, f64)>, (e, c)| match acc {
                Some((_, b)) if !(c < b) => acc,
                _ => Some((e, c)),
            })
            .map(|(e, _)| e as usize)
    };
    let e1 = best(first_q, false)?;
    let e2 = best(last_q, true)?;
    (e1 <= e2).then_some((e1, e2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignOptions {
    pub weights: StepWeights<f64>,
    pub extend_to_next_onset: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            weights: StepWeights::default(),
            extend_to_next_onset: true,
        }
    }
}

/// Result of aligning a query against a reference score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignmentResult {
    pub ref_start_col: usize,
    pub ref_end_col: usize,
    /// Reference events `(e1, e2)` the interval is taken from.
    pub event_range: (usize, usize),
    pub t_start: f64,
    pub t_end: f64,
    pub total_cost: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub path: Vec<(usize, usize)>,
    pub stage_timings: StageTimings,
}

impl AlignmentResult {
    pub fn interval(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }
}

/// Cost matrix, DTW and time mapping, timed per stage.
pub fn align(
    query: &BootlegScore,
    reference: &BootlegScore,
    events: &[NoteEvent],
    opts: &AlignOptions,
) -> Result<AlignmentResult, AlignError> {
    let mut timings = StageTimings::new();
    let costs = timings.time("costMatrix", || cost_matrix::<f64>(query, reference))?;
    let dtw = timings.time("dtw", || subsequence_dtw(&costs, &opts.weights))?;
    let (start, end) = (dtw.ref_start(), dtw.ref_end());
    let ((e1, e2), (t_start, t_end)) = timings.time("mapToTime", || {
        let (e1, e2) = match anchored_events(query, reference, &costs, &dtw.path) {
            Some(anchors) => anchors,
            None => matched_events(reference, start, end)?,
        };
        Ok::<_, AlignError>(((e1, e2), event_interval(events, e1, e2, opts.extend_to_next_onset)?))
    })?;
    Ok(AlignmentResult {
        ref_start_col: start,
        ref_end_col: end,
        event_range: (e1, e2),
        t_start,
        t_end,
        total_cost: dtw.total_cost,
        path: dtw.path,
        stage_timings: timings,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::score::midi_bootleg;

    fn events(times: &[f64]) -> Vec<NoteEvent> {
        times
            .iter()
            .enumerate()
            .map(|(i, &t)| NoteEvent {
                time: t,
                pitches: BTreeSet::from([48 + 2 * i as u8]),
                onset_count: 1,
            })
            .collect()
    }

    #[test]
    fn column_cost_examples() {
        let m = 1u64 << 27 | 1 << 28;
        assert_eq!(column_cost::<f64>(m, m, 1, 1), -2.0);
        assert_eq!(column_cost::<f64>(0, m, 0, 0), 0.0);
        assert_eq!(column_cost::<f64>(1 << 10, 1 << 20 | 1 << 21, 1, 2), 0.0);
        assert_eq!(column_cost::<f64>(m, m, 1, 4), -0.5);
    }

    #[test]
    fn map_to_time_examples() {
        let ev = events(&[0.0, 0.5, 1.0]);
        let s = midi_bootleg(&ev).unwrap();
        assert_eq!(map_to_time(&s, &ev, 0, 5, true).unwrap(), (0.0, 1.0));
        assert_eq!(map_to_time(&s, &ev, 0, 8, true).unwrap(), (0.0, 1.0));
        assert_eq!(map_to_time(&s, &ev, 3, 4, true).unwrap(), (0.5, 1.0));
        assert_eq!(map_to_time(&s, &ev, 0, 5, false).unwrap(), (0.0, 0.5));
        assert!(matches!(
            map_to_time(&s, &ev, 2, 2, true),
            Err(AlignError::DegenerateMatch { .. })
        ));
    }

    #[test]
    fn self_alignment_spans_everything() {
        let ev = events(&[0.0, 1.0, 2.0, 3.0]);
        let s = midi_bootleg(&ev).unwrap();
        let res = align(&s, &s, &ev, &AlignOptions::default()).unwrap();
        assert_eq!((res.t_start, res.t_end), (0.0, 3.0));
        assert!(res.stage_timings.get("dtw").is_some());
    }
}
