//! From located noteheads to a query bootleg score.

use serde::Serialize;

use super::{LocalStaffEstimate, MusicLine, NoteheadDetection, SheetError};
use crate::score::{BootlegScore, EventColumn, Staff, NUM_ROWS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LabeledNotehead {
    pub detection: NoteheadDetection,
    pub estimate: LocalStaffEstimate,
    pub line_index: usize,
    pub staff: Staff,
    /// Half-spaces below the top staff line.
    pub staff_position: i32,
    pub row: usize,
}

/// Why a notehead did not make it into the score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Discard {
    OutsideMusicLines,
    RowOutOfRange,
}

/// Quantizes the notehead against its local staff and assigns it to the
/// line of music containing that staff's middle line.
pub fn label_notehead(
    detection: &NoteheadDetection,
    est: &LocalStaffEstimate,
    lines: &[MusicLine],
) -> Result<LabeledNotehead, Discard> {
    let y = detection.center.1;
    let staff_position = (2.0 * (y - est.top_line_y) / est.spacing).round() as i32;
    let middle = est.top_line_y + 2.0 * est.spacing;
    let line_index = lines
        .iter()
        .position(|l| l.contains_y(middle))
        .ok_or(Discard::OutsideMusicLines)?;
    let staff = if middle < lines[line_index].mid_y() {
        Staff::Upper
    } else {
        Staff::Lower
    };
    let row = staff.row_for_position(staff_position);
    if !(0..NUM_ROWS as i32).contains(&row) {
        return Err(Discard::RowOutOfRange);
    }
    Ok(LabeledNotehead {
        detection: *detection,
        estimate: *est,
        line_index,
        staff,
        staff_position,
        row: row as usize,
    })
}

/// A group of noteheads read as sounding together.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryEvent {
    pub line_index: usize,
    /// x of the leftmost member.
    pub anchor_x: f64,
    /// Ascending, deduplicated.
    pub rows: Vec<usize>,
    /// Member indices into the labeled list.
    pub members: Vec<usize>,
}

impl QueryEvent {
    pub fn column(&self) -> EventColumn {
        EventColumn {
            mask: self.rows.iter().fold(0, |m, &r| m | 1u64 << r),
            count: self.members.len().min(u16::MAX as usize) as u16,
        }
    }
}

/// Line by line, left to right: each group opens at the leftmost
/// unassigned notehead `x0` and takes noteheads with
/// `x < x0 + tol * spacing`, where spacing is the opener's local estimate.
pub fn group_simultaneous(labeled: &[LabeledNotehead], tol: f64) -> Vec<QueryEvent> {
    let mut order: Vec<usize> = (0..labeled.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (&labeled[a], &labeled[b]);
        la.line_index
            .cmp(&lb.line_index)
            .then(la.detection.center.0.total_cmp(&lb.detection.center.0))
            .then(la.row.cmp(&lb.row))
    });
    let mut events: Vec<QueryEvent> = Vec::new();
    let mut window_end = f64::NEG_INFINITY;
    for i in order {
        let n = &labeled[i];
        let x = n.detection.center.0;
        match events.last_mut() {
            Some(ev) if ev.line_index == n.line_index && x < window_end => {
                ev.rows.push(n.row);
                ev.members.push(i);
            }
            _ => {
                window_end = x + tol * n.estimate.spacing;
                events.push(QueryEvent {
                    line_index: n.line_index,
                    anchor_x: x,
                    rows: vec![n.row],
                    members: vec![i],
                });
            }
        }
    }
    for ev in &mut events {
        ev.rows.sort_unstable();
        ev.rows.dedup();
    }
    events
}

/// `[col, col, filler]` per event; mask = union of rows, count = members.
pub fn query_bootleg(events: &[QueryEvent]) -> Result<BootlegScore, SheetError> {
    if events.is_empty() {
        return Err(SheetError::NoNotes);
    }
    let cols: Vec<EventColumn> = events.iter().map(QueryEvent::column).collect();
    BootlegScore::from_event_columns(&cols).map_err(|_| SheetError::NoNotes)
}
