//! The bootleg score: a 62-row binary matrix with one column slot per
//! simultaneous note event, shared by MIDI and sheet-image inputs.

mod format;
pub mod staff;

pub use format::{deserialize, serialize, to_json, FormatError, BTLG_MAGIC, BTLG_VERSION};
pub use staff::{pitch_mask, pitch_to_rows, Staff, NUM_ROWS};

use thiserror::Error;

use crate::midi::NoteEvent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("no note events")]
    NoEvents,
    #[error("column {0}: {1}")]
    BadColumn(usize, &'static str),
    #[error("column arrays have different lengths")]
    Ragged,
    #[error("event count {0} exceeds the 16-bit column count limit")]
    CountOverflow(usize),
}

/// Bits 62 and 63 of a column mask are reserved.
pub const ROW_MASK: u64 = (1u64 << NUM_ROWS) - 1;

/// Each event expands to `COLUMNS_PER_EVENT` columns: two copies then a
/// blank filler.
pub const COLUMNS_PER_EVENT: usize = 3;

/// Column-major bootleg score.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BootlegScore {
    columns: Vec<u64>,
    counts: Vec<u16>,
    event_index: Vec<Option<u32>>,
}

/// One event's contribution: union of rows and the number of notes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventColumn {
    pub mask: u64,
    pub count: u16,
}

impl BootlegScore {
    /// Builds a score from raw arrays, checking the filler rules: a column
    /// with no event is all zero with count 0, any other has at least one
    /// bit and count at least 1.
    pub fn from_parts(
        columns: Vec<u64>,
        counts: Vec<u16>,
        event_index: Vec<Option<u32>>,
    ) -> Result<Self, ScoreError> {
        if columns.len() != counts.len() || columns.len() != event_index.len() {
            return Err(ScoreError::Ragged);
        }
        for (i, ((&mask, &count), ev)) in columns.iter().zip(&counts).zip(&event_index).enumerate() {
            if mask & !ROW_MASK != 0 {
                return Err(ScoreError::BadColumn(i, "reserved bits 62-63 set"));
            }
            match ev {
                None if mask != 0 || count != 0 => {
                    return Err(ScoreError::BadColumn(i, "filler column must be empty"))
                }
                Some(_) if mask == 0 || count == 0 => {
                    return Err(ScoreError::BadColumn(i, "event column needs a bit and a count"))
                }
                _ => {}
            }
        }
        Ok(Self {
            columns,
            counts,
            event_index,
        })
    }

    /// Expands events into `[col, col, filler]` triples, so width = 3N.
    pub fn from_event_columns(events: &[EventColumn]) -> Result<Self, ScoreError> {
        if events.is_empty() {
            return Err(ScoreError::NoEvents);
        }
        let n = events.len() * COLUMNS_PER_EVENT;
        let mut columns = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        let mut event_index = Vec::with_capacity(n);
        for (i, ev) in events.iter().enumerate() {
            for _ in 0..COLUMNS_PER_EVENT - 1 {
                columns.push(ev.mask & ROW_MASK);
                counts.push(ev.count);
                event_index.push(Some(i as u32));
            }
            columns.push(0);
            counts.push(0);
            event_index.push(None);
        }
        Self::from_parts(columns, counts, event_index)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    pub fn event_index(&self) -> &[Option<u32>] {
        &self.event_index
    }

    pub fn is_filler(&self, col: usize) -> bool {
        self.event_index[col].is_none()
    }

    /// Rows set in column `col`, ascending.
    pub fn rows(&self, col: usize) -> Vec<usize> {
        let m = self.columns[col];
        (0..NUM_ROWS).filter(|&r| m >> r & 1 == 1).collect()
    }

    /// Number of distinct source events.
    pub fn num_events(&self) -> usize {
        self.event_index
            .iter()
            .flatten()
            .max()
            .map_or(0, |&m| m as usize + 1)
    }

    /// Columns `[start, end)` as a new score, event indices kept.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            columns: self.columns[start..end].to_vec(),
            counts: self.counts[start..end].to_vec(),
            event_index: self.event_index[start..end].to_vec(),
        }
    }
}

/// Column of a MIDI event: union of the rows of every pitch.
pub fn event_column(event: &NoteEvent) -> Result<EventColumn, ScoreError> {
    let mask = event.pitches.iter().fold(0u64, |m, &p| m | pitch_mask(p));
    let count = u16::try_from(event.onset_count).map_err(|_| ScoreError::CountOverflow(event.onset_count))?;
    Ok(EventColumn { mask, count })
}

/// MIDI bootleg score of clustered note events.
pub fn midi_bootleg(events: &[NoteEvent]) -> Result<BootlegScore, ScoreError> {
    let cols = events.iter().map(event_column).collect::<Result<Vec<_>, _>>()?;
    BootlegScore::from_event_columns(&cols)
}
