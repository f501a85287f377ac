//! MIDI ingestion: note onsets from Standard MIDI Files, grouped into
//! simultaneous note events.

mod parse;

pub use parse::{parse_midi, parse_midi_file, MidiFile};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MidiError {
    #[error("not a MIDI file: MThd missing")]
    MissingHeader,
    #[error("truncated {context} at byte {offset}")]
    Truncated { context: &'static str, offset: usize },
    #[error("SMPTE time division unsupported")]
    SmpteDivision,
    #[error("time division of zero ticks per quarter note")]
    ZeroDivision,
    #[error("SMF format {0} unsupported (only 0 and 1)")]
    UnsupportedFormat(u16),
    #[error("header declares {expected} tracks, found {found}")]
    MissingTracks { expected: u16, found: u16 },
    #[error("variable-length quantity longer than four bytes at byte {offset}")]
    BadVarLen { offset: usize },
    #[error("data byte without a running status at byte {offset}")]
    RunningStatusWithoutStatus { offset: usize },
    #[error("data byte above 0x7f at byte {offset}")]
    BadDataByte { offset: usize },
    #[error("unexpected status byte {status:#04x} at byte {offset}")]
    UnexpectedStatus { status: u8, offset: usize },
}

/// One note onset in real time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoteOnset {
    /// Seconds from the start of the file.
    pub time: f64,
    pub pitch: u8,
    pub track: usize,
}

/// A group of onsets treated as simultaneous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NoteEvent {
    /// Time of the earliest member onset.
    pub time: f64,
    pub pitches: BTreeSet<u8>,
    pub onset_count: usize,
}

/// Default simultaneity window for onset clustering, in seconds.
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 0.05;

/// Anchored grouping: a group opens at the first unassigned onset `t0` and
/// takes every onset with time `< t0 + tol`. Not transitive, so a fast run
/// cannot chain into one event. `onsets` must be sorted by time.
pub fn cluster_onsets(onsets: &[NoteOnset], tol: f64) -> Vec<NoteEvent> {
    let mut events: Vec<NoteEvent> = Vec::new();
    for onset in onsets {
        match events.last_mut() {
            Some(ev) if onset.time < ev.time + tol => {
                ev.pitches.insert(onset.pitch);
                ev.onset_count += 1;
            }
            _ => events.push(NoteEvent {
                time: onset.time,
                pitches: BTreeSet::from([onset.pitch]),
                onset_count: 1,
            }),
        }
    }
    events
}

/// Parses `bytes` and clusters the onsets in one step.
pub fn midi_events(bytes: &[u8], tol: f64) -> Result<Vec<NoteEvent>, MidiError> {
    Ok(cluster_onsets(&parse_midi(bytes)?, tol))
}
