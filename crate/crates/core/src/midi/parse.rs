//! Standard MIDI File reader: header, track chunks, running status and a
//! tempo map built from Set-Tempo meta events.

use super::{MidiError, NoteOnset};

const DEFAULT_US_PER_QUARTER: u32 = 500_000;

/// Onsets and overall length of a decoded file.
#[derive(Clone, Debug, PartialEq)]
pub struct MidiFile {
    pub format: u16,
    pub ticks_per_quarter: u16,
    pub onsets: Vec<NoteOnset>,
    /// Time of the last event of any kind, in seconds.
    pub end_time: f64,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    context: &'static str,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8], context: &'static str) -> Self {
        Self {
            bytes,
            pos: 0,
            context,
        }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], MidiError> {
        if self.remaining() < n {
            return Err(MidiError::Truncated {
                context: self.context,
                offset: self.pos,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, MidiError> {
        Ok(self.take(1)?[0])
    }

    fn peek(&self) -> Result<u8, MidiError> {
        self.bytes.get(self.pos).copied().ok_or(MidiError::Truncated {
            context: self.context,
            offset: self.pos,
        })
    }

    fn u32(&mut self) -> Result<u32, MidiError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// Variable-length quantity, at most four bytes.
    fn vlq(&mut self) -> Result<u32, MidiError> {
        let mut value: u32 = 0;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | (b & 0x7f) as u32;
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::BadVarLen { offset: self.pos })
    }
}

struct RawNote {
    tick: u64,
    pitch: u8,
    track: usize,
}

struct TrackScan {
    notes: Vec<RawNote>,
    tempos: Vec<(u64, u32)>,
    last_tick: u64,
}

fn scan_track(data: &[u8], track: usize) -> Result<TrackScan, MidiError> {
    let mut cur = Cursor::new(data, "track events");
    let mut tick: u64 = 0;
    let mut running: Option<u8> = None;
    let mut scan = TrackScan {
        notes: Vec::new(),
        tempos: Vec::new(),
        last_tick: 0,
    };
    while cur.remaining() > 0 {
        tick += cur.vlq()? as u64;
        scan.last_tick = tick;
        let first = cur.peek()?;
        let status = if first & 0x80 != 0 {
            cur.pos += 1;
            first
        } else {
            running.ok_or(MidiError::RunningStatusWithoutStatus { offset: cur.pos })?
        };
        match status {
            0xff => {
                running = None;
                let kind = cur.u8()?;
                let len = cur.vlq()? as usize;
                let body = cur.take(len)?;
                match kind {
                    0x51 if len == 3 => {
                        let us = u32::from_be_bytes([0, body[0], body[1], body[2]]);
                        scan.tempos.push((tick, us));
                    }
                    0x2f => break,
                    _ => {}
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = cur.vlq()? as usize;
                cur.take(len)?;
            }
            0x80..=0xef => {
                running = Some(status);
                let kind = status & 0xf0;
                let d1 = cur.u8()?;
                let d2 = if matches!(kind, 0xc0 | 0xd0) { 0 } else { cur.u8()? };
                if d1 > 0x7f || d2 > 0x7f {
                    return Err(MidiError::BadDataByte { offset: cur.pos - 1 });
                }
                if kind == 0x90 && d2 > 0 {
                    scan.notes.push(RawNote {
                        tick,
                        pitch: d1,
                        track,
                    });
                }
            }
            other => return Err(MidiError::UnexpectedStatus { status: other, offset: cur.pos - 1 }),
        }
    }
    Ok(scan)
}

/// Converts ticks to seconds through a piecewise-constant tempo map.
struct TempoMap {
    ticks_per_quarter: f64,
    /// (start tick, start seconds, microseconds per quarter), ascending.
    segments: Vec<(u64, f64, u32)>,
}

impl TempoMap {
    fn new(ticks_per_quarter: u16, mut changes: Vec<(u64, u32)>) -> Self {
        changes.sort_by_key(|&(t, _)| t);
        let tpq = ticks_per_quarter as f64;
        let mut segments = vec![(0u64, 0.0f64, DEFAULT_US_PER_QUARTER)];
        for (tick, us) in changes {
            let &(t0, s0, us0) = segments.last().expect("nonempty");
            let secs = s0 + (tick - t0) as f64 * us0 as f64 / (1e6 * tpq);
            if tick == t0 {
                *segments.last_mut().expect("nonempty") = (t0, s0, us);
            } else {
                segments.push((tick, secs, us));
            }
        }
        Self {
            ticks_per_quarter: tpq,
            segments,
        }
    }

    fn seconds(&self, tick: u64) -> f64 {
        let idx = self.segments.partition_point(|&(t, _, _)| t <= tick) - 1;
        let (t0, s0, us) = self.segments[idx];
        s0 + (tick - t0) as f64 * us as f64 / (1e6 * self.ticks_per_quarter)
    }
}

/// Decodes an SMF (format 0 or 1, PPQN division) into note onsets sorted
/// by time, then pitch, then track. Only Note-On with nonzero velocity
/// counts as an onset.
pub fn parse_midi(bytes: &[u8]) -> Result<Vec<NoteOnset>, MidiError> {
    parse_midi_file(bytes).map(|f| f.onsets)
}

pub fn parse_midi_file(bytes: &[u8]) -> Result<MidiFile, MidiError> {
    let mut cur = Cursor::new(bytes, "header");
    if bytes.len() < 4 || &bytes[..4] != b"MThd" {
        return Err(MidiError::MissingHeader);
    }
    cur.take(4)?;
    let header_len = cur.u32()? as usize;
    if header_len < 6 {
        return Err(MidiError::Truncated {
            context: "header",
            offset: cur.pos,
        });
    }
    let header = cur.take(header_len)?;
    let format = u16::from_be_bytes([header[0], header[1]]);
    let ntracks = u16::from_be_bytes([header[2], header[3]]);
    let division = u16::from_be_bytes([header[4], header[5]]);
    if division & 0x8000 != 0 {
        return Err(MidiError::SmpteDivision);
    }
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    if division == 0 {
        return Err(MidiError::ZeroDivision);
    }

    let mut notes = Vec::new();
    let mut tempos = Vec::new();
    let mut last_tick = 0u64;
    let mut track = 0usize;
    cur.context = "chunk";
    while track < ntracks as usize {
        if cur.remaining() == 0 {
            return Err(MidiError::MissingTracks {
                expected: ntracks,
                found: track as u16,
            });
        }
        let id = cur.take(4)?;
        let len = cur.u32()? as usize;
        let body = cur.take(len)?;
        if id != b"MTrk" {
            continue;
        }
        let scan = scan_track(body, track)?;
        notes.extend(scan.notes);
        tempos.extend(scan.tempos);
        last_tick = last_tick.max(scan.last_tick);
        track += 1;
    }

    let map = TempoMap::new(division, tempos);
    let mut onsets: Vec<NoteOnset> = notes
        .into_iter()
        .map(|n| NoteOnset {
            time: map.seconds(n.tick),
            pitch: n.pitch,
            track: n.track,
        })
        .collect();
    onsets.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.pitch.cmp(&b.pitch))
            .then(a.track.cmp(&b.track))
    });
    Ok(MidiFile {
        format,
        ticks_per_quarter: division,
        onsets,
        end_time: map.seconds(last_tick),
    })
}
