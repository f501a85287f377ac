//! Random two-hand piano pieces in 4/4 and a Standard MIDI File writer.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::MeasureMap;
use crate::score::staff::{Letter, Spelling};
use crate::score::Staff;

/// Lowest and highest bootleg rows drawn on each staff: E2..B3 below,
/// C4..A5 above. Every one of them is within one ledger line of its staff.
pub const LOWER_ROWS: (usize, usize) = (16, 27);
pub const UPPER_ROWS: (usize, usize) = (28, 40);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceNote {
    /// Row the notehead is drawn on.
    pub row: usize,
    pub pitch: u8,
    pub staff: Staff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceEvent {
    pub tick: u64,
    pub duration: u64,
    pub notes: Vec<PieceNote>,
}

impl PieceEvent {
    pub fn notes_on(&self, staff: Staff) -> impl Iterator<Item = &PieceNote> {
        self.notes.iter().filter(move |n| n.staff == staff)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Measure {
    pub events: Vec<PieceEvent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Piece {
    pub ticks_per_quarter: u16,
    pub us_per_quarter: u32,
    pub measures: Vec<Measure>,
}

pub const BEATS_PER_MEASURE: u64 = 4;

/// Natural pitch written on `row`.
pub fn natural_pitch(row: usize) -> u8 {
    let s = Spelling {
        letter: Letter::ALL[row % 7],
        accidental: 0,
        octave: row as i32 / 7,
    };
    s.midi_pitch() as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceParams {
    pub measures: usize,
    /// Probability that a beat holds two eighths instead of a quarter.
    pub eighth_prob: f64,
    pub sharp_prob: f64,
    pub min_bpm: f64,
    pub max_bpm: f64,
}

impl Default for PieceParams {
    fn default() -> Self {
        Self {
            measures: 24,
            eighth_prob: 0.5,
            sharp_prob: 0.1,
            min_bpm: 80.0,
            max_bpm: 140.0,
        }
    }
}

struct Voice {
    range: (usize, usize),
    root: usize,
    /// Weights of chord sizes 0, 1, 2, 3.
    sizes: [u32; 4],
    staff: Staff,
}

impl Voice {
    /// Stacked thirds on a random-walk root.
    fn next(&mut self, rng: &mut ChaCha8Rng, sharp_prob: f64) -> Vec<PieceNote> {
        let k = weighted(rng, &self.sizes);
        if k == 0 {
            return Vec::new();
        }
        let hi_root = self.range.1 - 2 * (k - 1);
        let step: i64 = rng.gen_range(-3..=3);
        self.root = (self.root as i64 + step).clamp(self.range.0 as i64, hi_root as i64) as usize;
        (0..k)
            .map(|i| {
                let row = self.root + 2 * i;
                let mut pitch = natural_pitch(row);
                if rng.gen_bool(sharp_prob) {
                    pitch += 1;
                }
                PieceNote {
                    row,
                    pitch,
                    staff: self.staff,
                }
            })
            .collect()
    }
}

fn weighted(rng: &mut ChaCha8Rng, w: &[u32]) -> usize {
    let total: u32 = w.iter().sum();
    let mut x = rng.gen_range(0..total);
    for (i, &wi) in w.iter().enumerate() {
        if x < wi {
            return i;
        }
        x -= wi;
    }
    w.len() - 1
}

impl Piece {
    pub fn random(params: &PieceParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tpq: u16 = 480;
        let bpm = rng.gen_range(params.min_bpm..=params.max_bpm);
        let us_per_quarter = (60e6 / bpm).round() as u32;
        let mut upper = Voice {
            range: UPPER_ROWS,
            root: rng.gen_range(UPPER_ROWS.0..=UPPER_ROWS.1 - 4),
            sizes: [15, 50, 20, 15],
            staff: Staff::Upper,
        };
        let mut lower = Voice {
            range: LOWER_ROWS,
            root: rng.gen_range(LOWER_ROWS.0..=LOWER_ROWS.1 - 2),
            sizes: [30, 50, 20, 0],
            staff: Staff::Lower,
        };
        let q = tpq as u64;
        let mut measures = Vec::with_capacity(params.measures);
        for m in 0..params.measures as u64 {
            let mut events = Vec::new();
            for beat in 0..BEATS_PER_MEASURE {
                let start = (m * BEATS_PER_MEASURE + beat) * q;
                let slots: &[(u64, u64)] = if rng.gen_bool(params.eighth_prob) {
                    &[(0, q / 2), (q / 2, q / 2)]
                } else {
                    &[(0, q)]
                };
                for &(offset, duration) in slots {
                    let mut notes = upper.next(&mut rng, params.sharp_prob);
                    notes.extend(lower.next(&mut rng, params.sharp_prob));
                    if notes.is_empty() {
                        let voice = if rng.gen_bool(0.5) { &mut upper } else { &mut lower };
                        let saved = voice.sizes;
                        voice.sizes = [0, 1, 0, 0];
                        notes = voice.next(&mut rng, params.sharp_prob);
                        voice.sizes = saved;
                    }
                    events.push(PieceEvent {
                        tick: start + offset,
                        duration,
                        notes,
                    });
                }
            }
            measures.push(Measure { events });
        }
        Self {
            ticks_per_quarter: tpq,
            us_per_quarter,
            measures,
        }
    }

    pub fn events(&self) -> impl Iterator<Item = &PieceEvent> {
        self.measures.iter().flat_map(|m| m.events.iter())
    }

    pub fn seconds(&self, tick: u64) -> f64 {
        tick as f64 * self.us_per_quarter as f64 / (1e6 * self.ticks_per_quarter as f64)
    }

    pub fn measure_ticks(&self) -> u64 {
        BEATS_PER_MEASURE * self.ticks_per_quarter as u64
    }

    pub fn measure_map(&self) -> MeasureMap {
        let downbeats: Vec<f64> = (0..self.measures.len() as u64)
            .map(|m| self.seconds(m * self.measure_ticks()))
            .collect();
        let end = self.seconds(self.measures.len() as u64 * self.measure_ticks());
        MeasureMap::from_downbeats(&downbeats, end).expect("regular 4/4 grid")
    }

    /// Format-0 SMF: tempo, then note on/off pairs at 90% of each duration.
    pub fn to_smf(&self) -> Vec<u8> {
        let mut timed: Vec<(u64, u8, u8, u8)> = Vec::new();
        for ev in self.events() {
            let off = ev.tick + ev.duration * 9 / 10;
            let mut pitches: Vec<u8> = ev.notes.iter().map(|n| n.pitch).collect();
            pitches.sort_unstable();
            pitches.dedup();
            for p in pitches {
                timed.push((ev.tick, 1, 0x90, p));
                timed.push((off, 0, 0x80, p));
            }
        }
        timed.sort();
        let mut track = Vec::new();
        write_vlq(&mut track, 0);
        let t = self.us_per_quarter.to_be_bytes();
        track.extend_from_slice(&[0xff, 0x51, 0x03, t[1], t[2], t[3]]);
        let mut last = 0;
        for (tick, _, status, pitch) in timed {
            write_vlq(&mut track, (tick - last) as u32);
            last = tick;
            let vel = if status == 0x90 { 80 } else { 0 };
            track.extend_from_slice(&[status, pitch, vel]);
        }
        write_vlq(&mut track, 0);
        track.extend_from_slice(&[0xff, 0x2f, 0x00]);

        let mut out = Vec::with_capacity(track.len() + 22);
        out.extend_from_slice(b"MThd");
        out.extend_from_slice(&6u32.to_be_bytes());
        out.extend_from_slice(&0u16.to_be_bytes());
        out.extend_from_slice(&1u16.to_be_bytes());
        out.extend_from_slice(&self.ticks_per_quarter.to_be_bytes());
        out.extend_from_slice(b"MTrk");
        out.extend_from_slice(&(track.len() as u32).to_be_bytes());
        out.extend_from_slice(&track);
        out
    }

    /// Events of measures `first..=last` (1-based), in order.
    pub fn events_in(&self, first: usize, last: usize) -> Vec<&PieceEvent> {
        self.measures[first - 1..last].iter().flat_map(|m| m.events.iter()).collect()
    }
}

fn write_vlq(out: &mut Vec<u8>, mut v: u32) {
    let mut bytes = vec![(v & 0x7f) as u8];
    v >>= 7;
    while v > 0 {
        bytes.push((v & 0x7f) as u8 | 0x80);
        v >>= 7;
    }
    bytes.reverse();
    out.extend_from_slice(&bytes);
}

/// Random distinct seeds for a batch of pieces.
pub fn piece_seeds(base: u64, n: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    let mut seeds: Vec<u64> = (0..n as u64).map(|i| base.wrapping_mul(1_000_003).wrapping_add(i)).collect();
    seeds.shuffle(&mut rng);
    seeds
}
