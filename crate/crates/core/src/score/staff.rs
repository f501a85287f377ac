//! Diatonic staff-row coordinates shared by both modalities.
//!
//! Row `7 * octave + letter` with letters C=0 ... B=6 covers C0 (row 0)
//! through A8 (row 61). Adjacent diatonic steps are one row apart, so two
//! neighboring staff lines span three rows (line, space, line).

use serde::{Deserialize, Serialize};

/// Height of a bootleg score.
pub const NUM_ROWS: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    C,
    D,
    E,
    F,
    G,
    A,
    B,
}

impl Letter {
    pub const ALL: [Letter; 7] = [
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::A,
        Letter::B,
    ];

    pub fn index(self) -> i32 {
        self as i32
    }

    /// Pitch class of the natural.
    pub fn natural_pitch_class(self) -> i32 {
        [0, 2, 4, 5, 7, 9, 11][self as usize]
    }
}

/// A written note name: letter, single accidental (-1, 0, +1), octave in
/// scientific pitch notation (C4 = middle C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Spelling {
    pub letter: Letter,
    pub accidental: i8,
    pub octave: i32,
}

impl Spelling {
    pub fn midi_pitch(&self) -> i32 {
        12 * (self.octave + 1) + self.letter.natural_pitch_class() + self.accidental as i32
    }

    /// Row of this spelling; may fall outside `0..NUM_ROWS`.
    pub fn row(&self) -> i32 {
        row_of(self.letter, self.octave)
    }
}

pub fn row_of(letter: Letter, octave: i32) -> i32 {
    7 * octave + letter.index()
}

/// Rows of the treble staff lines E4 G4 B4 D5 F5, bottom to top.
pub const TREBLE_LINES: [usize; 5] = [30, 32, 34, 36, 38];
/// Rows of the bass staff lines G2 B2 D3 F3 A3, bottom to top.
pub const BASS_LINES: [usize; 5] = [18, 20, 22, 24, 26];

/// Which staff of a grand staff a notehead was read against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Staff {
    Upper,
    Lower,
}

impl Staff {
    /// Row of the staff's top line.
    pub fn top_line_row(self) -> i32 {
        match self {
            Staff::Upper => TREBLE_LINES[4] as i32,
            Staff::Lower => BASS_LINES[4] as i32,
        }
    }

    /// Row for a notehead `position` half-spaces below the top line.
    pub fn row_for_position(self, position: i32) -> i32 {
        self.top_line_row() - position
    }

    pub fn position_for_row(self, row: i32) -> i32 {
        self.top_line_row() - row
    }
}

/// Spellings of a pitch class without double accidentals, as
/// `(letter, accidental, octave shift)`. The octave shift handles B#
/// (written an octave lower) and Cb (an octave higher).
pub fn spellings_of_pitch_class(pc: u8) -> &'static [(Letter, i8, i32)] {
    use Letter::*;
    match pc % 12 {
        0 => &[(C, 0, 0), (B, 1, -1)],
        1 => &[(C, 1, 0), (D, -1, 0)],
        2 => &[(D, 0, 0)],
        3 => &[(D, 1, 0), (E, -1, 0)],
        4 => &[(E, 0, 0), (F, -1, 0)],
        5 => &[(F, 0, 0), (E, 1, 0)],
        6 => &[(F, 1, 0), (G, -1, 0)],
        7 => &[(G, 0, 0)],
        8 => &[(G, 1, 0), (A, -1, 0)],
        9 => &[(A, 0, 0)],
        10 => &[(A, 1, 0), (B, -1, 0)],
        _ => &[(B, 0, 0), (C, -1, 1)],
    }
}

/// Every written spelling of a MIDI pitch (no double accidentals).
pub fn spellings(pitch: u8) -> Vec<Spelling> {
    let octave = pitch as i32 / 12 - 1;
    spellings_of_pitch_class(pitch % 12)
        .iter()
        .map(|&(letter, accidental, shift)| Spelling {
            letter,
            accidental,
            octave: octave + shift,
        })
        .collect()
}

/// Bootleg rows where a notehead for `pitch` could be written, ascending.
pub fn pitch_to_rows(pitch: u8) -> Vec<usize> {
    let mut rows: Vec<usize> = spellings(pitch)
        .iter()
        .map(Spelling::row)
        .filter(|&r| (0..NUM_ROWS as i32).contains(&r))
        .map(|r| r as usize)
        .collect();
    rows.sort_unstable();
    rows.dedup();
    rows
}

/// Bit mask of [`pitch_to_rows`].
pub fn pitch_mask(pitch: u8) -> u64 {
    pitch_to_rows(pitch).iter().fold(0, |m, &r| m | (1u64 << r))
}
