//! Binary `BTLG` container and a JSON dump for debugging.
//!
//! Layout, little endian throughout:
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 4     | magic `BTLG`                            |
//! | 1     | version (1)                             |
//! | 4     | column count `n` (u32)                  |
//! | 14·n  | per column: mask u64, count u16, event u32 (`0xFFFFFFFF` = filler) |

use serde_json::json;
use thiserror::Error;

use super::{BootlegScore, ScoreError, NUM_ROWS};

pub const BTLG_MAGIC: &[u8; 4] = b"BTLG";
pub const BTLG_VERSION: u8 = 1;
const FILLER_EVENT: u32 = u32::MAX;
const HEADER_LEN: usize = 9;
const COLUMN_LEN: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic, expected BTLG")]
    BadMagic,
    #[error("unsupported BTLG version {0}")]
    BadVersion(u8),
    #[error("expected {expected} bytes, found {found}")]
    BadLength { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] ScoreError),
}

pub fn serialize(score: &BootlegScore) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + COLUMN_LEN * score.len());
    out.extend_from_slice(BTLG_MAGIC);
    out.push(BTLG_VERSION);
    out.extend_from_slice(&(score.len() as u32).to_le_bytes());
    for i in 0..score.len() {
        out.extend_from_slice(&score.columns[i].to_le_bytes());
        out.extend_from_slice(&score.counts[i].to_le_bytes());
        out.extend_from_slice(&score.event_index[i].unwrap_or(FILLER_EVENT).to_le_bytes());
    }
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<BootlegScore, FormatError> {
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::BadLength {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != BTLG_MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes[4] != BTLG_VERSION {
        return Err(FormatError::BadVersion(bytes[4]));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let expected = HEADER_LEN + COLUMN_LEN * n;
    if bytes.len() != expected {
        return Err(FormatError::BadLength {
            expected,
            found: bytes.len(),
        });
    }
    let mut columns = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for chunk in bytes[HEADER_LEN..].chunks_exact(COLUMN_LEN) {
        columns.push(u64::from_le_bytes(chunk[0..8].try_into().unwrap()));
        counts.push(u16::from_le_bytes(chunk[8..10].try_into().unwrap()));
        let ev = u32::from_le_bytes(chunk[10..14].try_into().unwrap());
        events.push((ev != FILLER_EVENT).then_some(ev));
    }
    Ok(BootlegScore::from_parts(columns, counts, events)?)
}

/// Human-readable dump: one object per column with its set rows.
pub fn to_json(score: &BootlegScore) -> serde_json::Value {
    let cols: Vec<_> = (0..score.len())
        .map(|i| {
            json!({
                "rows": score.rows(i),
                "count": score.counts[i],
                "event": score.event_index[i],
            })
        })
        .collect();
    json!({
        "numRows": NUM_ROWS,
        "numColumns": score.len(),
        "columns": cols,
    })
}
