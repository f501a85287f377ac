//! Photo in, MIDI time interval out.

use serde::Serialize;

use crate::align::{align, AlignmentResult};
use crate::config::Config;
use crate::image::GrayImage;
use crate::midi::{midi_events, NoteEvent};
use crate::scalar::Scalar;
use crate::score::{midi_bootleg, BootlegScore};
use crate::sheet::analyze;
use crate::timing::StageTimings;
use crate::Error;

/// A MIDI file prepared for alignment.
#[derive(Clone, Debug)]
pub struct Reference {
    pub events: Vec<NoteEvent>,
    pub bootleg: BootlegScore,
}

impl Reference {
    pub fn from_midi(bytes: &[u8], cfg: &Config) -> Result<Self, Error> {
        let events = midi_events(bytes, cfg.onset_cluster_tol)?;
        let bootleg = midi_bootleg(&events)?;
        Ok(Self { events, bootleg })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Retrieval {
    pub query_columns: usize,
    pub alignment: AlignmentResult,
    /// Sheet stages followed by alignment stages.
    pub stage_timings: StageTimings,
}

impl Retrieval {
    pub fn interval(&self) -> (f64, f64) {
        self.alignment.interval()
    }
}

/// Runs the sheet pipeline on `gray` and aligns the result against `reference`.
pub fn retrieve<T: Scalar>(gray: &GrayImage<T>, reference: &Reference, cfg: &Config) -> Result<Retrieval, Error> {
    let analysis = analyze(gray, cfg);
    let mut stage_timings = analysis.timings.clone();
    let query = analysis.outcome?;
    let alignment = align(&query, &reference.bootleg, &reference.events, &cfg.align_options())?;
    stage_timings.extend(&alignment.stage_timings);
    Ok(Retrieval {
        query_columns: query.len(),
        alignment,
        stage_timings,
    })
}
