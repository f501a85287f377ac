//! Every tunable hyperparameter in one flat, validated record.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::align::{AlignOptions, StepWeights};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config read error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config key {key} = {value} outside {range}")]
    OutOfRange {
        key: &'static str,
        value: String,
        range: String,
    },
    #[error("config keys {lo} and {hi} are out of order")]
    Inverted { lo: &'static str, hi: &'static str },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct Config {
    // Preprocessing.
    pub max_dim: usize,
    pub blur_half_width: usize,

    // Noteheads.
    pub notehead_se_radius: usize,
    pub blob_min_area: usize,
    pub blob_max_area: usize,
    pub blob_num_thresholds: usize,
    pub blob_min_dist: f64,
    pub crop_size: usize,
    pub cand_height_min: f64,
    pub cand_height_max: f64,
    pub cand_width_min: f64,
    pub cand_width_max: f64,
    pub cand_aspect_min: f64,
    pub cand_aspect_max: f64,
    pub cand_area_min: f64,
    pub cand_area_max: f64,
    pub chord_area_min: f64,
    pub chord_max_width: f64,

    // Staff lines.
    pub horiz_se_width: usize,
    pub beam_thickness_thresh: usize,
    pub comb_spacing_min: usize,
    pub comb_spacing_max: usize,
    pub comb_spacing_step: usize,
    pub impulse_height: usize,
    pub context_half_width: usize,
    pub staff_reach: f64,

    // Bar lines.
    pub vert_se_height: usize,
    pub barline_max_width: usize,

    // Events.
    pub simultaneity_tol: f64,
    pub onset_cluster_tol: f64,

    // Alignment.
    pub dtw_weight_diagonal: f64,
    pub dtw_weight_ref_skip: f64,
    pub dtw_weight_query_skip: f64,
    pub extend_to_next_onset: bool,

    // Evaluation.
    pub baseline_measures: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            max_dim: 1000,
            blur_half_width: 40,
            notehead_se_radius: 5,
            blob_min_area: 50,
            blob_max_area: 1000,
            blob_num_thresholds: 10,
            blob_min_dist: 10.0,
            crop_size: 33,
            cand_height_min: 0.5,
            cand_height_max: 1.5,
            cand_width_min: 0.5,
            cand_width_max: 1.5,
            cand_aspect_min: 0.5,
            cand_aspect_max: 2.0,
            cand_area_min: 0.5,
            cand_area_max: 2.0,
            chord_area_min: 1.8,
            chord_max_width: 2.0,
            horiz_se_width: 41,
            beam_thickness_thresh: 5,
            comb_spacing_min: 10,
            comb_spacing_max: 30,
            comb_spacing_step: 1,
            impulse_height: 2,
            context_half_width: 60,
            staff_reach: 3.5,
            vert_se_height: 41,
            barline_max_width: 12,
            simultaneity_tol: 1.0,
            onset_cluster_tol: 0.05,
            dtw_weight_diagonal: 1.0,
            dtw_weight_ref_skip: 1.0,
            dtw_weight_query_skip: 2.0,
            extend_to_next_onset: true,
            baseline_measures: 0,
            seed: 0,
        }
    }
}

fn check<T: PartialOrd + ToString + Copy>(key: &'static str, v: T, lo: T, hi: T) -> Result<(), ConfigError> {
    if v >= lo && v <= hi {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            key,
            value: v.to_string(),
            range: format!("[{}, {}]", lo.to_string(), hi.to_string()),
        })
    }
}

fn ordered<T: PartialOrd>(lo: &'static str, a: T, hi: &'static str, b: T) -> Result<(), ConfigError> {
    if a <= b {
        Ok(())
    } else {
        Err(ConfigError::Inverted { lo, hi })
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Pretty JSON with keys in declaration order, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plain data");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check("maxDim", self.max_dim, 64, 10_000)?;
        check("blurHalfWidth", self.blur_half_width, 1, 500)?;
        check("noteheadSeRadius", self.notehead_se_radius, 1, 50)?;
        check("blobMinArea", self.blob_min_area, 1, 1_000_000)?;
        check("blobMaxArea", self.blob_max_area, 1, 1_000_000)?;
        ordered("blobMinArea", self.blob_min_area, "blobMaxArea", self.blob_max_area)?;
        check("blobNumThresholds", self.blob_num_thresholds, 1, 255)?;
        check("blobMinDist", self.blob_min_dist, 0.0, 1000.0)?;
        check("cropSize", self.crop_size, 3, 401)?;
        if self.crop_size % 2 == 0 {
            return Err(ConfigError::OutOfRange {
                key: "cropSize",
                value: self.crop_size.to_string(),
                range: "odd integers".into(),
            });
        }
        for (klo, lo, khi, hi) in [
            ("candHeightMin", self.cand_height_min, "candHeightMax", self.cand_height_max),
            ("candWidthMin", self.cand_width_min, "candWidthMax", self.cand_width_max),
            ("candAspectMin", self.cand_aspect_min, "candAspectMax", self.cand_aspect_max),
            ("candAreaMin", self.cand_area_min, "candAreaMax", self.cand_area_max),
        ] {
            check(klo, lo, 0.0, 100.0)?;
            check(khi, hi, 0.0, 100.0)?;
            ordered(klo, lo, khi, hi)?;
        }
        check("chordAreaMin", self.chord_area_min, 1.0, 100.0)?;
        check("chordMaxWidth", self.chord_max_width, 1.0, 100.0)?;
        check("horizSeWidth", self.horiz_se_width, 1, 1001)?;
        check("beamThicknessThresh", self.beam_thickness_thresh, 1, 1000)?;
        check("combSpacingMin", self.comb_spacing_min, 2, 500)?;
        check("combSpacingMax", self.comb_spacing_max, 2, 500)?;
        ordered("combSpacingMin", self.comb_spacing_min, "combSpacingMax", self.comb_spacing_max)?;
        check("combSpacingStep", self.comb_spacing_step, 1, 500)?;
        check("impulseHeight", self.impulse_height, 1, 50)?;
        check("contextHalfWidth", self.context_half_width, 0, 10_000)?;
        check("staffReach", self.staff_reach, 0.5, 100.0)?;
        check("vertSeHeight", self.vert_se_height, 1, 1001)?;
        check("barlineMaxWidth", self.barline_max_width, 1, 1000)?;
        check("simultaneityTol", self.simultaneity_tol, 0.0, 100.0)?;
        check("onsetClusterTol", self.onset_cluster_tol, 0.0, 10.0)?;
        check("dtwWeightDiagonal", self.dtw_weight_diagonal, 0.0, 100.0)?;
        check("dtwWeightRefSkip", self.dtw_weight_ref_skip, 0.0, 100.0)?;
        check("dtwWeightQuerySkip", self.dtw_weight_query_skip, 0.0, 100.0)?;
        check("baselineMeasures", self.baseline_measures, 0, 100_000)?;
        Ok(())
    }

    pub fn comb_spacings(&self) -> Vec<usize> {
        (self.comb_spacing_min..=self.comb_spacing_max)
            .step_by(self.comb_spacing_step)
            .collect()
    }

    pub fn align_options(&self) -> AlignOptions {
        AlignOptions {
            weights: StepWeights {
                diagonal: self.dtw_weight_diagonal,
                ref_skip: self.dtw_weight_ref_skip,
                query_skip: self.dtw_weight_query_skip,
            },
            extend_to_next_onset: self.extend_to_next_onset,
        }
    }
}
