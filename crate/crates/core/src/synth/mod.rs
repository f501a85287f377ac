//! Synthetic pieces and page renders with known ground truth.

mod piece;

pub use piece::{
    natural_pitch, piece_seeds, Measure, Piece, PieceEvent, PieceNote, PieceParams, BEATS_PER_MEASURE, LOWER_ROWS,
    UPPER_ROWS,
};

mod render;

pub use render::{encode_png, render_page, DrawnEvent, Page, PageTruth, RenderParams, SystemTruth, TruthNotehead};

mod dataset;

pub use dataset::{write_dataset, SyntheticQuery};
