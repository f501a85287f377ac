//! Draws a run of measures of a [`Piece`] as a printed grand-staff page,
//! then shades it like a phone photo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::image::{GrayImage, Raster};
use crate::score::Staff;

use super::piece::{Piece, PieceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderParams {
    pub width: usize,
    pub height: usize,
    /// Staff-line spacing in pixels; drawn from 12..=24 when `None`.
    pub spacing: Option<usize>,
    pub noise_sigma: f64,
    /// Peak-to-peak lighting change across the page.
    pub gradient: f64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            width: 750,
            height: 1000,
            spacing: None,
            noise_sigma: 0.02,
            gradient: 0.15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruthNotehead {
    pub x: f64,
    pub y: f64,
    pub row: usize,
    pub staff: Staff,
    pub system: usize,
    /// Index into [`PageTruth::events`].
    pub event: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemTruth {
    /// Centre of the upper staff's top line.
    pub upper_top: f64,
    /// Centre of the lower staff's top line.
    pub lower_top: f64,
    /// Centre of the lower staff's bottom line.
    pub bottom: f64,
    pub first_measure: usize,
    pub last_measure: usize,
    pub barline_xs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DrawnEvent {
    pub system: usize,
    pub x: f64,
    pub tick: u64,
    /// Rows of every notehead at this onset, ascending, deduplicated.
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PageTruth {
    pub spacing: usize,
    pub line_width: usize,
    pub beam_thickness: usize,
    pub systems: Vec<SystemTruth>,
    pub noteheads: Vec<TruthNotehead>,
    pub events: Vec<DrawnEvent>,
    /// First and last measure on the page, 1-based, inclusive.
    pub measure_range: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Page {
    pub image: GrayImage<f32>,
    pub truth: PageTruth,
}

const QUARTER_SLOT: f64 = 2.8;
const EIGHTH_SLOT: f64 = 2.3;
const MEASURE_PAD: f64 = 0.8;
const STEM_LEN: f64 = 3.5;
const STEM_W: f64 = 2.0;
const HEAD_W: f64 = 1.35;
const LEDGER_EXTRA: f64 = 0.4;
const SYSTEM_GAP: f64 = 7.0;
const MARGIN_Y: f64 = 4.5;
const MARGIN_X: f64 = 30.0;

struct Canvas {
    w: usize,
    h: usize,
    ink: Vec<bool>,
}

impl Canvas {
    fn new(w: usize, h: usize) -> Self {
        Self {
            w,
            h,
            ink: vec![false; w * h],
        }
    }

    /// Pixels whose centres fall in `[x0, x1) × [y0, y1)`.
    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) {
        let c0 = (x0 - 0.5).ceil().max(0.0) as usize;
        let r0 = (y0 - 0.5).ceil().max(0.0) as usize;
        let c1 = ((x1 - 0.5).ceil().max(0.0) as usize).min(self.w);
        let r1 = ((y1 - 0.5).ceil().max(0.0) as usize).min(self.h);
        for r in r0..r1 {
            for c in c0..c1 {
                self.ink[r * self.w + c] = true;
            }
        }
    }

    fn hline(&mut self, x0: f64, x1: f64, y: f64, thickness: f64) {
        self.rect(x0, y - thickness / 2.0, x1, y + thickness / 2.0);
    }

    fn ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64) {
        let r0 = (cy - ry).floor().max(0.0) as usize;
        let r1 = ((cy + ry).ceil() as usize + 1).min(self.h);
        let c0 = (cx - rx).floor().max(0.0) as usize;
        let c1 = ((cx + rx).ceil() as usize + 1).min(self.w);
        for r in r0..r1 {
            for c in c0..c1 {
                let dx = (c as f64 + 0.5 - cx) / rx;
                let dy = (r as f64 + 0.5 - cy) / ry;
                if dx * dx + dy * dy <= 1.0 {
                    self.ink[r * self.w + c] = true;
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Geometry {
    s: f64,
    line_w: f64,
    beam: f64,
}

impl Geometry {
    fn row_y(&self, sys: &SystemTruth, staff: Staff, row: usize) -> f64 {
        let top = match staff {
            Staff::Upper => sys.upper_top,
            Staff::Lower => sys.lower_top,
        };
        top + staff.position_for_row(row as i32) as f64 * self.s / 2.0
    }

    fn measure_width(&self, events: &[PieceEvent], tpq: u64) -> f64 {
        let slots: f64 = events.iter().map(|e| self.slot(e, tpq)).sum();
        self.s * (2.0 * MEASURE_PAD) + slots
    }

    fn slot(&self, e: &PieceEvent, tpq: u64) -> f64 {
        self.s * if e.duration < tpq { EIGHTH_SLOT } else { QUARTER_SLOT }
    }
}

/// A stemmed group: one chord, or a beamed pair of chords, on one staff.
struct Chord {
    x: f64,
    ys: Vec<f64>,
    rows: Vec<usize>,
}

fn stem_up(staff: Staff, chords: &[&Chord]) -> bool {
    let middle = staff.row_for_position(4) as f64;
    let hi = chords.iter().flat_map(|c| &c.rows).max().copied().unwrap_or(0) as f64;
    let lo = chords.iter().flat_map(|c| &c.rows).min().copied().unwrap_or(0) as f64;
    hi - middle < middle - lo
}

fn draw_stems(canvas: &mut Canvas, g: &Geometry, staff: Staff, chords: &[&Chord]) {
    let up = stem_up(staff, chords);
    let rx = g.s * HEAD_W / 2.0;
    let len = g.s * STEM_LEN;
    let stem_x = |c: &Chord| if up { c.x + rx - STEM_W } else { c.x - rx };
    let top = |c: &Chord| c.ys.iter().copied().fold(f64::INFINITY, f64::min);
    let bottom = |c: &Chord| c.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tip = if up {
        chords.iter().map(|c| top(c)).fold(f64::INFINITY, f64::min) - len
    } else {
        chords.iter().map(|c| bottom(c)).fold(f64::NEG_INFINITY, f64::max) + len
    };
    for c in chords {
        let x = stem_x(c);
        if up {
            canvas.rect(x, tip, x + STEM_W, bottom(c));
        } else {
            canvas.rect(x, top(c), x + STEM_W, tip);
        }
    }
    if chords.len() > 1 {
        let x0 = stem_x(chords[0]);
        let x1 = stem_x(chords[chords.len() - 1]) + STEM_W;
        if up {
            canvas.rect(x0, tip, x1, tip + g.beam);
        } else {
            canvas.rect(x0, tip - g.beam, x1, tip);
        }
    }
}

fn ledger_rows(staff: Staff, row: usize) -> Vec<usize> {
    let pos = staff.position_for_row(row as i32);
    let mut out = Vec::new();
    let mut p = if pos < 0 { -2 } else { 10 };
    if pos < 0 {
        while p >= pos {
            out.push(staff.row_for_position(p) as usize);
            p -= 2;
        }
    } else {
        while p <= pos {
            out.push(staff.row_for_position(p) as usize);
            p += 2;
        }
    }
    out
}

/// Renders as many whole measures as fit, starting at 1-based
/// `first_measure`.
pub fn render_page(piece: &Piece, first_measure: usize, params: &RenderParams, seed: u64) -> Page {
    assert!(first_measure >= 1 && first_measure <= piece.measures.len(), "first measure out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = params.spacing.unwrap_or_else(|| rng.gen_range(12..=24));
    let line_w = if s >= 18 { 3 } else { 2 };
    let beam = ((0.45 * s as f64).round() as usize).clamp(6, 10);
    let g = Geometry {
        s: s as f64,
        line_w: line_w as f64,
        beam: beam as f64,
    };
    let staff_gap = g.s * rng.gen_range(4..=5) as f64;
    let pitch = 8.0 * g.s + staff_gap + SYSTEM_GAP * g.s;
    let usable_h = params.height as f64 - 2.0 * MARGIN_Y * g.s + SYSTEM_GAP * g.s;
    let max_systems = ((usable_h / pitch).floor() as usize).max(1);
    let (w, h) = (params.width as f64, params.height as f64);
    let tpq = piece.ticks_per_quarter as u64;

    let mut canvas = Canvas::new(params.width, params.height);
    let mut systems: Vec<SystemTruth> = Vec::new();
    let mut noteheads = Vec::new();
    let mut events = Vec::new();
    let mut m = first_measure;
    let line_w_px = g.line_w;
    while systems.len() < max_systems && m <= piece.measures.len() {
        let upper_top = MARGIN_Y * g.s + systems.len() as f64 * pitch;
        let lower_top = upper_top + 4.0 * g.s + staff_gap;
        let mut sys = SystemTruth {
            upper_top,
            lower_top,
            bottom: lower_top + 4.0 * g.s,
            first_measure: m,
            last_measure: m,
            barline_xs: vec![MARGIN_X],
        };
        let mut x = MARGIN_X;
        let mut placed = Vec::new();
        while m <= piece.measures.len() {
            let mw = g.measure_width(&piece.measures[m - 1].events, tpq);
            if x + mw > w - MARGIN_X && !placed.is_empty() {
                break;
            }
            placed.push((m, x));
            x += mw;
            sys.barline_xs.push(x);
            sys.last_measure = m;
            m += 1;
        }
        let system_index = systems.len();
        let right = x;
        for i in 0..5 {
            for top in [sys.upper_top, sys.lower_top] {
                canvas.hline(MARGIN_X, right + line_w_px, top + i as f64 * g.s, line_w_px);
            }
        }
        for &bx in &sys.barline_xs {
            canvas.rect(bx, sys.upper_top - line_w_px / 2.0, bx + line_w_px, sys.bottom + line_w_px / 2.0);
        }
        for (measure, mx) in placed {
            let mut ex = mx + MEASURE_PAD * g.s;
            let mut pending: [Option<Chord>; 2] = [None, None];
            for ev in &piece.measures[measure - 1].events {
                let slot = g.slot(ev, tpq);
                let cx = ex + slot / 2.0;
                ex += slot;
                let event_index = events.len();
                let mut rows: Vec<usize> = ev.notes.iter().map(|n| n.row).collect();
                rows.sort_unstable();
                rows.dedup();
                events.push(DrawnEvent {
                    system: system_index,
                    x: cx,
                    tick: ev.tick,
                    rows,
                });
                let eighth = ev.duration < tpq;
                let first_of_pair = eighth && (ev.tick % tpq) == 0;
                for (k, staff) in [Staff::Upper, Staff::Lower].into_iter().enumerate() {
                    let notes: Vec<_> = ev.notes_on(staff).collect();
                    let mut chord = Chord {
                        x: cx,
                        ys: Vec::new(),
                        rows: Vec::new(),
                    };
                    for n in &notes {
                        let y = g.row_y(&sys, staff, n.row);
                        canvas.ellipse(cx, y, g.s * HEAD_W / 2.0, (g.s + 1.0) / 2.0);
                        for lr in ledger_rows(staff, n.row) {
                            let ly = g.row_y(&sys, staff, lr);
                            let half = g.s * (HEAD_W / 2.0 + LEDGER_EXTRA);
                            canvas.hline(cx - half, cx + half, ly, line_w_px);
                        }
                        if !chord.rows.contains(&n.row) {
                            chord.rows.push(n.row);
                            chord.ys.push(y);
                        }
                        noteheads.push(TruthNotehead {
                            x: cx,
                            y,
                            row: n.row,
                            staff,
                            system: system_index,
                            event: event_index,
                        });
                    }
                    if first_of_pair {
                        if let Some(prev) = pending[k].take() {
                            draw_stems(&mut canvas, &g, staff, &[&prev]);
                        }
                        if !chord.rows.is_empty() {
                            pending[k] = Some(chord);
                        }
                    } else if eighth {
                        match (pending[k].take(), chord.rows.is_empty()) {
                            (Some(prev), false) => draw_stems(&mut canvas, &g, staff, &[&prev, &chord]),
                            (Some(prev), true) => draw_stems(&mut canvas, &g, staff, &[&prev]),
                            (None, false) => draw_stems(&mut canvas, &g, staff, &[&chord]),
                            (None, true) => {}
                        }
                    } else if !chord.rows.is_empty() {
                        draw_stems(&mut canvas, &g, staff, &[&chord]);
                    }
                }
            }
            for (p, staff) in pending.iter_mut().zip([Staff::Upper, Staff::Lower]) {
                if let Some(prev) = p.take() {
                    draw_stems(&mut canvas, &g, staff, &[&prev]);
                }
            }
        }
        systems.push(sys);
    }

    let measure_range = (first_measure, systems.last().map_or(first_measure, |s| s.last_measure));
    let image = shade(&canvas, params, &mut rng, w, h);
    Page {
        image,
        truth: PageTruth {
            spacing: s,
            line_width: line_w,
            beam_thickness: beam,
            systems,
            noteheads,
            events,
            measure_range,
        },
    }
}

fn shade(canvas: &Canvas, params: &RenderParams, rng: &mut ChaCha8Rng, w: f64, h: f64) -> GrayImage<f32> {
    let paper = rng.gen_range(0.80..0.92);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let (gx, gy) = (angle.cos() * params.gradient, angle.sin() * params.gradient);
    let ink = rng.gen_range(0.08..0.18);
    let noise = Normal::new(0.0, params.noise_sigma.max(0.0)).expect("finite sigma");
    let mut data = Vec::with_capacity(canvas.ink.len());
    for r in 0..canvas.h {
        for c in 0..canvas.w {
            let light = paper + gx * (c as f64 / w - 0.5) + gy * (r as f64 / h - 0.5);
            let base = if canvas.ink[r * canvas.w + c] { ink * light } else { light };
            data.push((base + noise.sample(rng)).clamp(0.0, 1.0) as f32);
        }
    }
    let raster = Raster::new(canvas.h, canvas.w, data).expect("sized to canvas");
    GrayImage::from_raster_clamped(raster)
}

/// Encodes a gray image as 8-bit PNG.
pub fn encode_png(img: &GrayImage<f32>) -> Vec<u8> {
    let buf = ::image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.to_u8())
        .expect("buffer sized to image");
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, ::image::ImageFormat::Png).expect("in-memory PNG");
    out.into_inner()
}
