//! Acceptance criteria 1 to 11, one PASS/FAIL line each. Runs as a plain
//! binary so the lines show up in `cargo test` output.

mod common;

use std::path::Path;
use std::time::Instant;

use bootleg::align::{align, subsequence_dtw, StepWeights};
use bootleg::config::Config;
use bootleg::eval::{evaluate_dataset, EvalOptions, Report};
use bootleg::image::{
    dilate, erode, label_components, open, otsu_threshold, BinaryImage, Connectivity, GrayImage, Raster,
    StructuringElement,
};
use bootleg::midi::{midi_events, NoteEvent};
use bootleg::pipeline::{retrieve, Reference};
use bootleg::score::{midi_bootleg, pitch_to_rows, serialize, BootlegScore};
use bootleg::sheet::{analyze, load_gray};
use bootleg::synth::{write_dataset, Piece, PieceParams, RenderParams, SyntheticQuery};
use bootleg::timing::StageTimings;
use common::{brute_force_dtw, flood_fill_partition, otsu_oracle};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_piece(rng: &mut ChaCha8Rng) -> Piece {
    let params = PieceParams {
        measures: rng.gen_range(4..=40),
        eighth_prob: rng.gen_range(0.0..1.0),
        ..PieceParams::default()
    };
    Piece::random(&params, rng.gen())
}

fn reference_of(piece: &Piece) -> (Vec<NoteEvent>, BootlegScore) {
    let events = midi_events(&piece.to_smf(), 0.05).expect("valid SMF");
    let score = midi_bootleg(&events).expect("nonempty");
    (events, score)
}

fn c1_bootleg_shape() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..50 {
        let (events, score) = reference_of(&random_piece(&mut rng));
        let n = events.len();
        let fillers_ok = (0..score.len()).all(|c| score.is_filler(c) == (c % 3 == 2));
        let masks_ok = (0..score.len()).all(|c| !score.is_filler(c) || score.columns()[c] == 0);
        if score.len() != 3 * n || !fillers_ok || !masks_ok {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("50 MIDI files, {bad} with width != 3N or misplaced filler"))
}

fn c2_pitch_projection() -> Outcome {
    let mut prev_min = 0;
    let mut violations = Vec::new();
    for p in 21u8..=108 {
        let rows = pitch_to_rows(p);
        let ok_len = matches!(rows.len(), 1 | 2);
        let ok_gap = rows.len() != 2 || rows[1] - rows[0] == 1;
        let min = *rows.iter().min().unwrap_or(&0);
        if !ok_len || !ok_gap || min < prev_min {
            violations.push(p);
        }
        prev_min = min;
    }
    outcome(violations.is_empty(), format!("pitches 21-108, violations {violations:?}"))
}

fn c3_dtw_oracle() -> Outcome {
    type Q = Ratio<i64>;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let weights = StepWeights::<Q> {
        diagonal: Q::from_integer(1),
        ref_skip: Q::from_integer(1),
        query_skip: Q::from_integer(2),
    };
    let mut mismatches = 0;
    for _ in 0..1000 {
        let nr = rng.gen_range(1..=10);
        let nq = rng.gen_range(1..=6.min(nr));
        let data = (0..nq * nr)
            .map(|_| {
                let d = rng.gen_range(1..=12i64);
                Q::new(-rng.gen_range(0..=3 * d), d)
            })
            .collect();
        let costs = Raster::new(nq, nr, data).expect("sized");
        let ours = subsequence_dtw(&costs, &weights).map(|p| p.total_cost).ok();
        if ours != brute_force_dtw(&costs) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 exact-rational matrices, {mismatches} mismatches"))
}

fn c4_otsu_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    let mut tested = 0;
    while tested < 1000 {
        let mut hist = [0u64; 256];
        for _ in 0..rng.gen_range(2..256) {
            hist[rng.gen_range(0..256)] += rng.gen_range(1..1000);
        }
        if hist.iter().filter(|&&c| c > 0).count() < 2 {
            continue;
        }
        tested += 1;
        if otsu_threshold(&hist).ok() != Some(otsu_oracle(&hist)) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 histograms, {mismatches} mismatches"))
}

fn c5_components_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..200 {
        let density = rng.gen_range(0.2..0.7);
        let img: BinaryImage = Raster::new(20, 20, (0..400).map(|_| rng.gen_bool(density)).collect()).expect("sized");
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let lab = label_components(&img, conn);
            let mut ours: Vec<Vec<(usize, usize)>> = lab.regions.iter().map(|r| lab.pixels(r)).collect();
            ours.sort();
            if ours != flood_fill_partition(&img, conn == Connectivity::Eight) {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("200 images x 2 connectivities, {mismatches} mismatches"))
}

fn c6_morphology() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (h, w) = (rng.gen_range(5..30), rng.gen_range(5..30));
        let img = GrayImage::<f64>::new(h, w, (0..h * w).map(|_| rng.gen()).collect()).expect("in range");
        let se = match rng.gen_range(0..3) {
            0 => StructuringElement::Disc(rng.gen_range(1..4)),
            1 => StructuringElement::Horizontal(2 * rng.gen_range(1..6) + 1),
            _ => StructuringElement::Vertical(2 * rng.gen_range(1..6) + 1),
        };
        let once = open(&img, se);
        let twice = open(&once, se);
        let idem = once.data().iter().zip(twice.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let e = erode(&img, se);
        let d = dilate(&img.inverted(), se).inverted();
        let dual = e.data().iter().zip(d.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(idem).max(dual);
    }
    outcome(worst <= 1e-9, format!("100 images, max deviation {worst:e}"))
}

/// Flips each of the 62 row bits of every event column with probability
/// `p`; a column left empty keeps its original bits.
fn flip_bits(score: &BootlegScore, p: f64, rng: &mut ChaCha8Rng) -> BootlegScore {
    let columns = (0..score.len())
        .map(|c| {
            let orig = score.columns()[c];
            if score.is_filler(c) {
                return 0;
            }
            let mut m = orig;
            for r in 0..62 {
                if rng.gen_bool(p) {
                    m ^= 1 << r;
                }
            }
            if m == 0 {
                orig
            } else {
                m
            }
        })
        .collect();
    BootlegScore::from_parts(columns, score.counts().to_vec(), score.event_index().to_vec()).expect("valid")
}

fn event_iou(a: (usize, usize), b: (usize, usize)) -> f64 {
    let inter = (a.1.min(b.1) + 1).saturating_sub(a.0.max(b.0));
    let union = a.1.max(b.1) + 1 - a.0.min(b.0);
    inter as f64 / union as f64
}

/// Returns the pass/fail outcome and a byte fingerprint of every query and
/// result for the determinism check.
fn c7_self_retrieval() -> (Outcome, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = Config::default().align_options();
    let mut fingerprint = Vec::new();
    let pieces: Vec<_> = (0..20)
        .map(|_| {
            let params = PieceParams {
                measures: rng.gen_range(16..=40),
                ..PieceParams::default()
            };
            reference_of(&Piece::random(&params, rng.gen()))
        })
        .collect();
    let run = |query: &BootlegScore, events: &[NoteEvent], reference: &BootlegScore, fp: &mut Vec<u8>| {
        fp.extend_from_slice(&serialize(query));
        let r = align(query, reference, events, &opts).expect("query fits");
        fp.extend_from_slice(format!("{} {} {} {}|", r.ref_start_col, r.ref_end_col, r.t_start, r.t_end).as_bytes());
        r.event_range
    };
    let mut clean_exact = 0;
    for (events, reference) in &pieces {
        let len = rng.gen_range(10..=50.min(events.len()));
        let e1 = rng.gen_range(0..=events.len() - len);
        let truth = (e1, e1 + len - 1);
        let query = reference.slice(3 * truth.0, 3 * (truth.1 + 1));
        if event_iou(run(&query, events, reference, &mut fingerprint), truth) == 1.0 {
            clean_exact += 1;
        }
    }
    let mut noisy_good = 0;
    for trial in 0..100 {
        let (events, reference) = &pieces[trial % pieces.len()];
        let len = rng.gen_range(10..=50.min(events.len()));
        let e1 = rng.gen_range(0..=events.len() - len);
        let truth = (e1, e1 + len - 1);
        let query = flip_bits(&reference.slice(3 * truth.0, 3 * (truth.1 + 1)), 0.05, &mut rng);
        if event_iou(run(&query, events, reference, &mut fingerprint), truth) >= 0.9 {
            noisy_good += 1;
        }
    }
    (
        outcome(
            clean_exact == 20 && noisy_good >= 95,
            format!("noise-free IoU = 1 in {clean_exact}/20; 5% bit flips IoU >= 0.9 in {noisy_good}/100"),
        ),
        fingerprint,
    )
}

struct Synthetic {
    report: Report,
    btlgs: Vec<Vec<u8>>,
    files: Vec<(String, Vec<u8>)>,
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).expect("readable") {
            let path = entry.expect("entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).expect("inside").display().to_string();
                out.push((rel, std::fs::read(&path).expect("readable")));
            }
        }
    }
    out.sort();
    out
}

fn synthetic_run() -> (Synthetic, Vec<SyntheticQuery>, Vec<bootleg::Analysis32>) {
    let dir = tempfile::tempdir().expect("temp dir");
    let (ds, queries) =
        write_dataset(dir.path(), 10, 8, &PieceParams::default(), &RenderParams::default()).expect("writable");
    let cfg = Config::default();
    let analyses: Vec<_> = queries
        .iter()
        .map(|q| analyze(&load_gray::<f32>(&ds.image_path(&q.annotation)).expect("png"), &cfg))
        .collect();
    let btlgs = analyses
        .iter()
        .map(|a| a.outcome.as_ref().map(serialize).unwrap_or_default())
        .collect();
    let opts = EvalOptions {
        workers: 0,
        random_baseline: true,
    };
    let report = evaluate_dataset(&ds, &cfg, &opts).expect("dataset loads");
    let files = read_tree(dir.path());
    (Synthetic { report, btlgs, files }, queries, analyses)
}

fn c8_synthetic(queries: &[SyntheticQuery], analyses: &[bootleg::Analysis32], report: &Report) -> Outcome {
    let (mut hits, mut heads) = (0, 0);
    let mut spacing_bad = 0;
    let mut systems_bad = 0;
    for (q, a) in queries.iter().zip(analyses) {
        let tol = q.truth.spacing as f64 / 4.0;
        let mut used = vec![false; a.noteheads.len()];
        for t in &q.truth.noteheads {
            heads += 1;
            let best = a
                .noteheads
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, d)| (i, (d.center.0 - t.x).hypot(d.center.1 - t.y)))
                .filter(|&(_, dist)| dist <= tol)
                .min_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((i, _)) = best {
                used[i] = true;
                hits += 1;
            }
        }
        spacing_bad += a
            .estimates
            .iter()
            .filter(|e| (e.spacing - q.truth.spacing as f64).abs() > 1.0)
            .count();
        if a.music_lines.len() != q.truth.systems.len() {
            systems_bad += 1;
        }
    }
    let recall = hits as f64 / heads as f64;
    let f = report.pipeline.all.micro.f_measure;
    outcome(
        recall >= 0.9 && spacing_bad == 0 && systems_bad == 0 && f >= 0.9,
        format!(
            "10 pages: notehead recall {recall:.3}, spacing misses {spacing_bad}, system-count misses {systems_bad}, micro F {f:.3}"
        ),
    )
}

fn c9_baseline(report: &Report) -> Outcome {
    let ours = report.pipeline.all.micro.f_measure;
    let random = report.baseline.as_ref().map_or(f64::NAN, |b| b.all.micro.f_measure);
    outcome(
        ours - random >= 0.3,
        format!("pipeline F {ours:.3}, random F {random:.3}, gap {:.3}", ours - random),
    )
}

fn c10_runtime() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut stages = StageTimings::new();
    for _ in 0..3 {
        let piece = Piece::random(&PieceParams::default(), rng.gen());
        let page = bootleg::synth::render_page(&piece, 1, &RenderParams::default(), rng.gen());
        let reference = Reference::from_midi(&piece.to_smf(), &cfg).expect("valid");
        let start = Instant::now();
        let r = pool.install(|| retrieve(&page.image, &reference, &cfg));
        worst = worst.max(start.elapsed().as_secs_f64());
        if let Ok(r) = r {
            stages.extend(&r.stage_timings);
        }
    }
    let total = stages.total();
    let (name, t) = stages.dominant().unwrap_or(("none", 0.0));
    let pct = |t: f64| if total > 0.0 { 100.0 * t / total } else { 0.0 };
    let (runner, rt) = stages
        .iter()
        .filter(|(n, _)| *n != name)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or(("none", 0.0));
    outcome(
        worst <= 10.0 && name == "staffFeatures" && cfg.comb_spacings().len() == 21,
        format!(
            "slowest 1000-px query {worst:.2} s on one thread; dominant stage {name} ({:.0}% of stage time), next {runner} ({:.0}%)",
            pct(t),
            pct(rt)
        ),
    )
}

fn c11_determinism(first7: &[u8], first8: &Synthetic) -> Outcome {
    let (_, again7) = c7_self_retrieval();
    let (again8, _, _) = synthetic_run();
    let same7 = first7 == again7.as_slice();
    let same_files = first8.files == again8.files;
    let same_btlg = first8.btlgs == again8.btlgs;
    let same_report = first8.report.to_json_without_timings() == again8.report.to_json_without_timings();
    outcome(
        same7 && same_files && same_btlg && same_report,
        format!(
            "self-retrieval bytes equal: {same7}; dataset files equal: {same_files}; BTLG equal: {same_btlg}; reports equal: {same_report}"
        ),
    )
}

fn report(n: usize, title: &str, budget: f64, start: Instant, o: Outcome, failures: &mut usize) {
    let elapsed = start.elapsed().as_secs_f64();
    let within = budget <= 0.0 || elapsed <= budget;
    let pass = o.pass && within;
    if !pass {
        *failures += 1;
    }
    let budget_note = if budget > 0.0 {
        format!("{elapsed:.2} s of {budget:.0} s")
    } else {
        format!("{elapsed:.2} s")
    };
    println!(
        "criterion {n:>2} {}: {title}: {} [{budget_note}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn main() {
    let mut failures = 0;
    let t = Instant::now();
    report(1, "bootleg shape", 1.0, t, c1_bootleg_shape(), &mut failures);
    let t = Instant::now();
    report(2, "pitch projection", 1.0, t, c2_pitch_projection(), &mut failures);
    let t = Instant::now();
    report(3, "DTW oracle", 30.0, t, c3_dtw_oracle(), &mut failures);
    let t = Instant::now();
    report(4, "Otsu oracle", 5.0, t, c4_otsu_oracle(), &mut failures);
    let t = Instant::now();
    report(5, "connected components oracle", 5.0, t, c5_components_oracle(), &mut failures);
    let t = Instant::now();
    report(6, "morphology properties", 10.0, t, c6_morphology(), &mut failures);
    let t = Instant::now();
    let (o7, fp7) = c7_self_retrieval();
    report(7, "self-retrieval", 60.0, t, o7, &mut failures);
    let t = Instant::now();
    let (run8, queries, analyses) = synthetic_run();
    let o8 = c8_synthetic(&queries, &analyses, &run8.report);
    report(8, "synthetic end-to-end", 300.0, t, o8, &mut failures);
    let t = Instant::now();
    report(9, "baseline ordering", 60.0, t, c9_baseline(&run8.report), &mut failures);
    let t = Instant::now();
    report(10, "runtime budget", 0.0, t, c10_runtime(), &mut failures);
    let t = Instant::now();
    report(11, "determinism", 0.0, t, c11_determinism(&fp7, &run8), &mut failures);
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 11 acceptance criteria passed");
}
