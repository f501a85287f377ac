use std::path::Path;
use std::process::{Command, Output};

use bootleg::score::deserialize;
use bootleg::synth::{encode_png, render_page, write_dataset, Piece, PieceParams, RenderParams};
use serde_json::Value;

fn bootleg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bootleg"))
        .args(args)
        .env_remove("BOOTLEG_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Format-0 file with a C major triad at t = 0 and a single G at beat 2.
fn two_event_midi() -> Vec<u8> {
    let track: Vec<u8> = vec![
        0x00, 0x90, 60, 80, 0x00, 0x90, 64, 80, 0x00, 0x90, 67, 80, //
        0x83, 0x60, 0x80, 60, 0, 0x00, 0x80, 64, 0, 0x00, 0x80, 67, 0, //
        0x00, 0x90, 67, 80, 0x83, 0x60, 0x80, 67, 0, //
        0x00, 0xff, 0x2f, 0x00,
    ];
    let mut out = b"MThd".to_vec();
    out.extend_from_slice(&[0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xe0]);
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(track.len() as u32).to_be_bytes());
    out.extend_from_slice(&track);
    out
}

#[test]
fn midi_bootleg_writes_three_columns_per_event() {
    let dir = tempfile::tempdir().unwrap();
    let midi = dir.path().join("two.mid");
    std::fs::write(&midi, two_event_midi()).unwrap();
    let a = dir.path().join("a.btlg");
    let b = dir.path().join("b.btlg");
    let out = bootleg(&["midi-bootleg", p(&midi), p(&a)]);
    assert!(out.status.success());
    let summary = stdout_json(&out);
    assert_eq!(summary["events"], 2);
    assert_eq!(summary["columns"], 6);
    let score = deserialize(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(score.len(), 6);
    assert!(bootleg(&["midi-bootleg", p(&midi), p(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn non_midi_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("notes.txt");
    std::fs::write(&bogus, b"RIFF not a midi file").unwrap();
    let out = bootleg(&["midi-bootleg", p(&bogus), p(&dir.path().join("x.btlg"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MThd missing"));
    assert!(!dir.path().join("x.btlg").exists());
}

#[test]
fn image_bootleg_on_synthetic_page_with_overlays() {
    let dir = tempfile::tempdir().unwrap();
    let piece = Piece::random(&PieceParams::default(), 11);
    let page = render_page(&piece, 2, &RenderParams::default(), 12);
    let img = dir.path().join("page.png");
    std::fs::write(&img, encode_png(&page.image)).unwrap();
    let out_btlg = dir.path().join("page.btlg");
    let overlays = dir.path().join("overlays");
    let out = bootleg(&[
        "image-bootleg",
        p(&img),
        p(&out_btlg),
        "--overlay",
        p(&overlays),
        "--layers",
        "notehead-boxes,staff-dots,beam-removal",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let score = deserialize(&std::fs::read(&out_btlg).unwrap()).unwrap();
    assert_eq!(score.len(), 3 * page.truth.events.len());
    let mut files: Vec<String> = std::fs::read_dir(&overlays)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["beam-removal.png", "notehead-boxes.png", "staff-dots.png"]);
}

#[test]
fn blank_page_reports_no_music_lines() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("blank.png");
    ::image::GrayImage::from_pixel(400, 300, ::image::Luma([255u8])).save(&img).unwrap();
    let out = bootleg(&["image-bootleg", p(&img), p(&dir.path().join("x.btlg"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no music lines found"));
    assert!(!dir.path().join("x.btlg").exists());
}

#[test]
fn align_recovers_excerpt_and_accounts_for_its_time() {
    let dir = tempfile::tempdir().unwrap();
    let piece = Piece::random(&PieceParams::default(), 21);
    let midi = dir.path().join("ref.mid");
    std::fs::write(&midi, piece.to_smf()).unwrap();
    let ref_btlg = dir.path().join("ref.btlg");
    assert!(bootleg(&["midi-bootleg", p(&midi), p(&ref_btlg)]).status.success());
    let reference = deserialize(&std::fs::read(&ref_btlg).unwrap()).unwrap();
    let (e1, e2) = (20usize, 45usize);
    let query = reference.slice(3 * e1, 3 * (e2 + 1));
    let q_btlg = dir.path().join("q.btlg");
    std::fs::write(&q_btlg, bootleg::score::serialize(&query)).unwrap();

    let run = || {
        let out = bootleg(&["align", p(&q_btlg), p(&ref_btlg), p(&midi)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        stdout_json(&out)
    };
    let first = run();
    let events: Vec<_> = piece.events().collect();
    assert!((first["tStart"].as_f64().unwrap() - piece.seconds(events[e1].tick)).abs() < 1e-9);
    assert!((first["tEnd"].as_f64().unwrap() - piece.seconds(events[e2 + 1].tick)).abs() < 1e-9);
    let total: f64 = first["stageTimings"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
    assert!(total >= 0.95 * first["wallSeconds"].as_f64().unwrap());

    let strip = |mut v: Value| {
        let o = v.as_object_mut().unwrap();
        o.remove("stageTimings");
        o.remove("wallSeconds");
        v
    };
    assert_eq!(strip(first), strip(run()));
}

#[test]
fn align_rejects_query_longer_than_reference() {
    let dir = tempfile::tempdir().unwrap();
    let midi = dir.path().join("two.mid");
    std::fs::write(&midi, two_event_midi()).unwrap();
    let short = dir.path().join("short.btlg");
    assert!(bootleg(&["midi-bootleg", p(&midi), p(&short)]).status.success());
    let piece = Piece::random(&PieceParams::default(), 4);
    let long_midi = dir.path().join("long.mid");
    std::fs::write(&long_midi, piece.to_smf()).unwrap();
    let long = dir.path().join("long.btlg");
    assert!(bootleg(&["midi-bootleg", p(&long_midi), p(&long)]).status.success());
    let out = bootleg(&["align", p(&long), p(&short), p(&midi)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("query longer than reference"));
}

#[test]
fn dump_config_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = bootleg(&["dump-config"]);
    assert!(first.status.success());
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = bootleg(&["dump-config", "--config", p(&path)]);
    assert_eq!(first.stdout, second.stdout);

    let tweaked = bootleg(&["dump-config", "--set", "staffReach=3.0"]);
    let v: Value = serde_json::from_slice(&tweaked.stdout).unwrap();
    assert_eq!(v["staffReach"], 3.0);
    let bad = bootleg(&["dump-config", "--set", "noSuchKey=1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn evaluate_synthetic_dataset_with_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, _) = write_dataset(dir.path(), 4, 77, &PieceParams::default(), &RenderParams::default()).unwrap();
    let ann = dir.path().join("annotations.json");
    let run = |extra: &[&str]| {
        let report = dir.path().join("report.json");
        let mut args = vec![
            "evaluate",
            p(&ann),
            "--midi-dir",
            p(&ds.midi_dir),
            "--image-dir",
            p(&ds.image_dir),
            "--baseline",
            "random",
            "--workers",
            "2",
            "--out",
            p(&report),
        ];
        args.extend_from_slice(extra);
        let out = bootleg(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("Bootleg"));
        let v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
        v
    };
    let a = run(&[]);
    assert!(a["pipeline"]["all"]["micro"]["fMeasure"].as_f64().unwrap() >= 0.9);
    let b = run(&[]);
    assert_eq!(a["baseline"], b["baseline"]);
    assert_eq!(a["configHash"], b["configHash"]);
    let c = run(&["--set", "seed=5"]);
    assert_ne!(a["configHash"], c["configHash"]);
}

#[test]
fn evaluate_lists_missing_files_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, queries) = write_dataset(dir.path(), 2, 3, &PieceParams::default(), &RenderParams::default()).unwrap();
    std::fs::remove_file(ds.image_path(&queries[0].annotation)).unwrap();
    let out = bootleg(&[
        "evaluate",
        p(&dir.path().join("annotations.json")),
        "--midi-dir",
        p(&ds.midi_dir),
        "--image-dir",
        p(&ds.image_dir),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing: "));
    let v = stdout_json(&out);
    assert_eq!(v["missingFiles"].as_array().unwrap().len(), 1);
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
    assert_eq!(v["pipeline"]["all"]["count"], 2);
}
