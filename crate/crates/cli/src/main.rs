use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use bootleg::align::align;
use bootleg::config::Config;
use bootleg::eval::{evaluate_dataset, Dataset, EvalOptions};
use bootleg::midi::midi_events;
use bootleg::overlay::{write_overlays, Layer, OverlaySpec};
use bootleg::score::{deserialize, midi_bootleg, serialize, BootlegScore};
use bootleg::sheet::{analyze, load_gray};
use bootleg::Analysis32;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Find the passage of a MIDI file shown in a photo of sheet music.
#[derive(Parser)]
#[command(name = "bootleg", version)]
struct Cli {
    /// JSON config file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set staffReach=3.0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bootleg score of a MIDI file.
    MidiBootleg { midi: PathBuf, out: PathBuf },
    /// Bootleg score of a sheet-music photo.
    ImageBootleg {
        image: PathBuf,
        out: PathBuf,
        /// Also write debug overlays into this directory.
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Comma-separated overlay layers (default: all).
        #[arg(long, value_delimiter = ',')]
        layers: Vec<String>,
    },
    /// Align a query bootleg score against a reference and print the time interval.
    Align {
        query: PathBuf,
        reference: PathBuf,
        /// MIDI file the reference was built from.
        midi: PathBuf,
        /// Include the warping path in the output.
        #[arg(long)]
        path: bool,
    },
    /// Run the pipeline on an annotated dataset and report precision, recall and F.
    Evaluate {
        annotations: PathBuf,
        #[arg(long)]
        midi_dir: PathBuf,
        #[arg(long)]
        image_dir: PathBuf,
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Worker threads (0 = one per core).
        #[arg(long, env = "BOOTLEG_WORKERS", default_value_t = 0)]
        workers: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the effective configuration as JSON.
    DumpConfig,
    /// Draw debug overlays for a photo.
    Overlay {
        image: PathBuf,
        dir: PathBuf,
        #[arg(long, value_delimiter = ',')]
        layers: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Random,
}

/// Exit status 2 for unusable input, 1 when the pipeline itself fails.
enum Failure {
    Input(anyhow::Error),
    Pipeline(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn pipeline<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Pipeline(e.into())
}

fn effective_config(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Config> {
    let mut value: Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => json!({}),
    };
    let obj = value.as_object_mut().ok_or_else(|| anyhow!("config must be a JSON object"))?;
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| anyhow!("--set expects KEY=VALUE, got {o:?}"))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        obj.insert(k.to_string(), v);
    }
    Ok(Config::from_json(&value.to_string())?)
}

fn overlay_spec(layers: &[String]) -> anyhow::Result<OverlaySpec> {
    if layers.is_empty() {
        return Ok(OverlaySpec::all());
    }
    let parsed = layers.iter().map(|l| l.parse::<Layer>()).collect::<Result<Vec<_>, _>>()?;
    Ok(OverlaySpec::new(parsed)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("plain data"));
}

fn write_btlg(path: &Path, score: &BootlegScore) -> anyhow::Result<()> {
    std::fs::write(path, serialize(score)).with_context(|| format!("writing {}", path.display()))
}

fn read_btlg(path: &Path) -> anyhow::Result<BootlegScore> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    deserialize(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn read_events(path: &Path, cfg: &Config) -> anyhow::Result<Vec<bootleg::midi::NoteEvent>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    midi_events(&bytes, cfg.onset_cluster_tol).with_context(|| format!("parsing {}", path.display()))
}

fn run_overlays(dir: &Path, gray: &bootleg::Gray32, a: &Analysis32, cfg: &Config, spec: &OverlaySpec) -> anyhow::Result<Value> {
    let (written, skipped) = write_overlays(dir, gray, a, cfg, spec)?;
    Ok(json!({
        "written": written,
        "skipped": skipped.iter().map(ToString::to_string).collect::<Vec<_>>(),
    }))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = effective_config(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::DumpConfig => print!("{}", cfg.to_json()),
        Command::MidiBootleg { midi, out } => {
            let events = read_events(&midi, &cfg)?;
            let score = midi_bootleg(&events)?;
            write_btlg(&out, &score)?;
            print_json(&json!({
                "output": out,
                "events": events.len(),
                "columns": score.len(),
                "configHash": cfg.hash(),
            }));
        }
        Command::ImageBootleg {
            image,
            out,
            overlay,
            layers,
        } => {
            let spec = overlay.as_ref().map(|_| overlay_spec(&layers)).transpose()?;
            let gray = load_gray::<f32>(&image)?;
            let a = analyze(&gray, &cfg);
            let overlays = match (&overlay, &spec) {
                (Some(dir), Some(spec)) => Some(run_overlays(dir, &gray, &a, &cfg, spec)?),
                _ => None,
            };
            let mut summary = json!({
                "noteheads": a.noteheads.len(),
                "musicLines": a.music_lines.len(),
                "stageTimings": a.timings,
                "configHash": cfg.hash(),
            });
            if let Some(o) = overlays {
                summary["overlays"] = o;
            }
            match &a.outcome {
                Ok(score) => {
                    write_btlg(&out, score)?;
                    summary["output"] = json!(out);
                    summary["events"] = json!(score.num_events());
                    summary["columns"] = json!(score.len());
                    print_json(&summary);
                }
                Err(e) => {
                    summary["error"] = json!(e.to_string());
                    print_json(&summary);
                    return Err(pipeline(e.clone()));
                }
            }
        }
        Command::Align {
            query,
            reference,
            midi,
            path,
        } => {
            let q = read_btlg(&query)?;
            let r = read_btlg(&reference)?;
            let events = read_events(&midi, &cfg)?;
            let start = Instant::now();
            let mut result = align(&q, &r, &events, &cfg.align_options()).map_err(pipeline)?;
            let wall = start.elapsed().as_secs_f64();
            if !path {
                result.path.clear();
            }
            let mut v = serde_json::to_value(&result).expect("plain data");
            v["wallSeconds"] = json!(wall);
            v["configHash"] = json!(cfg.hash());
            print_json(&v);
        }
        Command::Evaluate {
            annotations,
            midi_dir,
            image_dir,
            baseline,
            workers,
            out,
        } => {
            let ds = Dataset::load(&annotations, &midi_dir, &image_dir)?;
            let opts = EvalOptions {
                workers,
                random_baseline: baseline.is_some(),
            };
            let report = evaluate_dataset(&ds, &cfg, &opts).map_err(pipeline)?;
            for m in &report.missing_files {
                eprintln!("missing: {m}");
            }
            match out {
                Some(p) => {
                    std::fs::write(&p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
                    print!("{}", report.table());
                }
                None => {
                    eprint!("{}", report.table());
                    print!("{}", report.to_json());
                }
            }
        }
        Command::Overlay { image, dir, layers } => {
            let spec = overlay_spec(&layers)?;
            let gray = load_gray::<f32>(&image)?;
            let a = analyze(&gray, &cfg);
            let mut v = run_overlays(&dir, &gray, &a, &cfg, &spec)?;
            v["configHash"] = json!(cfg.hash());
            if let Err(e) = &a.outcome {
                v["error"] = json!(e.to_string());
            }
            print_json(&v);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
