use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{Dataset, QueryAnnotation, Split};

use super::piece::{Piece, PieceParams};
use super::render::{encode_png, render_page, PageTruth, RenderParams};

/// One generated query with the material behind it.
#[derive(Clone, Debug)]
pub struct SyntheticQuery {
    pub piece: Piece,
    pub annotation: QueryAnnotation,
    pub truth: PageTruth,
}

/// Writes `n` pieces and one rendered page of each into `dir`: MIDI files,
/// measure maps and `annotations.json` at the top level, images and page
/// truth under `images/`. Every fifth query is tagged as training data.
pub fn write_dataset(
    dir: &Path,
    n: usize,
    seed: u64,
    piece_params: &PieceParams,
    render: &RenderParams,
) -> std::io::Result<(Dataset, Vec<SyntheticQuery>)> {
    let image_dir = dir.join("images");
    std::fs::create_dir_all(&image_dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = Vec::with_capacity(n);
    for i in 0..n {
        let piece = Piece::random(piece_params, rng.gen());
        let first = rng.gen_range(1..=piece.measures.len().div_ceil(2));
        let page = render_page(&piece, first, render, rng.gen());
        let score_id = format!("score{i:03}");
        let image_id = format!("photo{i:03}");
        std::fs::write(dir.join(format!("{score_id}.mid")), piece.to_smf())?;
        std::fs::write(
            dir.join(format!("{score_id}.measures.json")),
            serde_json::to_vec_pretty(&piece.measure_map())?,
        )?;
        std::fs::write(image_dir.join(format!("{image_id}.png")), encode_png(&page.image))?;
        std::fs::write(
            image_dir.join(format!("{image_id}.truth.json")),
            serde_json::to_vec_pretty(&page.truth)?,
        )?;
        queries.push(SyntheticQuery {
            annotation: QueryAnnotation {
                image_id,
                score_id,
                image: None,
                measure_range: page.truth.measure_range,
                alternate_measure_ranges: Vec::new(),
                split: if i % 5 == 0 { Split::Train } else { Split::Test },
            },
            piece,
            truth: page.truth,
        });
    }
    let annotations: Vec<QueryAnnotation> = queries.iter().map(|q| q.annotation.clone()).collect();
    std::fs::write(dir.join("annotations.json"), serde_json::to_vec_pretty(&annotations)?)?;
    Ok((
        Dataset {
            annotations,
            midi_dir: dir.to_path_buf(),
            image_dir,
        },
        queries,
    ))
}
