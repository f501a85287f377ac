//! Oracle and property checks for the image primitives.

mod common;

use common::{flood_fill_partition, otsu_oracle};
use bootleg::image::{
    background_subtract, connected_components, convolve2d, dilate, erode, kmeans2d, open,
    otsu_threshold, otsu_threshold_values, BinaryImage, Connectivity, GrayImage, Kernel, Raster,
    StructuringElement,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_gray(rng: &mut ChaCha8Rng, h: usize, w: usize) -> GrayImage<f64> {
    let data = (0..h * w).map(|_| rng.gen::<f64>()).collect();
    GrayImage::new(h, w, data).unwrap()
}

#[test]
fn connected_components_match_flood_fill() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..50 {
        let density = rng.gen_range(0.2..0.7);
        let data = (0..400).map(|_| rng.gen_bool(density)).collect();
        let img: BinaryImage = Raster::new(20, 20, data).unwrap();
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let lab = bootleg::image::label_components(&img, conn);
            let mut ours: Vec<Vec<(usize, usize)>> =
                lab.regions.iter().map(|r| lab.pixels(r)).collect();
            ours.sort();
            let oracle = flood_fill_partition(&img, conn == Connectivity::Eight);
            assert_eq!(ours, oracle, "trial {trial} {conn:?}");
            let total: usize = lab.regions.iter().map(|r| r.pixel_count).sum();
            assert_eq!(total, img.count_foreground());
            let keys: Vec<_> = lab.regions.iter().map(|r| (r.row_min, r.col_min)).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            assert_eq!(keys, sorted);
        }
    }
}

#[test]
fn otsu_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let mut hist = [0u64; 256];
        let filled = rng.gen_range(2..256);
        for _ in 0..filled {
            hist[rng.gen_range(0..256)] += rng.gen_range(1..1000);
        }
        if hist.iter().filter(|&&c| c > 0).count() < 2 {
            continue;
        }
        assert_eq!(otsu_threshold(&hist).unwrap(), otsu_oracle(&hist), "{hist:?}");
    }
}

#[test]
fn otsu_heights_example() {
    let values = [20usize, 22, 21, 80, 82];
    let t = otsu_threshold_values(&values).unwrap();
    let mut hist = vec![0u64; 83];
    for v in values {
        hist[v] += 1;
    }
    assert_eq!(t, otsu_oracle(&hist));
    assert!(values.iter().filter(|&&v| v >= t).count() == 2);
}

fn dense_conv_oracle(img: &Raster<f64>, k: &Raster<f64>, anchor: (usize, usize)) -> Vec<f64> {
    let (h, w) = img.dims();
    let (kh, kw) = k.dims();
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut s = 0.0;
            for i in 0..kh {
                for j in 0..kw {
                    let y = r as isize - i as isize + anchor.0 as isize;
                    let x = c as isize - j as isize + anchor.1 as isize;
                    s += k.get(i, j) * img.get_clamped(y, x);
                }
            }
            out[r * w + c] = s;
        }
    }
    out
}

#[test]
fn convolution_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let img = random_gray(&mut rng, 16, 16);
        let weights: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let kernel = Kernel::centered(5, 5, weights.clone()).unwrap();
        let out = convolve2d(img.raster(), &kernel).unwrap();
        let oracle = dense_conv_oracle(img.raster(), &Raster::new(5, 5, weights).unwrap(), (2, 2));
        for (a, b) in out.data().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn convolution_with_offcenter_anchor_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let img = random_gray(&mut rng, 30, 7);
    let weights: Vec<f64> = (0..12).map(|i| if i % 5 == 0 { 0.25 } else { 0.0 }).collect();
    let kernel = Kernel::with_anchor(12, 1, weights.clone(), (5, 0)).unwrap();
    let out = convolve2d(img.raster(), &kernel).unwrap();
    let oracle = dense_conv_oracle(img.raster(), &Raster::new(12, 1, weights).unwrap(), (5, 0));
    for (a, b) in out.data().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn opening_removes_line_keeps_disc() {
    let (h, w) = (40, 60);
    let mut r = Raster::filled(h, w, 0.0f64);
    for x in 0..w {
        r.set(8, x, 1.0);
    }
    let disc = |y: f64, x: f64| (y - 25.0).powi(2) + (x - 30.0).powi(2) <= 25.0;
    for y in 0..h {
        for x in 0..w {
            if disc(y as f64, x as f64) {
                r.set(y, x, 1.0);
            }
        }
    }
    let out = open(&GrayImage::from_raster(r).unwrap(), StructuringElement::Disc(3));
    for x in 0..w {
        assert_eq!(out.get(8, x), 0.0);
    }
    // Disc preserved within one pixel of its boundary.
    for y in 0..h {
        for x in 0..w {
            let d = ((y as f64 - 25.0).powi(2) + (x as f64 - 30.0).powi(2)).sqrt();
            if d <= 4.0 {
                assert_eq!(out.get(y, x), 1.0, "({y},{x}) inside");
            }
            if d > 6.0 {
                assert_eq!(out.get(y, x), 0.0, "({y},{x}) outside");
            }
        }
    }
}

#[test]
fn shaded_page_glyphs_dominate_top_percentile() {
    let (h, w) = (120, 160);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut glyph = vec![false; h * w];
    for _ in 0..6 {
        let (cy, cx) = (rng.gen_range(15..105), rng.gen_range(15..145));
        for y in cy - 3..=cy + 3 {
            for x in cx - 4..=cx + 4 {
                glyph[y * w + x] = true;
            }
        }
    }
    let data = (0..h * w)
        .map(|i| {
            let (y, x) = (i / w, i % w);
            let light = 0.55 + 0.4 * (x as f64 / w as f64) + 0.05 * (y as f64 / h as f64);
            if glyph[i] {
                0.1 * light
            } else {
                light
            }
        })
        .collect();
    let out = background_subtract(&GrayImage::new(h, w, data).unwrap(), 12);
    let mut ranked: Vec<usize> = (0..h * w).collect();
    ranked.sort_by(|&a, &b| out.data()[b].total_cmp(&out.data()[a]));
    let top = h * w / 100;
    let glyph_hits = ranked[..top].iter().filter(|&&i| glyph[i]).count();
    assert_eq!(glyph_hits, top);
}

#[test]
fn kmeans_two_clusters_match_partition_optimum() {
    let pts = [
        (10.0, 10.0),
        (11.0, 12.0),
        (9.0, 11.0),
        (12.0, 9.0),
        (10.5, 10.5),
        (40.0, 31.0),
        (42.0, 30.0),
        (41.0, 33.0),
        (39.5, 29.0),
        (43.0, 32.0),
    ];
    // Brute force over all 2-partitions for the minimum within-cluster SSE.
    let mut best = (f64::INFINITY, ((0.0, 0.0), (0.0, 0.0)));
    for mask in 1u32..(1 << pts.len()) - 1 {
        let mut groups = [(0.0, 0.0, 0.0); 2];
        for (i, p) in pts.iter().enumerate() {
            let g = &mut groups[((mask >> i) & 1) as usize];
            g.0 += p.0;
            g.1 += p.1;
            g.2 += 1.0;
        }
        let cents: Vec<(f64, f64)> = groups.iter().map(|g| (g.0 / g.2, g.1 / g.2)).collect();
        let sse: f64 = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let c = cents[((mask >> i) & 1) as usize];
                (p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)
            })
            .sum();
        if sse < best.0 {
            best = (sse, (cents[0], cents[1]));
        }
    }
    let mut want = [best.1 .0, best.1 .1];
    want.sort_by(|a, b| a.1.total_cmp(&b.1));
    let got = kmeans2d(&pts, 2).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g.0 - w.0).abs() < 0.5 && (g.1 - w.1).abs() < 0.5);
    }
}

#[test]
fn operations_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let img = random_gray(&mut rng, 33, 29);
    let se = StructuringElement::Disc(2);
    assert_eq!(open(&img, se), open(&img, se));
    assert_eq!(background_subtract(&img, 4), background_subtract(&img, 4));
}

fn gray_strategy() -> impl Strategy<Value = GrayImage<f64>> {
    (3usize..24, 3usize..24).prop_flat_map(|(h, w)| {
        proptest::collection::vec(0.0f64..=1.0, h * w)
            .prop_map(move |data| GrayImage::new(h, w, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn opening_is_idempotent(img in gray_strategy(), r in 1usize..4) {
        let se = StructuringElement::Disc(r);
        let once = open(&img, se);
        prop_assert_eq!(open(&once, se), once);
    }

    #[test]
    fn erode_dilate_duality(img in gray_strategy(), r in 1usize..4) {
        let se = StructuringElement::Disc(r);
        let lhs = dilate(&img.inverted(), se);
        let rhs = erode(&img, se).inverted();
        for (a, b) in lhs.data().iter().zip(rhs.data()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_is_linear(x in gray_strategy(), seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, w) = x.dims();
        let y = random_gray(&mut rng, h, w);
        let weights: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = Kernel::centered(3, 3, weights).unwrap();
        let mix = Raster::new(h, w, x.data().iter().zip(y.data()).map(|(p, q)| a * p + b * q).collect()).unwrap();
        let lhs = convolve2d(&mix, &k).unwrap();
        let cx = convolve2d(x.raster(), &k).unwrap();
        let cy = convolve2d(y.raster(), &k).unwrap();
        for i in 0..h * w {
            prop_assert!((lhs.data()[i] - (a * cx.data()[i] + b * cy.data()[i])).abs() < 1e-7);
        }
    }

    #[test]
    fn components_partition_foreground(bits in proptest::collection::vec(any::<bool>(), 12 * 15)) {
        let img: BinaryImage = Raster::new(12, 15, bits).unwrap();
        let regions = connected_components(&img, Connectivity::Eight);
        prop_assert_eq!(regions.iter().map(|r| r.pixel_count).sum::<usize>(), img.count_foreground());
        for r in &regions {
            prop_assert!(r.centroid.0 >= r.row_min as f64 && r.centroid.0 <= r.row_max as f64);
            prop_assert!(r.centroid.1 >= r.col_min as f64 && r.centroid.1 <= r.col_max as f64);
        }
    }
}
