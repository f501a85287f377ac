//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use bootleg::image::{BinaryImage, Raster};
use num_rational::Ratio;

/// Flood-fill labeling used as an independent reference.
pub fn flood_fill_partition(img: &BinaryImage, eight: bool) -> Vec<Vec<(usize, usize)>> {
    let (h, w) = img.dims();
    let mut seen = vec![false; h * w];
    let mut parts = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !img.get(r, c) || seen[r * w + c] {
                continue;
            }
            let mut part = Vec::new();
            let mut queue = VecDeque::from([(r, c)]);
            seen[r * w + c] = true;
            while let Some((y, x)) = queue.pop_front() {
                part.push((y, x));
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if (dy == 0 && dx == 0) || (!eight && dy != 0 && dx != 0) {
                            continue;
                        }
                        let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                        if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                            continue;
                        }
                        let (ny, nx) = (ny as usize, nx as usize);
                        if img.get(ny, nx) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            queue.push_back((ny, nx));
                        }
                    }
                }
            }
            part.sort();
            parts.push(part);
        }
    }
    parts.sort();
    parts
}

/// Exhaustive between-class variance argmax written with class means.
pub fn otsu_oracle(hist: &[u64]) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    let total: f64 = hist.iter().map(|&c| c as f64).sum();
    for t in 1..hist.len() {
        let (mut n0, mut s0, mut n1, mut s1) = (0.0, 0.0, 0.0, 0.0);
        for (i, &c) in hist.iter().enumerate() {
            if i < t {
                n0 += c as f64;
                s0 += i as f64 * c as f64;
            } else {
                n1 += c as f64;
                s1 += i as f64 * c as f64;
            }
        }
        if n0 == 0.0 || n1 == 0.0 {
            continue;
        }
        let (w0, w1) = (n0 / total, n1 / total);
        let var = w0 * w1 * (s0 / n0 - s1 / n1).powi(2);
        // Relative slack absorbs rounding differences between the formulas.
        if var > best.0 * (1.0 + 1e-12) {
            best = (var, t);
        }
    }
    best.1
}

/// Minimum subsequence-DTW cost by enumerating every path with steps
/// (1,1) w=1, (1,2) w=1, (2,1) w=2 from any `(0, r)` to any `(Q-1, r)`.
pub fn brute_force_dtw(costs: &Raster<Ratio<i64>>) -> Option<Ratio<i64>> {
    fn walk(c: &Raster<Ratio<i64>>, q: usize, r: usize, acc: Ratio<i64>, best: &mut Option<Ratio<i64>>) {
        let (nq, nr) = c.dims();
        if q == nq - 1 && best.map_or(true, |b| acc < b) {
            *best = Some(acc);
        }
        for (dq, dr, w) in [(1, 1, 1), (1, 2, 1), (2, 1, 2)] {
            let (nq2, nr2) = (q + dq, r + dr);
            if nq2 < nq && nr2 < nr {
                walk(c, nq2, nr2, acc + Ratio::from_integer(w) * c.get(nq2, nr2), best);
            }
        }
    }
    let mut best = None;
    for r in 0..costs.width() {
        walk(costs, 0, r, costs.get(0, r), &mut best);
    }
    best
}

/// Every complete path, for checks that need the full set.
pub fn all_paths(nq: usize, nr: usize) -> Vec<Vec<(usize, usize)>> {
    fn walk(nq: usize, nr: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (q, r) = *cur.last().unwrap();
        if q == nq - 1 {
            out.push(cur.clone());
        }
        for (dq, dr) in [(1, 1), (1, 2), (2, 1)] {
            if q + dq < nq && r + dr < nr {
                cur.push((q + dq, r + dr));
                walk(nq, nr, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    for r in 0..nr {
        walk(nq, nr, &mut vec![(0, r)], &mut out);
    }
    out
}
