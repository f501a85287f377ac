use serde::{Deserialize, Serialize};

use super::AlignError;
use crate::image::Raster;
use crate::scalar::Cost;

/// Multipliers applied to the destination cell's cost for each step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepWeights<T> {
    /// Step (1, 1).
    pub diagonal: T,
    /// Step (1, 2): one query column against two reference columns.
    pub ref_skip: T,
    /// Step (2, 1): two query columns against one reference column.
    pub query_skip: T,
}

impl<T: Cost> Default for StepWeights<T> {
    fn default() -> Self {
        Self {
            diagonal: T::one(),
            ref_skip: T::one(),
            query_skip: T::one() + T::one(),
        }
    }
}

/// Optimal subsequence path.
#[derive(Clone, Debug, PartialEq)]
pub struct DtwPath<T> {
    /// `(q, r)` pairs from `(0, ref_start)` to `(Q-1, ref_end)`.
    pub path: Vec<(usize, usize)>,
    pub total_cost: T,
}

impl<T> DtwPath<T> {
    pub fn ref_start(&self) -> usize {
        self.path[0].1
    }

    pub fn ref_end(&self) -> usize {
        self.path[self.path.len() - 1].1
    }
}

// Backpointer codes. The order of STEPS is the tie preference.
const START: u8 = 0;
const UNREACHABLE: u8 = u8::MAX;
const STEPS: [(usize, usize); 3] = [(1, 1), (2, 1), (1, 2)];

fn weight<T: Cost>(w: &StepWeights<T>, step: usize) -> T {
    match step {
        0 => w.diagonal,
        1 => w.query_skip,
        _ => w.ref_skip,
    }
}

/// Subsequence DTW with steps (1,1), (2,1), (1,2).
///
/// `D(0, r) = C(0, r)` and `D(q, r) = min D(q-dq, r-dr) + w * C(q, r)`.
/// The end column minimizes `D(Q-1, r)`, smallest `r` on ties; equal
/// predecessors resolve in the order (1,1), (2,1), (1,2).
pub fn subsequence_dtw<T: Cost>(costs: &Raster<T>, weights: &StepWeights<T>) -> Result<DtwPath<T>, AlignError> {
    let (nq, nr) = costs.dims();
    if nq == 0 || nr == 0 {
        return Err(AlignError::EmptyInput);
    }
    if nq > nr {
        return Err(AlignError::QueryLongerThanReference { query: nq, reference: nr });
    }

    let mut back = vec![UNREACHABLE; nq * nr];
    // Rows q-2, q-1 and q of the accumulated cost.
    let mut prev2: Vec<Option<T>> = vec![None; nr];
    let mut prev1: Vec<Option<T>> = costs.row(0).iter().map(|&c| Some(c)).collect();
    back[..nr].fill(START);
    let mut cur: Vec<Option<T>> = vec![None; nr];

    for q in 1..nq {
        let crow = costs.row(q);
        for r in 0..nr {
            let mut best: Option<(T, u8)> = None;
            for (k, &(dq, dr)) in STEPS.iter().enumerate() {
                if dq > q || dr > r {
                    continue;
                }
                let src = if dq == 1 { &prev1 } else { &prev2 };
                let Some(d) = src[r - dr] else { continue };
                let cand = d + weight(weights, k) * crow[r];
                if best.map_or(true, |(b, _)| cand < b) {
                    best = Some((cand, k as u8 + 1));
                }
            }
            cur[r] = best.map(|(v, _)| v);
            if let Some((_, code)) = best {
                back[q * nr + r] = code;
            }
        }
        std::mem::swap(&mut prev2, &mut prev1);
        std::mem::swap(&mut prev1, &mut cur);
    }

    let (mut r, total_cost) = prev1
        .iter()
        .enumerate()
        .filter_map(|(r, d)| d.map(|d| (r, d)))
        .fold(None, |best: Option<(usize, T)>, (r, d)| match best {
            Some((_, b)) if !(d < b) => best,
            _ => Some((r, d)),
        })
        .expect("with Q <= R the diagonal reaches the last row");

    let mut q = nq - 1;
    let mut path = vec![(q, r)];
    loop {
        match back[q * nr + r] {
            START => break,
            UNREACHABLE => unreachable!("backtrace left the reachable region"),
            code => {
                let (dq, dr) = STEPS[code as usize - 1];
                q -= dq;
                r -= dr;
                path.push((q, r));
            }
        }
    }
    path.reverse();
    Ok(DtwPath { path, total_cost })
}

/// Accumulated cost of an explicit path under the same recurrence.
pub fn path_cost<T: Cost>(costs: &Raster<T>, weights: &StepWeights<T>, path: &[(usize, usize)]) -> Option<T> {
    let &(q0, r0) = path.first()?;
    if q0 != 0 {
        return None;
    }
    let mut total = costs.get(q0, r0);
    for w in path.windows(2) {
        let step = (w[1].0.checked_sub(w[0].0)?, w[1].1.checked_sub(w[0].1)?);
        let k = STEPS.iter().position(|&s| s == step)?;
        total = total + weight(weights, k) * costs.get(w[1].0, w[1].1);
    }
    Some(total)
}
