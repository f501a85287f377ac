use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{EvalError, Interval, MeasureMap};

/// Number of possible start measures for an `n`-measure guess.
pub fn baseline_choices(map: &MeasureMap, n: usize) -> Result<usize, EvalError> {
    if n == 0 || map.len() <= n {
        return Err(EvalError::PieceTooShort { measures: map.len(), requested: n });
    }
    Ok(map.len() - n)
}

/// Uniform start measure `m` in `1..=len-n`; the guess spans the `n`
/// measures from `m`'s downbeat to the downbeat of `m + n`.
pub fn random_baseline<R: Rng>(map: &MeasureMap, n: usize, rng: &mut R) -> Result<Interval, EvalError> {
    let choices = baseline_choices(map, n)?;
    let m = rng.gen_range(1..=choices);
    Ok((map.boundary(m).expect("in range"), map.boundary(m + n).expect("in range")))
}

/// Per-query generator, independent of evaluation order.
pub fn query_rng(seed: u64, image_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(image_id.as_bytes());
    let digest = h.finalize();
    ChaCha8Rng::from_seed(digest.into())
}
