use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::{DenseMatrix, Signal};
use crate::random;

pub fn rng(seed: u64) -> ChaCha8Rng {
    random::rng(seed)
}

/// Integer entries in `[-3, 3]` or reals in `[-1, 1]`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, integer: bool) -> DenseMatrix {
    if integer {
        random::integer_matrix(rng, rows, cols, -3, 3)
    } else {
        random::uniform_matrix(rng, rows, cols)
    }
}

pub fn random_signal(rng: &mut impl Rng, dim: usize) -> Signal {
    random::uniform_signal(rng, dim)
}
