//! Seeded generators for reproducible random matrices and signals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{DenseMatrix, Signal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1]`.
pub fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng_uniform(rng))
}

fn rng_uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

/// Integer entries uniform in `lo..=hi`; zero columns are resampled when the
/// range allows a nonzero value.
pub fn integer_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: i64, hi: i64) -> DenseMatrix {
    assert!(lo <= hi, "empty integer range");
    let mut data = vec![0.0; rows * cols];
    let can_be_nonzero = lo != 0 || hi != 0;
    for j in 0..cols {
        loop {
            for i in 0..rows {
                data[i * cols + j] = rng.gen_range(lo..=hi) as f64;
            }
            if !can_be_nonzero || (0..rows).any(|i| data[i * cols + j] != 0.0) {
                break;
            }
        }
    }
    DenseMatrix::new(rows, cols, data).expect("finite by construction")
}

pub fn sign_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| if rng.gen::<bool>() { 1.0 } else { -1.0 })
}

pub fn boolean_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| if rng.gen::<bool>() { 1.0 } else { 0.0 })
}

pub fn uniform_signal<R: Rng>(rng: &mut R, dim: usize) -> Signal {
    Signal::new((0..dim).map(|_| rng_uniform(rng)).collect()).expect("finite by construction")
}

pub fn integer_signal<R: Rng>(rng: &mut R, dim: usize, lo: i64, hi: i64) -> Signal {
    Signal::new((0..dim).map(|_| rng.gen_range(lo..=hi) as f64).collect()).expect("finite")
}
