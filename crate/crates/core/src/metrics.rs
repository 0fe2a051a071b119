//! Sensing-matrix quality metrics: mutual coherence, Welch bound, spark,
//! coherence-based sparsity bound and brute-force RIP constants, plus their
//! class-level versions computed on the irreducible atom.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StpError};
use crate::exec::{find_map_first, map_collect, ExecMode, SearchConfig};
use crate::linalg::{gram_extremes, rank, rank_with_tol, RANK_TOL};
use crate::matrix::{DenseMatrix, Side};
use crate::signal_space::reduce_matrix;
use crate::stp::kron_identity_left;

const CHUNK: usize = 4096;

/// Spark of a matrix; `Infinite` when no column subset is dependent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spark {
    Finite(usize),
    Infinite,
}

impl Spark {
    pub fn value(self) -> Option<usize> {
        match self {
            Spark::Finite(k) => Some(k),
            Spark::Infinite => None,
        }
    }

    /// `spark > 2k`, the uniqueness condition for k-sparse solutions.
    pub fn exceeds_twice(self, k: usize) -> bool {
        match self {
            Spark::Finite(s) => s > 2 * k,
            Spark::Infinite => true,
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits the k-subsets of `0..n` in lexicographic order, in chunks, and
/// returns the first subset (in that order) accepted by `f`.
pub(crate) fn first_subset<U, F>(n: usize, k: usize, mode: ExecMode, f: F) -> Option<U>
where
    U: Send,
    F: Fn(&[usize]) -> Option<U> + Sync + Send,
{
    let mut it = (0..n).combinations(k).peekable();
    while it.peek().is_some() {
        let chunk: Vec<Vec<usize>> = it.by_ref().take(CHUNK).collect();
        if let Some(hit) = find_map_first(&chunk, mode, |s| f(s)) {
            return Some(hit);
        }
    }
    None
}

/// Maps every k-subset of `0..n` and folds the results with `merge`.
pub(crate) fn fold_subsets<U, F, M>(n: usize, k: usize, mode: ExecMode, init: U, f: F, merge: M) -> U
where
    U: Send + Copy,
    F: Fn(&[usize]) -> U + Sync + Send,
    M: Fn(U, U) -> U,
{
    let mut acc = init;
    let mut it = (0..n).combinations(k).peekable();
    while it.peek().is_some() {
        let chunk: Vec<Vec<usize>> = it.by_ref().take(CHUNK).collect();
        for v in map_collect(&chunk, mode, |s| f(s)) {
            acc = merge(acc, v);
        }
    }
    acc
}

fn normalized_columns(a: &DenseMatrix) -> Result<DenseMatrix> {
    let norms = a.column_norms();
    if let Some(j) = norms.iter().position(|n| *n == 0.0) {
        return Err(StpError::ZeroColumn(j));
    }
    Ok(DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) / norms[j]))
}

fn column_correlations(a: &DenseMatrix) -> Result<impl Iterator<Item = f64>> {
    if a.cols() < 2 {
        return Err(StpError::BadShape("coherence needs at least two columns".into()));
    }
    let u = normalized_columns(a)?;
    let cols: Vec<Vec<f64>> = (0..u.cols()).map(|j| u.col(j)).collect();
    Ok((0..cols.len())
        .tuple_combinations()
        .map(move |(i, j)| cols[i].iter().zip(&cols[j]).map(|(p, q)| p * q).sum::<f64>()))
}

/// Mutual coherence `max_{i≠j} |⟨a_i, a_j⟩| / (‖a_i‖‖a_j‖)`.
pub fn coherence(a: &DenseMatrix) -> Result<f64> {
    Ok(column_correlations(a)?.map(f64::abs).fold(0.0, f64::max))
}

/// The same maximum without the absolute value.
pub fn signed_coherence(a: &DenseMatrix) -> Result<f64> {
    Ok(column_correlations(a)?.fold(f64::NEG_INFINITY, f64::max))
}

/// Lower bound `sqrt((n−m) / (m(n−1)))` on the coherence of an `m × n` matrix.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m == 0 || n <= m {
        return Err(StpError::BadShape(format!(
            "welch bound needs n > m >= 1, got m={m} n={n}"
        )));
    }
    Ok((((n - m) as f64) / ((m * (n - 1)) as f64)).sqrt())
}

/// Largest integer `k < (1 + 1/μ)/2`. A bound within 1e-9 of an integer is
/// taken to be that integer, so `μ = 1/3` gives 1, not 2.
pub fn sparsity_bound(mu: f64, cols: usize) -> usize {
    if mu <= 0.0 {
        return cols;
    }
    let bound = 0.5 * (1.0 + 1.0 / mu);
    let nearest = bound.round();
    let k = if (bound - nearest).abs() < 1e-9 {
        nearest - 1.0
    } else {
        bound.floor()
    };
    k.max(0.0) as usize
}

pub fn max_sparsity(a: &DenseMatrix) -> Result<usize> {
    Ok(sparsity_bound(coherence(a)?, a.cols()))
}

/// Smallest number of linearly dependent columns, by exhaustive enumeration
/// in increasing subset size.
pub fn spark(a: &DenseMatrix, cfg: &SearchConfig) -> Result<Spark> {
    let (m, n) = a.shape();
    if n <= m && rank(a) == n {
        return Ok(Spark::Infinite);
    }
    // Any m+1 columns are dependent, so sizes above m never need a search.
    let top = n.min(m);
    let mut visited: u128 = 0;
    for k in 1..=top {
        visited += binomial(n, k);
        if visited > cfg.budget as u128 {
            return Err(StpError::BudgetExceeded {
                needed: visited,
                budget: cfg.budget,
            });
        }
        let hit = first_subset(n, k, cfg.mode, |cols| {
            (rank_with_tol(&a.select_columns(cols), RANK_TOL) < cols.len()).then_some(())
        });
        if hit.is_some() {
            return Ok(Spark::Finite(k));
        }
    }
    if n > m {
        Ok(Spark::Finite(m + 1))
    } else {
        Ok(Spark::Infinite)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipResult {
    pub k: usize,
    pub delta: f64,
    pub satisfied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RipOptions {
    /// Scale every column to unit norm before certifying.
    pub normalize: bool,
    pub search: SearchConfig,
}

impl Default for RipOptions {
    fn default() -> Self {
        Self {
            normalize: true,
            search: SearchConfig::default(),
        }
    }
}

fn prepare_rip(a: &DenseMatrix, opts: &RipOptions) -> Result<DenseMatrix> {
    if opts.normalize {
        return normalized_columns(a);
    }
    match a.column_norms().iter().position(|n| (n - 1.0).abs() > 1e-12) {
        Some(j) => Err(StpError::NotNormalized(j)),
        None => Ok(a.clone()),
    }
}

fn delta_of(lo: f64, hi: f64) -> f64 {
    (1.0 - lo).max(hi - 1.0).max(0.0)
}

/// Exact restricted isometry constant of order `k` by enumerating every
/// k-column submatrix: `δ = max_S max(1 − λ_min(SᵀS), λ_max(SᵀS) − 1)`.
pub fn rip_check(a: &DenseMatrix, k: usize, opts: &RipOptions) -> Result<RipResult> {
    let n = a.cols();
    if k == 0 || k > n {
        return Err(StpError::BadShape(format!("RIP order {k} outside 1..={n}")));
    }
    let needed = binomial(n, k);
    if needed > opts.search.budget as u128 {
        return Err(StpError::BudgetExceeded {
            needed,
            budget: opts.search.budget,
        });
    }
    let u = prepare_rip(a, opts)?;
    let delta = fold_subsets(
        n,
        k,
        opts.search.mode,
        0.0f64,
        |cols| {
            let (lo, hi) = gram_extremes(&u, cols);
            delta_of(lo, hi)
        },
        f64::max,
    );
    Ok(RipResult {
        k,
        delta,
        satisfied: delta < 1.0,
    })
}

/// RIP constant of `I_s ⊗ A` over blockwise-sparse vectors (at most `k`
/// nonzeros in each length-`n` block of a length-`p` vector), by direct
/// enumeration of per-block supports. Limited to `p ≤ 2n`; the result
/// should agree with `rip_check(a, k)`.
pub fn rip_check_blockwise(a: &DenseMatrix, p: usize, k: usize, opts: &RipOptions) -> Result<RipResult> {
    let n = a.cols();
    if !p.is_multiple_of(n) || p > 2 * n {
        return Err(StpError::Unsupported(format!(
            "blockwise RIP enumeration needs p a multiple of {n} and at most {}",
            2 * n
        )));
    }
    if k == 0 || k > n {
        return Err(StpError::BadShape(format!("RIP order {k} outside 1..={n}")));
    }
    let s = p / n;
    let per_block = binomial(n, k);
    let needed = per_block.pow(s as u32);
    if needed > opts.search.budget as u128 {
        return Err(StpError::BudgetExceeded {
            needed,
            budget: opts.search.budget,
        });
    }
    let u = kron_identity_left(s, &prepare_rip(a, opts)?);
    let supports: Vec<Vec<usize>> = (0..s)
        .map(|b| (0..n).combinations(k).map(move |c| (b, c)))
        .multi_cartesian_product()
        .map(|blocks| {
            blocks
                .into_iter()
                .flat_map(|(b, c)| c.into_iter().map(move |j| b * n + j))
                .collect()
        })
        .collect();
    let delta = map_collect(&supports, opts.search.mode, |cols| {
        let (lo, hi) = gram_extremes(&u, cols);
        delta_of(lo, hi)
    })
    .into_iter()
    .fold(0.0, f64::max);
    Ok(RipResult {
        k,
        delta,
        satisfied: delta < 1.0,
    })
}

/// Quality report for a sensing matrix (or the atom of its class).
#[derive(Clone, Debug, PartialEq)]
pub struct CsReport {
    pub coherence: f64,
    pub signed_coherence: f64,
    /// `None` when `cols ≤ rows`, where the bound is undefined.
    pub welch_bound: Option<f64>,
    pub spark: Spark,
    pub max_k: usize,
    pub rip: Option<RipResult>,
}

#[derive(Serialize, Deserialize)]
struct RipWire {
    k: usize,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct ReportWire {
    coherence: f64,
    signed_coherence: f64,
    welch_bound: Option<f64>,
    spark: Option<usize>,
    spark_infinite: bool,
    max_k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rip: Option<RipWire>,
}

impl Serialize for CsReport {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ReportWire {
            coherence: self.coherence,
            signed_coherence: self.signed_coherence,
            welch_bound: self.welch_bound,
            spark: self.spark.value(),
            spark_infinite: self.spark == Spark::Infinite,
            max_k: self.max_k,
            rip: self.rip.map(|r| RipWire { k: r.k, delta: r.delta }),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CsReport {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = ReportWire::deserialize(de)?;
        let spark = match (w.spark, w.spark_infinite) {
            (_, true) => Spark::Infinite,
            (Some(s), false) => Spark::Finite(s),
            (None, false) => return Err(serde::de::Error::custom("finite spark without a value")),
        };
        Ok(CsReport {
            coherence: w.coherence,
            signed_coherence: w.signed_coherence,
            welch_bound: w.welch_bound,
            spark,
            max_k: w.max_k,
            rip: w.rip.map(|r| RipResult {
                k: r.k,
                delta: r.delta,
                satisfied: r.delta < 1.0,
            }),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricsOptions {
    pub rip_k: Option<usize>,
    pub rip: RipOptions,
}

/// Component metrics of `a` as given.
pub fn report(a: &DenseMatrix, opts: &MetricsOptions) -> Result<CsReport> {
    let coherence = coherence(a)?;
    let (m, n) = a.shape();
    Ok(CsReport {
        coherence,
        signed_coherence: signed_coherence(a)?,
        welch_bound: (n > m).then(|| welch_bound(m, n)).transpose()?,
        spark: spark(a, &opts.rip.search)?,
        max_k: sparsity_bound(coherence, n),
        rip: opts.rip_k.map(|k| rip_check(a, k, &opts.rip)).transpose()?,
    })
}

/// Class-level metrics: `a` is reduced to its irreducible atom first.
pub fn class_metrics(a: &DenseMatrix, side: Side, opts: &MetricsOptions) -> Result<CsReport> {
    let (atom, _) = reduce_matrix(a, side);
    report(&atom, opts)
}
