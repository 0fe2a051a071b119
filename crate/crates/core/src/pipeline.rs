//! Dimension-free compression `y = A ⋉ x` and exact sparse recovery.
//!
//! A right system `(I_s ⊗ A)x = y` splits into `s` independent problems
//! `A x^i = y^i`, one per length-`n` block. A left system
//! `(A ⊗ I_s)x = y` is conjugated into a right one by swap matrices:
//! `(I_s ⊗ A)z = W_{[m,s]} y` with `z = W_{[n,s]} x`, so blockwise sparsity
//! for the left system refers to the blocks of `z`.

use itertools::Itertools;
use num_integer::Integer;

use crate::error::{Result, StpError};
use crate::exec::{map_collect, SearchConfig};
use crate::linalg::lstsq_columns;
use crate::matrix::{DenseMatrix, Side, Signal};
use crate::metrics::{binomial, spark, Spark};
use crate::signal_space::reduce_matrix;
use crate::stp::{kron_identity_left, kron_identity_right, mv_stp, swap_apply};

/// Absolute bound on `‖y − A x̂‖₂` for a support to count as a solution.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Two solutions closer than this (max-abs) are the same solution.
pub const SOLUTION_TOL: f64 = 1e-6;

const CHUNK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SparsityMode {
    /// At most `k` nonzeros in the whole vector.
    Global,
    /// At most `k` nonzeros in every block of length `n`.
    #[default]
    Blockwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsitySpec {
    pub block_len: usize,
    pub per_block_k: usize,
    pub mode: SparsityMode,
}

impl SparsitySpec {
    pub fn new(block_len: usize, per_block_k: usize, mode: SparsityMode) -> Result<Self> {
        if block_len == 0 || per_block_k > block_len {
            return Err(StpError::BadShape(format!(
                "sparsity {per_block_k} per block of length {block_len}"
            )));
        }
        Ok(Self {
            block_len,
            per_block_k,
            mode,
        })
    }

    pub fn blockwise(block_len: usize, per_block_k: usize) -> Result<Self> {
        Self::new(block_len, per_block_k, SparsityMode::Blockwise)
    }

    pub fn global(block_len: usize, k: usize) -> Result<Self> {
        Self::new(block_len, k, SparsityMode::Global)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// The atom's column count divides the signal length.
    Divisible,
    /// The signal has to be replicated before the product is conventional.
    Lifted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionPlan {
    pub atom: DenseMatrix,
    pub side: Side,
    pub signal_dim: usize,
    pub s: usize,
    pub r: usize,
    pub t: usize,
}

impl CompressionPlan {
    pub fn case(&self) -> Case {
        if self.r == 1 {
            Case::Divisible
        } else {
            Case::Lifted
        }
    }

    pub fn output_dim(&self) -> usize {
        self.atom.rows() * self.s
    }

    /// The conventional operator acting on the lifted signal:
    /// `A₀ ⊗ I_s` (left) or `I_s ⊗ A₀` (right).
    pub fn operator(&self) -> DenseMatrix {
        match self.side {
            Side::Left => kron_identity_right(&self.atom, self.s),
            Side::Right => kron_identity_left(self.s, &self.atom),
        }
    }

    /// `x ⊗ J_r` (left) or `J_r ⊗ x` (right).
    pub fn lift_signal(&self, x: &Signal) -> Result<Signal> {
        if x.dim() != self.signal_dim {
            return Err(StpError::BadShape(format!(
                "plan is for dimension {}, signal has {}",
                self.signal_dim,
                x.dim()
            )));
        }
        Ok(x.lift(self.r, self.side))
    }

    pub fn apply(&self, x: &Signal) -> Result<Signal> {
        let lifted = self.lift_signal(x)?;
        Ok(Signal::from_vec_unchecked(self.operator().mul_vec(lifted.as_slice())?))
    }
}

/// Reduces `a` to its atom `A₀ (m₀ × n₀)` and sizes the conventional system
/// for a length-`p` signal: `t = lcm(n₀, p) = s·n₀ = r·p`.
pub fn plan(a: &DenseMatrix, p: usize, side: Side) -> Result<CompressionPlan> {
    if p == 0 {
        return Err(StpError::BadShape("signal dimension must be positive".into()));
    }
    let (atom, _) = reduce_matrix(a, side);
    let t = atom.cols().lcm(&p);
    Ok(CompressionPlan {
        s: t / atom.cols(),
        r: t / p,
        t,
        signal_dim: p,
        atom,
        side,
    })
}

pub fn compress(a: &DenseMatrix, x: &Signal, side: Side) -> Signal {
    mv_stp(a, x, side)
}

/// Compresses a dimension-varying sequence step by step.
pub fn compress_varying(a: &DenseMatrix, xs: &[Signal], side: Side) -> Vec<Signal> {
    xs.iter().map(|x| compress(a, x, side)).collect()
}

/// The per-step plans of a dimension-varying sequence.
pub fn plan_varying(a: &DenseMatrix, dims: &[usize], side: Side) -> Result<Vec<CompressionPlan>> {
    dims.iter().map(|&p| plan(a, p, side)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    /// Every support of the admissible size, least squares on each.
    #[default]
    Exhaustive,
    /// Greedy orthogonal matching pursuit; no uniqueness check.
    Omp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RecoveryOptions {
    pub solver: Solver,
    pub search: SearchConfig,
}

/// `spark(atom) > 2k`, which makes k-sparse (and blockwise k-sparse)
/// solutions unique for every lift of `a`.
pub fn uniqueness_guarantee(a: &DenseMatrix, k: usize, cfg: &SearchConfig) -> Result<bool> {
    let (atom, _) = reduce_matrix(a, Side::Left);
    Ok(spark(&atom, cfg)?.exceeds_twice(k))
}

pub fn uniqueness_from_spark(sp: Spark, k: usize) -> bool {
    sp.exceeds_twice(k)
}

/// All distinct solutions (up to two) of `a x = y` with `|supp x| ≤ k`.
/// Every support of size exactly `min(k, n)` is tried: any sparser solution
/// lives on one of them, and a second solution shows up as a different
/// least-squares fit on some support.
fn sparse_solutions(a: &DenseMatrix, y: &[f64], k: usize, cfg: &SearchConfig) -> Vec<Vec<f64>> {
    let n = a.cols();
    let k = k.min(n);
    let fit = |cols: &[usize]| -> Option<Vec<f64>> {
        let (coef, resid) = lstsq_columns(a, cols, y);
        (resid < RESIDUAL_TOL).then(|| {
            let mut x = vec![0.0; n];
            for (c, v) in cols.iter().zip(coef) {
                x[*c] = v;
            }
            x
        })
    };
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut it = (0..n).combinations(k).peekable();
    while it.peek().is_some() {
        let chunk: Vec<Vec<usize>> = it.by_ref().take(CHUNK).collect();
        for x in map_collect(&chunk, cfg.mode, |c| fit(c)).into_iter().flatten() {
            let new = found
                .iter()
                .all(|f| f.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) > SOLUTION_TOL);
            if new {
                found.push(x);
                if found.len() > 1 {
                    return found;
                }
            }
        }
    }
    found
}

fn unique_solution(a: &DenseMatrix, y: &[f64], k: usize, cfg: &SearchConfig) -> Result<Vec<f64>> {
    let mut sols = sparse_solutions(a, y, k, cfg);
    match sols.len() {
        0 => Err(StpError::NoSolution),
        1 => Ok(sols.pop().expect("one solution")),
        _ => Err(StpError::NotUnique),
    }
}

/// Orthogonal matching pursuit with at most `k` atoms.
pub fn omp(a: &DenseMatrix, y: &[f64], k: usize) -> Result<Vec<f64>> {
    if y.len() != a.rows() {
        return Err(StpError::BadShape(format!(
            "measurement has {} entries, matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let norms = a.column_norms();
    let mut support: Vec<usize> = Vec::new();
    let mut residual = y.to_vec();
    let mut coef = Vec::new();
    for _ in 0..k.min(n) {
        if residual.iter().map(|v| v * v).sum::<f64>().sqrt() < RESIDUAL_TOL {
            break;
        }
        let best = (0..n)
            .filter(|j| !support.contains(j) && norms[*j] > 0.0)
            .map(|j| {
                let c: f64 = (0..a.rows()).map(|i| a.get(i, j) * residual[i]).sum();
                (j, c.abs() / norms[j])
            })
            .max_by(|p, q| p.1.total_cmp(&q.1));
        let Some((j, _)) = best else { break };
        support.push(j);
        let (c, _) = lstsq_columns(a, &support, y);
        coef = c;
        let fitted = a.select_columns(&support).mul_vec(&coef)?;
        residual = y.iter().zip(&fitted).map(|(p, q)| p - q).collect();
    }
    if residual.iter().map(|v| v * v).sum::<f64>().sqrt() >= RESIDUAL_TOL {
        return Err(StpError::NoSolution);
    }
    let mut x = vec![0.0; n];
    for (j, v) in support.iter().zip(coef) {
        x[*j] = v;
    }
    Ok(x)
}

fn solve(a: &DenseMatrix, y: &[f64], k: usize, opts: &RecoveryOptions) -> Result<Vec<f64>> {
    match opts.solver {
        Solver::Exhaustive => unique_solution(a, y, k, &opts.search),
        Solver::Omp => omp(a, y, k),
    }
}

/// Solves `(I_s ⊗ A) z = y` under the sparsity model.
fn recover_right(
    a: &DenseMatrix,
    s: usize,
    y: &[f64],
    spec: &SparsitySpec,
    opts: &RecoveryOptions,
) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    let k = spec.per_block_k;
    let budget = opts.search.budget as u128;
    match spec.mode {
        SparsityMode::Blockwise => {
            let needed = binomial(n, k) * s as u128;
            if opts.solver == Solver::Exhaustive && needed > budget {
                return Err(StpError::BudgetExceeded {
                    needed,
                    budget: opts.search.budget,
                });
            }
            let mut x = Vec::with_capacity(n * s);
            for block in y.chunks(m) {
                x.extend(solve(a, block, k, opts)?);
            }
            Ok(x)
        }
        SparsityMode::Global => {
            let needed = binomial(n * s, k);
            if opts.solver == Solver::Exhaustive && needed > budget {
                return Err(StpError::BudgetExceeded {
                    needed,
                    budget: opts.search.budget,
                });
            }
            solve(&kron_identity_left(s, a), y, k, opts)
        }
    }
}

/// Recovers `x ∈ R^{s·n}` from `y = (A ⊗ I_s)x` (left) or `y = (I_s ⊗ A)x`
/// (right), for an `m × n` matrix `a` and `y ∈ R^{s·m}`.
pub fn recover(a: &DenseMatrix, s: usize, y: &Signal, spec: &SparsitySpec, side: Side) -> Result<Signal> {
    recover_with(a, s, y, spec, side, &RecoveryOptions::default())
}

pub fn recover_with(
    a: &DenseMatrix,
    s: usize,
    y: &Signal,
    spec: &SparsitySpec,
    side: Side,
    opts: &RecoveryOptions,
) -> Result<Signal> {
    let (m, n) = a.shape();
    if s == 0 || y.dim() != m * s {
        return Err(StpError::BadShape(format!(
            "measurement of length {} does not match {m} rows lifted by {s}",
            y.dim()
        )));
    }
    if spec.block_len != n {
        return Err(StpError::BadShape(format!(
            "sparsity blocks of length {} for a matrix with {n} columns",
            spec.block_len
        )));
    }
    let x = match side {
        Side::Right => recover_right(a, s, y.as_slice(), spec, opts)?,
        Side::Left => {
            let yz = swap_apply(y.as_slice(), m, s);
            let z = recover_right(a, s, &yz, spec, opts)?;
            swap_apply(&z, s, n)
        }
    };
    Ok(Signal::from_vec_unchecked(x))
}

/// Recovers a length-`p` signal from `y = compress(a, x, side)` for any `p`.
/// When `n ∤ p` the replicated signal `x ⊗ J_r` (or `J_r ⊗ x`) is recovered
/// first; a solution that is not such a replication is rejected with
/// `NoSolution`. The sparsity model refers to the replicated signal.
pub fn recover_signal(a: &DenseMatrix, p: usize, y: &Signal, spec: &SparsitySpec, side: Side) -> Result<Signal> {
    recover_signal_with(a, p, y, spec, side, &RecoveryOptions::default())
}

pub fn recover_signal_with(
    a: &DenseMatrix,
    p: usize,
    y: &Signal,
    spec: &SparsitySpec,
    side: Side,
    opts: &RecoveryOptions,
) -> Result<Signal> {
    if p == 0 {
        return Err(StpError::BadShape("signal dimension must be positive".into()));
    }
    let n = a.cols();
    let t = n.lcm(&p);
    let (s, r) = (t / n, t / p);
    let lifted = recover_with(a, s, y, spec, side, opts)?;
    if r == 1 {
        return Ok(lifted);
    }
    let v = lifted.as_slice();
    let x: Vec<f64> = match side {
        Side::Left => (0..p).map(|i| v[i * r]).collect(),
        Side::Right => v[..p].to_vec(),
    };
    let x = Signal::from_vec_unchecked(x);
    if x.lift(r, side).max_abs_diff(&lifted).unwrap_or(f64::INFINITY) > SOLUTION_TOL {
        return Err(StpError::NoSolution);
    }
    Ok(x)
}

/// Checks `x ∈ Σ^p_{k/n}` for the given side: contiguous blocks of `x`
/// (right) or of `W_{[n,s]} x` (left).
pub fn is_blockwise_sparse(x: &Signal, n: usize, k: usize, side: Side) -> bool {
    if n == 0 || !x.dim().is_multiple_of(n) {
        return false;
    }
    let s = x.dim() / n;
    let v = match side {
        Side::Right => x.as_slice().to_vec(),
        Side::Left => swap_apply(x.as_slice(), n, s),
    };
    v.chunks(n).all(|b| b.iter().filter(|e| **e != 0.0).count() <= k)
}
