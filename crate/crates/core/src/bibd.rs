//! Deterministic sensing matrices from balanced incomplete block designs.
//!
//! The construction chain is: an incidence matrix of the
//! `(α, α, α−1, α−1, α−2)` design, a vertical expansion that lowers pairwise
//! column overlaps to at most one, and a horizontal expansion that replaces
//! the 1s of every column by the rows of a sign (or embedding) matrix.
//! Orthogonal (OCM) and almost orthogonal (AOCM) sign matrices supply the
//! embedding rows.

use std::fmt;

use itertools::Itertools;

use crate::error::{Result, StpError};
use crate::exec::{filter_map_range, SearchConfig};
use crate::matrix::{DenseMatrix, Signal};
use crate::metrics::coherence;
use crate::stp::kron;

/// Matrix with every entry in `{0, 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanMatrix(DenseMatrix);

/// Matrix with every entry in `{−1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix(DenseMatrix);

impl BooleanMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        match m.as_slice().iter().position(|&v| v != 0.0 && v != 1.0) {
            Some(index) => Err(StpError::BadEntry {
                kind: "boolean",
                index,
                value: m.as_slice()[index],
            }),
            None => Ok(Self(m)),
        }
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_int_rows(rows)?)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn is_one(&self, i: usize, j: usize) -> bool {
        self.0.get(i, j) == 1.0
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        (0..self.0.cols())
            .map(|j| (0..self.0.rows()).filter(|&i| self.is_one(i, j)).count())
            .collect()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.0.rows())
            .map(|i| self.0.row(i).iter().filter(|&&v| v == 1.0).count())
            .collect()
    }
}

impl SignMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        match m.as_slice().iter().position(|&v| v != 1.0 && v != -1.0) {
            Some(index) => Err(StpError::BadEntry {
                kind: "sign",
                index,
                value: m.as_slice()[index],
            }),
            None => Ok(Self(m)),
        }
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_int_rows(rows)?)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    fn to_i8_rows(&self) -> Vec<Vec<i8>> {
        (0..self.0.rows())
            .map(|i| self.0.row(i).iter().map(|&v| v as i8).collect())
            .collect()
    }
}

impl AsRef<DenseMatrix> for BooleanMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        &self.0
    }
}

impl AsRef<DenseMatrix> for SignMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        &self.0
    }
}

impl fmt::Display for BooleanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BibdParams {
    pub alpha: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
    pub lambda: usize,
}

/// A sign matrix scaled column-wise by distinct positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    signs: SignMatrix,
    diag: Vec<f64>,
    value: DenseMatrix,
}

impl EmbeddingMatrix {
    pub fn signs(&self) -> &SignMatrix {
        &self.signs
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn value(&self) -> &DenseMatrix {
        &self.value
    }
}

impl AsRef<DenseMatrix> for EmbeddingMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        &self.value
    }
}

/// `α × α` incidence matrix with zeros on the anti-diagonal.
pub fn incidence_matrix(alpha: usize) -> Result<BooleanMatrix> {
    if alpha < 3 {
        return Err(StpError::BadShape(format!(
            "incidence matrix needs alpha >= 3, got {alpha}"
        )));
    }
    Ok(BooleanMatrix(DenseMatrix::from_fn(alpha, alpha, |i, j| {
        if i + j == alpha - 1 {
            0.0
        } else {
            1.0
        }
    })))
}

fn constant(values: &[usize], what: &str) -> Result<usize> {
    match values.iter().position(|&v| v != values[0]) {
        Some(i) => Err(StpError::NotBibd(format!(
            "{what} {i} is {} but {what} 0 is {}",
            values[i], values[0]
        ))),
        None => Ok(values[0]),
    }
}

/// Checks the block-design conditions on an incidence matrix (points as
/// rows, blocks as columns) and returns the parameters.
pub fn bibd_check(h: &BooleanMatrix) -> Result<BibdParams> {
    let (alpha, b) = h.0.shape();
    let k = constant(&h.column_degrees(), "column degree of block")?;
    if k < 2 || k >= alpha {
        return Err(StpError::NotBibd(format!("block size {k} outside 2..{alpha}")));
    }
    let r = constant(&h.row_degrees(), "row degree of point")?;
    let pairs: Vec<usize> = (0..alpha)
        .tuple_combinations()
        .map(|(p, q)| (0..b).filter(|&j| h.is_one(p, j) && h.is_one(q, j)).count())
        .collect();
    let lambda = constant(&pairs, "co-occurrence of pair")?;
    Ok(BibdParams { alpha, b, r, k, lambda })
}

/// Row budget `α² − 3α + 3` of the vertical expansion of an `α`-column matrix.
pub fn vertical_rows(alpha: usize) -> usize {
    alpha * alpha + 3 - 3 * alpha
}

/// Greedy vertical expansion. Columns are placed left to right; the first
/// column is kept as is, and every later 1 (top to bottom) moves to the
/// smallest row at or below both its original row and the previous 1 of the
/// same column at which its column still overlaps each earlier column in at
/// most one row.
pub fn vertical_expand(h: &BooleanMatrix) -> Result<BooleanMatrix> {
    let (rows, cols) = h.0.shape();
    let budget = vertical_rows(cols.max(2));
    if rows > budget {
        return Err(StpError::BadShape(format!(
            "{rows} rows exceed the expansion size {budget}"
        )));
    }
    let mut placed: Vec<Vec<bool>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut col = vec![false; budget];
        let mut overlap = vec![0usize; j];
        let mut next = 0;
        for i in (0..rows).filter(|&i| h.is_one(i, j)) {
            let start = next.max(i);
            let row = (start..budget)
                .find(|&r| (0..j).all(|c| !placed[c][r] || overlap[c] == 0))
                .ok_or(StpError::NotExpandable { col: j, budget })?;
            col[row] = true;
            for c in 0..j {
                overlap[c] += placed[c][row] as usize;
            }
            next = row + 1;
        }
        placed.push(col);
    }
    Ok(BooleanMatrix(DenseMatrix::from_fn(budget, cols, |i, j| {
        placed[j][i] as u8 as f64
    })))
}

/// The block-stacked expansion `H_* = [H_1; …; H_{α−1}]` with
/// `H_i = [0_{(α−i)×(i−1)}, J_{α−i}, I_{α−i}]`: one row per pair of columns.
pub fn vertical_expand_star(alpha: usize) -> Result<BooleanMatrix> {
    if alpha < 3 {
        return Err(StpError::BadShape(format!(
            "star expansion needs alpha >= 3, got {alpha}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..alpha).tuple_combinations().collect();
    Ok(BooleanMatrix(DenseMatrix::from_fn(pairs.len(), alpha, |r, c| {
        let (p, q) = pairs[r];
        (c == p || c == q) as u8 as f64
    })))
}

pub fn make_embedding(signs: SignMatrix, diag: &[f64]) -> Result<EmbeddingMatrix> {
    if diag.len() != signs.0.cols() {
        return Err(StpError::BadShape(format!(
            "diagonal has {} entries for {} columns",
            diag.len(),
            signs.0.cols()
        )));
    }
    if let Some(d) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(StpError::BadDiag(format!("entry {d} is not positive")));
    }
    if let Some((p, _)) = diag.iter().tuple_combinations().find(|(p, q)| p == q) {
        return Err(StpError::BadDiag(format!("entry {p} is repeated")));
    }
    let value = DenseMatrix::from_fn(signs.0.rows(), signs.0.cols(), |i, j| signs.0.get(i, j) * diag[j]);
    Ok(EmbeddingMatrix {
        signs,
        diag: diag.to_vec(),
        value,
    })
}

/// Horizontal expansion: the i-th 1 of column j of `hv` becomes row i of
/// `b`, every 0 a zero row; column j of `hv` turns into `b.cols` columns.
pub fn horizontal_expand<B: AsRef<DenseMatrix>>(hv: &BooleanMatrix, b: &B) -> Result<DenseMatrix> {
    let b = b.as_ref();
    let (t, s) = b.shape();
    if let Some((col, &degree)) = hv.column_degrees().iter().find_position(|&&d| d != t) {
        return Err(StpError::DegreeMismatch { col, degree, rows: t });
    }
    let (rows, cols) = hv.0.shape();
    let mut out = DenseMatrix::zeros(rows, cols * s);
    for j in 0..cols {
        for (nth, i) in (0..rows).filter(|&i| hv.is_one(i, j)).enumerate() {
            for c in 0..s {
                out.set(i, j * s + c, b.get(nth, c));
            }
        }
    }
    Ok(out)
}

/// `O_2^{⊗p} ⊗ J_q` for `t = 2^p·q` with `q` odd.
pub fn ocm(t: usize) -> Result<SignMatrix> {
    if t == 0 {
        return Err(StpError::BadShape("ocm needs t >= 1".into()));
    }
    let p = t.trailing_zeros();
    let o2 = DenseMatrix::from_int_rows(&[[1, 1], [1, -1]])?;
    let mut m = DenseMatrix::ones(1, 1);
    for _ in 0..p {
        m = kron(&m, &o2);
    }
    SignMatrix::new(kron(&m, &DenseMatrix::ones_col(t >> p)))
}

const U5: [[i64; 5]; 5] = [
    [1, 1, 1, 1, 1],
    [1, 1, 1, -1, -1],
    [1, 1, -1, 1, -1],
    [1, -1, -1, -1, 1],
    [1, -1, 1, 1, -1],
];

/// Almost orthogonal sign matrix with `t` rows. Even `t` gives `ocm(t)`,
/// `t = 2^p − 1` gives `ocm(2^p)` without its first row, and `t = 5` a fixed
/// 5×5 matrix. Other odd `t` are unsupported.
pub fn aocm(t: usize) -> Result<SignMatrix> {
    if t == 0 {
        return Err(StpError::BadShape("aocm needs t >= 1".into()));
    }
    if t.is_multiple_of(2) {
        return ocm(t);
    }
    if t == 5 {
        return SignMatrix::from_int_rows(&U5);
    }
    if t >= 3 && (t + 1).is_power_of_two() {
        let full = ocm(t + 1)?;
        let rows: Vec<Vec<f64>> = full.0.to_rows().into_iter().skip(1).collect();
        return SignMatrix::new(DenseMatrix::from_rows(&rows)?);
    }
    Err(StpError::Unsupported(format!(
        "no almost orthogonal construction known for odd t = {t}"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    Ocm,
    Aocm,
    Neither,
}

impl SignClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SignClass::Ocm => "OCM",
            SignClass::Aocm => "AOCM",
            SignClass::Neither => "Neither",
        }
    }
}

fn pairwise_products(a: &DenseMatrix) -> impl Iterator<Item = f64> + '_ {
    (0..a.cols())
        .tuple_combinations()
        .map(move |(i, j)| (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum())
}

/// Classifies a sign matrix by its pairwise column inner products: all zero
/// is OCM, all `±1` is AOCM.
pub fn sign_matrix_check(a: &SignMatrix, alpha_minus_1: usize) -> Result<SignClass> {
    if a.0.rows() != alpha_minus_1 {
        return Err(StpError::BadShape(format!(
            "sign matrix has {} rows, expected {alpha_minus_1}",
            a.0.rows()
        )));
    }
    if pairwise_products(&a.0).all(|v| v == 0.0) {
        Ok(SignClass::Ocm)
    } else if pairwise_products(&a.0).all(|v| v.abs() == 1.0) {
        Ok(SignClass::Aocm)
    } else {
        Ok(SignClass::Neither)
    }
}

/// Sign vectors that could be appended as a new column while keeping the
/// class of `a` (OCM or AOCM), excluding the columns of `a` and their
/// negations. `a` is maximal exactly when the result is empty. All `2^t`
/// candidates are enumerated.
pub fn sign_extensions(a: &SignMatrix, cfg: &SearchConfig) -> Result<Vec<Signal>> {
    let t = a.0.rows();
    let class = sign_matrix_check(a, t)?;
    if class == SignClass::Neither {
        return Err(StpError::Unsupported("matrix is neither OCM nor AOCM".into()));
    }
    if t >= 64 || (1u64 << t) > cfg.budget {
        return Err(StpError::BudgetExceeded {
            needed: 1u128 << t.min(127),
            budget: cfg.budget,
        });
    }
    let rows = a.to_i8_rows();
    let cols: Vec<Vec<i64>> = (0..a.0.cols())
        .map(|j| rows.iter().map(|r| r[j] as i64).collect())
        .collect();
    let limit = if class == SignClass::Ocm { 0 } else { 1 };
    Ok(filter_map_range(1u64 << t, cfg.mode, |bits| {
        let v: Vec<i64> = (0..t).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
        let ok = cols.iter().all(|c| {
            let ip: i64 = c.iter().zip(&v).map(|(p, q)| p * q).sum();
            ip.unsigned_abs() <= limit && ip.unsigned_abs() as usize != t
        });
        ok.then(|| Signal::from_vec_unchecked(v.into_iter().map(|x| x as f64).collect()))
    }))
}

pub fn is_maximal(a: &SignMatrix, cfg: &SearchConfig) -> Result<bool> {
    Ok(sign_extensions(a, cfg)?.is_empty())
}

/// Largest dimension for which the permutation search of
/// [`canonical_form`] is attempted on the smaller side.
pub const CANONICAL_MAX_SIDE: usize = 8;

/// Canonical representative of `a` under row and column permutations and
/// negations. Two sign matrices are equivalent under that group exactly when
/// their canonical forms coincide.
pub fn canonical_form(a: &SignMatrix) -> Result<SignMatrix> {
    let (rows, cols) = a.0.shape();
    if rows.min(cols) > CANONICAL_MAX_SIDE {
        return Err(StpError::Unsupported(format!(
            "canonical form limited to matrices with a side of at most {CANONICAL_MAX_SIDE}"
        )));
    }
    // Work on whichever orientation permutes the shorter side.
    let transposed = rows > cols;
    let m: Vec<Vec<i8>> = if transposed {
        SignMatrix(a.0.transpose()).to_i8_rows()
    } else {
        a.to_i8_rows()
    };
    let (r, c) = (m.len(), m[0].len());
    let mut best: Option<Vec<Vec<i8>>> = None;
    for (pi, pj) in (0..r).cartesian_product(0..c) {
        let n: Vec<Vec<i8>> = (0..r)
            .map(|i| (0..c).map(|j| m[i][j] * m[pi][j] * m[i][pj] * m[pi][pj]).collect())
            .collect();
        for perm in (0..r).permutations(r) {
            let mut columns: Vec<Vec<i8>> = (0..c).map(|j| perm.iter().map(|&i| n[i][j]).collect()).collect();
            columns.sort_unstable();
            if best.as_ref().is_none_or(|b| columns < *b) {
                best = Some(columns);
            }
        }
    }
    let best = best.expect("matrices are non-empty");
    let out = DenseMatrix::from_fn(r, c, |i, j| best[j][i] as f64);
    SignMatrix::new(if transposed { out.transpose() } else { out })
}

pub fn group_equivalent(a: &SignMatrix, b: &SignMatrix) -> Result<bool> {
    if a.0.shape() != b.0.shape() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// The sign matrix paired with `H_*(α)`: `aocm(α−1)`, which is an OCM when
/// `α − 1` is even.
pub fn star_embedding(alpha: usize) -> Result<SignMatrix> {
    if alpha < 3 {
        return Err(StpError::BadShape(format!("alpha must be >= 3, got {alpha}")));
    }
    aocm(alpha - 1)
}

/// `Φ = horizontal_expand(H_*(α), aocm(α−1))`, with coherence `1/(α−1)`.
pub fn star_design(alpha: usize) -> Result<DenseMatrix> {
    horizontal_expand(&vertical_expand_star(alpha)?, &star_embedding(alpha)?)
}

/// Coherence of a design together with the target `1/(α−1)`.
pub fn design_coherence(phi: &DenseMatrix, alpha: usize) -> Result<(f64, f64)> {
    Ok((coherence(phi)?, 1.0 / (alpha as f64 - 1.0)))
}
