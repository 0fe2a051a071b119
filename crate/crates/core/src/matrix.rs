//! Dense row-major matrices and finite signals.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Result, StpError};

/// Which of the two mirror-symmetric STP conventions to use.
///
/// `Left` lifts by `A ⊗ I` and `x ⊗ J`; `Right` lifts by `I ⊗ A` and `J ⊗ x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = StpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            other => Err(StpError::Unsupported(format!("side `{other}`"))),
        }
    }
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(StpError::NonFinite(i)),
        None => Ok(()),
    }
}

/// Real `rows × cols` matrix, row-major, all entries finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(StpError::BadShape(format!("{rows}x{cols} has an empty side")));
        }
        if data.len() != rows * cols {
            return Err(StpError::BadShape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        if rows.iter().any(|row| row.as_ref().len() != c) {
            return Err(StpError::BadShape("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.as_ref().iter().copied()).collect();
        Self::new(r, c, data)
    }

    /// Convenience for integer literals in tests and constructions.
    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let float: Vec<Vec<f64>> = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&v| v as f64).collect())
            .collect();
        Self::from_rows(&float)
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![1.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Column vector `J_n` of ones as an `n × 1` matrix.
    pub fn ones_col(n: usize) -> Self {
        Self::ones(n, 1)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conventional product; inner dimensions must agree.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(StpError::BadShape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    /// Conventional matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.cols != x.len() {
            return Err(StpError::BadShape(format!(
                "cannot apply {}x{} to a vector of dim {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).powi(2)).sum::<f64>().sqrt())
            .collect()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Option<f64> {
        (self.shape() == other.shape()).then(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn approx_eq(&self, other: &DenseMatrix, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.nrows(), m.ncols(), m.transpose().as_slice().to_vec())
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl AsRef<DenseMatrix> for DenseMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        self
    }
}

/// A finite real column vector, an element of R^∞.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(StpError::BadShape("signal of dimension 0".into()));
        }
        check_finite(&entries)?;
        Ok(Self(entries))
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| v as f64).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    /// `J_n`, the all-ones vector.
    pub fn ones(n: usize) -> Self {
        assert!(n > 0, "signal of dimension 0");
        Self(vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "signal of dimension 0");
        Self(vec![0.0; n])
    }

    /// `δ_n^j`, the j-th column of `I_n` (1-based j).
    pub fn delta(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(StpError::BadShape(format!("δ_{n}^{j} out of range")));
        }
        let mut v = vec![0.0; n];
        v[j - 1] = 1.0;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `x ⊗ J_s` (Left) or `J_s ⊗ x` (Right).
    pub fn lift(&self, s: usize, side: Side) -> Signal {
        assert!(s > 0, "lift factor must be positive");
        let n = self.dim();
        let data = match side {
            Side::Left => (0..n * s).map(|i| self.0[i / s]).collect(),
            Side::Right => (0..n * s).map(|i| self.0[i % n]).collect(),
        };
        Signal(data)
    }

    pub fn scale(&self, c: f64) -> Signal {
        Signal(self.0.iter().map(|v| v * c).collect())
    }

    pub fn dot(&self, other: &Signal) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of unequal dimensions");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.0.iter().all(|v| v.fract() == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Signal) -> Option<f64> {
        (self.dim() == other.dim()).then(|| {
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn approx_eq(&self, other: &Signal, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|v| **v != 0.0).count()
    }

    pub fn as_column(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.dim(),
            cols: 1,
            data: self.0.clone(),
        }
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(matches!(DenseMatrix::new(0, 2, vec![]), Err(StpError::BadShape(_))));
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(StpError::BadShape(_))
        ));
        assert_eq!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]), Err(StpError::NonFinite(1)));
        assert!(Signal::new(vec![]).is_err());
        assert_eq!(Signal::new(vec![f64::INFINITY]), Err(StpError::NonFinite(0)));
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn lifts() {
        let x = Signal::from_ints(&[1, 2]).unwrap();
        assert_eq!(x.lift(3, Side::Left).as_slice(), &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert_eq!(x.lift(3, Side::Right).as_slice(), &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = DenseMatrix::from_int_rows(&[[1, 2], [3, 4]]).unwrap();
        let b = DenseMatrix::from_int_rows(&[[0, 1], [1, 0]]).unwrap();
        assert_eq!(
            a.matmul(&b).unwrap(),
            DenseMatrix::from_int_rows(&[[2, 1], [4, 3]]).unwrap()
        );
        assert_eq!(a.transpose().get(0, 1), 3.0);
        assert!(a.matmul(&DenseMatrix::ones(3, 1)).is_err());
        let back = DenseMatrix::from_nalgebra(&a.to_nalgebra()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn side_parses() {
        assert_eq!("LEFT".parse::<Side>().unwrap(), Side::Left);
        assert_eq!("r".parse::<Side>().unwrap(), Side::Right);
        assert!("up".parse::<Side>().is_err());
    }
}
