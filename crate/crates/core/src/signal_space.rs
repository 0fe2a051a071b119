//! Equivalence classes of signals and matrices under lifting, and the
//! lift-invariant geometry (inner product, norm, distance, angle, projection)
//! on the quotient space.
//!
//! Functions suffixed `_v` use the left system. The un-suffixed variants take
//! a [`Side`]; the right system mirrors the left one by swapping `x ⊗ J` for
//! `J ⊗ x` throughout.

use num_integer::Integer;

use crate::error::{Result, StpError};
use crate::matrix::{DenseMatrix, Side, Signal};
use crate::stp::sta;

/// Tolerance for factorization and atom comparison on non-integer data.
pub const REDUCE_TOL: f64 = 1e-12;

fn entry_tol(integer: bool) -> f64 {
    if integer {
        0.0
    } else {
        REDUCE_TOL
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Largest-first divisors of `n` greater than 1.
fn divisors_desc(n: usize) -> impl Iterator<Item = usize> {
    (2..=n).rev().filter(move |s| n.is_multiple_of(*s))
}

fn is_signal_lift(x: &[f64], s: usize, side: Side, tol: f64) -> bool {
    let n = x.len();
    let base = n / s;
    match side {
        Side::Left => (0..n).all(|i| close(x[i], x[(i / s) * s], tol)),
        Side::Right => (base..n).all(|i| close(x[i], x[i % base], tol)),
    }
}

/// Splits `x` into its irreducible atom and multiplicity, so that
/// `x = atom ⊗ J_mult` (Left) or `x = J_mult ⊗ atom` (Right).
pub fn reduce_signal(x: &Signal, side: Side) -> (Signal, usize) {
    let n = x.dim();
    let tol = entry_tol(x.is_integer_valued());
    let v = x.as_slice();
    for s in divisors_desc(n) {
        if is_signal_lift(v, s, side, tol) {
            let atom = match side {
                Side::Left => v.iter().step_by(s).copied().collect(),
                Side::Right => v[..n / s].to_vec(),
            };
            return (Signal::from_vec_unchecked(atom), s);
        }
    }
    (x.clone(), 1)
}

fn is_matrix_lift(a: &DenseMatrix, s: usize, side: Side, tol: f64) -> bool {
    let (rows, cols) = a.shape();
    let (m0, n0) = (rows / s, cols / s);
    (0..rows).all(|i| {
        (0..cols).all(|j| {
            let v = a.get(i, j);
            match side {
                Side::Left => {
                    if i % s == j % s {
                        close(v, a.get((i / s) * s, (j / s) * s), tol)
                    } else {
                        close(v, 0.0, tol)
                    }
                }
                Side::Right => {
                    if i / m0 == j / n0 {
                        close(v, a.get(i % m0, j % n0), tol)
                    } else {
                        close(v, 0.0, tol)
                    }
                }
            }
        })
    })
}

/// Splits `a` into its irreducible atom and multiplicity, so that
/// `a = atom ⊗ I_mult` (Left) or `a = I_mult ⊗ atom` (Right).
pub fn reduce_matrix(a: &DenseMatrix, side: Side) -> (DenseMatrix, usize) {
    let (rows, cols) = a.shape();
    let tol = entry_tol(a.is_integer_valued());
    for s in divisors_desc(rows.gcd(&cols)) {
        if is_matrix_lift(a, s, side, tol) {
            let (m0, n0) = (rows / s, cols / s);
            let atom = match side {
                Side::Left => DenseMatrix::from_fn(m0, n0, |i, j| a.get(i * s, j * s)),
                Side::Right => DenseMatrix::from_fn(m0, n0, |i, j| a.get(i, j)),
            };
            return (atom, s);
        }
    }
    (a.clone(), 1)
}

/// Equivalence class of a signal, stored as its irreducible atom.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalClass {
    pub side: Side,
    pub atom: Signal,
}

impl SignalClass {
    pub fn of(x: &Signal, side: Side) -> Self {
        Self {
            side,
            atom: reduce_signal(x, side).0,
        }
    }

    pub fn dim(&self) -> usize {
        self.atom.dim()
    }

    /// The class member of dimension `atom.dim · s`.
    pub fn member(&self, s: usize) -> Signal {
        self.atom.lift(s, self.side)
    }
}

/// Equivalence class of a matrix, stored as its irreducible atom.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixClass {
    pub side: Side,
    pub atom: DenseMatrix,
}

impl MatrixClass {
    pub fn of(a: &DenseMatrix, side: Side) -> Self {
        Self {
            side,
            atom: reduce_matrix(a, side).0,
        }
    }

    pub fn member(&self, s: usize) -> DenseMatrix {
        match self.side {
            Side::Left => crate::stp::kron_identity_right(&self.atom, s),
            Side::Right => crate::stp::kron_identity_left(s, &self.atom),
        }
    }
}

pub fn equivalent(x: &Signal, y: &Signal, side: Side) -> bool {
    let (ax, _) = reduce_signal(x, side);
    let (ay, _) = reduce_signal(y, side);
    let tol = entry_tol(ax.is_integer_valued() && ay.is_integer_valued());
    ax.approx_eq(&ay, tol)
}

/// Lift-invariant inner product: `(1/t) ⟨lift(x), lift(y)⟩` at `t = lcm(m, n)`.
pub fn inner(x: &Signal, y: &Signal, side: Side) -> f64 {
    let (m, n) = (x.dim(), y.dim());
    let t = m.lcm(&n);
    x.lift(t / m, side).dot(&y.lift(t / n, side)) / t as f64
}

pub fn inner_v(x: &Signal, y: &Signal) -> f64 {
    inner(x, y, Side::Left)
}

/// `sqrt(xᵀx / n)`; identical on both sides.
pub fn norm_v(x: &Signal) -> f64 {
    (x.dot(x) / x.dim() as f64).sqrt()
}

pub fn dist(x: &Signal, y: &Signal, side: Side) -> f64 {
    norm_v(&sta(x, y, side, true))
}

pub fn dist_v(x: &Signal, y: &Signal) -> f64 {
    dist(x, y, Side::Left)
}

/// Angle in radians; the cosine is clamped to `[-1, 1]`.
pub fn angle(x: &Signal, y: &Signal, side: Side) -> Result<f64> {
    let (nx, ny) = (norm_v(x), norm_v(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(StpError::ZeroVector);
    }
    let cos = inner(x, y, side) / (nx * ny);
    Ok(cos.clamp(-1.0, 1.0).acos())
}

pub fn angle_v(x: &Signal, y: &Signal) -> Result<f64> {
    angle(x, y, Side::Left)
}

/// `Π^m_n`, the `n × m` matrix projecting `R^m` onto `R^n` in the quotient
/// geometry of `side`. Left: `(n/t)(I_n ⊗ J_{t/n}ᵀ)(I_m ⊗ J_{t/m})`; Right is
/// the mirror `(n/t)(J_{t/n}ᵀ ⊗ I_n)(J_{t/m} ⊗ I_m)`.
pub fn projection_matrix_side(m: usize, n: usize, side: Side) -> DenseMatrix {
    assert!(m > 0 && n > 0, "projection needs positive dimensions");
    let t = m.lcm(&n);
    let (a, b) = (t / n, t / m);
    let scale = n as f64 / t as f64;
    // Entry (i, j) counts the lifted coordinates k in 0..t that map to both
    // output slot i and input slot j.
    let mut p = DenseMatrix::zeros(n, m);
    for k in 0..t {
        let (i, j) = match side {
            Side::Left => (k / a, k / b),
            Side::Right => (k % n, k % m),
        };
        p.set(i, j, p.get(i, j) + scale);
    }
    p
}

pub fn projection_matrix(m: usize, n: usize) -> DenseMatrix {
    projection_matrix_side(m, n, Side::Left)
}

/// Closest point to `x` in `R^n` under the quotient distance of `side`.
pub fn project_side(x: &Signal, n: usize, side: Side) -> Signal {
    let p = projection_matrix_side(x.dim(), n, side);
    Signal::from_vec_unchecked(p.mul_vec(x.as_slice()).expect("projection shape"))
}

pub fn project(x: &Signal, n: usize) -> Signal {
    project_side(x, n, Side::Left)
}
