//! Kronecker products, swap matrices and the left/right semi-tensor products.

use num_integer::Integer;

use crate::matrix::{DenseMatrix, Side, Signal};

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    DenseMatrix::from_fn(a.rows() * p, a.cols() * q, |i, j| {
        a.get(i / p, j / q) * b.get(i % p, j % q)
    })
}

/// `A ⊗ I_s`.
pub fn kron_identity_right(a: &DenseMatrix, s: usize) -> DenseMatrix {
    kron(a, &DenseMatrix::identity(s))
}

/// `I_s ⊗ A`.
pub fn kron_identity_left(s: usize, a: &DenseMatrix) -> DenseMatrix {
    kron(&DenseMatrix::identity(s), a)
}

/// The swap matrix `W_[m,n]`: the `mn × mn` permutation with
/// `W_[m,n] (x ⊗ y) = y ⊗ x` for `x ∈ R^m`, `y ∈ R^n`.
pub fn swap_matrix(m: usize, n: usize) -> DenseMatrix {
    assert!(m > 0 && n > 0, "swap matrix needs positive sizes");
    let mut w = DenseMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            w.set(j * m + i, i * n + j, 1.0);
        }
    }
    w
}

/// Applies `W_[m,n]` to a vector of length `mn` without materializing it.
pub fn swap_apply(v: &[f64], m: usize, n: usize) -> Vec<f64> {
    assert_eq!(v.len(), m * n, "swap_apply length mismatch");
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = v[i * n + j];
        }
    }
    out
}

/// Matrix-matrix STP. With `t = lcm(a.cols, b.rows)`:
/// Left is `(A ⊗ I_{t/n})(B ⊗ I_{t/p})`, Right is `(I_{t/n} ⊗ A)(I_{t/p} ⊗ B)`.
pub fn mm_stp(a: &DenseMatrix, b: &DenseMatrix, side: Side) -> DenseMatrix {
    let n = a.cols();
    let p = b.rows();
    let t = n.lcm(&p);
    let (la, lb) = match side {
        Side::Left => (kron_identity_right(a, t / n), kron_identity_right(b, t / p)),
        Side::Right => (kron_identity_left(t / n, a), kron_identity_left(t / p, b)),
    };
    la.matmul(&lb).expect("lifted shapes agree")
}

/// `(A ⊗ I_k) v`, computed blockwise.
pub(crate) fn apply_kron_identity_right(a: &DenseMatrix, k: usize, v: &[f64]) -> Vec<f64> {
    let (m, n) = a.shape();
    debug_assert_eq!(v.len(), n * k);
    let mut out = vec![0.0; m * k];
    for i in 0..m {
        let orow = &mut out[i * k..(i + 1) * k];
        for j in 0..n {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for (o, &x) in orow.iter_mut().zip(&v[j * k..(j + 1) * k]) {
                *o += aij * x;
            }
        }
    }
    out
}

/// `(I_k ⊗ A) v`, computed blockwise.
pub(crate) fn apply_kron_identity_left(k: usize, a: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let (m, n) = a.shape();
    debug_assert_eq!(v.len(), n * k);
    let mut out = Vec::with_capacity(m * k);
    for block in v.chunks_exact(n) {
        out.extend(a.mul_vec(block).expect("block width matches"));
    }
    out
}

/// Matrix-vector STP. With `s = lcm(a.cols, x.dim)`:
/// Left is `(A ⊗ I_{s/n})(x ⊗ J_{s/r})`, Right is `(I_{s/n} ⊗ A)(J_{s/r} ⊗ x)`.
/// The result has dimension `a.rows · s / a.cols`.
pub fn mv_stp(a: &DenseMatrix, x: &Signal, side: Side) -> Signal {
    let n = a.cols();
    let r = x.dim();
    let s = n.lcm(&r);
    let lifted = x.lift(s / r, side);
    let y = match side {
        Side::Left => apply_kron_identity_right(a, s / n, lifted.as_slice()),
        Side::Right => apply_kron_identity_left(s / n, a, lifted.as_slice()),
    };
    Signal::from_vec_unchecked(y)
}

/// Semi-tensor addition (or subtraction): both operands lifted to
/// `lcm(x.dim, y.dim)` on the given side, then combined entrywise.
pub fn sta(x: &Signal, y: &Signal, side: Side, subtract: bool) -> Signal {
    let (m, n) = (x.dim(), y.dim());
    let t = m.lcm(&n);
    let xl = x.lift(t / m, side);
    let yl = y.lift(t / n, side);
    let sign = if subtract { -1.0 } else { 1.0 };
    Signal::from_vec_unchecked(
        xl.as_slice()
            .iter()
            .zip(yl.as_slice())
            .map(|(a, b)| a + sign * b)
            .collect(),
    )
}
