//! Basis of the signal space: the generating set of natural vectors, the
//! multi-fold-divisor pruning rule, Gram–Schmidt under the lift-invariant
//! inner product, and coordinates in the resulting orthonormal basis.

use num_integer::Integer;

use crate::error::{Result, StpError};
use crate::matrix::{DenseMatrix, Side, Signal};
use crate::signal_space::{dist, inner, norm_v, reduce_signal};
use crate::stp::sta;

/// A residual below this V-norm means the candidate is dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;
/// Reconstruction residual above this V-norm means the basis misses the signal.
pub const COVERAGE_TOL: f64 = 1e-8;
/// Largest dimension a lifted intermediate may reach.
pub const MAX_LIFT_DIM: usize = 1 << 16;

/// `δ_n^j`, or the scalar `1` when `n = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub n: usize,
    pub j: usize,
}

impl BasisElement {
    pub fn value(&self) -> Signal {
        Signal::delta(self.n, self.j).expect("1 <= j <= n")
    }

    pub fn label(&self) -> String {
        if self.n == 1 {
            "1".to_string()
        } else {
            format!("δ_{}^{}", self.n, self.j)
        }
    }
}

pub fn generating_layer(n: usize) -> Vec<BasisElement> {
    assert!(n > 0, "layer of dimension 0");
    if n == 1 {
        return vec![BasisElement { n: 1, j: 1 }];
    }
    (1..n)
        .filter(|j| j.gcd(&n) == 1)
        .map(|j| BasisElement { n, j })
        .collect()
}

/// `n = s²·q` with `s` maximal, so `q` is squarefree.
pub fn square_split(n: usize) -> (usize, usize) {
    assert!(n > 0);
    let mut s = 1;
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            s = k;
        }
        k += 1;
    }
    (s, n / (s * s))
}

pub fn has_multifold_divisor(n: usize) -> bool {
    square_split(n).0 > 1
}

/// Independent part of the layer at dimension `n`: the whole generating layer
/// when `n` is squarefree, otherwise only `δ_n^j` with `j ≤ (s−1)·s·q`.
pub fn basis_layer(n: usize) -> Vec<BasisElement> {
    let layer = generating_layer(n);
    let (s, q) = square_split(n);
    if s == 1 {
        return layer;
    }
    let cutoff = (s - 1) * s * q;
    layer.into_iter().filter(|e| e.j <= cutoff).collect()
}

/// All basis layers for dimensions `1..=m`, in order.
pub fn basis_up_to(m: usize) -> Vec<BasisElement> {
    (1..=m).flat_map(basis_layer).collect()
}

/// Gram matrix of `signals` under the lift-invariant inner product of `side`.
pub fn gram_matrix(signals: &[Signal], side: Side) -> DenseMatrix {
    let k = signals.len();
    let mut g = DenseMatrix::zeros(k.max(1), k.max(1));
    for p in 0..k {
        for q in p..k {
            let v = inner(&signals[p], &signals[q], side);
            g.set(p, q, v);
            g.set(q, p, v);
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    pub side: Side,
    pub elements: Vec<Signal>,
}

impl OrthonormalBasis {
    pub fn count(&self) -> usize {
        self.elements.len()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d > MAX_LIFT_DIM {
        return Err(StpError::BudgetExceeded {
            needed: d as u128,
            budget: MAX_LIFT_DIM as u64,
        });
    }
    Ok(())
}

/// Makes the first clearly nonzero entry positive.
fn fix_sign(v: Signal) -> Signal {
    match v.as_slice().iter().find(|x| x.abs() > 1e-9) {
        Some(&first) if first < 0.0 => v.scale(-1.0),
        _ => v,
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass over
/// `basis_up_to(m)`, using the inner product of `side`. Each intermediate is
/// reduced to its atom so dimensions stay as small as the class allows.
///
/// Under `Side::Right` the vectors stay in their own dimension and the first
/// elements read `1, (1,−1), √(1/2)(2,−1,−1), …`.
pub fn orthonormal_basis(m: usize, side: Side) -> Result<OrthonormalBasis> {
    assert!(m > 0, "basis bound must be positive");
    let mut out: Vec<Signal> = Vec::new();
    for (idx, el) in basis_up_to(m).iter().enumerate() {
        let mut v = el.value();
        for _pass in 0..2 {
            for e in &out {
                let c = inner(&v, e, side);
                if c == 0.0 {
                    continue;
                }
                check_dim(v.dim().lcm(&e.dim()))?;
                v = reduce_signal(&sta(&v, &e.scale(c), side, true), side).0;
            }
        }
        let nrm = norm_v(&v);
        if nrm < DEPENDENCE_TOL {
            return Err(StpError::DependentInput(idx));
        }
        out.push(fix_sign(v.scale(1.0 / nrm)));
    }
    Ok(OrthonormalBasis { side, elements: out })
}

/// `Σ ξ_i e_i`, lifted to a common dimension and reduced.
pub fn reconstruct(coords: &[f64], basis: &OrthonormalBasis) -> Result<Signal> {
    let side = basis.side;
    let mut acc = Signal::zeros(1);
    for (c, e) in coords.iter().zip(&basis.elements) {
        if c.abs() < 1e-15 {
            continue;
        }
        check_dim(acc.dim().lcm(&e.dim()))?;
        acc = reduce_signal(&sta(&acc, &e.scale(*c), side, false), side).0;
    }
    Ok(acc)
}

/// `ξ_i = ⟨x, e_i⟩` for every basis element. Fails with `InsufficientBasis`
/// when `Σ ξ_i e_i` is not equivalent to `x`.
pub fn coordinates(x: &Signal, basis: &OrthonormalBasis) -> Result<Vec<f64>> {
    let coords: Vec<f64> = basis.elements.iter().map(|e| inner(x, e, basis.side)).collect();
    let back = reconstruct(&coords, basis)?;
    let resid = dist(x, &back, basis.side);
    if resid > COVERAGE_TOL {
        return Err(StpError::InsufficientBasis(resid));
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_with_tol;
    use crate::signal_space::equivalent;

    fn el(n: usize, j: usize) -> BasisElement {
        BasisElement { n, j }
    }

    fn js(v: &[BasisElement]) -> Vec<usize> {
        v.iter().map(|e| e.j).collect()
    }

    #[test]
    fn generating_layers() {
        assert_eq!(generating_layer(1), vec![el(1, 1)]);
        assert_eq!(js(&generating_layer(6)), vec![1, 5]);
        assert_eq!(js(&generating_layer(12)), vec![1, 5, 7, 11]);
        assert_eq!(generating_layer(1)[0].value(), Signal::ones(1));
    }

    #[test]
    fn multifold_divisors() {
        assert!(has_multifold_divisor(12));
        assert!(!has_multifold_divisor(6));
        assert!(has_multifold_divisor(27));
        assert!(!has_multifold_divisor(1));
        assert_eq!(square_split(72), (6, 2));
        assert_eq!(square_split(27), (3, 3));
    }

    #[test]
    fn pruned_layers() {
        assert_eq!(js(&basis_layer(12)), vec![1, 5]);
        assert_eq!(js(&basis_layer(27)), vec![1, 2, 4, 5, 7, 8, 10, 11, 13, 14, 16, 17]);
        assert_eq!(js(&basis_layer(4)), vec![1]);
        assert_eq!(js(&basis_layer(8)), vec![1, 3]);
        assert_eq!(js(&basis_layer(9)), vec![1, 2, 4, 5]);
    }

    fn totient(n: usize) -> usize {
        (1..=n).filter(|j| j.gcd(&n) == 1).count()
    }

    #[test]
    fn layer_sizes_vs_totient() {
        for n in 2..200 {
            let len = basis_layer(n).len();
            if has_multifold_divisor(n) {
                assert!(len < totient(n), "n={n}");
            } else {
                assert_eq!(len, totient(n), "n={n}");
            }
        }
    }

    #[test]
    fn basis_listing() {
        let b = basis_up_to(5);
        assert_eq!(
            b,
            vec![
                el(1, 1),
                el(2, 1),
                el(3, 1),
                el(3, 2),
                el(4, 1),
                el(5, 1),
                el(5, 2),
                el(5, 3),
                el(5, 4)
            ]
        );
        let b10 = basis_up_to(10);
        assert_eq!(b10.len(), 27);
        assert_eq!(b10.last(), Some(&el(10, 9)));
        assert_eq!(basis_up_to(1), vec![el(1, 1)]);
    }

    #[test]
    fn dependence_witnesses() {
        let d = |n, j| Signal::delta(n, j).unwrap();
        let s1 = sta(&d(12, 1), &d(12, 7), Side::Right, false);
        assert!(equivalent(&s1, &d(6, 1), Side::Right));
        let s2 = sta(&d(12, 5), &d(12, 11), Side::Right, false);
        assert!(equivalent(&s2, &d(6, 5), Side::Right));
        for k in 1..=8 {
            let s = sta(
                &sta(&d(27, k), &d(27, k + 9), Side::Right, false),
                &d(27, k + 18),
                Side::Right,
                false,
            );
            assert!(equivalent(&s, &d(9, k), Side::Right));
        }
    }

    #[test]
    fn left_lift_independence_up_to_30() {
        let values: Vec<Signal> = basis_up_to(30).iter().map(BasisElement::value).collect();
        let g = gram_matrix(&values, Side::Left);
        assert_eq!(rank_with_tol(&g, 1e-9), values.len());
    }

    #[test]
    fn orthonormal_leading_elements() {
        let b = orthonormal_basis(5, Side::Right).unwrap();
        assert_eq!(b.count(), 9);
        let h = 0.5f64.sqrt();
        let expected: Vec<Vec<f64>> = vec![vec![1.0], vec![1.0, -1.0], vec![2.0 * h, -h, -h]];
        for (e, want) in b.elements.iter().zip(&expected) {
            assert!(e.approx_eq(&Signal::new(want.clone()).unwrap(), 1e-12), "{e:?}");
        }
        let e6 = Signal::new(vec![2.0, -0.5, -0.5, -0.5, -0.5]).unwrap();
        assert!(b.elements[5].approx_eq(&e6, 1e-12));
    }

    #[test]
    fn orthonormality_both_sides() {
        for (side, m) in [(Side::Right, 15), (Side::Left, 8)] {
            let b = orthonormal_basis(m, side).unwrap();
            let g = gram_matrix(&b.elements, side);
            for p in 0..b.count() {
                for q in 0..b.count() {
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((g.get(p, q) - want).abs() <= 1e-10, "{side} {p} {q}");
                }
            }
        }
    }

    #[test]
    fn right_lift_pruning_breaks_at_16() {
        assert!(matches!(
            orthonormal_basis(16, Side::Right),
            Err(StpError::DependentInput(_))
        ));
    }

    #[test]
    fn coordinate_examples() {
        let b = orthonormal_basis(6, Side::Right).unwrap();
        let c = coordinates(&Signal::ones(5), &b).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1..].iter().all(|v| v.abs() < 1e-12));
        let c = coordinates(&Signal::from_ints(&[1, -1]).unwrap(), &b).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert!(c.iter().enumerate().all(|(i, v)| i == 1 || v.abs() < 1e-12));
        let x = Signal::from_ints(&[3, -1, 2]).unwrap();
        let cx = coordinates(&x, &b).unwrap();
        let cl = coordinates(&x.lift(2, Side::Right), &b).unwrap();
        for (p, q) in cx.iter().zip(&cl) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn coordinates_reject_uncovered_signal() {
        // δ_4^2 is outside the span of the pruned right-lift basis.
        let b = orthonormal_basis(6, Side::Right).unwrap();
        let x = Signal::delta(4, 2).unwrap();
        assert!(matches!(coordinates(&x, &b), Err(StpError::InsufficientBasis(_))));
    }

    #[test]
    fn coordinates_roundtrip_on_span() {
        let b = orthonormal_basis(7, Side::Right).unwrap();
        let xi: Vec<f64> = (0..b.count()).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let x = reconstruct(&xi, &b).unwrap();
        let back = coordinates(&x, &b).unwrap();
        let y = reconstruct(&back, &b).unwrap();
        assert!(dist(&x, &y, Side::Right) < 1e-9);
        for (p, q) in xi.iter().zip(&back) {
            assert!((p - q).abs() < 1e-9);
        }
    }
}
