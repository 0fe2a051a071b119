//! Regenerates the reference constructions and compares them with the
//! hand-entered files in `golden/`.

use std::fs;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use serde::Deserialize;

use crate::basis::{basis_layer, basis_up_to, orthonormal_basis, BasisElement};
use crate::bibd::{
    aocm, group_equivalent, horizontal_expand, incidence_matrix, ocm, vertical_expand, vertical_expand_star,
    BooleanMatrix, SignMatrix,
};
use crate::error::{Result, StpError};
use crate::io::{load_matrix, MatrixKind};
use crate::matrix::{DenseMatrix, Side, Signal};
use crate::metrics::coherence;

/// Location of the golden files shipped with the crate.
pub fn default_golden_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/golden"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            ok,
            detail: detail.into(),
        }
    }
}

fn golden(dir: &Path, file: &str) -> Result<DenseMatrix> {
    Ok(load_matrix(&dir.join(file))?.0)
}

fn exact(name: &str, got: &DenseMatrix, want: &DenseMatrix) -> Check {
    match got.max_abs_diff(want) {
        Some(0.0) => Check::new(name, true, format!("{}x{} exact", got.rows(), got.cols())),
        Some(d) => Check::new(name, false, format!("max entry difference {d}")),
        None => Check::new(
            name,
            false,
            format!("shape {:?} differs from {:?}", got.shape(), want.shape()),
        ),
    }
}

fn grouped(name: &str, got: &SignMatrix, want: &DenseMatrix) -> Result<Check> {
    let want = SignMatrix::new(want.clone())?;
    let ok = group_equivalent(got, &want)?;
    Ok(Check::new(
        name,
        ok,
        if ok {
            "equal up to row/column permutations and negations"
        } else {
            "not in the same orbit"
        },
    ))
}

/// `n,j` pairs stored as a two-column matrix.
pub fn golden_elements(dir: &Path, file: &str) -> Result<Vec<BasisElement>> {
    let m = golden(dir, file)?;
    if m.cols() != 2 {
        return Err(StpError::Parse(format!("{file}: expected two columns")));
    }
    Ok((0..m.rows())
        .map(|i| BasisElement {
            n: m.get(i, 0) as usize,
            j: m.get(i, 1) as usize,
        })
        .collect())
}

fn listing(name: &str, got: &[BasisElement], want: &[BasisElement]) -> Check {
    let labels = |v: &[BasisElement]| v.iter().map(|e| e.label()).collect::<Vec<_>>().join(" ");
    if got == want {
        Check::new(name, true, format!("{} elements in order", got.len()))
    } else {
        Check::new(name, false, format!("got [{}], want [{}]", labels(got), labels(want)))
    }
}

#[derive(Deserialize)]
struct ScaledVector {
    scale_squared: [u64; 2],
    entries: Vec<i64>,
}

#[derive(Deserialize)]
struct VectorFile {
    vectors: Vec<ScaledVector>,
}

/// The orthonormal vectors `√(p/q)·(entries)` of `orthonormal_right.json`.
pub fn golden_orthonormal(dir: &Path) -> Result<Vec<Signal>> {
    let text = fs::read_to_string(dir.join("orthonormal_right.json"))?;
    let file: VectorFile = serde_json::from_str(&text).map_err(|e| StpError::Parse(e.to_string()))?;
    file.vectors
        .iter()
        .map(|v| {
            let scale = (v.scale_squared[0] as f64 / v.scale_squared[1] as f64).sqrt();
            Signal::new(v.entries.iter().map(|&e| e as f64 * scale).collect())
        })
        .collect()
}

/// Largest entrywise gap between `x` and `y` after lifting both to a common
/// dimension on `side`.
pub fn lifted_gap(x: &Signal, y: &Signal, side: Side) -> f64 {
    let t = x.dim().lcm(&y.dim());
    x.lift(t / x.dim(), side)
        .max_abs_diff(&y.lift(t / y.dim(), side))
        .expect("equal dimensions")
}

fn orthonormal_check(dir: &Path) -> Result<Check> {
    let want = golden_orthonormal(dir)?;
    let got = orthonormal_basis(5, Side::Right)?;
    if got.count() < want.len() {
        return Ok(Check::new(
            "orthonormal_right",
            false,
            format!("only {} elements generated", got.count()),
        ));
    }
    let gap = got
        .elements
        .iter()
        .zip(&want)
        .map(|(g, w)| {
            if g.dim() == w.dim() {
                lifted_gap(g, w, Side::Right)
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    Ok(Check::new(
        "orthonormal_right",
        gap <= 1e-10,
        format!("first {} vectors, max entry gap {gap:e}", want.len()),
    ))
}

/// Runs every comparison against the files in `dir`.
pub fn run_all(dir: &Path) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let h = incidence_matrix(4)?;
    out.push(exact("incidence4", h.matrix(), &golden(dir, "incidence4.csv")?));
    out.push(exact(
        "vertical4",
        vertical_expand(&h)?.matrix(),
        &golden(dir, "vertical4.csv")?,
    ));

    let hv = BooleanMatrix::new(golden(dir, "vertical4.csv")?)?;
    let b = SignMatrix::new(golden(dir, "signs3x4.csv")?)?;
    match horizontal_expand(&hv, &b) {
        Ok(phi) => {
            out.push(exact("phi7x16", &phi, &golden(dir, "phi7x16.csv")?));
            let mu = coherence(&phi)?;
            out.push(Check::new(
                "phi7x16_coherence",
                (mu - 1.0 / 3.0).abs() <= 1e-12,
                format!("coherence {mu}"),
            ));
        }
        Err(e) => out.push(Check::new("phi7x16", false, e.to_string())),
    }

    out.push(exact(
        "star4",
        vertical_expand_star(4)?.matrix(),
        &golden(dir, "star4.csv")?,
    ));

    out.push(grouped("ocm4", &ocm(4)?, &golden(dir, "ocm4.csv")?)?);
    for (name, t) in [
        ("aocm3", 3),
        ("aocm3_alt", 3),
        ("aocm7", 7),
        ("aocm7_alt", 7),
        ("aocm5", 5),
    ] {
        out.push(grouped(name, &aocm(t)?, &golden(dir, &format!("{name}.csv"))?)?);
    }

    out.push(listing(
        "layer12",
        &basis_layer(12),
        &golden_elements(dir, "layer12.csv")?,
    ));
    out.push(listing(
        "layer27",
        &basis_layer(27),
        &golden_elements(dir, "layer27.csv")?,
    ));
    out.push(listing(
        "basis_to_10",
        &basis_up_to(10),
        &golden_elements(dir, "basis_to_10.csv")?,
    ));
    out.push(orthonormal_check(dir)?);
    Ok(out)
}

/// The regenerated matrices, named like their golden counterparts.
pub fn regenerate() -> Result<Vec<(&'static str, DenseMatrix, MatrixKind)>> {
    let h = incidence_matrix(4)?;
    let hv = vertical_expand(&h)?;
    let b = SignMatrix::from_int_rows(&[[1, 1, 1, -1], [1, -1, 1, 1], [1, 1, -1, 1]])?;
    let phi = horizontal_expand(&hv, &b)?;
    let pairs = |v: Vec<BasisElement>| {
        DenseMatrix::from_fn(v.len(), 2, |i, j| if j == 0 { v[i].n as f64 } else { v[i].j as f64 })
    };
    Ok(vec![
        ("incidence4", h.matrix().clone(), MatrixKind::Boolean),
        ("vertical4", hv.into_matrix(), MatrixKind::Boolean),
        ("signs3x4", b.into_matrix(), MatrixKind::Sign),
        ("phi7x16", phi, MatrixKind::Real),
        ("star4", vertical_expand_star(4)?.into_matrix(), MatrixKind::Boolean),
        ("ocm4", ocm(4)?.into_matrix(), MatrixKind::Sign),
        ("aocm3", aocm(3)?.into_matrix(), MatrixKind::Sign),
        ("aocm7", aocm(7)?.into_matrix(), MatrixKind::Sign),
        ("aocm5", aocm(5)?.into_matrix(), MatrixKind::Sign),
        ("layer12", pairs(basis_layer(12)), MatrixKind::Real),
        ("layer27", pairs(basis_layer(27)), MatrixKind::Real),
        ("basis_to_10", pairs(basis_up_to(10)), MatrixKind::Real),
    ])
}
