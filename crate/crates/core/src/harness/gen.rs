//! Deterministic benchmark inputs.

use super::rng::Rng;
use crate::containers::{DenseMatrix, DenseVector};
use crate::element::C64;
use crate::kernels::CsrMatrix;
use crate::{Error, Result};

/// `n x n`, entries uniform in `[0, 1)`, filled row-major.
pub fn gen_dense(n: usize, seed: u64) -> Result<DenseMatrix<f64>> {
    let mut rng = Rng::new(seed);
    DenseMatrix::from_vec((0..n * n).map(|_| rng.next_f64()).collect(), n, n)
}

/// Nonzeros per row for a fill percentage: `max(1, round(fill * n / 100))`.
pub fn nonzeros_per_row(n: usize, fill_percent: f64) -> Result<usize> {
    if !(fill_percent > 0.0 && fill_percent <= 100.0) {
        return Err(Error::Parameter(format!("fill must be in (0, 100], got {fill_percent}")));
    }
    let k = ((fill_percent * n as f64 / 100.0).round() as usize).max(1);
    if k > n {
        return Err(Error::Parameter(format!("{k} nonzeros per row exceed {n} columns")));
    }
    Ok(k)
}

/// `n x n` with exactly `k` nonzeros in every row (see [`nonzeros_per_row`]).
///
/// Per row: `k` distinct columns by Floyd's sampling, sorted ascending, then
/// one value uniform in `[-1, 1)` per column.
pub fn gen_sparse(n: usize, fill_percent: f64, seed: u64) -> Result<CsrMatrix> {
    if n == 0 {
        return Err(Error::Parameter("matrix order must be positive".into()));
    }
    let k = nonzeros_per_row(n, fill_percent)?;
    let mut rng = Rng::new(seed);
    let mut taken = vec![false; n];
    let mut matvals = Vec::with_capacity(n * k);
    let mut indx = Vec::with_capacity(n * k);
    let mut row = Vec::with_capacity(k);
    for _ in 0..n {
        row.clear();
        for j in n - k..n {
            let t = rng.below(j + 1);
            let pick = if taken[t] { j } else { t };
            taken[pick] = true;
            row.push(pick);
        }
        row.sort_unstable();
        for &c in &row {
            taken[c] = false;
            indx.push(c as i32);
            matvals.push(rng.next_signed());
        }
    }
    let rowp = (0..=n).map(|i| (i * k) as i32).collect();
    CsrMatrix::new(n, n, matvals, indx, rowp)
}

/// Symmetric banded matrix of total band width `bw`: `bw` on the diagonal,
/// `-1` within `(bw - 1) / 2` of it. Strictly diagonally dominant, hence
/// positive definite.
pub fn gen_banded_spd(n: usize, bw: usize) -> Result<CsrMatrix> {
    if n == 0 {
        return Err(Error::Parameter("matrix order must be positive".into()));
    }
    if bw.is_multiple_of(2) || bw < 3 || bw > 2 * n - 1 {
        return Err(Error::Parameter(format!("band width must be odd and in 3..={}, got {bw}", 2 * n - 1)));
    }
    let h = (bw - 1) / 2;
    let mut matvals = Vec::new();
    let mut indx = Vec::new();
    let mut rowp = Vec::with_capacity(n + 1);
    rowp.push(0);
    for i in 0..n {
        for j in i.saturating_sub(h)..=(i + h).min(n - 1) {
            indx.push(j as i32);
            matvals.push(if i == j { bw as f64 } else { -1.0 });
        }
        rowp.push(indx.len() as i32);
    }
    CsrMatrix::new(n, n, matvals, indx, rowp)
}

/// Real and imaginary parts uniform in `[-1, 1)`, real part drawn first.
pub fn gen_signal(n: usize, seed: u64) -> DenseVector<C64> {
    let mut rng = Rng::new(seed);
    DenseVector::from_vec(
        (0..n)
            .map(|_| {
                let re = rng.next_signed();
                C64::new(re, rng.next_signed())
            })
            .collect(),
    )
}

/// `A * ones`, so that the exact solution of `A x = b` is all ones.
pub fn ones_rhs(m: &CsrMatrix) -> DenseVector<f64> {
    DenseVector::from_vec(
        (0..m.nrows())
            .map(|i| {
                let mut acc = 0.0;
                for &v in m.row(i).1 {
                    acc += v;
                }
                acc
            })
            .collect(),
    )
}
