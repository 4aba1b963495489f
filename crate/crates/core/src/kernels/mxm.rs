//! Dense matrix multiply written four ways with collectives.

use crate::containers::DenseMatrix;
use crate::ops::{self, EwiseOp};
use crate::{Error, Result};

/// Default inner block of [`mxm2b`].
pub const DEFAULT_BLOCK: usize = 8;

fn square_pair(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<usize> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::Shape(format!(
            "expected two square matrices of one size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(n)
}

/// One dot product per element: `c(i, j) = add_reduce(a.row(i) * b.col(j))`.
pub fn mxm0(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    let n = square_pair(a, b)?;
    let mut c = ops::fill_matrix(n, n, 0.0)?;
    for i in 0..n {
        for j in 0..n {
            let s = ops::add_reduce(&ops::ewise(EwiseOp::Mul, &a.row(i)?, &b.col(j)?)?);
            c = ops::set2(c, i, j, s)?;
        }
    }
    Ok(c)
}

/// One column of `c` per step: `replace_col(c, i, add_reduce_rows(a * repeat_row(b.col(i), n)))`.
pub fn mxm1(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    let n = square_pair(a, b)?;
    let mut c = ops::fill_matrix(n, n, 0.0)?;
    for i in 0..n {
        let t = ops::repeat_row(&b.col(i)?, n)?;
        let d = ops::ewise_into(EwiseOp::Mul, t, a)?;
        c = ops::replace_col(c, i, &ops::add_reduce_rows(&d))?;
    }
    Ok(c)
}

fn outer(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>, k: usize, n: usize) -> Result<DenseMatrix<f64>> {
    let left = ops::repeat_col(&a.col(k)?, n)?;
    ops::ewise_into(EwiseOp::Mul, left, &ops::repeat_row(&b.row(k)?, n)?)
}

/// Sum of rank-one updates: `c += repeat_col(a.col(i), n) * repeat_row(b.row(i), n)`.
pub fn mxm2a(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    let n = square_pair(a, b)?;
    let mut c = outer(a, b, 0, n)?;
    for i in 1..n {
        c = ops::ewise_into(EwiseOp::Add, c, &outer(a, b, i, n)?)?;
    }
    Ok(c)
}

/// [`mxm2a`] with the update loop blocked by `u`: the first block, then
/// `n / u - 1` further blocks, then the `n % u` remaining updates.
pub fn mxm2b(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>, u: usize) -> Result<DenseMatrix<f64>> {
    let n = square_pair(a, b)?;
    if u == 0 || u > n {
        return Err(Error::Parameter(format!("block size must be in 1..={n}, got {u}")));
    }
    let mut c = outer(a, b, 0, n)?;
    for j in 1..u {
        c = ops::ewise_into(EwiseOp::Add, c, &outer(a, b, j, n)?)?;
    }
    let size = n / u;
    for i in 1..size {
        let base = i * u;
        for j in 0..u {
            c = ops::ewise_into(EwiseOp::Add, c, &outer(a, b, base + j, n)?)?;
        }
    }
    for i in size * u..n {
        c = ops::ewise_into(EwiseOp::Add, c, &outer(a, b, i, n)?)?;
    }
    Ok(c)
}
