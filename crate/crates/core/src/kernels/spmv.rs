//! CSR sparse matrix-vector product as a map over row-pointer pairs.
//!
//! Both variants map a per-row kernel over `rowpi = rowp[0..nrows]` and
//! `rowpj = rowp[1..=nrows]`, gathering from `matvals`, `invec` and `indx`.
//! Each row is accumulated from zero in storage order, so the two variants
//! and a plain serial loop agree bit for bit.

use std::sync::LazyLock;

use super::csr::CsrMatrix;
use crate::containers::DenseVector;
use crate::ops::{self, MapArgs, MapKernel};
use crate::{Error, Result};

// Auxiliary slots of the row kernels.
const MATVALS: usize = 0;
const INVEC: usize = 1;
const INDX: usize = 2;

fn row_bounds<'a>(a: &MapArgs<'a>) -> Result<(&'a [f64], &'a [i32], &'a [f64])> {
    let (lo, hi) = (a.input::<i32>(0)? as i64, a.input::<i32>(1)? as i64);
    Ok((a.aux_slice(MATVALS, lo, hi)?, a.aux_slice(INDX, lo, hi)?, a.aux(INVEC)?))
}

fn at(invec: &[f64], col: i32) -> Result<f64> {
    usize::try_from(col)
        .ok()
        .and_then(|c| invec.get(c).copied())
        .ok_or_else(|| Error::Index(format!("column index {col} out of range for input of length {}", invec.len())))
}

static ROW_GATHER: LazyLock<MapKernel<f64>> = LazyLock::new(|| {
    MapKernel::new("csr_row_gather", |a| {
        let (vals, cols, invec) = row_bounds(a)?;
        let mut acc = 0.0;
        for (&v, &c) in vals.iter().zip(cols) {
            acc += v * at(invec, c)?;
        }
        Ok(acc)
    })
});

static ROW_RUNS: LazyLock<MapKernel<f64>> = LazyLock::new(|| {
    MapKernel::new("csr_row_runs", |a| {
        let (vals, cols, invec) = row_bounds(a)?;
        let mut acc = 0.0;
        let mut k = 0;
        while k < cols.len() {
            let mut end = k + 1;
            while end < cols.len() && cols[end] as i64 == cols[end - 1] as i64 + 1 {
                end += 1;
            }
            if end - k >= 2 {
                let first = cols[k];
                at(invec, first)?;
                at(invec, cols[end - 1])?;
                let x = &invec[first as usize..first as usize + (end - k)];
                for (&v, &xi) in vals[k..end].iter().zip(x) {
                    acc += v * xi;
                }
            } else {
                acc += vals[k] * at(invec, cols[k])?;
            }
            k = end;
        }
        Ok(acc)
    })
});

fn spmv_with(kernel: &MapKernel<f64>, m: &CsrMatrix, invec: &DenseVector<f64>) -> Result<DenseVector<f64>> {
    if invec.len() != m.ncols() {
        return Err(Error::Shape(format!("input of length {} for a matrix with {} columns", invec.len(), m.ncols())));
    }
    let nrows = m.nrows();
    let rowpi = ops::section(m.rowp(), 0, nrows, 1)?;
    let rowpj = ops::section(m.rowp(), 1, nrows, 1)?;
    ops::map(kernel, &[(&rowpi).into(), (&rowpj).into()], &[m.matvals().into(), invec.into(), m.indx().into()])
}

/// Row kernel gathering every element through `indx`.
pub fn spmv1(m: &CsrMatrix, invec: &DenseVector<f64>) -> Result<DenseVector<f64>> {
    spmv_with(&ROW_GATHER, m, invec)
}

/// Row kernel that reads runs of two or more consecutive columns with a
/// unit-stride loop and gathers the rest.
pub fn spmv2(m: &CsrMatrix, invec: &DenseVector<f64>) -> Result<DenseVector<f64>> {
    spmv_with(&ROW_RUNS, m, invec)
}
