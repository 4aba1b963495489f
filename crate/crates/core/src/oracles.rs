//! Serial reference implementations used as ground truth.
//!
//! Plain loops over host slices; nothing here goes through the collectives.

use std::f64::consts::PI;

use crate::containers::{DenseMatrix, DenseVector};
use crate::element::C64;
use crate::kernels::CsrMatrix;
use crate::{Error, Result};

/// Triple loop, `c[i][j] += a[i][k] * b[k][j]` with `k` ascending.
pub fn mxm_naive(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
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
    let (x, y) = (a.as_slice(), b.as_slice());
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let ci = &mut c[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = x[i * n + k];
            for (cij, &bkj) in ci.iter_mut().zip(&y[k * n..(k + 1) * n]) {
                *cij += aik * bkj;
            }
        }
    }
    DenseMatrix::from_vec(c, n, n)
}

/// Row by row, accumulating in storage order.
pub fn spmv_serial(m: &CsrMatrix, v: &DenseVector<f64>) -> Result<DenseVector<f64>> {
    if v.len() != m.ncols() {
        return Err(Error::Shape(format!("input of length {} for a matrix with {} columns", v.len(), m.ncols())));
    }
    let x = v.as_slice();
    let out = (0..m.nrows())
        .map(|i| {
            let (cols, vals) = m.row(i);
            let mut acc = 0.0;
            for (&j, &a) in cols.iter().zip(vals) {
                acc += a * x[j as usize];
            }
            acc
        })
        .collect();
    Ok(DenseVector::from_vec(out))
}

/// Direct `O(N^2)` evaluation of `F[k] = sum_j f[j] exp(-2 pi i k j / N)`.
pub fn dft_naive(f: &DenseVector<C64>) -> DenseVector<C64> {
    let n = f.len();
    let x = f.as_slice();
    let table: Vec<C64> = (0..n)
        .map(|j| {
            let (s, c) = (-2.0 * PI * j as f64 / n as f64).sin_cos();
            C64::new(c, s)
        })
        .collect();
    let out = (0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &xj) in x.iter().enumerate() {
                acc += xj * table[(k * j) % n];
            }
            acc
        })
        .collect();
    DenseVector::from_vec(out)
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &DenseMatrix<f64>, b: &DenseVector<f64>) -> Result<DenseVector<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!("matrix is {}x{}, not square", n, a.cols())));
    }
    if b.len() != n {
        return Err(Error::Shape(format!("right-hand side of length {} for order {n}", b.len())));
    }
    let mut m = a.to_host();
    let mut x = b.to_host();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| m[p * n + col].abs().total_cmp(&m[q * n + col].abs()))
            .expect("nonempty range");
        if m[pivot * n + col] == 0.0 {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            x.swap(pivot, col);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= factor * m[col * n + j];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s -= m[col * n + j] * x[j];
        }
        x[col] = s / m[col * n + col];
    }
    Ok(DenseVector::from_vec(x))
}
