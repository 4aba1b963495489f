//! Three-array compressed sparse row storage.

use crate::containers::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Sparse matrix in CSR form: `matvals` and `indx` hold the nonzeros row by
/// row, `rowp[i]..rowp[i + 1]` is the storage range of row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    matvals: DenseVector<f64>,
    indx: DenseVector<i32>,
    rowp: DenseVector<i32>,
}

impl CsrMatrix {
    pub fn new(nrows: usize, ncols: usize, matvals: Vec<f64>, indx: Vec<i32>, rowp: Vec<i32>) -> Result<Self> {
        Self::from_parts(nrows, ncols, DenseVector::from_vec(matvals), DenseVector::from_vec(indx), DenseVector::from_vec(rowp))
    }

    /// Assemble from existing containers, checking the structure.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        matvals: DenseVector<f64>,
        indx: DenseVector<i32>,
        rowp: DenseVector<i32>,
    ) -> Result<Self> {
        let m = CsrMatrix { nrows, ncols, matvals, indx, rowp };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Format(msg));
        if self.nrows == 0 || self.ncols == 0 {
            return fail(format!("dimensions must be positive, got {}x{}", self.nrows, self.ncols));
        }
        if self.ncols > i32::MAX as usize {
            return fail(format!("{} columns do not fit 32-bit indices", self.ncols));
        }
        let (rowp, indx) = (self.rowp.as_slice(), self.indx.as_slice());
        let nnz = self.matvals.len();
        if indx.len() != nnz {
            return fail(format!("{nnz} values but {} column indices", indx.len()));
        }
        if rowp.len() != self.nrows + 1 {
            return fail(format!("rowp has {} entries, expected {}", rowp.len(), self.nrows + 1));
        }
        if rowp[0] != 0 {
            return fail(format!("rowp[0] = {}, expected 0", rowp[0]));
        }
        if rowp[self.nrows] as i64 != nnz as i64 {
            return fail(format!("rowp[{}] = {}, expected nnz = {nnz}", self.nrows, rowp[self.nrows]));
        }
        for i in 0..self.nrows {
            let (lo, hi) = (rowp[i], rowp[i + 1]);
            if hi < lo {
                return fail(format!("rowp decreases at row {i}: {lo} > {hi}"));
            }
            if hi as usize > nnz {
                return fail(format!("rowp[{}] = {hi} exceeds nnz = {nnz}", i + 1));
            }
            let cols = &indx[lo as usize..hi as usize];
            for (k, &c) in cols.iter().enumerate() {
                if c < 0 || c as usize >= self.ncols {
                    return fail(format!("row {i}: column index {c} out of range 0..{}", self.ncols));
                }
                if k > 0 && cols[k - 1] >= c {
                    return fail(format!("row {i}: column indices not strictly increasing at {c}"));
                }
            }
        }
        Ok(())
    }

    /// Build from `(row, col, value)` triples in any order; duplicates are
    /// summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = entries.iter().find(|&&(i, j, _)| i >= nrows || j >= ncols) {
            return Err(Error::Format(format!("entry ({i},{j}) outside {nrows}x{ncols}")));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut matvals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut indx: Vec<i32> = Vec::with_capacity(entries.len());
        let mut rows: Vec<usize> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            if rows.last() == Some(&i) && indx.last() == Some(&(j as i32)) {
                *matvals.last_mut().expect("nonempty") += v;
            } else {
                rows.push(i);
                indx.push(j as i32);
                matvals.push(v);
            }
        }
        let mut rowp = vec![0i32; nrows + 1];
        for &i in &rows {
            rowp[i + 1] += 1;
        }
        for i in 0..nrows {
            rowp[i + 1] += rowp[i];
        }
        Self::new(nrows, ncols, matvals, indx, rowp)
    }

    /// Keep every nonzero of a dense matrix (exact zeros are dropped).
    pub fn from_dense(m: &DenseMatrix<f64>) -> Result<Self> {
        let (r, c) = (m.rows(), m.cols());
        let x = m.as_slice();
        let entries = (0..r * c).filter(|&k| x[k] != 0.0).map(|k| (k / c, k % c, x[k])).collect();
        Self::from_triplets(r, c, entries)
    }

    pub fn to_dense(&self) -> DenseMatrix<f64> {
        let mut out = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[i * self.ncols + j as usize] = v;
            }
        }
        DenseMatrix::from_vec(out, self.nrows, self.ncols).expect("dimensions validated")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.matvals.len()
    }

    pub fn matvals(&self) -> &DenseVector<f64> {
        &self.matvals
    }

    pub fn indx(&self) -> &DenseVector<i32> {
        &self.indx
    }

    pub fn rowp(&self) -> &DenseVector<i32> {
        &self.rowp
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[i32], &[f64]) {
        let rowp = self.rowp.as_slice();
        let range = rowp[i] as usize..rowp[i + 1] as usize;
        (&self.indx.as_slice()[range.clone()], &self.matvals.as_slice()[range])
    }

    pub fn into_parts(self) -> (DenseVector<f64>, DenseVector<i32>, DenseVector<i32>) {
        (self.matvals, self.indx, self.rowp)
    }

    /// Structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        (0..self.nrows).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| {
                let (tc, tv) = self.row(j as usize);
                tc.binary_search(&(i as i32)).is_ok_and(|k| tv[k] == v)
            })
        })
    }
}
