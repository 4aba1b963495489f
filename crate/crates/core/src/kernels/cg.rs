//! Unpreconditioned conjugate gradients on a CSR matrix.

use std::fmt;
use std::str::FromStr;

use super::csr::CsrMatrix;
use super::spmv::{spmv1, spmv2};
use crate::containers::DenseVector;
use crate::ops::{self, EwiseOp};
use crate::{Error, Result};

/// Which sparse product the solver calls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpmvVariant {
    Spmv1,
    #[default]
    Spmv2,
}

impl SpmvVariant {
    pub fn apply(self, m: &CsrMatrix, v: &DenseVector<f64>) -> Result<DenseVector<f64>> {
        match self {
            SpmvVariant::Spmv1 => spmv1(m, v),
            SpmvVariant::Spmv2 => spmv2(m, v),
        }
    }
}

impl fmt::Display for SpmvVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpmvVariant::Spmv1 => "spmv1",
            SpmvVariant::Spmv2 => "spmv2",
        })
    }
}

impl FromStr for SpmvVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spmv1" => Ok(SpmvVariant::Spmv1),
            "spmv2" => Ok(SpmvVariant::Spmv2),
            other => Err(Error::Parameter(format!("unknown spmv variant `{other}`"))),
        }
    }
}

/// Stopping rule: iterate while `r.r > eps^2 * b.b` and fewer than
/// `max_iters` iterations have run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgParams {
    pub eps: f64,
    pub max_iters: usize,
}

impl CgParams {
    /// `eps = 1e-8`, `max_iters = 2n`.
    pub fn for_size(n: usize) -> Self {
        CgParams { eps: 1e-8, max_iters: 2 * n.max(1) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Parameter(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgResult {
    pub x: DenseVector<f64>,
    pub iters: usize,
    pub final_r2: f64,
    /// `r.r` before the first iteration and after each one.
    pub history: Vec<f64>,
}

/// Solve `A x = b` for symmetric positive definite `A`, starting from zero.
pub fn cg_solve(a: &CsrMatrix, b: &DenseVector<f64>, params: CgParams, spmv: SpmvVariant) -> Result<CgResult> {
    params.validate()?;
    if a.nrows() != a.ncols() {
        return Err(Error::Shape(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    if b.len() != a.nrows() {
        return Err(Error::Shape(format!("right-hand side of length {} for order {}", b.len(), a.nrows())));
    }

    let mut x = ops::fill_vector(b.len(), 0.0);
    let mut r = b.clone();
    let mut p = b.clone();
    let mut r2 = ops::add_reduce(&ops::ewise(EwiseOp::Mul, b, b)?);
    let stop = params.eps * params.eps * r2.value();
    let mut history = vec![r2.value()];
    let mut k = 0;
    while r2.value() > stop && k < params.max_iters {
        let ap = spmv.apply(a, &p)?;
        let pap = ops::add_reduce(&ops::ewise(EwiseOp::Mul, &p, &ap)?);
        if pap.value() <= 0.0 || pap.value().is_nan() {
            return Err(Error::Breakdown(format!(
                "p.Ap = {} at iteration {k}; the matrix is not positive definite",
                pap.value()
            )));
        }
        let alpha = r2 / pap;
        let r2_old = r2;
        r = ops::ewise_into(EwiseOp::Sub, r, &ops::scale(&ap, alpha))?;
        r2 = ops::add_reduce(&ops::ewise(EwiseOp::Mul, &r, &r)?);
        let beta = r2 / r2_old;
        x = ops::ewise_into(EwiseOp::Add, x, &ops::scale(&p, alpha))?;
        p = ops::ewise(EwiseOp::Add, &r, &ops::scale_into(p, beta))?;
        k += 1;
        history.push(r2.value());
    }
    Ok(CgResult { x, iters: k, final_r2: r2.value(), history })
}
