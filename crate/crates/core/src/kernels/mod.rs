//! Benchmark kernels written in the collective vocabulary.

pub mod cg;
pub mod csr;
pub mod fft;
pub mod mxm;
pub mod spmv;

pub use cg::{cg_solve, CgParams, CgResult, SpmvVariant};
pub use csr::CsrMatrix;
pub use fft::{fft_forward, make_fft_plan, FftPlan};
pub use mxm::{mxm0, mxm1, mxm2a, mxm2b, DEFAULT_BLOCK};
pub use spmv::{spmv1, spmv2};
