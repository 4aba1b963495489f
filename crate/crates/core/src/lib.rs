//! Data-parallel dense and sparse containers with serial-semantics
//! collectives, a record/replay capture facility, and the benchmark kernels
//! built on them: dense matrix multiply, CSR sparse matrix-vector product,
//! a split-stream radix-2 FFT and conjugate gradients.
//!
//! ```
//! use parabl::{ops, DenseVector, EwiseOp};
//!
//! let a = DenseVector::from_host(&[1.0, 2.0, 3.0], 3).unwrap();
//! let b = DenseVector::from_host(&[4.0, 5.0, 6.0], 3).unwrap();
//! let dot = ops::add_reduce(&ops::ewise(EwiseOp::Mul, &a, &b).unwrap());
//! assert_eq!(dot.value(), 32.0);
//! ```

pub mod capture;
pub mod containers;
pub mod element;
pub mod error;
pub mod exec;
pub mod harness;
pub mod kernels;
pub mod ops;
pub mod oracles;

pub use capture::{capture, Trace, Value};
pub use containers::{Container, DenseMatrix, DenseVector, Scalar, Shape};
pub use element::{ElemKind, Element, C64};
pub use error::{Error, Result};
pub use exec::{current_execution, set_execution, with_execution, ExecutionConfig, OptLevel};
pub use ops::EwiseOp;
