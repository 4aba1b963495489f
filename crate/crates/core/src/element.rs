//! Element kinds held by dense containers.

use std::fmt::Debug;
use std::str::FromStr;

use num_complex::Complex64;

use crate::capture::value::{AnyMatrix, AnyScalar, AnyVector, Literal};
use crate::containers::{DenseMatrix, DenseVector, Scalar};
use crate::ops::map::{AnyMapKernel, MapKernel, VecRef};
use crate::Error;

/// Double precision complex number.
pub type C64 = Complex64;

/// The closed set of element kinds a container may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElemKind {
    Real64,
    Index32,
    Complex128,
}

impl ElemKind {
    /// Short name used in the IR text and in error messages.
    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Real64 => "f64",
            ElemKind::Index32 => "i32",
            ElemKind::Complex128 => "c128",
        }
    }
}

impl std::fmt::Display for ElemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "f64" => Ok(ElemKind::Real64),
            "i32" => Ok(ElemKind::Index32),
            "c128" => Ok(ElemKind::Complex128),
            other => Err(Error::Kind(format!("unknown element kind `{other}`"))),
        }
    }
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f64 {}
    impl Sealed for i32 {}
    impl Sealed for super::C64 {}
}

/// A scalar type that can live in a dense container.
///
/// Implemented for `f64`, `i32` and [`C64`] only. Index arithmetic wraps
/// instead of trapping, and integer division by zero yields zero.
pub trait Element: sealed::Sealed + Copy + Default + PartialEq + Debug + Send + Sync + 'static {
    const KIND: ElemKind;

    fn zero() -> Self {
        Self::default()
    }
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn div(self, rhs: Self) -> Self;

    /// Raw bit pattern, for bitwise comparisons and digests.
    fn bits(self) -> [u64; 2];

    #[doc(hidden)]
    fn to_literal(self) -> Literal;
    #[doc(hidden)]
    fn from_literal(lit: &Literal) -> Option<Self>;
    #[doc(hidden)]
    fn wrap_vector(v: DenseVector<Self>) -> AnyVector;
    #[doc(hidden)]
    fn vector_ref(v: &AnyVector) -> Option<&DenseVector<Self>>;
    #[doc(hidden)]
    fn vector_owned(v: AnyVector) -> Option<DenseVector<Self>>;
    #[doc(hidden)]
    fn wrap_matrix(m: DenseMatrix<Self>) -> AnyMatrix;
    #[doc(hidden)]
    fn matrix_ref(m: &AnyMatrix) -> Option<&DenseMatrix<Self>>;
    #[doc(hidden)]
    fn matrix_owned(m: AnyMatrix) -> Option<DenseMatrix<Self>>;
    #[doc(hidden)]
    fn wrap_scalar(s: Scalar<Self>) -> AnyScalar;
    #[doc(hidden)]
    fn scalar_ref(s: &AnyScalar) -> Option<Scalar<Self>>;
    #[doc(hidden)]
    fn wrap_kernel(k: MapKernel<Self>) -> AnyMapKernel;
    #[doc(hidden)]
    fn vec_ref(v: &DenseVector<Self>) -> VecRef<'_>;
    #[doc(hidden)]
    fn from_vec_ref<'a>(v: &VecRef<'a>) -> Option<&'a DenseVector<Self>>;
}

macro_rules! impl_dynamic {
    ($ty:ty, $variant:ident) => {
        fn wrap_vector(v: DenseVector<Self>) -> AnyVector {
            AnyVector::$variant(v)
        }
        fn vector_ref(v: &AnyVector) -> Option<&DenseVector<Self>> {
            match v {
                AnyVector::$variant(x) => Some(x),
                _ => None,
            }
        }
        fn vector_owned(v: AnyVector) -> Option<DenseVector<Self>> {
            match v {
                AnyVector::$variant(x) => Some(x),
                _ => None,
            }
        }
        fn wrap_matrix(m: DenseMatrix<Self>) -> AnyMatrix {
            AnyMatrix::$variant(m)
        }
        fn matrix_ref(m: &AnyMatrix) -> Option<&DenseMatrix<Self>> {
            match m {
                AnyMatrix::$variant(x) => Some(x),
                _ => None,
            }
        }
        fn matrix_owned(m: AnyMatrix) -> Option<DenseMatrix<Self>> {
            match m {
                AnyMatrix::$variant(x) => Some(x),
                _ => None,
            }
        }
        fn wrap_scalar(s: Scalar<Self>) -> AnyScalar {
            AnyScalar::$variant(s)
        }
        fn scalar_ref(s: &AnyScalar) -> Option<Scalar<Self>> {
            match s {
                AnyScalar::$variant(x) => Some(*x),
                _ => None,
            }
        }
        fn wrap_kernel(k: MapKernel<Self>) -> AnyMapKernel {
            AnyMapKernel::$variant(k)
        }
        fn vec_ref(v: &DenseVector<Self>) -> VecRef<'_> {
            VecRef::$variant(v)
        }
        fn from_vec_ref<'a>(v: &VecRef<'a>) -> Option<&'a DenseVector<Self>> {
            match *v {
                VecRef::$variant(x) => Some(x),
                _ => None,
            }
        }
    };
}

impl Element for f64 {
    const KIND: ElemKind = ElemKind::Real64;

    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn bits(self) -> [u64; 2] {
        [self.to_bits(), 0]
    }
    fn to_literal(self) -> Literal {
        Literal::Real(self)
    }
    fn from_literal(lit: &Literal) -> Option<Self> {
        match *lit {
            Literal::Real(x) => Some(x),
            _ => None,
        }
    }
    impl_dynamic!(f64, Real);
}

impl Element for i32 {
    const KIND: ElemKind = ElemKind::Index32;

    fn add(self, rhs: Self) -> Self {
        self.wrapping_add(rhs)
    }
    fn sub(self, rhs: Self) -> Self {
        self.wrapping_sub(rhs)
    }
    fn mul(self, rhs: Self) -> Self {
        self.wrapping_mul(rhs)
    }
    fn div(self, rhs: Self) -> Self {
        self.checked_div(rhs).unwrap_or(0)
    }
    fn bits(self) -> [u64; 2] {
        [self as u32 as u64, 0]
    }
    fn to_literal(self) -> Literal {
        Literal::Index(self)
    }
    fn from_literal(lit: &Literal) -> Option<Self> {
        match *lit {
            Literal::Index(x) => Some(x),
            _ => None,
        }
    }
    impl_dynamic!(i32, Index);
}

impl Element for C64 {
    const KIND: ElemKind = ElemKind::Complex128;

    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn bits(self) -> [u64; 2] {
        [self.re.to_bits(), self.im.to_bits()]
    }
    fn to_literal(self) -> Literal {
        Literal::Complex(self)
    }
    fn from_literal(lit: &Literal) -> Option<Self> {
        match *lit {
            Literal::Complex(x) => Some(x),
            _ => None,
        }
    }
    impl_dynamic!(C64, Complex);
}
