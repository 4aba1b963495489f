//! Value-semantic dense containers.
//!
//! Containers own their elements. `from_host` copies a host buffer in and
//! `to_host` copies it back out, so a container never aliases host memory and
//! can be shared across workers without synchronisation.

use std::ops::{Add, Div, Mul, Sub};

use crate::capture::recorder::{self, Operand, Tag};
use crate::capture::{Opcode, ValueType};
use crate::element::{ElemKind, Element};
use crate::exec;
use crate::{Error, Result};

/// Shape of a container.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    pub fn elems(self) -> usize {
        match self {
            Shape::Vector(n) => n,
            Shape::Matrix(r, c) => r * c,
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Vector(n) => write!(f, "[{n}]"),
            Shape::Matrix(r, c) => write!(f, "[{r}x{c}]"),
        }
    }
}

/// One-dimensional dense container.
#[derive(Clone, Debug)]
pub struct DenseVector<T: Element> {
    elems: Vec<T>,
    pub(crate) tag: Option<Tag>,
}

/// Two-dimensional dense container, row-major.
#[derive(Clone, Debug)]
pub struct DenseMatrix<T: Element> {
    rows: usize,
    cols: usize,
    elems: Vec<T>,
    pub(crate) tag: Option<Tag>,
}

// Equality compares contents only; the capture tag is bookkeeping.
impl<T: Element> PartialEq for DenseVector<T> {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems
    }
}

impl<T: Element> PartialEq for DenseMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.elems == other.elems
    }
}

impl<T: Element> Drop for DenseVector<T> {
    fn drop(&mut self) {
        exec::recycle(std::mem::take(&mut self.elems));
    }
}

impl<T: Element> Drop for DenseMatrix<T> {
    fn drop(&mut self) {
        exec::recycle(std::mem::take(&mut self.elems));
    }
}

impl<T: Element> DenseVector<T> {
    /// Copy `len` elements from a host buffer.
    pub fn from_host(buffer: &[T], len: usize) -> Result<Self> {
        if buffer.len() != len {
            return Err(Error::Size(format!(
                "buffer holds {} elements, shape needs {len}",
                buffer.len()
            )));
        }
        Ok(Self::from_vec(buffer.to_vec()))
    }

    /// Take ownership of an element vector.
    pub fn from_vec(elems: Vec<T>) -> Self {
        DenseVector { elems, tag: None }
    }

    pub fn to_host(&self) -> Vec<T> {
        self.elems.clone()
    }

    pub fn into_vec(mut self) -> Vec<T> {
        std::mem::take(&mut self.elems)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn kind(&self) -> ElemKind {
        T::KIND
    }

    pub fn get(&self, i: usize) -> Result<T> {
        self.elems.get(i).copied().ok_or_else(|| {
            Error::Index(format!("index {i} out of range for vector of length {}", self.len()))
        })
    }

    /// True when both vectors hold the same bit patterns.
    pub fn bit_eq(&self, other: &Self) -> bool {
        bits_equal(&self.elems, &other.elems)
    }

    pub(crate) fn value_type(&self) -> ValueType {
        ValueType::Vector { len: self.len(), kind: T::KIND }
    }
}

impl<T: Element> DenseMatrix<T> {
    /// Copy a row-major host buffer of `rows * cols` elements.
    pub fn from_host(buffer: &[T], rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(buffer.to_vec(), rows, cols)
    }

    /// Take ownership of a row-major element vector.
    pub fn from_vec(elems: Vec<T>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Size(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if elems.len() != rows * cols {
            return Err(Error::Size(format!(
                "buffer holds {} elements, shape {rows}x{cols} needs {}",
                elems.len(),
                rows * cols
            )));
        }
        Ok(DenseMatrix { rows, cols, elems, tag: None })
    }

    pub fn identity(n: usize) -> Result<Self>
    where
        T: From<i8>,
    {
        let mut elems = vec![T::zero(); n * n];
        for i in 0..n {
            elems[i * n + i] = T::from(1);
        }
        Self::from_vec(elems, n, n)
    }

    pub fn to_host(&self) -> Vec<T> {
        self.elems.clone()
    }

    pub fn into_vec(mut self) -> Vec<T> {
        std::mem::take(&mut self.elems)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> ElemKind {
        T::KIND
    }

    pub fn get2(&self, i: usize, j: usize) -> Result<T> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::Index(format!(
                "index ({i},{j}) out of range for {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(self.elems[i * self.cols + j])
    }

    /// Copy of row `i`.
    pub fn row(&self, i: usize) -> Result<DenseVector<T>> {
        if i >= self.rows {
            return Err(Error::Index(format!("row {i} out of range for {} rows", self.rows)));
        }
        let start = i * self.cols;
        let mut out = DenseVector::from_vec(self.elems[start..start + self.cols].to_vec());
        out.tag = recorder::record(
            Opcode::Row,
            &[Operand::Traced(self.tag), Operand::Lit(i.into())],
            out.value_type(),
        );
        Ok(out)
    }

    /// Copy of column `j`.
    pub fn col(&self, j: usize) -> Result<DenseVector<T>> {
        if j >= self.cols {
            return Err(Error::Index(format!("column {j} out of range for {} columns", self.cols)));
        }
        let elems = self.elems.iter().skip(j).step_by(self.cols).copied().collect();
        let mut out = DenseVector::from_vec(elems);
        out.tag = recorder::record(
            Opcode::Col,
            &[Operand::Traced(self.tag), Operand::Lit(j.into())],
            out.value_type(),
        );
        Ok(out)
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && bits_equal(&self.elems, &other.elems)
    }

    pub(crate) fn value_type(&self) -> ValueType {
        ValueType::Matrix { rows: self.rows, cols: self.cols, kind: T::KIND }
    }
}

fn bits_equal<T: Element>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.bits() == y.bits())
}

/// Common surface of vectors and matrices used by the element-wise collectives.
pub trait Container: Clone + Send + Sync {
    type Elem: Element;

    fn shape(&self) -> Shape;
    fn elems(&self) -> &[Self::Elem];
    #[doc(hidden)]
    fn elems_mut(&mut self) -> &mut [Self::Elem];
    /// A fresh, untraced container of the same shape holding `elems`.
    #[doc(hidden)]
    fn with_elems(&self, elems: Vec<Self::Elem>) -> Self;
    #[doc(hidden)]
    fn tag(&self) -> Option<Tag>;
    #[doc(hidden)]
    fn set_tag(&mut self, tag: Option<Tag>);
    #[doc(hidden)]
    fn value_type(&self) -> ValueType;
}

impl<T: Element> Container for DenseVector<T> {
    type Elem = T;

    fn shape(&self) -> Shape {
        Shape::Vector(self.len())
    }
    fn elems(&self) -> &[T] {
        &self.elems
    }
    fn elems_mut(&mut self) -> &mut [T] {
        &mut self.elems
    }
    fn with_elems(&self, elems: Vec<T>) -> Self {
        debug_assert_eq!(elems.len(), self.len());
        DenseVector::from_vec(elems)
    }
    fn tag(&self) -> Option<Tag> {
        self.tag
    }
    fn set_tag(&mut self, tag: Option<Tag>) {
        self.tag = tag;
    }
    fn value_type(&self) -> ValueType {
        DenseVector::value_type(self)
    }
}

impl<T: Element> Container for DenseMatrix<T> {
    type Elem = T;

    fn shape(&self) -> Shape {
        Shape::Matrix(self.rows, self.cols)
    }
    fn elems(&self) -> &[T] {
        &self.elems
    }
    fn elems_mut(&mut self) -> &mut [T] {
        &mut self.elems
    }
    fn with_elems(&self, elems: Vec<T>) -> Self {
        debug_assert_eq!(elems.len(), self.elems.len());
        DenseMatrix { rows: self.rows, cols: self.cols, elems, tag: None }
    }
    fn tag(&self) -> Option<Tag> {
        self.tag
    }
    fn set_tag(&mut self, tag: Option<Tag>) {
        self.tag = tag;
    }
    fn value_type(&self) -> ValueType {
        DenseMatrix::value_type(self)
    }
}

/// A scalar produced by a collective (e.g. a reduction) or a literal.
///
/// Arithmetic between scalars is recorded while capturing, so values derived
/// from reductions stay connected to the trace. Scalars built with
/// [`Scalar::new`] are literals and are embedded into the trace as constants.
#[derive(Clone, Copy, Debug)]
pub struct Scalar<T> {
    value: T,
    pub(crate) tag: Option<Tag>,
}

impl<T: Element> Scalar<T> {
    pub fn new(value: T) -> Self {
        Scalar { value, tag: None }
    }

    pub(crate) fn traced(value: T, tag: Option<Tag>) -> Self {
        Scalar { value, tag }
    }

    pub fn value(self) -> T {
        self.value
    }

    pub(crate) fn operand(self) -> Operand {
        Operand::Scalar(self.tag, self.value.to_literal())
    }

    fn binary(self, rhs: Self, opcode: Opcode, f: fn(T, T) -> T) -> Self {
        let value = f(self.value, rhs.value);
        let tag = if self.tag.is_none() && rhs.tag.is_none() {
            None
        } else {
            recorder::record(opcode, &[self.operand(), rhs.operand()], ValueType::Scalar { kind: T::KIND })
        };
        Scalar { value, tag }
    }
}

impl<T: PartialEq> PartialEq for Scalar<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Element> From<T> for Scalar<T> {
    fn from(value: T) -> Self {
        Scalar::new(value)
    }
}

macro_rules! scalar_op {
    ($trait:ident, $method:ident, $opcode:ident) => {
        impl<T: Element> $trait for Scalar<T> {
            type Output = Scalar<T>;
            fn $method(self, rhs: Self) -> Self {
                self.binary(rhs, Opcode::$opcode, T::$method)
            }
        }
    };
}

scalar_op!(Add, add, ScalarAdd);
scalar_op!(Sub, sub, ScalarSub);
scalar_op!(Mul, mul, ScalarMul);
scalar_op!(Div, div, ScalarDiv);
