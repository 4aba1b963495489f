//! Kind-erased values: what a trace takes in, passes between ops, and
//! returns.

use crate::capture::recorder::Tag;
use crate::capture::{Opcode, ValueType};
use crate::containers::{DenseMatrix, DenseVector, Scalar};
use crate::element::{ElemKind, Element, C64};
use crate::ops::map::{map, AnyMapKernel, VecRef};
use crate::ops::{self, EwiseOp};
use crate::{Error, Result};

/// A constant embedded in a trace.
#[derive(Clone, Copy, Debug)]
pub enum Literal {
    /// Shape parameter (offset, length, count, index).
    Int(u64),
    Real(f64),
    Index(i32),
    Complex(C64),
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::Int(a), Literal::Int(b)) => a == b,
            (Literal::Real(a), Literal::Real(b)) => a.to_bits() == b.to_bits(),
            (Literal::Index(a), Literal::Index(b)) => a == b,
            (Literal::Complex(a), Literal::Complex(b)) => a.bits() == b.bits(),
            _ => false,
        }
    }
}

impl From<usize> for Literal {
    fn from(n: usize) -> Self {
        Literal::Int(n as u64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyVector {
    Real(DenseVector<f64>),
    Index(DenseVector<i32>),
    Complex(DenseVector<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Real(DenseMatrix<f64>),
    Index(DenseMatrix<i32>),
    Complex(DenseMatrix<C64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnyScalar {
    Real(Scalar<f64>),
    Index(Scalar<i32>),
    Complex(Scalar<C64>),
}

/// A container or scalar of any kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Vector(AnyVector),
    Matrix(AnyMatrix),
    Scalar(AnyScalar),
}

macro_rules! vec_each {
    ($v:expr, $x:ident => $body:expr) => {
        match $v {
            AnyVector::Real($x) => $body,
            AnyVector::Index($x) => $body,
            AnyVector::Complex($x) => $body,
        }
    };
}

macro_rules! mat_each {
    ($m:expr, $x:ident => $body:expr) => {
        match $m {
            AnyMatrix::Real($x) => $body,
            AnyMatrix::Index($x) => $body,
            AnyMatrix::Complex($x) => $body,
        }
    };
}

macro_rules! scalar_each {
    ($s:expr, $x:ident => $body:expr) => {
        match $s {
            AnyScalar::Real($x) => $body,
            AnyScalar::Index($x) => $body,
            AnyScalar::Complex($x) => $body,
        }
    };
}

impl<T: Element> From<DenseVector<T>> for Value {
    fn from(v: DenseVector<T>) -> Self {
        Value::Vector(T::wrap_vector(v))
    }
}

impl<T: Element> From<DenseMatrix<T>> for Value {
    fn from(m: DenseMatrix<T>) -> Self {
        Value::Matrix(T::wrap_matrix(m))
    }
}

impl<T: Element> From<Scalar<T>> for Value {
    fn from(s: Scalar<T>) -> Self {
        Value::Scalar(T::wrap_scalar(s))
    }
}

impl From<Literal> for Option<AnyScalar> {
    fn from(l: Literal) -> Self {
        match l {
            Literal::Int(_) => None,
            Literal::Real(x) => Some(AnyScalar::Real(Scalar::new(x))),
            Literal::Index(x) => Some(AnyScalar::Index(Scalar::new(x))),
            Literal::Complex(x) => Some(AnyScalar::Complex(Scalar::new(x))),
        }
    }
}

impl AnyVector {
    pub fn kind(&self) -> ElemKind {
        vec_each!(self, v => v.kind())
    }
    pub fn len(&self) -> usize {
        vec_each!(self, v => v.len())
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn as_ref(&self) -> VecRef<'_> {
        vec_each!(self, v => v.into())
    }
}

impl AnyMatrix {
    pub fn kind(&self) -> ElemKind {
        mat_each!(self, m => m.kind())
    }
}

impl AnyScalar {
    pub fn kind(&self) -> ElemKind {
        match self {
            AnyScalar::Real(_) => ElemKind::Real64,
            AnyScalar::Index(_) => ElemKind::Index32,
            AnyScalar::Complex(_) => ElemKind::Complex128,
        }
    }
}

impl Value {
    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Vector(v) => vec_each!(v, x => x.value_type()),
            Value::Matrix(m) => mat_each!(m, x => x.value_type()),
            Value::Scalar(s) => ValueType::Scalar { kind: s.kind() },
        }
    }

    pub(crate) fn tag(&self) -> Option<Tag> {
        match self {
            Value::Vector(v) => vec_each!(v, x => x.tag),
            Value::Matrix(m) => mat_each!(m, x => x.tag),
            Value::Scalar(s) => scalar_each!(s, x => x.tag),
        }
    }

    pub(crate) fn set_tag(&mut self, tag: Option<Tag>) {
        match self {
            Value::Vector(v) => vec_each!(v, x => x.tag = tag),
            Value::Matrix(m) => mat_each!(m, x => x.tag = tag),
            Value::Scalar(s) => scalar_each!(s, x => x.tag = tag),
        }
    }

    pub fn vector<T: Element>(&self) -> Result<&DenseVector<T>> {
        match self {
            Value::Vector(v) => {
                T::vector_ref(v).ok_or_else(|| Error::Kind(format!("expected {} vector, got {}", T::KIND, v.kind())))
            }
            other => Err(Error::Shape(format!("expected a vector, got {}", other.value_type()))),
        }
    }

    pub fn matrix<T: Element>(&self) -> Result<&DenseMatrix<T>> {
        match self {
            Value::Matrix(m) => {
                T::matrix_ref(m).ok_or_else(|| Error::Kind(format!("expected {} matrix, got {}", T::KIND, m.kind())))
            }
            other => Err(Error::Shape(format!("expected a matrix, got {}", other.value_type()))),
        }
    }

    pub fn scalar<T: Element>(&self) -> Result<Scalar<T>> {
        match self {
            Value::Scalar(s) => {
                T::scalar_ref(s).ok_or_else(|| Error::Kind(format!("expected {} scalar, got {}", T::KIND, s.kind())))
            }
            other => Err(Error::Shape(format!("expected a scalar, got {}", other.value_type()))),
        }
    }

    pub fn into_vector<T: Element>(self) -> Result<DenseVector<T>> {
        self.vector::<T>()?;
        match self {
            Value::Vector(v) => Ok(T::vector_owned(v).expect("kind checked")),
            _ => unreachable!(),
        }
    }

    pub fn into_matrix<T: Element>(self) -> Result<DenseMatrix<T>> {
        self.matrix::<T>()?;
        match self {
            Value::Matrix(m) => Ok(T::matrix_owned(m).expect("kind checked")),
            _ => unreachable!(),
        }
    }

    /// Bitwise equality, including the shape.
    pub fn bit_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Vector(a), Value::Vector(b)) => match (a, b) {
                (AnyVector::Real(x), AnyVector::Real(y)) => x.bit_eq(y),
                (AnyVector::Index(x), AnyVector::Index(y)) => x.bit_eq(y),
                (AnyVector::Complex(x), AnyVector::Complex(y)) => x.bit_eq(y),
                _ => false,
            },
            (Value::Matrix(a), Value::Matrix(b)) => match (a, b) {
                (AnyMatrix::Real(x), AnyMatrix::Real(y)) => x.bit_eq(y),
                (AnyMatrix::Index(x), AnyMatrix::Index(y)) => x.bit_eq(y),
                (AnyMatrix::Complex(x), AnyMatrix::Complex(y)) => x.bit_eq(y),
                _ => false,
            },
            (Value::Scalar(a), Value::Scalar(b)) => match (a, b) {
                (AnyScalar::Real(x), AnyScalar::Real(y)) => x.value().bits() == y.value().bits(),
                (AnyScalar::Index(x), AnyScalar::Index(y)) => x.value() == y.value(),
                (AnyScalar::Complex(x), AnyScalar::Complex(y)) => x.value().bits() == y.value().bits(),
                _ => false,
            },
            _ => false,
        }
    }

    /// Feed every element's bit pattern to `sink`, in storage order.
    pub fn for_each_bits(&self, mut sink: impl FnMut([u64; 2])) {
        fn all<T: Element>(xs: &[T], sink: &mut impl FnMut([u64; 2])) {
            xs.iter().for_each(|x| sink(x.bits()));
        }
        match self {
            Value::Vector(v) => vec_each!(v, x => all(x.as_slice(), &mut sink)),
            Value::Matrix(m) => mat_each!(m, x => all(x.as_slice(), &mut sink)),
            Value::Scalar(s) => scalar_each!(s, x => sink(x.value().bits())),
        }
    }
}

/// Element-wise op on two kind-erased containers.
pub fn ewise_values(op: EwiseOp, a: &Value, b: &Value) -> Result<Value> {
    eval_ewise(op, a.clone(), b)
}

fn kind_mismatch(what: &str, a: &Value, b: &Value) -> Error {
    Error::Kind(format!("{what}: operands {} and {}", a.value_type(), b.value_type()))
}

fn eval_ewise(op: EwiseOp, a: Value, b: &Value) -> Result<Value> {
    use AnyMatrix as M;
    use AnyVector as V;
    Ok(match (a, b) {
        (Value::Vector(V::Real(x)), Value::Vector(V::Real(y))) => ops::ewise_into(op, x, y)?.into(),
        (Value::Vector(V::Index(x)), Value::Vector(V::Index(y))) => ops::ewise_into(op, x, y)?.into(),
        (Value::Vector(V::Complex(x)), Value::Vector(V::Complex(y))) => ops::ewise_into(op, x, y)?.into(),
        (Value::Matrix(M::Real(x)), Value::Matrix(M::Real(y))) => ops::ewise_into(op, x, y)?.into(),
        (Value::Matrix(M::Index(x)), Value::Matrix(M::Index(y))) => ops::ewise_into(op, x, y)?.into(),
        (Value::Matrix(M::Complex(x)), Value::Matrix(M::Complex(y))) => ops::ewise_into(op, x, y)?.into(),
        (a @ Value::Vector(_), b @ Value::Vector(_)) | (a @ Value::Matrix(_), b @ Value::Matrix(_)) => {
            return Err(kind_mismatch("element-wise op", &a, b))
        }
        (a, b) => {
            return Err(Error::Shape(format!(
                "element-wise op on {} and {}",
                a.value_type(),
                b.value_type()
            )))
        }
    })
}

/// An op argument during replay.
pub(crate) enum Slot {
    Val(Value),
    Lit(Literal),
}

impl Slot {
    fn int(&self) -> Result<usize> {
        match self {
            Slot::Lit(Literal::Int(n)) => Ok(*n as usize),
            _ => Err(Error::Replay("expected an integer literal".into())),
        }
    }

    fn value(self) -> Result<Value> {
        match self {
            Slot::Val(v) => Ok(v),
            Slot::Lit(_) => Err(Error::Replay("expected an operand, found a literal".into())),
        }
    }

    fn value_ref(&self) -> Result<&Value> {
        match self {
            Slot::Val(v) => Ok(v),
            Slot::Lit(_) => Err(Error::Replay("expected an operand, found a literal".into())),
        }
    }

    fn scalar(self) -> Result<AnyScalar> {
        match self {
            Slot::Val(Value::Scalar(s)) => Ok(s),
            Slot::Lit(l) => Option::<AnyScalar>::from(l).ok_or_else(|| Error::Replay("expected a scalar literal".into())),
            Slot::Val(v) => Err(Error::Replay(format!("expected a scalar, got {}", v.value_type()))),
        }
    }
}

fn vector_arg(slot: Slot) -> Result<AnyVector> {
    match slot.value()? {
        Value::Vector(v) => Ok(v),
        other => Err(Error::Shape(format!("expected a vector, got {}", other.value_type()))),
    }
}

fn matrix_arg(slot: Slot) -> Result<AnyMatrix> {
    match slot.value()? {
        Value::Matrix(m) => Ok(m),
        other => Err(Error::Shape(format!("expected a matrix, got {}", other.value_type()))),
    }
}

/// Evaluate one recorded op. `kernels` resolves map kernel references.
pub(crate) fn eval(opcode: &Opcode, args: Vec<Slot>, ty: &ValueType, kernels: &[Option<AnyMapKernel>]) -> Result<Value> {
    use AnyMatrix as M;
    use AnyScalar as S;
    use AnyVector as V;

    let mut it = args.into_iter();
    let mut next = || it.next().ok_or_else(|| Error::Replay(format!("`{}` is missing arguments", opcode.name())));

    let out: Value = match opcode {
        Opcode::EwiseAdd | Opcode::EwiseSub | Opcode::EwiseMul => {
            let op = match opcode {
                Opcode::EwiseAdd => EwiseOp::Add,
                Opcode::EwiseSub => EwiseOp::Sub,
                _ => EwiseOp::Mul,
            };
            let a = next()?.value()?;
            let b = next()?;
            eval_ewise(op, a, b.value_ref()?)?
        }
        Opcode::Scale => {
            let a = next()?.value()?;
            let s = next()?.scalar()?;
            match (a, s) {
                (Value::Vector(V::Real(x)), S::Real(k)) => ops::scale_into(x, k).into(),
                (Value::Vector(V::Index(x)), S::Index(k)) => ops::scale_into(x, k).into(),
                (Value::Vector(V::Complex(x)), S::Complex(k)) => ops::scale_into(x, k).into(),
                (Value::Matrix(M::Real(x)), S::Real(k)) => ops::scale_into(x, k).into(),
                (Value::Matrix(M::Index(x)), S::Index(k)) => ops::scale_into(x, k).into(),
                (Value::Matrix(M::Complex(x)), S::Complex(k)) => ops::scale_into(x, k).into(),
                (a, s) => return Err(kind_mismatch("scale", &a, &Value::Scalar(s))),
            }
        }
        Opcode::AddReduce => vec_each!(vector_arg(next()?)?, v => ops::add_reduce(&v).into()),
        Opcode::AddReduceRows => mat_each!(matrix_arg(next()?)?, m => ops::add_reduce_rows(&m).into()),
        Opcode::Section => {
            let v = vector_arg(next()?)?;
            let (o, l, s) = (next()?.int()?, next()?.int()?, next()?.int()?);
            vec_each!(v, x => ops::section(&x, o, l, s)?.into())
        }
        Opcode::Repeat => {
            let v = vector_arg(next()?)?;
            let t = next()?.int()?;
            vec_each!(v, x => ops::repeat(&x, t)?.into())
        }
        Opcode::RepeatRow => {
            let v = vector_arg(next()?)?;
            let t = next()?.int()?;
            vec_each!(v, x => ops::repeat_row(&x, t)?.into())
        }
        Opcode::RepeatCol => {
            let v = vector_arg(next()?)?;
            let t = next()?.int()?;
            vec_each!(v, x => ops::repeat_col(&x, t)?.into())
        }
        Opcode::Cat => {
            let (u, w) = (vector_arg(next()?)?, vector_arg(next()?)?);
            match (u, w) {
                (V::Real(a), V::Real(b)) => ops::cat(&a, &b).into(),
                (V::Index(a), V::Index(b)) => ops::cat(&a, &b).into(),
                (V::Complex(a), V::Complex(b)) => ops::cat(&a, &b).into(),
                (a, b) => return Err(kind_mismatch("cat", &Value::Vector(a), &Value::Vector(b))),
            }
        }
        Opcode::ReplaceCol => {
            let m = matrix_arg(next()?)?;
            let j = next()?.int()?;
            let v = vector_arg(next()?)?;
            match (m, v) {
                (M::Real(a), V::Real(b)) => ops::replace_col(a, j, &b)?.into(),
                (M::Index(a), V::Index(b)) => ops::replace_col(a, j, &b)?.into(),
                (M::Complex(a), V::Complex(b)) => ops::replace_col(a, j, &b)?.into(),
                (a, b) => return Err(kind_mismatch("replace_col", &Value::Matrix(a), &Value::Vector(b))),
            }
        }
        Opcode::Row => {
            let m = matrix_arg(next()?)?;
            let i = next()?.int()?;
            mat_each!(m, x => x.row(i)?.into())
        }
        Opcode::Col => {
            let m = matrix_arg(next()?)?;
            let j = next()?.int()?;
            mat_each!(m, x => x.col(j)?.into())
        }
        Opcode::Set2 => {
            let m = matrix_arg(next()?)?;
            let (i, j) = (next()?.int()?, next()?.int()?);
            let s = next()?.scalar()?;
            match (m, s) {
                (M::Real(a), S::Real(k)) => ops::set2(a, i, j, k)?.into(),
                (M::Index(a), S::Index(k)) => ops::set2(a, i, j, k)?.into(),
                (M::Complex(a), S::Complex(k)) => ops::set2(a, i, j, k)?.into(),
                (a, s) => return Err(kind_mismatch("set2", &Value::Matrix(a), &Value::Scalar(s))),
            }
        }
        Opcode::Gather => {
            let v = vector_arg(next()?)?;
            let idx = match vector_arg(next()?)? {
                V::Index(i) => i,
                other => return Err(Error::Kind(format!("gather indices must be i32, got {}", other.kind()))),
            };
            vec_each!(v, x => ops::gather(&x, &idx)?.into())
        }
        Opcode::Fill => {
            let lit = match next()? {
                Slot::Lit(l) => l,
                Slot::Val(_) => return Err(Error::Replay("fill takes a literal".into())),
            };
            let s: Option<AnyScalar> = lit.into();
            let s = s.ok_or_else(|| Error::Replay("fill takes an element literal".into()))?;
            match (*ty, s) {
                (ValueType::Vector { len, .. }, s) => scalar_each!(s, k => ops::fill_vector(len, k.value()).into()),
                (ValueType::Matrix { rows, cols, .. }, s) => {
                    scalar_each!(s, k => ops::fill_matrix(rows, cols, k.value())?.into())
                }
                (ValueType::Scalar { .. }, _) => return Err(Error::Replay("fill cannot produce a scalar".into())),
            }
        }
        Opcode::ScalarAdd | Opcode::ScalarSub | Opcode::ScalarMul | Opcode::ScalarDiv => {
            let (a, b) = (next()?.scalar()?, next()?.scalar()?);
            macro_rules! arith {
                ($x:expr, $y:expr) => {
                    match opcode {
                        Opcode::ScalarAdd => ($x + $y).into(),
                        Opcode::ScalarSub => ($x - $y).into(),
                        Opcode::ScalarMul => ($x * $y).into(),
                        _ => ($x / $y).into(),
                    }
                };
            }
            match (a, b) {
                (S::Real(x), S::Real(y)) => arith!(x, y),
                (S::Index(x), S::Index(y)) => arith!(x, y),
                (S::Complex(x), S::Complex(y)) => arith!(x, y),
                (a, b) => return Err(kind_mismatch("scalar op", &Value::Scalar(a), &Value::Scalar(b))),
            }
        }
        Opcode::Map { kernel, inputs } => {
            let kernel = kernels
                .get(*kernel as usize)
                .ok_or_else(|| Error::Replay(format!("map references unknown kernel k{kernel}")))?
                .as_ref()
                .ok_or_else(|| Error::Replay(format!("kernel k{kernel} has no callable attached")))?;
            let vectors: Vec<AnyVector> = std::iter::from_fn(|| it.next()).map(vector_arg).collect::<Result<_>>()?;
            let split = (*inputs as usize).min(vectors.len());
            let refs: Vec<VecRef<'_>> = vectors.iter().map(AnyVector::as_ref).collect();
            let (ins, aux) = refs.split_at(split);
            match kernel {
                AnyMapKernel::Real(k) => map(k, ins, aux)?.into(),
                AnyMapKernel::Index(k) => map(k, ins, aux)?.into(),
                AnyMapKernel::Complex(k) => map(k, ins, aux)?.into(),
            }
        }
    };
    if it.next().is_some() {
        return Err(Error::Replay(format!("`{}` given too many arguments", opcode.name())));
    }
    Ok(out)
}
