//! Element-wise application of a scalar kernel.
//!
//! `map` evaluates a kernel once per position `e` of its element-wise inputs.
//! The kernel sees the scalars at `e` plus read-only, bounds-checked gathers
//! into whole auxiliary vectors, and may loop serially over ranges it derives
//! from its scalars (this is how the CSR row reduction is written). Element
//! evaluations are independent and run concurrently.

use std::fmt;
use std::sync::Arc;

use crate::capture::recorder::{self, Operand};
use crate::containers::DenseVector;
use crate::element::{ElemKind, Element, C64};
use crate::exec;
use crate::{Error, Result};

/// Borrowed vector of any element kind.
#[derive(Clone, Copy, Debug)]
pub enum VecRef<'a> {
    Real(&'a DenseVector<f64>),
    Index(&'a DenseVector<i32>),
    Complex(&'a DenseVector<C64>),
}

impl<'a> VecRef<'a> {
    pub fn len(&self) -> usize {
        match self {
            VecRef::Real(v) => v.len(),
            VecRef::Index(v) => v.len(),
            VecRef::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ElemKind {
        match self {
            VecRef::Real(_) => ElemKind::Real64,
            VecRef::Index(_) => ElemKind::Index32,
            VecRef::Complex(_) => ElemKind::Complex128,
        }
    }

    pub(crate) fn operand(&self) -> Operand {
        match self {
            VecRef::Real(v) => Operand::Traced(v.tag),
            VecRef::Index(v) => Operand::Traced(v.tag),
            VecRef::Complex(v) => Operand::Traced(v.tag),
        }
    }
}

impl<'a, T: Element> From<&'a DenseVector<T>> for VecRef<'a> {
    fn from(v: &'a DenseVector<T>) -> Self {
        T::vec_ref(v)
    }
}

/// What a kernel sees for one element.
pub struct MapArgs<'a> {
    position: usize,
    inputs: &'a [VecRef<'a>],
    aux: &'a [VecRef<'a>],
}

fn typed<'a, T: Element>(v: &VecRef<'a>, what: &str, k: usize) -> Result<&'a DenseVector<T>> {
    T::from_vec_ref(v)
        .ok_or_else(|| Error::Kind(format!("{what} {k} holds {}, kernel asked for {}", v.kind(), T::KIND)))
}

impl<'a> MapArgs<'a> {
    /// Position of the element being computed.
    pub fn position(&self) -> usize {
        self.position
    }

    /// Scalar of element-wise input `k` at this position.
    pub fn input<T: Element>(&self, k: usize) -> Result<T> {
        let v = self
            .inputs
            .get(k)
            .ok_or_else(|| Error::Index(format!("kernel asked for element-wise input {k} of {}", self.inputs.len())))?;
        typed::<T>(v, "input", k)?.get(self.position)
    }

    /// `aux[k][i]`, bounds-checked.
    pub fn gather<T: Element>(&self, k: usize, i: i64) -> Result<T> {
        let v = self
            .aux
            .get(k)
            .ok_or_else(|| Error::Index(format!("kernel asked for auxiliary {k} of {}", self.aux.len())))?;
        let v = typed::<T>(v, "auxiliary", k)?;
        if i < 0 {
            return Err(Error::Index(format!("gather index {i} into auxiliary {k}")));
        }
        v.get(i as usize).map_err(|e| e.context(&format!("gather from auxiliary {k}")))
    }

    /// The whole of auxiliary `k`.
    pub fn aux<T: Element>(&self, k: usize) -> Result<&'a [T]> {
        let v = self
            .aux
            .get(k)
            .ok_or_else(|| Error::Index(format!("kernel asked for auxiliary {k} of {}", self.aux.len())))?;
        Ok(typed::<T>(v, "auxiliary", k)?.as_slice())
    }

    /// Contiguous `aux[k][lo..hi]`, bounds-checked.
    pub fn aux_slice<T: Element>(&self, k: usize, lo: i64, hi: i64) -> Result<&'a [T]> {
        let v = self
            .aux
            .get(k)
            .ok_or_else(|| Error::Index(format!("kernel asked for auxiliary {k} of {}", self.aux.len())))?;
        let v = typed::<T>(v, "auxiliary", k)?;
        if lo < 0 || hi < lo || hi as usize > v.len() {
            return Err(Error::Index(format!("range {lo}..{hi} of auxiliary {k} with length {}", v.len())));
        }
        Ok(&v.as_slice()[lo as usize..hi as usize])
    }
}

type KernelFn<O> = dyn Fn(&MapArgs<'_>) -> Result<O> + Send + Sync;

/// A named scalar kernel producing elements of kind `O`.
pub struct MapKernel<O> {
    name: Arc<str>,
    f: Arc<KernelFn<O>>,
}

impl<O> Clone for MapKernel<O> {
    fn clone(&self) -> Self {
        MapKernel { name: self.name.clone(), f: self.f.clone() }
    }
}

impl<O> fmt::Debug for MapKernel<O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MapKernel({})", self.name)
    }
}

impl<O: Element> MapKernel<O> {
    pub fn new(name: &str, f: impl Fn(&MapArgs<'_>) -> Result<O> + Send + Sync + 'static) -> Self {
        MapKernel { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub(crate) fn same_callable(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

/// A kernel with its output kind erased, as stored in a trace.
#[derive(Clone, Debug)]
pub enum AnyMapKernel {
    Real(MapKernel<f64>),
    Index(MapKernel<i32>),
    Complex(MapKernel<C64>),
}

impl AnyMapKernel {
    pub fn name(&self) -> &str {
        match self {
            AnyMapKernel::Real(k) => k.name(),
            AnyMapKernel::Index(k) => k.name(),
            AnyMapKernel::Complex(k) => k.name(),
        }
    }

    pub fn kind(&self) -> ElemKind {
        match self {
            AnyMapKernel::Real(_) => ElemKind::Real64,
            AnyMapKernel::Index(_) => ElemKind::Index32,
            AnyMapKernel::Complex(_) => ElemKind::Complex128,
        }
    }

    pub(crate) fn same_callable(&self, other: &Self) -> bool {
        match (self, other) {
            (AnyMapKernel::Real(a), AnyMapKernel::Real(b)) => a.same_callable(b),
            (AnyMapKernel::Index(a), AnyMapKernel::Index(b)) => a.same_callable(b),
            (AnyMapKernel::Complex(a), AnyMapKernel::Complex(b)) => a.same_callable(b),
            _ => false,
        }
    }
}

fn common_len(inputs: &[VecRef<'_>]) -> Result<usize> {
    let len = inputs.first().map_or(0, VecRef::len);
    if let Some(bad) = inputs.iter().find(|v| v.len() != len) {
        return Err(Error::Shape(format!("element-wise inputs of lengths {len} and {}", bad.len())));
    }
    Ok(len)
}

/// Apply `kernel` at every position of the element-wise `inputs`.
///
/// With no element-wise inputs the output is empty.
pub fn map<O: Element>(kernel: &MapKernel<O>, inputs: &[VecRef<'_>], aux: &[VecRef<'_>]) -> Result<DenseVector<O>> {
    let len = common_len(inputs)?;
    let results = exec::tabulate(len, 1, |e| (kernel.f)(&MapArgs { position: e, inputs, aux }));
    finish(kernel, inputs, aux, results)
}

/// [`map`] evaluating elements serially in the given order. Test hook for
/// checking that evaluation order never matters.
#[doc(hidden)]
pub fn map_in_order<O: Element>(
    kernel: &MapKernel<O>,
    inputs: &[VecRef<'_>],
    aux: &[VecRef<'_>],
    order: &[usize],
) -> Result<DenseVector<O>> {
    let len = common_len(inputs)?;
    let mut seen = vec![false; len];
    if order.len() != len || order.iter().any(|&e| e >= len || std::mem::replace(&mut seen[e], true)) {
        return Err(Error::Parameter("evaluation order must be a permutation of the positions".into()));
    }
    let mut slots: Vec<Option<Result<O>>> = (0..len).map(|_| None).collect();
    for &e in order {
        slots[e] = Some((kernel.f)(&MapArgs { position: e, inputs, aux }));
    }
    finish(kernel, inputs, aux, slots.into_iter().map(|s| s.expect("every position evaluated")).collect())
}

fn finish<O: Element>(
    kernel: &MapKernel<O>,
    inputs: &[VecRef<'_>],
    aux: &[VecRef<'_>],
    results: Vec<Result<O>>,
) -> Result<DenseVector<O>> {
    let elems = results.into_iter().collect::<Result<Vec<O>>>()?;
    let mut out = DenseVector::from_vec(elems);
    let operands: Vec<Operand> = inputs.iter().chain(aux).map(VecRef::operand).collect();
    out.tag = recorder::record_map(O::wrap_kernel(kernel.clone()), inputs.len(), &operands, out.value_type());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> MapKernel<f64> {
        MapKernel::new("square", |a| {
            let x: f64 = a.input(0)?;
            Ok(x * x)
        })
    }

    #[test]
    fn squares() {
        let x = DenseVector::from_vec(vec![1.0, 2.0, 3.0]);
        let out = map(&square(), &[(&x).into()], &[]).unwrap();
        assert_eq!(out.to_host(), vec![1.0, 4.0, 9.0]);
    }

    #[test]
    fn empty_input_never_invokes_kernel() {
        let k = MapKernel::<f64>::new("boom", |_| panic!("kernel invoked"));
        let x = DenseVector::<f64>::from_vec(vec![]);
        assert!(map(&k, &[(&x).into()], &[]).unwrap().is_empty());
        assert!(map(&k, &[], &[]).unwrap().is_empty());
    }

    #[test]
    fn gather_out_of_range_is_index_error() {
        let k = MapKernel::new("oob", |a| a.gather::<f64>(0, a.input::<i32>(0)? as i64));
        let idx = DenseVector::from_vec(vec![0, 5]);
        let table = DenseVector::from_vec(vec![1.0, 2.0]);
        let err = map(&k, &[(&idx).into()], &[(&table).into()]).unwrap_err();
        assert!(matches!(err, Error::Index(_)), "{err}");
    }

    #[test]
    fn wrong_kind_accessor_is_kind_error() {
        let k = MapKernel::new("kind", |a| a.input::<f64>(0));
        let idx = DenseVector::from_vec(vec![1]);
        assert!(matches!(map(&k, &[(&idx).into()], &[]), Err(Error::Kind(_))));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let a = DenseVector::from_vec(vec![1.0]);
        let b = DenseVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(map(&square(), &[(&a).into(), (&b).into()], &[]), Err(Error::Shape(_))));
    }

    #[test]
    fn evaluation_order_is_irrelevant() {
        let x = DenseVector::from_vec((0..50).map(|i| i as f64 * 0.37).collect());
        let forward = map(&square(), &[(&x).into()], &[]).unwrap();
        let order: Vec<usize> = (0..50).rev().collect();
        let reversed = map_in_order(&square(), &[(&x).into()], &[], &order).unwrap();
        assert!(forward.bit_eq(&reversed));
        assert!(map_in_order(&square(), &[(&x).into()], &[], &[0, 0]).is_err());
    }
}
