//! Collective operations over dense containers.
//!
//! Every collective is pure: borrowed inputs are never modified and a fresh
//! container is returned. The `*_into` forms consume their first operand and
//! reuse its storage, which is equivalent under value semantics. Shape errors
//! are reported at call time.

pub mod map;

use crate::capture::recorder::{self, Operand};
use crate::capture::{Opcode, ValueType};
use crate::containers::{Container, DenseMatrix, DenseVector, Scalar};
use crate::element::Element;
use crate::exec::{self, reduce_sum};
use crate::{Error, Result};

pub use map::{map, MapArgs, MapKernel, VecRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EwiseOp {
    Add,
    Sub,
    Mul,
}

impl EwiseOp {
    fn apply<T: Element>(self) -> fn(T, T) -> T {
        match self {
            EwiseOp::Add => T::add,
            EwiseOp::Sub => T::sub,
            EwiseOp::Mul => T::mul,
        }
    }

    pub(crate) fn opcode(self) -> Opcode {
        match self {
            EwiseOp::Add => Opcode::EwiseAdd,
            EwiseOp::Sub => Opcode::EwiseSub,
            EwiseOp::Mul => Opcode::EwiseMul,
        }
    }
}

fn check_same_shape<C: Container>(a: &C, b: &C) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("operands have shapes {} and {}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `out[idx] = a[idx] op b[idx]`.
pub fn ewise<C: Container>(op: EwiseOp, a: &C, b: &C) -> Result<C> {
    check_same_shape(a, b)?;
    let (xa, xb) = (a.elems(), b.elems());
    let f = op.apply::<C::Elem>();
    let mut out = a.with_elems(exec::build(xa.len(), |i| f(xa[i], xb[i])));
    out.set_tag(recorder::record(
        op.opcode(),
        &[Operand::Traced(a.tag()), Operand::Traced(b.tag())],
        out.value_type(),
    ));
    Ok(out)
}

/// [`ewise`] reusing the storage of `a`.
pub fn ewise_into<C: Container>(op: EwiseOp, mut a: C, b: &C) -> Result<C> {
    check_same_shape(&a, b)?;
    let tag = recorder::record(
        op.opcode(),
        &[Operand::Traced(a.tag()), Operand::Traced(b.tag())],
        a.value_type(),
    );
    exec::zip_apply(a.elems_mut(), b.elems(), op.apply::<C::Elem>());
    a.set_tag(tag);
    Ok(a)
}

/// `out[idx] = a[idx] * s`.
pub fn scale<C: Container>(a: &C, s: Scalar<C::Elem>) -> C {
    let xa = a.elems();
    let k = s.value();
    let mut out = a.with_elems(exec::build(xa.len(), |i| xa[i].mul(k)));
    out.set_tag(recorder::record(Opcode::Scale, &[Operand::Traced(a.tag()), s.operand()], out.value_type()));
    out
}

/// [`scale`] reusing the storage of `a`.
pub fn scale_into<C: Container>(mut a: C, s: Scalar<C::Elem>) -> C {
    let tag = recorder::record(Opcode::Scale, &[Operand::Traced(a.tag()), s.operand()], a.value_type());
    let k = s.value();
    exec::apply(a.elems_mut(), |x| x.mul(k));
    a.set_tag(tag);
    a
}

/// Sum of all elements; zero for an empty vector.
pub fn add_reduce<T: Element>(v: &DenseVector<T>) -> Scalar<T> {
    let sum = reduce_sum(v.as_slice());
    let tag = recorder::record(Opcode::AddReduce, &[Operand::Traced(v.tag)], ValueType::Scalar { kind: T::KIND });
    Scalar::traced(sum, tag)
}

/// `out[i] = sum_j m[i, j]`, each row reduced with the same rule as
/// [`add_reduce`].
pub fn add_reduce_rows<T: Element>(m: &DenseMatrix<T>) -> DenseVector<T> {
    let (cols, x) = (m.cols(), m.as_slice());
    let sums = exec::tabulate(m.rows(), cols, |i| exec::reduce_sum_serial(&x[i * cols..(i + 1) * cols]));
    let mut out = DenseVector::from_vec(sums);
    out.tag = recorder::record(Opcode::AddReduceRows, &[Operand::Traced(m.tag)], out.value_type());
    out
}

/// Strided copy: `out[k] = v[offset + k * stride]` for `k < len`.
pub fn section<T: Element>(v: &DenseVector<T>, offset: usize, len: usize, stride: usize) -> Result<DenseVector<T>> {
    if stride == 0 {
        return Err(Error::Parameter("section stride must be at least 1".into()));
    }
    if len > 0 && offset + (len - 1) * stride >= v.len() {
        return Err(Error::Index(format!(
            "section(offset {offset}, len {len}, stride {stride}) reaches past length {}",
            v.len()
        )));
    }
    let x = v.as_slice();
    let mut out = DenseVector::from_vec(exec::build(len, |k| x[offset + k * stride]));
    out.tag = recorder::record(
        Opcode::Section,
        &[Operand::Traced(v.tag), Operand::Lit(offset.into()), Operand::Lit(len.into()), Operand::Lit(stride.into())],
        out.value_type(),
    );
    Ok(out)
}

/// `times` back-to-back copies of `v`.
pub fn repeat<T: Element>(v: &DenseVector<T>, times: usize) -> Result<DenseVector<T>> {
    if times == 0 {
        return Err(Error::Parameter("repeat count must be at least 1".into()));
    }
    let x = v.as_slice();
    let n = x.len();
    let mut out = DenseVector::from_vec(exec::build_rows(times, n, |_, row| row.copy_from_slice(x)));
    out.tag = recorder::record(Opcode::Repeat, &[Operand::Traced(v.tag), Operand::Lit(times.into())], out.value_type());
    Ok(out)
}

/// Matrix of `nrows` rows, each a copy of `v`: `out[m, n] = v[n]`.
pub fn repeat_row<T: Element>(v: &DenseVector<T>, nrows: usize) -> Result<DenseMatrix<T>> {
    if nrows == 0 {
        return Err(Error::Parameter("repeat_row count must be at least 1".into()));
    }
    let x = v.as_slice();
    let cols = x.len();
    let elems = exec::build_rows(nrows, cols, |_, row| row.copy_from_slice(x));
    let mut out = DenseMatrix::from_vec(elems, nrows, cols)?;
    out.tag = recorder::record(Opcode::RepeatRow, &[Operand::Traced(v.tag), Operand::Lit(nrows.into())], out.value_type());
    Ok(out)
}

/// Matrix of `ncols` columns, each a copy of `v`: `out[m, n] = v[m]`.
pub fn repeat_col<T: Element>(v: &DenseVector<T>, ncols: usize) -> Result<DenseMatrix<T>> {
    if ncols == 0 {
        return Err(Error::Parameter("repeat_col count must be at least 1".into()));
    }
    let x = v.as_slice();
    let rows = x.len();
    let elems = exec::build_rows(rows, ncols, |i, row| row.fill(x[i]));
    let mut out = DenseMatrix::from_vec(elems, rows, ncols)?;
    out.tag = recorder::record(Opcode::RepeatCol, &[Operand::Traced(v.tag), Operand::Lit(ncols.into())], out.value_type());
    Ok(out)
}

/// `u` followed by `w`.
pub fn cat<T: Element>(u: &DenseVector<T>, w: &DenseVector<T>) -> DenseVector<T> {
    let (xu, xw) = (u.as_slice(), w.as_slice());
    let split = xu.len();
    let elems = exec::build(split + xw.len(), |k| if k < split { xu[k] } else { xw[k - split] });
    let mut out = DenseVector::from_vec(elems);
    out.tag = recorder::record(Opcode::Cat, &[Operand::Traced(u.tag), Operand::Traced(w.tag)], out.value_type());
    out
}

/// `m` with column `j` replaced by `v`.
pub fn replace_col<T: Element>(m: DenseMatrix<T>, j: usize, v: &DenseVector<T>) -> Result<DenseMatrix<T>> {
    if j >= m.cols() {
        return Err(Error::Index(format!("column {j} out of range for {} columns", m.cols())));
    }
    if v.len() != m.rows() {
        return Err(Error::Shape(format!("column of length {} for a matrix with {} rows", v.len(), m.rows())));
    }
    let tag = recorder::record(
        Opcode::ReplaceCol,
        &[Operand::Traced(m.tag), Operand::Lit(j.into()), Operand::Traced(v.tag)],
        m.value_type(),
    );
    let cols = m.cols();
    let mut m = m;
    for (i, &x) in v.as_slice().iter().enumerate() {
        m.elems_mut()[i * cols + j] = x;
    }
    m.tag = tag;
    Ok(m)
}

/// `m` with element `(i, j)` set to `s`.
pub fn set2<T: Element>(m: DenseMatrix<T>, i: usize, j: usize, s: Scalar<T>) -> Result<DenseMatrix<T>> {
    if i >= m.rows() || j >= m.cols() {
        return Err(Error::Index(format!("index ({i},{j}) out of range for {}x{} matrix", m.rows(), m.cols())));
    }
    let tag = recorder::record(
        Opcode::Set2,
        &[Operand::Traced(m.tag), Operand::Lit(i.into()), Operand::Lit(j.into()), s.operand()],
        m.value_type(),
    );
    let cols = m.cols();
    let mut m = m;
    m.elems_mut()[i * cols + j] = s.value();
    m.tag = tag;
    Ok(m)
}

/// Permutation gather: `out[k] = v[idx[k]]`.
pub fn gather<T: Element>(v: &DenseVector<T>, idx: &DenseVector<i32>) -> Result<DenseVector<T>> {
    let x = v.as_slice();
    if let Some(&bad) = idx.as_slice().iter().find(|&&i| i < 0 || i as usize >= x.len()) {
        return Err(Error::Index(format!("gather index {bad} out of range for length {}", x.len())));
    }
    let ix = idx.as_slice();
    let mut out = DenseVector::from_vec(exec::build(ix.len(), |k| x[ix[k] as usize]));
    out.tag = recorder::record(Opcode::Gather, &[Operand::Traced(v.tag), Operand::Traced(idx.tag)], out.value_type());
    Ok(out)
}

/// Vector of `len` copies of `value`.
pub fn fill_vector<T: Element>(len: usize, value: T) -> DenseVector<T> {
    let mut out = DenseVector::from_vec(exec::build(len, |_| value));
    out.tag = recorder::record(Opcode::Fill, &[Operand::Lit(value.to_literal())], out.value_type());
    out
}

/// `rows x cols` matrix of copies of `value`.
pub fn fill_matrix<T: Element>(rows: usize, cols: usize, value: T) -> Result<DenseMatrix<T>> {
    let mut out = DenseMatrix::from_vec(exec::build(rows * cols, |_| value), rows, cols)?;
    out.tag = recorder::record(Opcode::Fill, &[Operand::Lit(value.to_literal())], out.value_type());
    Ok(out)
}
