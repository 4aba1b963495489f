//! Record-and-replay of kernels built from collectives.
//!
//! [`capture`] runs a kernel on example inputs while every collective it calls
//! appends a record to a trace. Scalar control flow (loops, branches on
//! reduced values) executes normally and is therefore unrolled into the
//! trace; the result is specialised to the example shapes. [`Trace::replay`]
//! re-executes the records on fresh inputs of the same shapes and kinds.
//!
//! Map kernels are stored as opaque callables next to the records.
//!
//! A kernel may only touch containers derived from its inputs. Using a
//! container built from host data inside the kernel is a capture error;
//! scalars built with [`Scalar::new`](crate::Scalar::new) are embedded as
//! literals.

mod ir;
pub(crate) mod recorder;
pub mod value;

use std::fmt;

use crate::element::ElemKind;
use crate::ops::map::AnyMapKernel;
use crate::{Error, Result};

pub use ir::parse;
pub use value::{ewise_values, AnyMatrix, AnyScalar, AnyVector, Literal, Value};

/// Operation recorded in a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Opcode {
    EwiseAdd,
    EwiseSub,
    EwiseMul,
    Scale,
    AddReduce,
    AddReduceRows,
    Section,
    Repeat,
    RepeatRow,
    RepeatCol,
    Cat,
    ReplaceCol,
    Row,
    Col,
    Set2,
    Gather,
    Fill,
    ScalarAdd,
    ScalarSub,
    ScalarMul,
    ScalarDiv,
    /// `inputs` element-wise operands followed by auxiliaries.
    Map { kernel: u32, inputs: u32 },
}

impl Opcode {
    pub fn name(&self) -> &'static str {
        match self {
            Opcode::EwiseAdd => "ewise_add",
            Opcode::EwiseSub => "ewise_sub",
            Opcode::EwiseMul => "ewise_mul",
            Opcode::Scale => "scale",
            Opcode::AddReduce => "add_reduce",
            Opcode::AddReduceRows => "add_reduce_rows",
            Opcode::Section => "section",
            Opcode::Repeat => "repeat",
            Opcode::RepeatRow => "repeat_row",
            Opcode::RepeatCol => "repeat_col",
            Opcode::Cat => "cat",
            Opcode::ReplaceCol => "replace_col",
            Opcode::Row => "row",
            Opcode::Col => "col",
            Opcode::Set2 => "set2",
            Opcode::Gather => "gather",
            Opcode::Fill => "fill",
            Opcode::ScalarAdd => "scalar_add",
            Opcode::ScalarSub => "scalar_sub",
            Opcode::ScalarMul => "scalar_mul",
            Opcode::ScalarDiv => "scalar_div",
            Opcode::Map { .. } => "map",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Opcode> {
        const ALL: [Opcode; 21] = [
            Opcode::EwiseAdd,
            Opcode::EwiseSub,
            Opcode::EwiseMul,
            Opcode::Scale,
            Opcode::AddReduce,
            Opcode::AddReduceRows,
            Opcode::Section,
            Opcode::Repeat,
            Opcode::RepeatRow,
            Opcode::RepeatCol,
            Opcode::Cat,
            Opcode::ReplaceCol,
            Opcode::Row,
            Opcode::Col,
            Opcode::Set2,
            Opcode::Gather,
            Opcode::Fill,
            Opcode::ScalarAdd,
            Opcode::ScalarSub,
            Opcode::ScalarMul,
            Opcode::ScalarDiv,
        ];
        ALL.into_iter().find(|op| op.name() == name)
    }

    /// Operands the op consumes (its storage is reused for the output).
    fn consumes_first(&self) -> bool {
        !matches!(self, Opcode::Map { .. } | Opcode::Fill)
    }
}

/// Shape and kind of a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueType {
    Vector { len: usize, kind: ElemKind },
    Matrix { rows: usize, cols: usize, kind: ElemKind },
    Scalar { kind: ElemKind },
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Vector { len, kind } => write!(f, "vec[{len}]/{kind}"),
            ValueType::Matrix { rows, cols, kind } => write!(f, "mat[{rows}x{cols}]/{kind}"),
            ValueType::Scalar { kind } => write!(f, "scalar/{kind}"),
        }
    }
}

/// An op argument: a previously defined value or a literal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arg {
    Id(u32),
    Lit(Literal),
}

/// One recorded op, in single-assignment form.
#[derive(Clone, Debug, PartialEq)]
pub struct OpRecord {
    pub id: u32,
    pub opcode: Opcode,
    pub args: Vec<Arg>,
    pub ty: ValueType,
}

/// A map kernel referenced by a trace.
#[derive(Clone, Debug)]
pub struct KernelRef {
    pub name: String,
    pub kind: ElemKind,
    /// Absent for traces parsed from text.
    pub callable: Option<AnyMapKernel>,
}

impl PartialEq for KernelRef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.kind == other.kind
    }
}

/// A shape-specialised recording of a kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub inputs: Vec<(u32, ValueType)>,
    pub ops: Vec<OpRecord>,
    pub outputs: Vec<u32>,
    pub kernels: Vec<KernelRef>,
}

/// Run `kernel` on `inputs`, recording its collectives.
///
/// Returns the trace together with the kernel's outputs for these inputs.
pub fn capture<F>(inputs: Vec<Value>, kernel: F) -> Result<(Trace, Vec<Value>)>
where
    F: FnOnce(&[Value]) -> Result<Vec<Value>>,
{
    let session = recorder::begin(inputs.len() as u32)
        .ok_or_else(|| Error::Capture("capture is already active on this thread".into()))?;

    struct Finish(bool);
    impl Drop for Finish {
        fn drop(&mut self) {
            if self.0 {
                recorder::end();
            }
        }
    }
    let mut guard = Finish(true);

    let mut slots = Vec::with_capacity(inputs.len());
    let inputs: Vec<Value> = inputs
        .into_iter()
        .enumerate()
        .map(|(i, mut v)| {
            slots.push((i as u32, v.value_type()));
            v.set_tag(Some(recorder::Tag { session, id: i as u32 }));
            v
        })
        .collect();

    let result = kernel(&inputs);
    guard.0 = false;
    let rec = recorder::end().expect("recorder installed by begin");
    let mut outputs = result?;
    if let Some(e) = rec.error {
        return Err(e);
    }

    let mut out_ids = Vec::with_capacity(outputs.len());
    for (k, v) in outputs.iter_mut().enumerate() {
        match v.tag() {
            Some(t) if t.session == session => out_ids.push(t.id),
            _ => return Err(Error::Capture(format!("output {k} is not derived from the capture inputs"))),
        }
        v.set_tag(None);
    }

    let kernels = rec
        .kernels
        .into_iter()
        .map(|k| KernelRef { name: k.name().to_string(), kind: k.kind(), callable: Some(k) })
        .collect();
    let trace = Trace { inputs: slots, ops: rec.ops, outputs: out_ids, kernels };
    trace.validate()?;
    Ok((trace, outputs))
}

impl Trace {
    /// Single definition per id, every use after its definition.
    pub fn validate(&self) -> Result<()> {
        let mut defined = std::collections::HashSet::new();
        for (id, _) in &self.inputs {
            if !defined.insert(*id) {
                return Err(Error::Replay(format!("%{id} defined twice")));
            }
        }
        for op in &self.ops {
            for a in &op.args {
                if let Arg::Id(id) = a {
                    if !defined.contains(id) {
                        return Err(Error::Replay(format!("%{} uses %{id} before its definition", op.id)));
                    }
                }
            }
            if let Opcode::Map { kernel, .. } = op.opcode {
                if kernel as usize >= self.kernels.len() {
                    return Err(Error::Replay(format!("%{} references unknown kernel k{kernel}", op.id)));
                }
            }
            if !defined.insert(op.id) {
                return Err(Error::Replay(format!("%{} defined twice", op.id)));
            }
        }
        if let Some(id) = self.outputs.iter().find(|id| !defined.contains(id)) {
            return Err(Error::Replay(format!("output %{id} is never defined")));
        }
        Ok(())
    }

    /// Number of records with the given opcode name.
    pub fn count(&self, name: &str) -> usize {
        self.ops.iter().filter(|op| op.opcode.name() == name).count()
    }

    /// Text form of the trace; see [`parse`] for the grammar.
    pub fn dump(&self) -> String {
        ir::dump(self)
    }

    /// Execute the recorded ops on `inputs`.
    pub fn replay(&self, inputs: Vec<Value>) -> Result<Vec<Value>> {
        self.validate()?;
        if inputs.len() != self.inputs.len() {
            return Err(Error::Replay(format!("trace takes {} inputs, got {}", self.inputs.len(), inputs.len())));
        }
        let max_id = self
            .inputs
            .iter()
            .map(|(id, _)| *id)
            .chain(self.ops.iter().map(|op| op.id))
            .max()
            .map_or(0, |m| m as usize + 1);

        // Position of the last read of every id; outputs count as a read at the end.
        let mut last_use = vec![usize::MAX; max_id];
        for (pos, op) in self.ops.iter().enumerate() {
            for a in &op.args {
                if let Arg::Id(id) = a {
                    last_use[*id as usize] = pos;
                }
            }
        }
        for id in &self.outputs {
            last_use[*id as usize] = usize::MAX - 1;
        }

        let mut env: Vec<Option<Value>> = vec![None; max_id];
        for ((id, ty), mut v) in self.inputs.iter().zip(inputs) {
            if v.value_type() != *ty {
                return Err(Error::Replay(format!("input %{id} expects {ty}, got {}", v.value_type())));
            }
            v.set_tag(None);
            env[*id as usize] = Some(v);
        }

        let kernels: Vec<Option<AnyMapKernel>> = self.kernels.iter().map(|k| k.callable.clone()).collect();
        for (pos, op) in self.ops.iter().enumerate() {
            let mut slots = Vec::with_capacity(op.args.len());
            for (k, a) in op.args.iter().enumerate() {
                slots.push(match a {
                    Arg::Lit(l) => value::Slot::Lit(*l),
                    Arg::Id(id) => {
                        let cell = &mut env[*id as usize];
                        let repeated = op.args[k + 1..].contains(a);
                        let v = if k == 0 && op.opcode.consumes_first() && last_use[*id as usize] == pos && !repeated {
                            cell.take()
                        } else {
                            cell.clone()
                        };
                        value::Slot::Val(v.ok_or_else(|| Error::Replay(format!("%{id} is not available")))?)
                    }
                });
            }
            let out = value::eval(&op.opcode, slots, &op.ty, &kernels)
                .map_err(|e| e.context(&format!("replaying %{} = {}", op.id, op.opcode.name())))?;
            if out.value_type() != op.ty {
                return Err(Error::Replay(format!(
                    "%{} produced {}, trace recorded {}",
                    op.id,
                    out.value_type(),
                    op.ty
                )));
            }
            env[op.id as usize] = Some(out);
        }

        self.outputs
            .iter()
            .map(|id| env[*id as usize].clone().ok_or_else(|| Error::Replay(format!("output %{id} missing"))))
            .collect()
    }
}
