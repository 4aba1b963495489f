//! Thread-local op recorder consulted by every collective.

use std::cell::{Cell, RefCell};
use std::sync::atomic::{AtomicU32, Ordering};

use super::value::Literal;
use super::{Arg, OpRecord, Opcode, ValueType};
use crate::ops::map::AnyMapKernel;
use crate::Error;

/// Identity of a value inside one capture session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tag {
    pub(crate) session: u32,
    pub(crate) id: u32,
}

/// An operand as seen by the recorder.
pub(crate) enum Operand {
    /// A container; it must carry a tag from the active session.
    Traced(Option<Tag>),
    /// A scalar; untagged scalars are embedded as literals.
    Scalar(Option<Tag>, Literal),
    Lit(Literal),
}

pub(crate) struct Recorder {
    pub session: u32,
    pub next_id: u32,
    pub ops: Vec<OpRecord>,
    pub kernels: Vec<AnyMapKernel>,
    pub error: Option<Error>,
}

static SESSIONS: AtomicU32 = AtomicU32::new(0);

thread_local! {
    static ACTIVE: Cell<bool> = const { Cell::new(false) };
    static RECORDER: RefCell<Option<Recorder>> = const { RefCell::new(None) };
}

pub(crate) fn is_recording() -> bool {
    ACTIVE.with(Cell::get)
}

/// Start a session; `None` if one is already running on this thread.
pub(crate) fn begin(first_free_id: u32) -> Option<u32> {
    if is_recording() {
        return None;
    }
    let session = SESSIONS.fetch_add(1, Ordering::Relaxed) + 1;
    RECORDER.with(|r| {
        *r.borrow_mut() =
            Some(Recorder { session, next_id: first_free_id, ops: Vec::new(), kernels: Vec::new(), error: None })
    });
    ACTIVE.with(|a| a.set(true));
    Some(session)
}

pub(crate) fn end() -> Option<Recorder> {
    ACTIVE.with(|a| a.set(false));
    RECORDER.with(|r| r.borrow_mut().take())
}

impl Recorder {
    fn fail(&mut self, msg: String) {
        if self.error.is_none() {
            self.error = Some(Error::Capture(msg));
        }
    }

    fn resolve(&mut self, opcode: &Opcode, operand: &Operand) -> Option<Arg> {
        match operand {
            Operand::Lit(l) => Some(Arg::Lit(*l)),
            Operand::Scalar(None, l) => Some(Arg::Lit(*l)),
            Operand::Traced(Some(t)) | Operand::Scalar(Some(t), _) if t.session == self.session => Some(Arg::Id(t.id)),
            _ => {
                self.fail(format!(
                    "operand of `{}` is not derived from the capture inputs (host data must be passed as an input)",
                    opcode.name()
                ));
                None
            }
        }
    }

    fn push(&mut self, opcode: Opcode, operands: &[Operand], ty: ValueType) -> Option<Tag> {
        let mut args = Vec::with_capacity(operands.len());
        for o in operands {
            args.push(self.resolve(&opcode, o)?);
        }
        let id = self.next_id;
        self.next_id += 1;
        self.ops.push(OpRecord { id, opcode, args, ty });
        Some(Tag { session: self.session, id })
    }
}

/// Record one op producing a value of type `ty`; returns the output's tag, or
/// `None` when no capture is active.
pub(crate) fn record(opcode: Opcode, operands: &[Operand], ty: ValueType) -> Option<Tag> {
    if !is_recording() {
        return None;
    }
    RECORDER.with(|r| r.borrow_mut().as_mut().and_then(|rec| rec.push(opcode, operands, ty)))
}

pub(crate) fn record_map(kernel: AnyMapKernel, n_inputs: usize, operands: &[Operand], ty: ValueType) -> Option<Tag> {
    if !is_recording() {
        return None;
    }
    RECORDER.with(|r| {
        let mut r = r.borrow_mut();
        let rec = r.as_mut()?;
        let index = match rec.kernels.iter().position(|k| k.same_callable(&kernel)) {
            Some(i) => i,
            None => {
                rec.kernels.push(kernel);
                rec.kernels.len() - 1
            }
        };
        rec.push(Opcode::Map { kernel: index as u32, inputs: n_inputs as u32 }, operands, ty)
    })
}
