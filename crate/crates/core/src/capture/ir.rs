//! Line-oriented text form of a trace.
//!
//! ```text
//! parabl-trace v1
//! input %0 : vec[4]/i32
//! input %1 : vec[3]/f64
//! kernel k0 = csr_row_reduce -> f64
//! %2 = section(%0, 0, 3, 1) : vec[3]/i32
//! %3 = section(%0, 1, 3, 1) : vec[3]/i32
//! %4 = map(k0; %2, %3; %1) : vec[3]/f64
//! %5 = scale(%4, 0.5) : vec[3]/f64
//! output %5
//! ```
//!
//! Literals: shape integers are bare (`3`), reals always carry a `.`, an
//! exponent, `inf` or `NaN`, index literals end in `i32`, complex literals are
//! `(re, im)`. Blank lines and lines starting with `#` are ignored. Parsed
//! traces carry no kernel callables, so they round-trip and validate but
//! cannot replay maps.

use std::fmt::Write as _;

use super::value::Literal;
use super::{Arg, KernelRef, OpRecord, Opcode, Trace, ValueType};
use crate::element::{ElemKind, C64};
use crate::{Error, Result};

const HEADER: &str = "parabl-trace v1";

fn lit(l: &Literal) -> String {
    match l {
        Literal::Int(n) => n.to_string(),
        Literal::Real(x) => format!("{x:?}"),
        Literal::Index(i) => format!("{i}i32"),
        Literal::Complex(c) => format!("({:?}, {:?})", c.re, c.im),
    }
}

fn arg(a: &Arg) -> String {
    match a {
        Arg::Id(id) => format!("%{id}"),
        Arg::Lit(l) => lit(l),
    }
}

pub(super) fn dump(t: &Trace) -> String {
    let mut s = String::new();
    s.push_str(HEADER);
    s.push('\n');
    for (id, ty) in &t.inputs {
        let _ = writeln!(s, "input %{id} : {ty}");
    }
    for (k, kernel) in t.kernels.iter().enumerate() {
        let _ = writeln!(s, "kernel k{k} = {} -> {}", kernel.name, kernel.kind);
    }
    for op in &t.ops {
        let args: Vec<String> = op.args.iter().map(arg).collect();
        let body = match op.opcode {
            Opcode::Map { kernel, inputs } => {
                let (ins, aux) = args.split_at((inputs as usize).min(args.len()));
                format!("map(k{kernel}; {}; {})", ins.join(", "), aux.join(", "))
            }
            other => format!("{}({})", other.name(), args.join(", ")),
        };
        let _ = writeln!(s, "%{} = {body} : {}", op.id, op.ty);
    }
    let outs: Vec<String> = t.outputs.iter().map(|id| format!("%{id}")).collect();
    if outs.is_empty() {
        s.push_str("output\n");
    } else {
        let _ = writeln!(s, "output {}", outs.join(", "));
    }
    s
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.no, msg: msg.into() }
    }
}

fn id(line: &Line, s: &str) -> Result<u32> {
    s.trim()
        .strip_prefix('%')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| line.err(format!("expected a value id like %3, found `{}`", s.trim())))
}

fn kind(line: &Line, s: &str) -> Result<ElemKind> {
    s.trim().parse().map_err(|_| line.err(format!("unknown element kind `{}`", s.trim())))
}

fn dims(line: &Line, s: &str) -> Result<usize> {
    s.parse().map_err(|_| line.err(format!("bad dimension `{s}`")))
}

fn value_type(line: &Line, s: &str) -> Result<ValueType> {
    let s = s.trim();
    let (shape, k) = s.rsplit_once('/').ok_or_else(|| line.err(format!("bad type `{s}`")))?;
    let kind = kind(line, k)?;
    if shape == "scalar" {
        return Ok(ValueType::Scalar { kind });
    }
    if let Some(n) = shape.strip_prefix("vec[").and_then(|r| r.strip_suffix(']')) {
        return Ok(ValueType::Vector { len: dims(line, n)?, kind });
    }
    if let Some(rc) = shape.strip_prefix("mat[").and_then(|r| r.strip_suffix(']')) {
        let (r, c) = rc.split_once('x').ok_or_else(|| line.err(format!("bad matrix shape `{shape}`")))?;
        return Ok(ValueType::Matrix { rows: dims(line, r)?, cols: dims(line, c)?, kind });
    }
    Err(line.err(format!("bad type `{s}`")))
}

fn real(line: &Line, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| line.err(format!("bad real literal `{}`", s.trim())))
}

fn literal(line: &Line, s: &str) -> Result<Literal> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(|| line.err(format!("bad complex literal `{s}`")))?;
        return Ok(Literal::Complex(C64::new(real(line, re)?, real(line, im)?)));
    }
    if let Some(i) = s.strip_suffix("i32") {
        return i.parse().map(Literal::Index).map_err(|_| line.err(format!("bad index literal `{s}`")));
    }
    if s.bytes().all(|b| b.is_ascii_digit()) && !s.is_empty() {
        return s.parse().map(Literal::Int).map_err(|_| line.err(format!("integer literal `{s}` out of range")));
    }
    if s.contains(['.', 'e', 'E']) || s.ends_with("inf") || s == "NaN" {
        return real(line, s).map(Literal::Real);
    }
    Err(line.err(format!("unrecognised literal `{s}`")))
}

fn arg_list(line: &Line, s: &str) -> Result<Vec<Arg>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut push = |piece: &str| -> Result<()> {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(line.err("empty argument"));
        }
        out.push(if piece.starts_with('%') { Arg::Id(id(line, piece)?) } else { Arg::Lit(literal(line, piece)?) });
        Ok(())
    };
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                push(&s[start..i])?;
                start = i + 1;
            }
            _ => {}
        }
    }
    push(&s[start..])?;
    Ok(out)
}

fn op_line(line: &Line, n_kernels: usize) -> Result<OpRecord> {
    let (lhs, rhs) = line.text.split_once('=').ok_or_else(|| line.err("expected `%id = op(...) : type`"))?;
    let out = id(line, lhs)?;
    let (call, ty) = rhs.rsplit_once(" : ").ok_or_else(|| line.err("missing result type"))?;
    let ty = value_type(line, ty)?;
    let call = call.trim();
    let open = call.find('(').ok_or_else(|| line.err("expected `op(args)`"))?;
    let inner = call[open + 1..].strip_suffix(')').ok_or_else(|| line.err("unbalanced parentheses"))?;
    let name = &call[..open];
    let (opcode, args) = if name == "map" {
        let mut parts = inner.splitn(3, ';');
        let (k, ins, aux) = match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(i), Some(a)) => (k, i, a),
            _ => return Err(line.err("map takes `kN; inputs; auxiliaries`")),
        };
        let kernel: u32 = k
            .trim()
            .strip_prefix('k')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| line.err(format!("bad kernel reference `{}`", k.trim())))?;
        if kernel as usize >= n_kernels {
            return Err(line.err(format!("kernel k{kernel} is not declared")));
        }
        let mut args = arg_list(line, ins)?;
        let inputs = args.len() as u32;
        args.extend(arg_list(line, aux)?);
        (Opcode::Map { kernel, inputs }, args)
    } else {
        let opcode = Opcode::from_name(name).ok_or_else(|| line.err(format!("unknown op `{name}`")))?;
        (opcode, arg_list(line, inner)?)
    };
    Ok(OpRecord { id: out, opcode, args, ty })
}

/// Parse the text form produced by [`Trace::dump`].
pub fn parse(text: &str) -> Result<Trace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, t)| Line { no: i + 1, text: t.trim() })
        .filter(|l| !l.text.is_empty() && !l.text.starts_with('#'));

    match lines.next() {
        Some(l) if l.text == HEADER => {}
        Some(l) => return Err(l.err(format!("expected `{HEADER}`"))),
        None => return Err(Error::Parse { line: 0, msg: "empty trace".into() }),
    }

    let mut t = Trace { inputs: Vec::new(), ops: Vec::new(), outputs: Vec::new(), kernels: Vec::new() };
    let mut done = false;
    for line in lines {
        if done {
            return Err(line.err("text after the output line"));
        }
        if let Some(rest) = line.text.strip_prefix("input ") {
            if !t.ops.is_empty() {
                return Err(line.err("inputs must precede ops"));
            }
            let (i, ty) = rest.split_once(':').ok_or_else(|| line.err("expected `input %id : type`"))?;
            t.inputs.push((id(&line, i)?, value_type(&line, ty)?));
        } else if let Some(rest) = line.text.strip_prefix("kernel ") {
            let (k, sig) = rest.split_once('=').ok_or_else(|| line.err("expected `kernel kN = name -> kind`"))?;
            if k.trim() != format!("k{}", t.kernels.len()) {
                return Err(line.err(format!("kernels must be numbered in order; expected k{}", t.kernels.len())));
            }
            let (name, kd) = sig.split_once("->").ok_or_else(|| line.err("missing `-> kind`"))?;
            t.kernels.push(KernelRef { name: name.trim().to_string(), kind: kind(&line, kd)?, callable: None });
        } else if line.text == "output" {
            done = true;
        } else if let Some(rest) = line.text.strip_prefix("output ") {
            t.outputs = rest.split(',').map(|s| id(&line, s)).collect::<Result<_>>()?;
            done = true;
        } else if line.text.starts_with('%') {
            t.ops.push(op_line(&line, t.kernels.len())?);
        } else {
            return Err(line.err(format!("unrecognised line `{}`", line.text)));
        }
    }
    if !done {
        return Err(Error::Parse { line: text.lines().count(), msg: "missing output line".into() });
    }
    t.validate().map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    Ok(t)
}
