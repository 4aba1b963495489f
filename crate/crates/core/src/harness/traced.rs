//! Kernels wrapped for capture: every container they touch is an input.

use super::case::Variant;
use super::gen;
use super::rng::Rng;
use crate::capture::{capture, Trace, Value};
use crate::containers::DenseVector;
use crate::element::C64;
use crate::kernels::{self, CgParams, CsrMatrix, SpmvVariant};
use crate::{Error, Result};

/// A recorded kernel together with the inputs it was recorded on.
pub struct CapturedCase {
    pub variant: Variant,
    pub trace: Trace,
    pub inputs: Vec<Value>,
    /// Outputs produced while recording.
    pub outputs: Vec<Value>,
    runner: Box<dyn Fn(&[Value]) -> Result<Vec<Value>>>,
}

impl CapturedCase {
    /// Run the kernel directly (no recording) on `inputs`.
    pub fn direct(&self, inputs: &[Value]) -> Result<Vec<Value>> {
        (self.runner)(inputs)
    }
}

fn csr_from(n: usize, v: &[Value]) -> Result<CsrMatrix> {
    CsrMatrix::from_parts(n, n, v[0].vector::<f64>()?.clone(), v[1].vector::<i32>()?.clone(), v[2].vector::<i32>()?.clone())
}

fn csr_inputs(m: CsrMatrix) -> Vec<Value> {
    let (vals, indx, rowp) = m.into_parts();
    vec![vals.into(), indx.into(), rowp.into()]
}

/// Small-input sparse matrix used for the spmv captures: about a quarter of
/// each row filled.
fn sample_sparse(n: usize, seed: u64) -> Result<CsrMatrix> {
    gen::gen_sparse(n, 25.0, seed)
}

type Runner = Box<dyn Fn(&[Value]) -> Result<Vec<Value>>>;

/// Inputs and kernel closure for `variant` at size `n`.
pub fn traced_kernel(variant: Variant, n: usize, seed: u64) -> Result<(Vec<Value>, Runner)> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    Ok(match variant {
        Variant::Mxm0 | Variant::Mxm1 | Variant::Mxm2a | Variant::Mxm2b => {
            let inputs = vec![gen::gen_dense(n, seed)?.into(), gen::gen_dense(n, seed.wrapping_add(1))?.into()];
            let u = kernels::DEFAULT_BLOCK.min(n);
            let run: Runner = Box::new(move |v: &[Value]| {
                let (a, b) = (v[0].matrix::<f64>()?, v[1].matrix::<f64>()?);
                let c = match variant {
                    Variant::Mxm0 => kernels::mxm0(a, b)?,
                    Variant::Mxm1 => kernels::mxm1(a, b)?,
                    Variant::Mxm2a => kernels::mxm2a(a, b)?,
                    _ => kernels::mxm2b(a, b, u)?,
                };
                Ok(vec![c.into()])
            });
            (inputs, run)
        }
        Variant::Spmv1 | Variant::Spmv2 => {
            let mut inputs = csr_inputs(sample_sparse(n, seed)?);
            let mut rng = Rng::new(seed.wrapping_add(1));
            inputs.push(DenseVector::from_vec((0..n).map(|_| rng.next_signed()).collect()).into());
            let run: Runner = Box::new(move |v: &[Value]| {
                let m = csr_from(n, v)?;
                let x = v[3].vector::<f64>()?;
                let y = if variant == Variant::Spmv1 { kernels::spmv1(&m, x)? } else { kernels::spmv2(&m, x)? };
                Ok(vec![y.into()])
            });
            (inputs, run)
        }
        Variant::Splitstream => {
            let plan = kernels::make_fft_plan(n)?;
            let mut inputs: Vec<Value> = vec![gen::gen_signal(n, seed).into(), plan.tangle().clone().into()];
            inputs.extend(plan.stage_twiddles().iter().map(|t| t.clone().into()));
            let run: Runner = Box::new(move |v: &[Value]| {
                let stages = v[2..].iter().map(|t| t.vector::<C64>().cloned()).collect::<Result<Vec<_>>>()?;
                let traced = plan.with_vectors(v[1].vector::<i32>()?.clone(), stages)?;
                Ok(vec![kernels::fft_forward(&traced, v[0].vector::<C64>()?)?.into()])
            });
            (inputs, run)
        }
        Variant::CgSpmv1 | Variant::CgSpmv2 => {
            if n < 2 {
                return Err(Error::Parameter("cg capture needs n >= 2".into()));
            }
            let m = gen::gen_banded_spd(n, 3)?;
            let b = gen::ones_rhs(&m);
            let mut inputs = csr_inputs(m);
            inputs.push(b.into());
            let spmv = if variant == Variant::CgSpmv1 { SpmvVariant::Spmv1 } else { SpmvVariant::Spmv2 };
            let run: Runner = Box::new(move |v: &[Value]| {
                let m = csr_from(n, v)?;
                let res = kernels::cg_solve(&m, v[3].vector::<f64>()?, CgParams::for_size(n), spmv)?;
                Ok(vec![res.x.into()])
            });
            (inputs, run)
        }
    })
}

/// Record `variant` at size `n` on generated inputs.
pub fn capture_case(variant: Variant, n: usize, seed: u64) -> Result<CapturedCase> {
    let (inputs, runner) = traced_kernel(variant, n, seed)?;
    let (trace, outputs) = capture(inputs.clone(), |v| runner(v))?;
    Ok(CapturedCase { variant, trace, inputs, outputs, runner })
}
