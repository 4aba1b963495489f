//! Timed, verified execution of benchmark cases.

use std::fmt;
use std::time::Instant;

use super::case::{flop_count, BenchCase, Kernel, Variant};
use super::gen;
use super::matrix_market::mm_read_path;
use crate::containers::{DenseMatrix, DenseVector};
use crate::element::{Element, C64};
use crate::exec::{with_execution, ExecutionConfig};
use crate::kernels::{self, CgParams, CgResult, CsrMatrix, FftPlan, SpmvVariant};
use crate::oracles;
use crate::{Error, Result};

/// Largest mxm order checked against the triple loop.
pub const MXM_VERIFY_CAP: usize = 2048;
/// Largest FFT length checked against the direct DFT.
pub const DFT_VERIFY_CAP: usize = 8192;
/// Largest CG order checked against the dense solver.
pub const SOLVE_VERIFY_CAP: usize = 512;

/// Outcome of the oracle comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verified {
    Pass,
    Fail,
    /// Not requested, or above the oracle's size cap.
    Skipped,
}

impl fmt::Display for Verified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verified::Pass => "pass",
            Verified::Fail => "fail",
            Verified::Skipped => "skipped",
        })
    }
}

impl std::str::FromStr for Verified {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verified::Pass),
            "fail" => Ok(Verified::Fail),
            "skipped" => Ok(Verified::Skipped),
            other => Err(Error::Parameter(format!("unknown verification status `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    /// The case as run; `workers` is the count actually used.
    pub case: BenchCase,
    /// Wall time of each timed repetition, in seconds.
    pub times: Vec<f64>,
    pub flops: f64,
    pub verified: Verified,
    pub max_rel_err: Option<f64>,
    /// FNV-1a digest of the output bits; set when verification was requested.
    pub digest: Option<u64>,
    /// CG iterations of the last repetition.
    pub iters: Option<usize>,
}

impl BenchResult {
    pub fn best_time(&self) -> f64 {
        self.times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Headline rate from the best repetition.
    pub fn mflops(&self) -> f64 {
        self.flops / self.best_time() / 1e6
    }

    pub fn mflops_at(&self, rep: usize) -> f64 {
        self.flops / self.times[rep] / 1e6
    }
}

enum Input {
    Dense { a: DenseMatrix<f64>, b: DenseMatrix<f64> },
    Sparse { m: CsrMatrix, x: DenseVector<f64> },
    Signal { plan: FftPlan, f: DenseVector<C64> },
    System { m: CsrMatrix, b: DenseVector<f64> },
}

enum Output {
    Matrix(DenseMatrix<f64>),
    Vector(DenseVector<f64>),
    Spectrum(DenseVector<C64>),
    Solution(CgResult),
}

/// A case with its input data generated, ready to run any number of times.
pub struct Prepared {
    case: BenchCase,
    input: Input,
}

fn sparse_matrix(case: &BenchCase) -> Result<CsrMatrix> {
    if let Some(path) = &case.matrix_market {
        return mm_read_path(path);
    }
    match case.kernel {
        Kernel::Cg => gen::gen_banded_spd(case.n, case.bw.unwrap_or_default()),
        _ => gen::gen_sparse(case.n, case.fill.unwrap_or_default(), case.seed),
    }
}

pub fn prepare(case: &BenchCase) -> Result<Prepared> {
    case.validate()?;
    let mut case = case.clone();
    let input = match case.kernel {
        Kernel::Mod2am => Input::Dense {
            a: gen::gen_dense(case.n, case.seed)?,
            b: gen::gen_dense(case.n, case.seed.wrapping_add(1))?,
        },
        Kernel::Mod2as => {
            let m = sparse_matrix(&case)?;
            case.n = m.nrows();
            let mut rng = super::rng::Rng::new(case.seed.wrapping_add(1));
            let x = DenseVector::from_vec((0..m.ncols()).map(|_| rng.next_signed()).collect());
            Input::Sparse { m, x }
        }
        Kernel::Mod2f => Input::Signal { plan: kernels::make_fft_plan(case.n)?, f: gen::gen_signal(case.n, case.seed) },
        Kernel::Cg => {
            let m = sparse_matrix(&case)?;
            if m.nrows() != m.ncols() {
                return Err(Error::Shape(format!("cg needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
            }
            case.n = m.nrows();
            let b = gen::ones_rhs(&m);
            Input::System { m, b }
        }
    };
    Ok(Prepared { case, input })
}

fn execute(p: &Prepared) -> Result<Output> {
    let case = &p.case;
    Ok(match (&p.input, case.variant) {
        (Input::Dense { a, b }, Variant::Mxm0) => Output::Matrix(kernels::mxm0(a, b)?),
        (Input::Dense { a, b }, Variant::Mxm1) => Output::Matrix(kernels::mxm1(a, b)?),
        (Input::Dense { a, b }, Variant::Mxm2a) => Output::Matrix(kernels::mxm2a(a, b)?),
        (Input::Dense { a, b }, Variant::Mxm2b) => Output::Matrix(kernels::mxm2b(a, b, case.block())?),
        (Input::Sparse { m, x }, Variant::Spmv1) => Output::Vector(kernels::spmv1(m, x)?),
        (Input::Sparse { m, x }, Variant::Spmv2) => Output::Vector(kernels::spmv2(m, x)?),
        (Input::Signal { plan, f }, Variant::Splitstream) => Output::Spectrum(kernels::fft_forward(plan, f)?),
        (Input::System { m, b }, v @ (Variant::CgSpmv1 | Variant::CgSpmv2)) => {
            let spmv = if v == Variant::CgSpmv1 { SpmvVariant::Spmv1 } else { SpmvVariant::Spmv2 };
            Output::Solution(kernels::cg_solve(m, b, CgParams::for_size(m.nrows()), spmv)?)
        }
        _ => unreachable!("input kind follows the kernel"),
    })
}

fn max_abs_diff<T: Element>(got: &[T], want: &[T], norm: impl Fn(T, T) -> f64) -> f64 {
    got.iter().zip(want).map(|(&g, &w)| norm(g, w)).fold(0.0, f64::max)
}

fn real_diff(g: f64, w: f64) -> f64 {
    (g - w).abs()
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `(within tolerance, max relative error)`, or `None` above the caps.
fn verify(p: &Prepared, out: &Output) -> Result<Option<(bool, f64)>> {
    let n = p.case.n;
    Ok(match (&p.input, out) {
        (Input::Dense { a, b }, Output::Matrix(c)) => {
            if n > MXM_VERIFY_CAP {
                return Ok(None);
            }
            let want = oracles::mxm_naive(a, b)?;
            let err = rel(max_abs_diff(c.as_slice(), want.as_slice(), real_diff), max_abs(want.as_slice()));
            Some((err <= 1e-12 * n as f64, err))
        }
        (Input::Sparse { m, x }, Output::Vector(y)) => {
            let want = oracles::spmv_serial(m, x)?;
            let err = rel(max_abs_diff(y.as_slice(), want.as_slice(), real_diff), max_abs(want.as_slice()));
            Some((err <= 1e-13, err))
        }
        (Input::Signal { f, .. }, Output::Spectrum(got)) => {
            if n > DFT_VERIFY_CAP {
                return Ok(None);
            }
            let want = oracles::dft_naive(f);
            let abs = max_abs_diff(got.as_slice(), want.as_slice(), |g: C64, w: C64| (g - w).norm());
            let fmax = f.as_slice().iter().fold(0.0, |m: f64, z| m.max(z.norm()));
            let scale = want.as_slice().iter().fold(0.0, |m: f64, z| m.max(z.norm()));
            Some((abs <= 1e-9 * n as f64 * fmax, rel(abs, scale)))
        }
        (Input::System { m, b }, Output::Solution(res)) => {
            if n > SOLVE_VERIFY_CAP {
                return Ok(None);
            }
            let want = oracles::dense_solve(&m.to_dense(), b)?;
            let err = rel(max_abs_diff(res.x.as_slice(), want.as_slice(), real_diff), max_abs(want.as_slice()));
            let ax = oracles::spmv_serial(m, &res.x)?;
            let resid = ax.as_slice().iter().zip(b.as_slice()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
            let bnorm = b.as_slice().iter().map(|q| q * q).sum::<f64>().sqrt();
            Some((resid <= 1e-7 * bnorm && err <= CG_SOLUTION_TOL, err))
        }
        _ => unreachable!("output kind follows the kernel"),
    })
}

/// Agreement with the direct solve demanded of a converged CG solution.
pub const CG_SOLUTION_TOL: f64 = 1e-6;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the little-endian bytes of `words`.
pub fn fnv1a(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

fn bits<T: Element>(xs: &[T]) -> impl Iterator<Item = u64> + '_ {
    xs.iter().flat_map(|x| x.bits())
}

fn digest(out: &Output) -> u64 {
    match out {
        Output::Matrix(c) => fnv1a(bits(c.as_slice())),
        Output::Vector(y) => fnv1a(bits(y.as_slice())),
        Output::Spectrum(s) => fnv1a(bits(s.as_slice())),
        Output::Solution(r) => fnv1a(bits(r.x.as_slice()).chain([r.iters as u64])),
    }
}

impl Prepared {
    pub fn case(&self) -> &BenchCase {
        &self.case
    }

    /// Warm up, time `reps` runs with `workers` workers, then verify.
    pub fn run(&self, workers: usize) -> Result<BenchResult> {
        let mut case = self.case.clone();
        case.workers = workers;
        let cfg = ExecutionConfig::parallel(workers)?;
        let context = |e: Error| e.context(&format!("{} {} n={}", case.kernel, case.variant, case.n));
        let (times, last) = with_execution(cfg, || -> Result<(Vec<f64>, Output)> {
            for _ in 0..case.warmup {
                execute(self)?;
            }
            let mut times = Vec::with_capacity(case.reps);
            let mut last = None;
            for _ in 0..case.reps {
                let start = Instant::now();
                let out = execute(self)?;
                times.push(start.elapsed().as_secs_f64().max(1e-9));
                last = Some(out);
            }
            Ok((times, last.expect("reps >= 1")))
        })?
        .map_err(context)?;

        let (nnz, iters) = match (&self.input, &last) {
            (Input::Sparse { m, .. }, _) => (m.nnz(), None),
            (Input::System { m, .. }, Output::Solution(r)) => (m.nnz(), Some(r.iters)),
            _ => (0, None),
        };
        let flops = flop_count(case.kernel, case.n, nnz, iters.unwrap_or(0));
        let (verified, max_rel_err, digest) = if case.verify {
            let d = Some(digest(&last));
            match verify(self, &last).map_err(context)? {
                Some((ok, err)) => (if ok { Verified::Pass } else { Verified::Fail }, Some(err), d),
                None => (Verified::Skipped, None, d),
            }
        } else {
            (Verified::Skipped, None, None)
        };
        Ok(BenchResult { case, times, flops, verified, max_rel_err, digest, iters })
    }
}

/// Generate the inputs and run one case with `case.workers` workers.
pub fn run_case(case: &BenchCase) -> Result<BenchResult> {
    prepare(case)?.run(case.workers)
}

/// Run one case at each worker count on one set of inputs.
pub fn sweep_workers(case: &BenchCase, workers: &[usize]) -> Result<Vec<BenchResult>> {
    if let Some(w) = workers.iter().find(|&&w| w == 0) {
        return Err(Error::Config(format!("worker count must be at least 1, got {w}")));
    }
    let p = prepare(case)?;
    workers.iter().map(|&w| p.run(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference() {
        assert_eq!(fnv1a([]), FNV_OFFSET);
        // FNV-1a of eight zero bytes
        assert_eq!(fnv1a([0]), 0xa8c7_f832_281a_39c5);
    }

    #[test]
    fn small_cases_verify() {
        for case in [
            BenchCase::new(Variant::Mxm0, 10),
            BenchCase::new(Variant::Mxm2b, 10),
            BenchCase::new(Variant::Spmv1, 50).with_fill(5.0),
            BenchCase::new(Variant::Splitstream, 64),
            BenchCase::new(Variant::CgSpmv1, 64).with_bw(7),
        ] {
            let mut case = case;
            case.reps = 2;
            case.warmup = 0;
            let r = run_case(&case).unwrap();
            assert_eq!(r.verified, Verified::Pass, "{case:?} {r:?}");
            assert_eq!(r.times.len(), 2);
            assert!(r.mflops() > 0.0);
        }
    }

    #[test]
    fn unverified_cases_skip() {
        let mut case = BenchCase::new(Variant::Splitstream, 16384);
        case.reps = 1;
        case.warmup = 0;
        assert_eq!(run_case(&case).unwrap().verified, Verified::Skipped);
        case.n = 16;
        case.verify = false;
        let r = run_case(&case).unwrap();
        assert_eq!((r.verified, r.max_rel_err, r.digest), (Verified::Skipped, None, None));
    }
}
