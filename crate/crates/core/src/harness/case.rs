//! Benchmark configurations and the published parameter tables.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::kernels::DEFAULT_BLOCK;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// Dense matrix multiply.
    Mod2am,
    /// Sparse matrix-vector product.
    Mod2as,
    /// Complex FFT.
    Mod2f,
    /// Conjugate gradients.
    Cg,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Mod2am, Kernel::Mod2as, Kernel::Mod2f, Kernel::Cg];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Mod2am => "mod2am",
            Kernel::Mod2as => "mod2as",
            Kernel::Mod2f => "mod2f",
            Kernel::Cg => "cg",
        }
    }

    pub fn variants(self) -> &'static [Variant] {
        match self {
            Kernel::Mod2am => &[Variant::Mxm0, Variant::Mxm1, Variant::Mxm2a, Variant::Mxm2b],
            Kernel::Mod2as => &[Variant::Spmv1, Variant::Spmv2],
            Kernel::Mod2f => &[Variant::Splitstream],
            Kernel::Cg => &[Variant::CgSpmv1, Variant::CgSpmv2],
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown kernel `{s}` (expected mod2am, mod2as, mod2f or cg)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Mxm0,
    Mxm1,
    Mxm2a,
    Mxm2b,
    Spmv1,
    Spmv2,
    Splitstream,
    CgSpmv1,
    CgSpmv2,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Mxm0,
        Variant::Mxm1,
        Variant::Mxm2a,
        Variant::Mxm2b,
        Variant::Spmv1,
        Variant::Spmv2,
        Variant::Splitstream,
        Variant::CgSpmv1,
        Variant::CgSpmv2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Mxm0 => "mxm0",
            Variant::Mxm1 => "mxm1",
            Variant::Mxm2a => "mxm2a",
            Variant::Mxm2b => "mxm2b",
            Variant::Spmv1 => "spmv1",
            Variant::Spmv2 => "spmv2",
            Variant::Splitstream => "splitstream",
            Variant::CgSpmv1 => "cg-spmv1",
            Variant::CgSpmv2 => "cg-spmv2",
        }
    }

    pub fn kernel(self) -> Kernel {
        match self {
            Variant::Mxm0 | Variant::Mxm1 | Variant::Mxm2a | Variant::Mxm2b => Kernel::Mod2am,
            Variant::Spmv1 | Variant::Spmv2 => Kernel::Mod2as,
            Variant::Splitstream => Kernel::Mod2f,
            Variant::CgSpmv1 | Variant::CgSpmv2 => Kernel::Cg,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown variant `{s}`")))
    }
}

/// One benchmark configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchCase {
    pub kernel: Kernel,
    pub variant: Variant,
    /// Matrix order or signal length. Ignored when `matrix_market` is set.
    pub n: usize,
    /// Percentage of nonzeros per row (mod2as).
    pub fill: Option<f64>,
    /// Total band width (cg).
    pub bw: Option<usize>,
    /// Block size (mxm2b); defaults to `min(8, n)`.
    pub u: Option<usize>,
    pub workers: usize,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
    pub verify: bool,
    /// Read the sparse matrix from a file instead of generating it.
    pub matrix_market: Option<PathBuf>,
}

impl BenchCase {
    /// Defaults: 1 worker, 5 reps, 1 warmup, seed 42, verification on.
    pub fn new(variant: Variant, n: usize) -> Self {
        BenchCase {
            kernel: variant.kernel(),
            variant,
            n,
            fill: None,
            bw: None,
            u: None,
            workers: 1,
            reps: 5,
            warmup: 1,
            seed: 42,
            verify: true,
            matrix_market: None,
        }
    }

    pub fn with_fill(mut self, fill: f64) -> Self {
        self.fill = Some(fill);
        self
    }

    pub fn with_bw(mut self, bw: usize) -> Self {
        self.bw = Some(bw);
        self
    }

    pub fn block(&self) -> usize {
        self.u.unwrap_or(DEFAULT_BLOCK.min(self.n.max(1)))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if self.variant.kernel() != self.kernel {
            return bad(format!("variant {} does not belong to kernel {}", self.variant, self.kernel));
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        let from_file = self.matrix_market.is_some();
        if from_file && !matches!(self.kernel, Kernel::Mod2as | Kernel::Cg) {
            return bad(format!("{} does not read a sparse matrix", self.kernel));
        }
        if self.n == 0 && !from_file {
            return bad("n must be at least 1".into());
        }
        match self.kernel {
            Kernel::Mod2as if self.fill.is_none() && !from_file => bad("mod2as needs --fill".into()),
            Kernel::Cg if self.bw.is_none() && !from_file => bad("cg needs --bw".into()),
            Kernel::Mod2f if !self.n.is_power_of_two() => bad(format!("mod2f needs a power-of-two n, got {}", self.n)),
            Kernel::Mod2am if self.variant == Variant::Mxm2b && (self.block() == 0 || self.block() > self.n) => {
                bad(format!("block size must be in 1..={}, got {}", self.n, self.block()))
            }
            _ => Ok(()),
        }
    }

    /// The CSV `extra` column: fill (mod2as), band width (cg), block (mxm2b).
    pub fn extra(&self) -> String {
        match self.variant {
            Variant::Spmv1 | Variant::Spmv2 => self.fill.map(|f| f.to_string()).unwrap_or_default(),
            Variant::CgSpmv1 | Variant::CgSpmv2 => self.bw.map(|b| b.to_string()).unwrap_or_default(),
            Variant::Mxm2b => self.block().to_string(),
            _ => String::new(),
        }
    }
}

const MXM_SIZES: [usize; 13] = [10, 20, 50, 100, 192, 200, 500, 512, 576, 1000, 1024, 2000, 2048];

/// `(n, fill %)`.
pub const SPMV_TABLE: [(usize, f64); 16] = [
    (100, 3.50),
    (200, 3.75),
    (256, 5.0),
    (400, 4.38),
    (500, 5.00),
    (512, 4.00),
    (960, 4.50),
    (1000, 5.00),
    (1024, 5.50),
    (2000, 7.50),
    (4096, 3.50),
    (4992, 4.00),
    (5000, 4.00),
    (9984, 4.50),
    (10000, 5.00),
    (10240, 5.72),
];

const FFT_SIZES: [usize; 13] =
    [256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072, 262144, 524288, 1048576];

/// `(n, bw)`, configurations 1 to 18.
pub const CG_TABLE: [(usize, usize); 18] = [
    (128, 3),
    (128, 31),
    (128, 63),
    (256, 3),
    (256, 31),
    (256, 63),
    (256, 127),
    (512, 3),
    (512, 31),
    (512, 63),
    (512, 127),
    (512, 255),
    (1024, 3),
    (1024, 31),
    (1024, 63),
    (1024, 127),
    (1024, 255),
    (1024, 511),
];

/// The published configuration list for one kernel, run with its
/// best-performing variant.
pub fn paper_defaults(kernel: Kernel) -> Vec<BenchCase> {
    match kernel {
        Kernel::Mod2am => MXM_SIZES.iter().map(|&n| BenchCase::new(Variant::Mxm2b, n)).collect(),
        Kernel::Mod2as => SPMV_TABLE.iter().map(|&(n, f)| BenchCase::new(Variant::Spmv2, n).with_fill(f)).collect(),
        Kernel::Mod2f => FFT_SIZES.iter().map(|&n| BenchCase::new(Variant::Splitstream, n)).collect(),
        Kernel::Cg => CG_TABLE.iter().map(|&(n, bw)| BenchCase::new(Variant::CgSpmv2, n).with_bw(bw)).collect(),
    }
}

/// Floating-point operations of one run: `2n^3` (mod2am), `2 nnz` (mod2as),
/// `5 N log2 N` (mod2f), `iters (2 nnz + 10 n)` (cg).
pub fn flop_count(kernel: Kernel, n: usize, nnz: usize, iters: usize) -> f64 {
    let n = n as f64;
    match kernel {
        Kernel::Mod2am => 2.0 * n * n * n,
        Kernel::Mod2as => 2.0 * nnz as f64,
        Kernel::Mod2f => 5.0 * n * n.log2(),
        Kernel::Cg => iters as f64 * (2.0 * nnz as f64 + 10.0 * n),
    }
}
