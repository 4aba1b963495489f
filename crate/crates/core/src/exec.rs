//! Execution configuration and the worker backend behind the collectives.
//!
//! The active [`ExecutionConfig`] is per calling thread. Parallel work runs on
//! a rayon pool sized to `num_workers`; pools are built once per size and
//! reused. Results never depend on the worker count: element-wise work is
//! partitioned into independent chunks, and sums use a fixed block shape.

use std::any::Any;
use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::element::Element;
use crate::{Error, Result};

/// Minimum number of elements handed to one parallel task.
pub const MIN_TASK_ELEMS: usize = 1024;

/// Block length of the fixed-shape reduction.
pub const REDUCE_BLOCK: usize = 256;

/// Environment variable holding the default worker count.
pub const NUM_WORKERS_ENV: &str = "PARABL_NUM_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OptLevel {
    Serial,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExecutionConfig {
    pub opt_level: OptLevel,
    /// Worker count; only consulted under [`OptLevel::Parallel`].
    pub num_workers: usize,
}

impl Default for ExecutionConfig {
    fn default() -> Self {
        ExecutionConfig { opt_level: OptLevel::Serial, num_workers: 1 }
    }
}

impl ExecutionConfig {
    pub fn serial() -> Self {
        Self::default()
    }

    pub fn parallel(num_workers: usize) -> Result<Self> {
        let cfg = ExecutionConfig { opt_level: OptLevel::Parallel, num_workers };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_workers == 0 {
            return Err(Error::Config("num_workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Parallel with the worker count from `PARABL_NUM_WORKERS`, or the serial
    /// default when the variable is unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(NUM_WORKERS_ENV) {
            Ok(s) => {
                let n: usize = s.trim().parse().map_err(|_| {
                    Error::Config(format!("{NUM_WORKERS_ENV}={s:?} is not a positive integer"))
                })?;
                Self::parallel(n)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    /// Number of workers that actually run tasks.
    pub fn effective_workers(&self) -> usize {
        match self.opt_level {
            OptLevel::Serial => 1,
            OptLevel::Parallel => self.num_workers.max(1),
        }
    }
}

thread_local! {
    static CURRENT: Cell<ExecutionConfig> = Cell::new(ExecutionConfig::default());
}

/// Make `cfg` the configuration for subsequent collectives on this thread.
pub fn set_execution(cfg: ExecutionConfig) -> Result<()> {
    cfg.validate()?;
    CURRENT.with(|c| c.set(cfg));
    Ok(())
}

pub fn current_execution() -> ExecutionConfig {
    CURRENT.with(|c| c.get())
}

/// Run `f` under `cfg`, restoring the previous configuration afterwards.
pub fn with_execution<R>(cfg: ExecutionConfig, f: impl FnOnce() -> R) -> Result<R> {
    cfg.validate()?;
    let prev = current_execution();
    struct Restore(ExecutionConfig);
    impl Drop for Restore {
        fn drop(&mut self) {
            CURRENT.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(prev);
    CURRENT.with(|c| c.set(cfg));
    Ok(f())
}

fn pool(workers: usize) -> Option<Arc<ThreadPool>> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Option<Arc<ThreadPool>>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    pools
        .entry(workers)
        .or_insert_with(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .thread_name(move |i| format!("parabl-{workers}-{i}"))
                .build()
                .ok()
                .map(Arc::new)
        })
        .clone()
}

/// The pool to use for `units` independent units of work, each `unit_size`
/// elements, or `None` when the work should run inline.
fn pool_for(units: usize, unit_size: usize) -> Option<(Arc<ThreadPool>, usize)> {
    let workers = current_execution().effective_workers();
    if workers <= 1 {
        return None;
    }
    let min_units = MIN_TASK_ELEMS.div_ceil(unit_size.max(1)).max(1);
    if units < 2 * min_units {
        return None;
    }
    let per_task = units.div_ceil(workers).max(min_units);
    pool(workers).map(|p| (p, per_task))
}

/// `out[i] = f(i)` for `i < len`, where each unit covers `unit_size` elements
/// of work.
pub(crate) fn tabulate<T, F>(len: usize, unit_size: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match pool_for(len, unit_size) {
        None => (0..len).map(f).collect(),
        Some((pool, per_task)) => {
            pool.install(|| (0..len).into_par_iter().with_min_len(per_task).map(f).collect())
        }
    }
}

/// Largest number of released buffers kept per thread for reuse.
const POOL_SLOTS: usize = 4;
/// Buffers smaller than this many elements are not pooled.
const POOL_MIN_ELEMS: usize = 1 << 15;

thread_local! {
    static FREE: RefCell<Vec<Box<dyn Any>>> = const { RefCell::new(Vec::new()) };
}

/// Hand a container's storage back for reuse by later outputs on this thread.
pub(crate) fn recycle<T: Element>(v: Vec<T>) {
    if v.capacity() < POOL_MIN_ELEMS {
        return;
    }
    let _ = FREE.try_with(|f| {
        let mut f = f.borrow_mut();
        if f.len() == POOL_SLOTS {
            f.remove(0);
        }
        f.push(Box::new(v));
    });
}

/// Drop the storage kept for reuse on the calling thread.
pub fn release_buffers() {
    FREE.with(|f| f.borrow_mut().clear());
}

/// A vector of `len` initialised elements, reusing released storage when a
/// buffer of a fitting size is available.
pub(crate) fn buffer<T: Element>(len: usize) -> Vec<T> {
    if len >= POOL_MIN_ELEMS {
        let reused = FREE.with(|f| {
            let mut f = f.borrow_mut();
            let pos = f.iter().rposition(|b| {
                b.downcast_ref::<Vec<T>>().is_some_and(|v| v.capacity() >= len && v.capacity() <= 2 * len)
            })?;
            f.remove(pos).downcast::<Vec<T>>().ok()
        });
        if let Some(mut v) = reused {
            v.truncate(len);
            v.resize(len, T::zero());
            return *v;
        }
    }
    vec![T::zero(); len]
}

/// `out[i] = f(i)` into fresh (possibly reused) storage.
pub(crate) fn build<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Element,
    F: Fn(usize) -> T + Sync + Send,
{
    let mut out = buffer(len);
    match pool_for(len, 1) {
        None => out.iter_mut().enumerate().for_each(|(i, x)| *x = f(i)),
        Some((pool, per_task)) => pool.install(|| {
            out.par_chunks_mut(per_task).enumerate().for_each(|(c, chunk)| {
                let base = c * per_task;
                chunk.iter_mut().enumerate().for_each(|(i, x)| *x = f(base + i))
            })
        }),
    }
    out
}

/// A `rows x cols` row-major buffer with row `i` written by `f(i, row)`.
pub(crate) fn build_rows<T, F>(rows: usize, cols: usize, f: F) -> Vec<T>
where
    T: Element,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let mut out = buffer(rows * cols);
    if cols == 0 {
        return out;
    }
    match pool_for(rows, cols) {
        None => out.chunks_mut(cols).enumerate().for_each(|(i, r)| f(i, r)),
        Some((pool, per_task)) => pool.install(|| {
            out.par_chunks_mut(cols * per_task).enumerate().for_each(|(c, block)| {
                block.chunks_mut(cols).enumerate().for_each(|(i, r)| f(c * per_task + i, r))
            })
        }),
    }
    out
}

/// `a[i] = f(a[i], b[i])` in place.
pub(crate) fn zip_apply<T, F>(a: &mut [T], b: &[T], f: F)
where
    T: Send + Sync + Copy,
    F: Fn(T, T) -> T + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    match pool_for(a.len(), 1) {
        None => a.iter_mut().zip(b).for_each(|(x, &y)| *x = f(*x, y)),
        Some((pool, per_task)) => pool.install(|| {
            a.par_chunks_mut(per_task)
                .zip(b.par_chunks(per_task))
                .for_each(|(xa, xb)| xa.iter_mut().zip(xb).for_each(|(x, &y)| *x = f(*x, y)))
        }),
    }
}

/// `a[i] = f(a[i])` in place.
pub(crate) fn apply<T, F>(a: &mut [T], f: F)
where
    T: Send + Copy,
    F: Fn(T) -> T + Sync + Send,
{
    match pool_for(a.len(), 1) {
        None => a.iter_mut().for_each(|x| *x = f(*x)),
        Some((pool, per_task)) => pool.install(|| {
            a.par_chunks_mut(per_task).for_each(|xa| xa.iter_mut().for_each(|x| *x = f(*x)))
        }),
    }
}

fn block_sum<T: Element>(block: &[T]) -> T {
    block.iter().fold(T::zero(), |acc, &x| acc.add(x))
}

/// Pairwise tree over block partials: split at `len / 2`, sum halves, add.
fn pairwise<T: Element>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise(l).add(pairwise(r))
        }
    }
}

/// Deterministic sum: sequential within blocks of [`REDUCE_BLOCK`] elements,
/// then a pairwise tree over the block partials. The bracketing depends only
/// on `xs.len()`.
pub(crate) fn reduce_sum<T: Element>(xs: &[T]) -> T {
    let nblocks = xs.len().div_ceil(REDUCE_BLOCK);
    let partials = tabulate(nblocks, REDUCE_BLOCK, |b| {
        let lo = b * REDUCE_BLOCK;
        block_sum(&xs[lo..(lo + REDUCE_BLOCK).min(xs.len())])
    });
    pairwise(&partials)
}

/// The same reduction without dispatching to workers.
pub(crate) fn reduce_sum_serial<T: Element>(xs: &[T]) -> T {
    let partials: Vec<T> = xs.chunks(REDUCE_BLOCK).map(block_sum).collect();
    pairwise(&partials)
}
