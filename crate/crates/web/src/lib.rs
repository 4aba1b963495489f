//! Browser bindings for three small demos: the magnitude spectrum of a
//! sampled signal, the residual history of conjugate gradients on a banded
//! system, and the nonzero pattern of a generated sparse matrix.
//!
//! The plain functions are usable (and tested) natively; the `wasm_bindgen`
//! exports wrap them for JavaScript.

use parabl::harness::{gen_banded_spd, gen_sparse, Rng};
use parabl::kernels::{cg_solve, fft_forward, make_fft_plan, CgParams, CsrMatrix, SpmvVariant};
use parabl::{DenseVector, Error, Result, C64};
use wasm_bindgen::prelude::*;

/// Largest signal length accepted from the page.
pub const MAX_SAMPLES: usize = 1 << 16;
/// Largest matrix order accepted from the page.
pub const MAX_ORDER: usize = 4096;

/// Two unit sines at bins `f1` and `f2` plus uniform noise of amplitude
/// `noise`.
pub fn test_signal(n: usize, f1: f64, f2: f64, noise: f64, seed: u64) -> Vec<f64> {
    let mut rng = Rng::new(seed);
    let w = 2.0 * std::f64::consts::PI / n.max(1) as f64;
    (0..n)
        .map(|j| {
            let t = j as f64 * w;
            (f1 * t).sin() + 0.5 * (f2 * t).sin() + noise * rng.next_signed()
        })
        .collect()
}

/// `|F(k)| / n` for `k < n / 2 + 1` of a real signal whose length is a power
/// of two.
pub fn spectrum(samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n > MAX_SAMPLES {
        return Err(Error::Parameter(format!("at most {MAX_SAMPLES} samples, got {n}")));
    }
    let plan = make_fft_plan(n)?;
    let f = DenseVector::from_vec(samples.iter().map(|&x| C64::new(x, 0.0)).collect());
    let big = fft_forward(&plan, &f)?;
    Ok(big.as_slice()[..n / 2 + 1].iter().map(|z| z.norm() / n as f64).collect())
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Parameter(format!("order must be in 1..={MAX_ORDER}, got {n}")));
    }
    Ok(())
}

/// Relative residual `|r_k| / |b|` after each iteration of CG on the banded
/// matrix of order `n` and band width `bw`, with `b` the row sums.
pub fn cg_residuals(n: usize, bw: usize, runs: bool) -> Result<Vec<f64>> {
    check_order(n)?;
    let a = gen_banded_spd(n, bw)?;
    let b = parabl::harness::gen::ones_rhs(&a);
    let spmv = if runs { SpmvVariant::Spmv2 } else { SpmvVariant::Spmv1 };
    let res = cg_solve(&a, &b, CgParams::for_size(n), spmv)?;
    let r0 = res.history[0];
    Ok(res.history.iter().map(|r2| (r2 / r0).sqrt()).collect())
}

fn pattern(m: &CsrMatrix) -> Vec<u32> {
    (0..m.nrows()).flat_map(|i| m.row(i).0.iter().flat_map(move |&j| [i as u32, j as u32])).collect()
}

/// Nonzero positions of a random sparse matrix as flattened `(row, col)`
/// pairs.
pub fn sparse_pattern(n: usize, fill: f64, seed: u64) -> Result<Vec<u32>> {
    check_order(n)?;
    Ok(pattern(&gen_sparse(n, fill, seed)?))
}

/// Nonzero positions of the banded CG matrix as flattened `(row, col)` pairs.
pub fn banded_pattern(n: usize, bw: usize) -> Result<Vec<u32>> {
    check_order(n)?;
    Ok(pattern(&gen_banded_spd(n, bw)?))
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = testSignal)]
pub fn js_test_signal(n: usize, f1: f64, f2: f64, noise: f64, seed: u32) -> Vec<f64> {
    test_signal(n.min(MAX_SAMPLES), f1, f2, noise, seed as u64)
}

#[wasm_bindgen(js_name = fftSpectrum)]
pub fn js_spectrum(samples: &[f64]) -> std::result::Result<Vec<f64>, JsError> {
    spectrum(samples).map_err(js)
}

#[wasm_bindgen(js_name = cgResiduals)]
pub fn js_cg_residuals(n: usize, bw: usize, runs: bool) -> std::result::Result<Vec<f64>, JsError> {
    cg_residuals(n, bw, runs).map_err(js)
}

#[wasm_bindgen(js_name = sparsePattern)]
pub fn js_sparse_pattern(n: usize, fill: f64, seed: u32) -> std::result::Result<Vec<u32>, JsError> {
    sparse_pattern(n, fill, seed as u64).map_err(js)
}

#[wasm_bindgen(js_name = bandedPattern)]
pub fn js_banded_pattern(n: usize, bw: usize) -> std::result::Result<Vec<u32>, JsError> {
    banded_pattern(n, bw).map_err(js)
}
