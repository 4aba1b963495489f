//! Split-stream radix-2 decimation-in-frequency FFT.
//!
//! The input is permuted once (bit reversal of the position), then every
//! stage runs the same data flow on the whole array:
//!
//! ```text
//! even = section(data, 0, n/2, 2)
//! odd  = section(data, 1, n/2, 2)
//! up   = even + odd
//! down = (even - odd) * stage_twiddles[t]
//! data = cat(up, down)
//! ```
//!
//! and the result comes out in natural frequency order. With `m = s - t`
//! for stage `t` of `s`, butterfly `k` of the stage works on a
//! sub-transform of length `2^m` and needs `W^(r * 2^t)`, where `r` is the
//! `m - 1` bit reversal of `k mod 2^(m-1)` and `W = exp(-2 pi i / n)`.

use std::f64::consts::PI;

use crate::containers::DenseVector;
use crate::element::C64;
use crate::ops::{self, EwiseOp};
use crate::{Error, Result};

/// Precomputed permutation and twiddle vectors for one length.
#[derive(Clone, Debug, PartialEq)]
pub struct FftPlan {
    n: usize,
    twiddles: DenseVector<C64>,
    stage_twiddles: Vec<DenseVector<C64>>,
    tangle: DenseVector<i32>,
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `exp(-2 pi i j / n)`, with the quarter turns exact.
fn twiddle(j: usize, n: usize) -> C64 {
    if (4 * j).is_multiple_of(n) {
        return match 4 * j / n {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
    }
    let (s, c) = (-2.0 * PI * j as f64 / n as f64).sin_cos();
    C64::new(c, s)
}

/// Plan for length `n`, which must be a power of two.
pub fn make_fft_plan(n: usize) -> Result<FftPlan> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!("FFT length must be a power of two, got {n}")));
    }
    if n > i32::MAX as usize {
        return Err(Error::Parameter(format!("FFT length {n} exceeds 32-bit indexing")));
    }
    let s = n.trailing_zeros();
    let twiddles: Vec<C64> = (0..n / 2).map(|j| twiddle(j, n)).collect();
    let stage_twiddles = (0..s)
        .map(|t| {
            let m = s - t;
            let half = 1usize << (m - 1);
            let v = (0..n / 2).map(|k| twiddles[bit_reverse(k % half, m - 1) << t]).collect();
            DenseVector::from_vec(v)
        })
        .collect();
    let tangle = (0..n).map(|p| bit_reverse(p, s) as i32).collect();
    Ok(FftPlan {
        n,
        twiddles: DenseVector::from_vec(twiddles),
        stage_twiddles,
        tangle: DenseVector::from_vec(tangle),
    })
}

impl FftPlan {
    /// Rebuild a plan around the given permutation and stage vectors, e.g.
    /// capture inputs standing in for a plan's own vectors.
    pub fn with_vectors(&self, tangle: DenseVector<i32>, stage_twiddles: Vec<DenseVector<C64>>) -> Result<FftPlan> {
        if tangle.len() != self.n
            || stage_twiddles.len() != self.stage_twiddles.len()
            || stage_twiddles.iter().any(|v| v.len() != self.n / 2)
        {
            return Err(Error::Shape("plan vectors do not match the plan length".into()));
        }
        Ok(FftPlan { n: self.n, twiddles: self.twiddles.clone(), stage_twiddles, tangle })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stages(&self) -> usize {
        self.stage_twiddles.len()
    }

    /// `twiddles[j] = exp(-2 pi i j / n)` for `j < n / 2`.
    pub fn twiddles(&self) -> &DenseVector<C64> {
        &self.twiddles
    }

    pub fn stage_twiddles(&self) -> &[DenseVector<C64>] {
        &self.stage_twiddles
    }

    /// Input permutation: stage 0 reads `f[tangle[p]]` at position `p`.
    pub fn tangle(&self) -> &DenseVector<i32> {
        &self.tangle
    }
}

/// Forward transform `F[k] = sum_j f[j] exp(-2 pi i k j / n)`.
pub fn fft_forward(plan: &FftPlan, f: &DenseVector<C64>) -> Result<DenseVector<C64>> {
    if f.len() != plan.n {
        return Err(Error::Shape(format!("signal of length {} for a plan of length {}", f.len(), plan.n)));
    }
    let half = plan.n / 2;
    let mut data = ops::gather(f, &plan.tangle)?;
    for tw in &plan.stage_twiddles {
        let even = ops::section(&data, 0, half, 2)?;
        let odd = ops::section(&data, 1, half, 2)?;
        let up = ops::ewise(EwiseOp::Add, &even, &odd)?;
        let down = ops::ewise_into(EwiseOp::Mul, ops::ewise_into(EwiseOp::Sub, even, &odd)?, tw)?;
        data = ops::cat(&up, &down);
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn plan_basics() {
        let p = make_fft_plan(2).unwrap();
        assert_eq!(p.twiddles().to_host(), vec![c(1.0, 0.0)]);
        assert_eq!(p.stages(), 1);
        let p8 = make_fft_plan(8).unwrap();
        assert_eq!(p8.twiddles().get(2).unwrap(), c(0.0, -1.0));
        assert_eq!(p8.tangle().to_host(), vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert_eq!(make_fft_plan(1).unwrap().stages(), 0);
        for bad in [0, 3, 12] {
            assert!(matches!(make_fft_plan(bad), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn two_point_butterfly() {
        let p = make_fft_plan(2).unwrap();
        let f = DenseVector::from_vec(vec![c(1.0, 2.0), c(3.0, -1.0)]);
        assert_eq!(fft_forward(&p, &f).unwrap().to_host(), vec![c(4.0, 1.0), c(-2.0, 3.0)]);
    }

    #[test]
    fn length_one_is_identity() {
        let p = make_fft_plan(1).unwrap();
        let f = DenseVector::from_vec(vec![c(0.5, -0.25)]);
        assert_eq!(fft_forward(&p, &f).unwrap(), f);
    }

    #[test]
    fn length_mismatch() {
        let p = make_fft_plan(4).unwrap();
        let f = DenseVector::from_vec(vec![c(0.0, 0.0); 2]);
        assert!(matches!(fft_forward(&p, &f), Err(Error::Shape(_))));
    }

    #[test]
    fn bit_reversal() {
        assert_eq!(bit_reverse(0b001, 3), 0b100);
        assert_eq!(bit_reverse(0b110, 3), 0b011);
        assert_eq!(bit_reverse(5, 0), 0);
    }
}
