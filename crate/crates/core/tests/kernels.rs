use parabl::harness::{gen_banded_spd, gen_dense, gen_signal, gen_sparse, Rng};
use parabl::kernels::{
    cg_solve, fft_forward, make_fft_plan, mxm0, mxm1, mxm2a, mxm2b, spmv1, spmv2, CgParams, CsrMatrix, SpmvVariant,
};
use parabl::oracles::{dense_solve, dft_naive, mxm_naive, spmv_serial};
use parabl::{with_execution, DenseMatrix, DenseVector, Error, ExecutionConfig, C64};
use proptest::prelude::*;

fn rel_linf(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

fn all_mxm(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Vec<(&'static str, DenseMatrix<f64>)> {
    let u = 8.min(a.rows());
    vec![
        ("mxm0", mxm0(a, b).unwrap()),
        ("mxm1", mxm1(a, b).unwrap()),
        ("mxm2a", mxm2a(a, b).unwrap()),
        ("mxm2b", mxm2b(a, b, u).unwrap()),
    ]
}

fn sample_csr() -> CsrMatrix {
    CsrMatrix::new(3, 3, vec![10., 2., 3., 1., 4.], vec![0, 2, 1, 0, 2], vec![0, 2, 3, 5]).unwrap()
}

fn ones(n: usize) -> DenseVector<f64> {
    DenseVector::from_vec(vec![1.0; n])
}

#[test]
fn mxm_small_product() {
    let a = DenseMatrix::from_host(&[1., 2., 3., 4.], 2, 2).unwrap();
    let b = DenseMatrix::from_host(&[5., 6., 7., 8.], 2, 2).unwrap();
    for (name, c) in all_mxm(&a, &b) {
        assert_eq!(c.to_host(), vec![19., 22., 43., 50.], "{name}");
    }
}

#[test]
fn mxm_identity_and_zero() {
    let b = gen_dense(5, 3).unwrap();
    let id = DenseMatrix::identity(5).unwrap();
    for (name, c) in all_mxm(&id, &b) {
        assert_eq!(c, b, "{name}");
    }
    for (name, c) in all_mxm(&b, &id) {
        assert_eq!(c, b, "{name}");
    }
    let z = DenseMatrix::from_vec(vec![0.0; 25], 5, 5).unwrap();
    assert!(mxm2a(&z, &b).unwrap().to_host().iter().all(|&x| x == 0.0));
}

#[test]
fn mxm_matches_oracle_over_seeds() {
    for n in [1, 3, 10, 17, 33, 64] {
        for seed in 0..20 {
            let (a, b) = (gen_dense(n, seed).unwrap(), gen_dense(n, seed + 1000).unwrap());
            let want = mxm_naive(&a, &b).unwrap().to_host();
            for (name, c) in all_mxm(&a, &b) {
                let err = rel_linf(&c.to_host(), &want);
                assert!(err <= 1e-12 * n as f64, "{name} n={n} seed={seed}: {err:e}");
            }
        }
    }
}

#[test]
fn mxm2b_blocking_edges() {
    let (a, b) = (gen_dense(10, 4).unwrap(), gen_dense(10, 5).unwrap());
    let want = mxm_naive(&a, &b).unwrap().to_host();
    for u in 1..=10 {
        let err = rel_linf(&mxm2b(&a, &b, u).unwrap().to_host(), &want);
        assert!(err <= 1e-11, "u={u}: {err:e}");
    }
    let full = mxm2b(&a, &b, 10).unwrap().to_host();
    assert!(rel_linf(&full, &mxm2a(&a, &b).unwrap().to_host()) <= 1e-11);
    assert!(matches!(mxm2b(&a, &b, 0), Err(Error::Parameter(_))));
}

#[test]
fn mxm2b_at_benchmark_size() {
    let (a, b) = (gen_dense(192, 6).unwrap(), gen_dense(192, 7).unwrap());
    let err = rel_linf(&mxm2b(&a, &b, 8).unwrap().to_host(), &mxm_naive(&a, &b).unwrap().to_host());
    assert!(err <= 1e-12 * 192.0, "{err:e}");
}

#[test]
fn mxm_shape_mismatch() {
    let a = DenseMatrix::from_vec(vec![1.0; 6], 2, 3).unwrap();
    let b = DenseMatrix::from_vec(vec![1.0; 4], 2, 2).unwrap();
    assert!(matches!(mxm1(&a, &b), Err(Error::Shape(_))));
    assert!(matches!(mxm0(&b, &a), Err(Error::Shape(_))));
}

#[test]
fn spmv_small_examples() {
    let m = sample_csr();
    for out in [spmv1(&m, &ones(3)), spmv2(&m, &ones(3)), spmv_serial(&m, &ones(3))] {
        assert_eq!(out.unwrap().to_host(), vec![12., 3., 5.]);
    }
    let dense = m.to_dense();
    let by_rows: Vec<f64> = (0..3).map(|i| dense.row(i).unwrap().to_host().iter().sum()).collect();
    assert_eq!(by_rows, vec![12., 3., 5.]);

    let id = CsrMatrix::from_dense(&DenseMatrix::identity(4).unwrap()).unwrap();
    let x = DenseVector::from_vec(vec![0.5, -1.0, 2.0, 3.25]);
    assert_eq!(spmv1(&id, &x).unwrap(), x);
    assert_eq!(spmv2(&id, &x).unwrap(), x);

    let gap = CsrMatrix::new(3, 2, vec![1., 2.], vec![0, 1], vec![0, 2, 2, 2]).unwrap();
    assert_eq!(spmv1(&gap, &ones(2)).unwrap().to_host(), vec![3., 0., 0.]);
    assert_eq!(spmv2(&gap, &ones(2)).unwrap().to_host(), vec![3., 0., 0.]);
}

#[test]
fn spmv_contiguous_and_scattered_rows() {
    let band = gen_banded_spd(40, 9).unwrap();
    let x = DenseVector::from_vec((0..40).map(|i| (i as f64).sin()).collect());
    assert!(spmv1(&band, &x).unwrap().bit_eq(&spmv2(&band, &x).unwrap()));

    let scattered = CsrMatrix::from_triplets(1, 1000, vec![(0, 0, 1.5), (0, 17, -2.0), (0, 900, 0.25)]).unwrap();
    let x = DenseVector::from_vec((0..1000).map(|i| i as f64).collect());
    let want = 1.5 * 0.0 - 2.0 * 17.0 + 0.25 * 900.0;
    assert_eq!(spmv1(&scattered, &x).unwrap().to_host(), vec![want]);
    assert_eq!(spmv2(&scattered, &x).unwrap().to_host(), vec![want]);
}

#[test]
fn spmv_rejects_wrong_vector_length() {
    assert!(matches!(spmv1(&sample_csr(), &ones(4)), Err(Error::Shape(_))));
    assert!(matches!(spmv2(&sample_csr(), &ones(2)), Err(Error::Shape(_))));
}

#[test]
fn fft_plan_basics() {
    let p2 = make_fft_plan(2).unwrap();
    assert_eq!(p2.twiddles().to_host(), vec![C64::new(1.0, 0.0)]);
    assert_eq!(p2.stages(), 1);
    let p8 = make_fft_plan(8).unwrap();
    assert_eq!(p8.twiddles().get(2).unwrap(), C64::new(0.0, -1.0));
    for bad in [0, 3, 12, 1000] {
        assert!(matches!(make_fft_plan(bad), Err(Error::Parameter(_))), "{bad}");
    }
}

#[test]
fn fft_analytic_cases() {
    let (a, b) = (C64::new(1.5, -2.0), C64::new(0.25, 3.0));
    let out = fft_forward(&make_fft_plan(2).unwrap(), &DenseVector::from_vec(vec![a, b])).unwrap();
    assert_eq!(out.to_host(), vec![a + b, a - b]);

    let mut delta = vec![C64::new(0.0, 0.0); 8];
    delta[0] = C64::new(1.0, 0.0);
    let out = fft_forward(&make_fft_plan(8).unwrap(), &DenseVector::from_vec(delta)).unwrap();
    assert!(out.to_host().iter().all(|z| (z - C64::new(1.0, 0.0)).norm() <= 1e-12));

    let out = fft_forward(&make_fft_plan(16).unwrap(), &DenseVector::from_vec(vec![C64::new(1.0, 0.0); 16])).unwrap();
    let out = out.to_host();
    assert!((out[0] - C64::new(16.0, 0.0)).norm() <= 1e-12);
    assert!(out[1..].iter().all(|z| z.norm() <= 1e-12));
}

#[test]
fn fft_single_frequency_lands_in_one_bin() {
    let n = 64;
    for k in [1usize, 5, 31, 63] {
        let f: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64))
            .collect();
        let out = fft_forward(&make_fft_plan(n).unwrap(), &DenseVector::from_vec(f)).unwrap().to_host();
        for (bin, z) in out.iter().enumerate() {
            let want = if bin == k { n as f64 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() <= 1e-10, "k={k} bin={bin} {z}");
        }
    }
}

#[test]
fn fft_matches_direct_summation() {
    let mut n = 2;
    while n <= 4096 {
        let plan = make_fft_plan(n).unwrap();
        for seed in 0..3 {
            let f = gen_signal(n, seed);
            let scale = f.to_host().iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let err = max_abs_diff(&fft_forward(&plan, &f).unwrap().to_host(), &dft_naive(&f).to_host());
            assert!(err <= 1e-9 * n as f64 * scale, "N={n}: {err:e}");
        }
        n *= 2;
    }
}

#[test]
fn fft_length_mismatch() {
    let plan = make_fft_plan(8).unwrap();
    assert!(matches!(fft_forward(&plan, &gen_signal(4, 1)), Err(Error::Shape(_))));
}

#[test]
fn dft_oracle_examples() {
    let f = DenseVector::from_vec([1., 2., 3., 4.].map(|x| C64::new(x, 0.0)).to_vec());
    let want = [C64::new(10., 0.), C64::new(-2., 2.), C64::new(-2., 0.), C64::new(-2., -2.)];
    assert!(max_abs_diff(&dft_naive(&f).to_host(), &want) <= 1e-12);
    let one = DenseVector::from_vec(vec![C64::new(0.3, -0.7)]);
    assert_eq!(dft_naive(&one), one);
}

#[test]
fn dft_oracle_satisfies_parseval() {
    for n in [1, 3, 16, 100, 256] {
        let f = gen_signal(n, n as u64).to_host();
        let big = dft_naive(&DenseVector::from_vec(f.clone())).to_host();
        let e_time: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        let e_freq: f64 = big.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((e_time - e_freq).abs() <= 1e-10 * e_time, "n={n}");
    }
}

#[test]
fn dense_solve_examples() {
    let a = DenseMatrix::from_host(&[4., 1., 1., 3.], 2, 2).unwrap();
    let x = dense_solve(&a, &DenseVector::from_vec(vec![1., 2.])).unwrap().to_host();
    assert!((x[0] - 1.0 / 11.0).abs() <= 1e-15 && (x[1] - 7.0 / 11.0).abs() <= 1e-15);
    let b = DenseVector::from_vec(vec![3., -1., 2.]);
    assert_eq!(dense_solve(&DenseMatrix::identity(3).unwrap(), &b).unwrap(), b);
    let one = DenseMatrix::from_host(&[4.0], 1, 1).unwrap();
    assert_eq!(dense_solve(&one, &DenseVector::from_vec(vec![2.0])).unwrap().to_host(), vec![0.5]);
    let singular = DenseMatrix::from_host(&[1., 2., 2., 4.], 2, 2).unwrap();
    assert!(matches!(dense_solve(&singular, &ones(2)), Err(Error::Singular(_))));
}

#[test]
fn cg_identity_converges_in_one_step() {
    let id = CsrMatrix::from_dense(&DenseMatrix::identity(6).unwrap()).unwrap();
    let b = DenseVector::from_vec(vec![1., -2., 3., 0.5, 0., 7.]);
    for spmv in [SpmvVariant::Spmv1, SpmvVariant::Spmv2] {
        let r = cg_solve(&id, &b, CgParams::for_size(6), spmv).unwrap();
        assert_eq!(r.iters, 1);
        assert_eq!(r.x, b);
    }
}

#[test]
fn cg_two_by_two() {
    let a = CsrMatrix::from_dense(&DenseMatrix::from_host(&[4., 1., 1., 3.], 2, 2).unwrap()).unwrap();
    let r = cg_solve(&a, &DenseVector::from_vec(vec![1., 2.]), CgParams::for_size(2), SpmvVariant::Spmv2).unwrap();
    let x = r.x.to_host();
    assert!(r.iters <= 2);
    assert!((x[0] - 1.0 / 11.0).abs() <= 1e-12 && (x[1] - 7.0 / 11.0).abs() <= 1e-12, "{x:?}");
}

#[test]
fn cg_banded_matches_dense_solve() {
    for (n, bw) in [(64, 3), (64, 31), (128, 63)] {
        let a = gen_banded_spd(n, bw).unwrap();
        let b = DenseVector::from_vec((0..n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect());
        let want = dense_solve(&a.to_dense(), &b).unwrap().to_host();
        for spmv in [SpmvVariant::Spmv1, SpmvVariant::Spmv2] {
            let r = cg_solve(&a, &b, CgParams::for_size(n), spmv).unwrap();
            assert!(rel_linf(&r.x.to_host(), &want) <= 1e-6, "n={n} bw={bw} {spmv}");
            assert_eq!(r.history.len(), r.iters + 1);
        }
    }
}

#[test]
fn cg_indefinite_matrix_breaks_down() {
    let a = CsrMatrix::from_dense(&DenseMatrix::from_host(&[1., 0., 0., -1.], 2, 2).unwrap()).unwrap();
    let err = cg_solve(&a, &DenseVector::from_vec(vec![0., 1.]), CgParams::for_size(2), SpmvVariant::Spmv1).unwrap_err();
    assert!(matches!(err, Error::Breakdown(_)), "{err}");
}

#[test]
fn kernels_are_worker_invariant() {
    let (a, b) = (gen_dense(48, 1).unwrap(), gen_dense(48, 2).unwrap());
    let sparse = gen_sparse(3000, 2.0, 3).unwrap();
    let x = DenseVector::from_vec((0..3000).map(|i| (i as f64 * 0.1).cos()).collect());
    let band = gen_banded_spd(2000, 31).unwrap();
    let rhs = ones(2000);
    let plan = make_fft_plan(1 << 14).unwrap();
    let f = gen_signal(1 << 14, 4);

    let run = || {
        let mut out: Vec<u64> = Vec::new();
        for (_, c) in all_mxm(&a, &b) {
            out.extend(c.to_host().iter().map(|v| v.to_bits()));
        }
        out.extend(spmv1(&sparse, &x).unwrap().to_host().iter().map(|v| v.to_bits()));
        out.extend(spmv2(&sparse, &x).unwrap().to_host().iter().map(|v| v.to_bits()));
        out.extend(fft_forward(&plan, &f).unwrap().to_host().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]));
        let r = cg_solve(&band, &rhs, CgParams::for_size(2000), SpmvVariant::Spmv2).unwrap();
        out.extend(r.x.to_host().iter().map(|v| v.to_bits()));
        out
    };
    let serial = run();
    for w in [1, 2, 4, 8] {
        let par = with_execution(ExecutionConfig::parallel(w).unwrap(), run).unwrap();
        assert!(par == serial, "workers {w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mxm_variants_match_oracle(n in 1usize..24, seed in any::<u64>()) {
        let (a, b) = (gen_dense(n, seed).unwrap(), gen_dense(n, seed ^ 0xABCD).unwrap());
        let want = mxm_naive(&a, &b).unwrap().to_host();
        for (name, c) in all_mxm(&a, &b) {
            let err = rel_linf(&c.to_host(), &want);
            prop_assert!(err <= 1e-12 * n as f64, "{} {:e}", name, err);
        }
    }

    #[test]
    fn spmv_variants_agree(n in 1usize..200, fill in 0.5f64..60.0, seed in any::<u64>()) {
        let m = gen_sparse(n, fill, seed).unwrap();
        let mut rng = Rng::new(seed.wrapping_add(1));
        let x = DenseVector::from_vec((0..n).map(|_| rng.next_signed()).collect());
        let want = spmv_serial(&m, &x).unwrap().to_host();
        let one = spmv1(&m, &x).unwrap().to_host();
        let two = spmv2(&m, &x).unwrap().to_host();
        prop_assert!(rel_linf(&one, &want) <= 1e-13);
        prop_assert!(rel_linf(&two, &want) <= 1e-13);
    }

    #[test]
    fn fft_is_linear(log_n in 1u32..11, seed in any::<u64>(), alpha_re in -2.0f64..2.0, alpha_im in -2.0f64..2.0) {
        let n = 1usize << log_n;
        let plan = make_fft_plan(n).unwrap();
        let alpha = C64::new(alpha_re, alpha_im);
        let (f, g) = (gen_signal(n, seed).to_host(), gen_signal(n, seed ^ 1).to_host());
        let mix: Vec<C64> = f.iter().zip(&g).map(|(a, b)| alpha * a + b).collect();
        let lhs = fft_forward(&plan, &DenseVector::from_vec(mix)).unwrap().to_host();
        let ff = fft_forward(&plan, &DenseVector::from_vec(f)).unwrap().to_host();
        let fg = fft_forward(&plan, &DenseVector::from_vec(g)).unwrap().to_host();
        let rhs: Vec<C64> = ff.iter().zip(&fg).map(|(a, b)| alpha * a + b).collect();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-9 * n as f64);
    }

    #[test]
    fn fft_preserves_energy(log_n in 1u32..13, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let f = gen_signal(n, seed);
        let big = fft_forward(&make_fft_plan(n).unwrap(), &f).unwrap().to_host();
        let e_time: f64 = f.to_host().iter().map(|z| z.norm_sqr()).sum();
        let e_freq: f64 = big.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        prop_assert!((e_time - e_freq).abs() <= 1e-9 * e_time);
    }

    #[test]
    fn cg_solves_banded_systems(n in 4usize..120, half in 1usize..8) {
        let bw = (2 * half + 1).min(2 * n - 1);
        let a = gen_banded_spd(n, bw).unwrap();
        let b = ones(n);
        let r = cg_solve(&a, &b, CgParams::for_size(n), SpmvVariant::Spmv2).unwrap();
        let ax = spmv_serial(&a, &r.x).unwrap().to_host();
        let res: f64 = ax.iter().map(|v| (v - 1.0) * (v - 1.0)).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-7 * (n as f64).sqrt());
    }
}
