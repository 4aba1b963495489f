use parabl::oracles::dft_naive;
use parabl::{DenseVector, C64};
use parabl_web::{banded_pattern, cg_residuals, sparse_pattern, spectrum, test_signal};

#[test]
fn pure_tone_peaks_in_its_bin() {
    let n = 256;
    let x: Vec<f64> = (0..n).map(|j| (2.0 * std::f64::consts::PI * 10.0 * j as f64 / n as f64).cos()).collect();
    let s = spectrum(&x).unwrap();
    assert_eq!(s.len(), n / 2 + 1);
    assert!((s[10] - 0.5).abs() < 1e-12);
    assert!(s.iter().enumerate().filter(|&(k, _)| k != 10).all(|(_, &m)| m < 1e-12));
}

#[test]
fn spectrum_matches_direct_transform() {
    let x = test_signal(128, 5.0, 17.0, 0.3, 9);
    let want = dft_naive(&DenseVector::from_vec(x.iter().map(|&v| C64::new(v, 0.0)).collect()));
    let got = spectrum(&x).unwrap();
    for (k, m) in got.iter().enumerate() {
        assert!((m - want.get(k).unwrap().norm() / 128.0).abs() < 1e-12, "bin {k}");
    }
}

#[test]
fn spectrum_rejects_bad_lengths() {
    assert!(spectrum(&[1.0; 100]).is_err());
    assert!(spectrum(&[]).is_err());
    assert!(spectrum(&vec![0.0; 1 << 17]).is_err());
}

#[test]
fn cg_residuals_fall_below_tolerance() {
    for runs in [false, true] {
        let h = cg_residuals(256, 31, runs).unwrap();
        assert_eq!(h[0], 1.0);
        assert!(*h.last().unwrap() <= 1e-8);
        assert!(h.len() <= 2 * 256 + 1);
    }
    assert_eq!(cg_residuals(256, 31, false).unwrap(), cg_residuals(256, 31, true).unwrap());
    assert!(cg_residuals(10, 4, true).is_err());
    assert!(cg_residuals(0, 3, true).is_err());
}

#[test]
fn patterns_list_every_nonzero() {
    let p = sparse_pattern(100, 3.5, 42).unwrap();
    assert_eq!(p.len(), 2 * 400);
    assert!(p.chunks(2).all(|rc| rc[0] < 100 && rc[1] < 100));
    let band = banded_pattern(6, 3).unwrap();
    let pairs: Vec<(u32, u32)> = band.chunks(2).map(|rc| (rc[0], rc[1])).collect();
    assert_eq!(pairs.len(), 16);
    assert!(pairs.iter().all(|&(i, j)| i.abs_diff(j) <= 1));
    assert!(sparse_pattern(100, 0.0, 1).is_err());
    assert!(banded_pattern(5000, 3).is_err());
}
