use proptest::prelude::*;
use rnm_core::linalg::{
    pinv, placed_pinv, principal_submatrix, psd_order_leq, sym_eig, CoordSubset, Matrix,
    SymMatrix,
};
use rnm_core::problems::synth_spectrum_matrix;
use rnm_core::rng::RngStream;

fn random_psd(d: usize, rank: usize, seed: u64) -> SymMatrix<f64> {
    let mut rng = RngStream::new(seed, 0);
    let lambdas: Vec<f64> = (0..d)
        .map(|i| if i < rank { 0.1 + 5.0 * rng.uniform() } else { 0.0 })
        .collect();
    synth_spectrum_matrix(&lambdas, &mut rng).unwrap()
}

fn random_mask(d: usize, seed: u64) -> CoordSubset {
    let mut rng = RngStream::new(seed, 1);
    let idx: Vec<usize> = (0..d).filter(|_| rng.bernoulli(0.5)).collect();
    CoordSubset::new(d, idx).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn placed_pinv_is_moore_penrose(d in 1usize..10, seed in any::<u64>()) {
        let m = random_psd(d, d, seed);
        let s = random_mask(d, seed);
        prop_assume!(!s.is_empty());
        let p = placed_pinv(&m, &s).unwrap();
        let pmp = p.as_matrix().matmul(m.as_matrix()).unwrap().matmul(p.as_matrix()).unwrap();
        prop_assert!(pmp.sub(p.as_matrix()).unwrap().max_abs() <= 1e-10 * (1.0 + p.max_abs()));

        let block = principal_submatrix(&p, &s).unwrap();
        let mss = principal_submatrix(&m, &s).unwrap();
        let prod = block.as_matrix().matmul(mss.as_matrix()).unwrap();
        let eye = Matrix::identity(s.len());
        prop_assert!(prod.sub(&eye).unwrap().max_abs() <= 1e-10 * (1.0 + block.max_abs() * mss.max_abs()));
    }

    #[test]
    fn pinv_of_rank_deficient(d in 2usize..9, seed in any::<u64>()) {
        let rank = 1 + (seed as usize % (d - 1));
        let m = random_psd(d, rank, seed);
        let (p, r) = pinv(&m).unwrap();
        prop_assert_eq!(r, d - rank);
        let a = m.as_matrix();
        let mpm = a.matmul(p.as_matrix()).unwrap().matmul(a).unwrap();
        prop_assert!(mpm.sub(a).unwrap().max_abs() <= 1e-9 * (1.0 + m.max_abs()));
    }

    #[test]
    fn eigen_reconstruction(d in 1usize..=64, seed in any::<u64>()) {
        let m = random_psd(d, d, seed);
        let spec = sym_eig(&m).unwrap();
        let scale = 1.0 + m.max_abs();
        prop_assert!(spec.reconstruct().sub(&m).unwrap().max_abs() <= 1e-10 * scale * d as f64);
        let v = spec.eigenvectors();
        let vtv = v.transpose().matmul(v).unwrap();
        prop_assert!(vtv.sub(&Matrix::identity(d)).unwrap().max_abs() <= 1e-10 * d as f64);
        let l = spec.eigenvalues();
        prop_assert!(l.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn psd_order_of_shift(d in 1usize..8, seed in any::<u64>(), t in 0.0f64..3.0) {
        let m = random_psd(d, d, seed);
        prop_assert!(psd_order_leq(&m, &m.shifted(t), 1e-12).unwrap());
        prop_assert!(!psd_order_leq(&m.shifted(t + 1e-3), &m, 1e-12).unwrap());
    }
}

#[test]
fn worked_examples() {
    let m = SymMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let p0 = placed_pinv(&m, &CoordSubset::new(2, vec![0]).unwrap()).unwrap();
    assert_eq!(p0.get(0, 0), 0.5);
    assert_eq!(p0.get(1, 1), 0.0);
    let pf = placed_pinv(&m, &CoordSubset::full(2)).unwrap();
    assert!((pf.get(0, 0) - 2.0 / 3.0).abs() < 1e-15 && (pf.get(0, 1) + 1.0 / 3.0).abs() < 1e-15);
    let spec = sym_eig(&m).unwrap();
    assert!((spec.eigenvalues()[0] - 3.0).abs() < 1e-14 && (spec.eigenvalues()[1] - 1.0).abs() < 1e-14);
    let e = placed_pinv(&SymMatrix::<f64>::identity(3), &CoordSubset::new(3, vec![1]).unwrap()).unwrap();
    assert_eq!(e.get(1, 1), 1.0);
    assert_eq!(e.frobenius_norm(), 1.0);
    assert!(placed_pinv(&m, &CoordSubset::empty(2)).unwrap().max_abs() == 0.0);
}

#[test]
fn f32_eigen_agrees_with_f64() {
    let m64 = random_psd(6, 6, 11);
    let rows32: Vec<Vec<f32>> = (0..6).map(|i| (0..6).map(|j| m64.get(i, j) as f32).collect()).collect();
    let m32 = SymMatrix::<f32>::from_rows(&rows32).unwrap();
    let l64 = sym_eig(&m64).unwrap();
    let l32 = sym_eig(&m32).unwrap();
    for (a, b) in l64.eigenvalues().iter().zip(l32.eigenvalues()) {
        assert!((a - *b as f64).abs() < 1e-4 * (1.0 + a.abs()));
    }
}
