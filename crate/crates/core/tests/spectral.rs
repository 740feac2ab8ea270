use proptest::prelude::*;
use rnm_core::linalg::{psd_order_leq, sym_eig, Spectrum, SymMatrix};
use rnm_core::problems::synth_spectrum_matrix;
use rnm_core::rng::RngStream;
use rnm_core::samplers::{brute_force_expected_msub, dpp_expected_size};
use rnm_core::spectral::{
    eso_vector, eso_vector_spectral, exp_decay_curve, exp_size_remainder, sigma_at_size, sigma_recurrence_check,
    sparse_jump_factor, speedup_exact, speedup_lower_bound, speedup_valid_bound, DecayModel,
    EffortModel, TailConvention,
};

fn decreasing(d: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut l: Vec<f64> = (0..d).map(|_| (2.0 * rng.normal()).exp()).collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    l
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_residual(d in 1usize..=64, seed in any::<u64>()) {
        let l = decreasing(d, &mut RngStream::new(seed, 0));
        let r = sigma_recurrence_check(&Spectrum::from_eigenvalues(l).unwrap()).unwrap();
        prop_assert!(r.max_residual <= 1e-12, "{}", r.max_residual);
        prop_assert!(r.sigmas.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn eso_identity_and_spectral_domination(d in 1usize..=8, seed in any::<u64>(), ai in 0usize..3) {
        let alpha = [0.1, 1.0, 10.0][ai];
        let mut rng = RngStream::new(seed, 0);
        let lambdas: Vec<f64> = (0..d).map(|_| 0.1 + 5.0 * rng.uniform()).collect();
        let m = synth_spectrum_matrix(&lambdas, &mut rng).unwrap();
        let (v, p) = eso_vector(&m, alpha).unwrap();
        let diag = m.diag();
        for i in 0..d {
            prop_assert!((p[i] * v[i] - diag[i]).abs() <= 1e-12 * diag[i]);
        }
        let e = brute_force_expected_msub(&m, alpha).unwrap();
        let (v, p) = eso_vector_spectral(&m, alpha).unwrap();
        let pv: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a * b).collect();
        prop_assert!(psd_order_leq(&e, &SymMatrix::diagonal(&pv), 1e-9).unwrap());
    }

    #[test]
    fn eso_dominates_for_diagonal_metric(d in 1usize..=8, seed in any::<u64>(), ai in 0usize..3) {
        let alpha = [0.1, 1.0, 10.0][ai];
        let mut rng = RngStream::new(seed, 0);
        let diag: Vec<f64> = (0..d).map(|_| 0.1 + 5.0 * rng.uniform()).collect();
        let m = SymMatrix::diagonal(&diag);
        let (v, p) = eso_vector(&m, alpha).unwrap();
        let pv: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a * b).collect();
        let e = brute_force_expected_msub(&m, alpha).unwrap();
        prop_assert!(psd_order_leq(&e, &SymMatrix::diagonal(&pv), 1e-9).unwrap());
    }

    #[test]
    fn valid_speedup_bound_holds(d in 2usize..=40, seed in any::<u64>()) {
        let l = decreasing(d, &mut RngStream::new(seed, 0));
        let spec = Spectrum::from_eigenvalues(l.clone()).unwrap();
        let s1 = sigma_at_size(&spec, 1, TailConvention::Inclusive).unwrap();
        for tau in 1..=d {
            let exact = speedup_exact(&spec, tau, TailConvention::Inclusive).unwrap();
            let a: f64 = l[..tau - 1].iter().map(|x| x / l[d - 1]).sum();
            prop_assert!((exact - 1.0 / (1.0 - s1 * a)).abs() <= 1e-9 * exact);
            prop_assert!(speedup_valid_bound(&spec, tau).unwrap() <= exact * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exponential_size_bound(gamma in 0.1f64..0.9, lexp in 1.0f64..12.0, d in 5usize..40) {
        let lambda = gamma.powf(lexp);
        let model = DecayModel::Exponential { c: 1.0, gamma, lambda };
        let grid: Vec<usize> = (1..=d).collect();
        let c = exp_decay_curve(&model, d, &grid, &EffortModel::default()).unwrap();
        let q = model.q().unwrap();
        for pt in &c.points {
            let bound = pt.p + exp_size_remainder(gamma, d, pt.p as usize, q);
            prop_assert!(pt.expected_size <= bound + 1e-9);
        }
    }
}

#[test]
fn stated_speedup_factor_fails_under_both_conventions() {
    let spec = Spectrum::<f64>::from_eigenvalues(vec![3.0, 1.0]).unwrap();
    let claimed = speedup_lower_bound(&spec, 2).unwrap();
    for conv in [TailConvention::Inclusive, TailConvention::Exclusive] {
        assert!(speedup_exact(&spec, 2, conv).unwrap() < claimed, "{}", conv.name());
    }
    // Random spectra: the inclusive-convention claim holds exactly when
    // (1 + a) σ(1) ≥ 1, and that rarely happens.
    let mut rng = RngStream::new(8, 0);
    let (mut held, mut total) = (0, 0);
    for _ in 0..200 {
        let d = 2 + rng.below(20);
        let l = decreasing(d, &mut rng);
        let spec = Spectrum::from_eigenvalues(l).unwrap();
        let s1 = sigma_at_size(&spec, 1, TailConvention::Inclusive).unwrap();
        for tau in 2..=d {
            let claimed = speedup_lower_bound(&spec, tau).unwrap();
            let holds = speedup_exact(&spec, tau, TailConvention::Inclusive).unwrap() >= claimed * (1.0 - 1e-12);
            assert_eq!(holds, claimed * s1 >= 1.0 - 1e-12);
            held += holds as usize;
            total += 1;
        }
    }
    assert!(held < total);
}

#[test]
fn sparse_jump_grows_linearly() {
    let (d, s) = (64, 8);
    let mut prev: Option<f64> = None;
    for e in 1..9 {
        let ratio = 10f64.powi(e);
        let model = DecayModel::Sparse { s, mu: ratio, lambda: 1.0 };
        for conv in [TailConvention::Inclusive, TailConvention::Exclusive] {
            let j = sparse_jump_factor(&model, d, conv).unwrap();
            assert!((j - 1.0 - ratio / (d - s + 1) as f64).abs() <= 1e-12 * j);
        }
        let j = sparse_jump_factor(&model, d, TailConvention::Inclusive).unwrap();
        let doubled = DecayModel::Sparse { s, mu: 2.0 * ratio, lambda: 1.0 };
        let j2 = sparse_jump_factor(&doubled, d, TailConvention::Inclusive).unwrap();
        assert!(((j2 - 1.0) / (j - 1.0) - 2.0).abs() < 1e-12);
        if let Some(p) = prev {
            assert!(j > p);
        }
        prev = Some(j);
    }
}

#[test]
fn effort_curves_are_reproducible() {
    let model = DecayModel::Exponential { c: 1.0, gamma: 0.5, lambda: 2f64.powi(-10) };
    let grid: Vec<usize> = (1..=40).collect();
    let render = || {
        let c = exp_decay_curve(&model, 40, &grid, &EffortModel::default()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        buf
    };
    let a = render();
    assert_eq!(a, render());
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().any(|l| l == "p,alpha,expected_size,sigma,T,effort"));
}

#[test]
fn eso_two_by_two_gap() {
    let m = SymMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let (v, p) = eso_vector(&m, 1.0).unwrap();
    assert!((v[0] - 3.2).abs() < 1e-14 && (p[1] - 0.625).abs() < 1e-15);
    let e = brute_force_expected_msub(&m, 1.0).unwrap();
    assert!((e.get(0, 0) - 1.25).abs() < 1e-15 && (e.get(0, 1) - 0.375).abs() < 1e-15);
    let spec = sym_eig(&m).unwrap();
    assert!((p.iter().sum::<f64>() - dpp_expected_size(&spec, 1.0)).abs() < 1e-15);
}
