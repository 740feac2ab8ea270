use rnm_core::linalg::{sym_eig, Matrix};
use rnm_core::optimizer::{check_smoothness, check_strong_convexity, Problem};
use rnm_core::problems::{
    dual_krr_problem, gaussian_data, gaussian_mixture_data, gaussian_mixture_labeled, gram_matrix,
    logistic_problem, primal_ridge_problem, synth_spectrum_matrix, DataSet, KernelSpec,
    LogisticOptions, MaternOrder, QuadraticProblem, ResponseModel,
};
use rnm_core::rng::RngStream;

fn kernels() -> Vec<KernelSpec<f64>> {
    vec![
        KernelSpec::Linear,
        KernelSpec::SquaredExponential { lengthscale: 0.8 },
        KernelSpec::Matern { order: MaternOrder::Half, scale: 1.0, amplitude: 1.0 },
        KernelSpec::Matern { order: MaternOrder::ThreeHalves, scale: 2.0, amplitude: 0.5 },
        KernelSpec::Matern { order: MaternOrder::FiveHalves, scale: 0.5, amplitude: 2.0 },
    ]
}

fn check_problem<P: Problem<f64>>(p: &P, seed: u64) {
    let mut rng = RngStream::new(seed, 0);
    let smooth = check_smoothness(p, 100, 1.0, &mut rng);
    assert!(smooth.passed(), "smoothness: {smooth:?}");
    let convex = check_strong_convexity(p, 100, 1.0, &mut rng);
    assert!(convex.passed(), "strong convexity: {convex:?}");
}

#[test]
fn generated_problems_pass_spot_checks() {
    let mut rng = RngStream::new(1, 0);
    let data: DataSet<f64> =
        gaussian_mixture_data(60, 3, 4, 3.0, ResponseModel::default(), &mut rng).unwrap();
    for (i, k) in kernels().iter().enumerate() {
        let p = dual_krr_problem(k, &data, 1e-2).unwrap();
        check_problem(&p, i as u64);
    }
    let lin: DataSet<f64> =
        gaussian_data(40, 6, 1.0, ResponseModel::Linear { noise: 0.1 }, &mut rng).unwrap();
    check_problem(&primal_ridge_problem(&lin, 0.5).unwrap(), 10);

    let lambdas = [9.0, 4.0, 1.0, 0.25, 0.01];
    let m = synth_spectrum_matrix(&lambdas, &mut rng).unwrap();
    let xs: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
    check_problem(&QuadraticProblem::with_minimizer(m, &xs).unwrap(), 11);

    let y: Vec<f64> = (0..lin.len()).map(|i| if lin.responses()[i] > 0.0 { 1.0 } else { -1.0 }).collect();
    let labelled = DataSet::new(lin.points().clone(), y).unwrap();
    let opts = LogisticOptions { metric_ridge: 0.0, kappa: None, rel_smoothness: None };
    let logit = logistic_problem(&labelled, opts).unwrap();
    let mut rng = RngStream::new(12, 0);
    assert!(check_smoothness(&logit, 100, 1.0, &mut rng).passed());
}

#[test]
fn krr_metric_is_shifted_gram() {
    let mut rng = RngStream::new(2, 0);
    let data: DataSet<f64> = gaussian_data(30, 2, 1.5, ResponseModel::default(), &mut rng).unwrap();
    let lambda = 0.3;
    for k in kernels() {
        let gram = gram_matrix(&k, &data).unwrap();
        let g = sym_eig(&gram).unwrap();
        let top = g.lambda_max();
        assert!(g.lambda_min() >= -1e-8 * top, "{k:?}");
        let p = dual_krr_problem(&k, &data, lambda).unwrap();
        let m = sym_eig(p.metric()).unwrap();
        for (a, b) in m.eigenvalues().iter().zip(g.eigenvalues()) {
            assert!((a - (b / 30.0 + lambda)).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn mixture_cluster_proportions() {
    let mut rng = RngStream::new(3, 0);
    let (_, labels) =
        gaussian_mixture_labeled::<f64>(8000, 2, 8, 4.0, ResponseModel::default(), &mut rng).unwrap();
    let mut counts = [0usize; 8];
    labels.iter().for_each(|&l| counts[l] += 1);
    let se = (8000.0f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
    for c in counts {
        assert!((c as f64 - 1000.0).abs() <= 3.5 * se, "{counts:?}");
    }
}

#[test]
fn generators_are_deterministic() {
    let make = || {
        let mut rng = RngStream::new(99, 4);
        let d: DataSet<f64> =
            gaussian_mixture_data(50, 3, 5, 2.0, ResponseModel::default(), &mut rng).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, &[]).unwrap();
        buf
    };
    assert_eq!(make(), make());
}

#[test]
fn data_csv_round_trip() {
    let pts = Matrix::from_rows(&[vec![0.5, -1.25], vec![3.0, 1e-3]]).unwrap();
    let data = DataSet::new(pts, vec![1.0, -2.5]).unwrap();
    let mut buf = Vec::new();
    data.write_csv(&mut buf, &["source: test".to_string()]).unwrap();
    let back = DataSet::<f64>::read_csv(&buf[..]).unwrap();
    assert_eq!(back, data);
}
