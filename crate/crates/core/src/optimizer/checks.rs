use crate::linalg::dot;
use crate::rng::RngStream;
use crate::scalar::Real;

use super::problem::Problem;

/// Relative slack allowed by the spot checks.
pub const SPOT_CHECK_REL_TOL: f64 = 1e-8;

/// Outcome of a randomized inequality check over `(x, h)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotCheck {
    pub pairs: usize,
    pub failures: usize,
    /// Largest violation divided by its tolerance; at most 1 when passing.
    pub worst_ratio: f64,
}

impl SpotCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_vec<T: Real>(d: usize, scale: f64, rng: &mut RngStream) -> Vec<T> {
    (0..d).map(|_| T::lit(scale * rng.normal())).collect()
}

fn spot_check<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    pairs: usize,
    scale: f64,
    rng: &mut RngStream,
    curvature: f64,
    upper: bool,
) -> SpotCheck {
    let d = p.dim();
    let mut out = SpotCheck {
        pairs,
        failures: 0,
        worst_ratio: 0.0,
    };
    for _ in 0..pairs {
        let x: Vec<T> = random_vec(d, scale, rng);
        let h: Vec<T> = random_vec(d, scale, rng);
        let xh: Vec<T> = x.iter().zip(&h).map(|(&a, &b)| a + b).collect();
        let fx = p.objective(&x).to_f64_lossy();
        let fxh = p.objective(&xh).to_f64_lossy();
        let lin = dot(&p.gradient(&x), &h).to_f64_lossy();
        let quad = p
            .metric()
            .quadratic_form(&h)
            .expect("dimension checked")
            .to_f64_lossy();
        let model = fx + lin + 0.5 * curvature * quad;
        let tol = SPOT_CHECK_REL_TOL * (1.0 + fx.abs() + lin.abs() + 0.5 * quad.abs());
        let violation = if upper { fxh - model } else { model - fxh };
        let ratio = violation / tol;
        out.worst_ratio = out.worst_ratio.max(ratio);
        if violation > tol || !violation.is_finite() {
            out.failures += 1;
        }
    }
    out
}

/// `f(x+h) ≤ f(x) + ⟨∇f(x),h⟩ + ½⟨h,Mh⟩` at random pairs with
/// coordinates drawn from `N(0, scale²)`.
pub fn check_smoothness<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    pairs: usize,
    scale: f64,
    rng: &mut RngStream,
) -> SpotCheck {
    spot_check(p, pairs, scale, rng, 1.0, true)
}

/// `f(x+h) ≥ f(x) + ⟨∇f(x),h⟩ + (κ/2)⟨h,Mh⟩` at random pairs.
pub fn check_strong_convexity<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    pairs: usize,
    scale: f64,
    rng: &mut RngStream,
) -> SpotCheck {
    let kappa = p.kappa().to_f64_lossy();
    spot_check(p, pairs, scale, rng, kappa, false)
}
