use crate::linalg::{CoordSubset, SymMatrix};
use crate::scalar::Real;

/// A smooth objective together with its over-approximation metric `M`:
/// `f(x + h) ≤ f(x) + ⟨∇f(x), h⟩ + ½⟨h, M h⟩` for all `x, h`.
pub trait Problem<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn objective(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vec<T>;

    /// `∇_S f(x)` in the order of `s`. The default evaluates the full
    /// gradient; implementations should override it when the block can be
    /// computed on its own.
    fn partial_gradient(&self, x: &[T], s: &CoordSubset) -> Vec<T> {
        let g = self.gradient(x);
        s.iter().map(|i| g[i]).collect()
    }

    fn metric(&self) -> &SymMatrix<T>;

    /// Strong convexity constant relative to `M`, in `(0, 1]`.
    fn kappa(&self) -> T;

    /// `f(x*)` when known.
    fn optimum_value(&self) -> Option<T> {
        None
    }

    /// `f(x) - f(x*)` when the optimum is known, else `f(x)`.
    fn gap(&self, x: &[T]) -> T {
        let f = self.objective(x);
        match self.optimum_value() {
            Some(opt) => f - opt,
            None => f,
        }
    }

    fn hessian(&self, _x: &[T]) -> Option<SymMatrix<T>> {
        None
    }

    /// Relative smoothness constant `L̃` for the Hessian-metric step.
    fn rel_smoothness(&self) -> Option<T> {
        None
    }
}
