//! The difference-of-convex objective F = f + h − g with Lipschitz metadata.

use nalgebra::DMatrix;

use crate::penalty::{ConcavePart, SeparablePenalty};

/// The smooth term f of the objective, with the two constants the solver
/// needs: a descent-inequality constant for ∇f and a Lipschitz constant for f
/// itself (both on the ambient matrix space; boundedness of the manifold
/// makes the latter finite for polynomials like the PCA objective).
pub trait SmoothFn {
    fn eval(&self, x: &DMatrix<f64>) -> f64;

    fn eval_grad(&self, x: &DMatrix<f64>) -> (f64, DMatrix<f64>);

    /// Constant L_f with f(y) ≤ f(x) + ⟨∇f(x), y−x⟩ + L_f/2·‖y−x‖².
    fn grad_lipschitz(&self) -> f64;

    /// Lipschitz constant of f near the manifold.
    fn value_lipschitz(&self) -> f64;
}

/// F(x) = f(x) + h(x) − g(x) on St(n,r).
#[derive(Clone, Debug)]
pub struct DcObjective<S> {
    pub smooth: S,
    pub h: SeparablePenalty,
    pub g: ConcavePart,
}

impl<S: SmoothFn> DcObjective<S> {
    pub fn new(smooth: S, h: SeparablePenalty, g: ConcavePart) -> Self {
        Self { smooth, h, g }
    }

    pub fn value(&self, x: &DMatrix<f64>) -> f64 {
        self.smooth.eval(x) + self.h.eval(x) - self.g.eval(x)
    }

    /// Uniform curvature bound 2·ι₂(L_f⁰ + L_g⁰ + L_h⁰) + ι₁²·L_f used to seed
    /// the per-iteration estimates, with the polar-retraction constants taken
    /// as ι₁ = ι₂ = 1.
    pub fn curvature_bound(&self, n: usize, r: usize) -> f64 {
        2.0 * (self.smooth.value_lipschitz() + self.g.lipschitz(n, r) + self.h.lipschitz(n, r))
            + self.smooth.grad_lipschitz()
    }
}

/// Quadratic test objective ½‖X − V‖² with known constants; used across the
/// test suites.
#[derive(Clone, Debug)]
pub struct QuadraticDistance {
    pub target: DMatrix<f64>,
}

impl SmoothFn for QuadraticDistance {
    fn eval(&self, x: &DMatrix<f64>) -> f64 {
        0.5 * (x - &self.target).norm_squared()
    }

    fn eval_grad(&self, x: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let diff = x - &self.target;
        (0.5 * diff.norm_squared(), diff)
    }

    fn grad_lipschitz(&self) -> f64 {
        1.0
    }

    fn value_lipschitz(&self) -> f64 {
        // ‖∇f(X)‖ = ‖X − V‖ ≤ √r + ‖V‖ on the manifold
        (self.target.ncols() as f64).sqrt() + self.target.norm()
    }
}
