//! Inexact proximal solver for nonsmooth difference-of-convex objectives
//! F = f + h − g over the sphere and Stiefel manifolds.
//!
//! The per-iteration model subproblem is solved inexactly through its dual,
//! with the dual gradient norm as the computable accuracy certificate; three
//! first-order dual solvers are provided, together with a sparse-PCA
//! experiment harness (capped-ℓ1 and ℓ1-minus-largest-k relaxations of the
//! ℓ0 models, continuation sweeps, sparsity certificates and machine-readable
//! run reports).

pub mod io;
pub mod manifold;
pub mod objective;
pub mod penalty;
pub mod solver;
pub mod spca;
pub mod subproblem;
pub mod trace;

pub use manifold::{
    random_point, random_tangent, retract, riemannian_gradient, tangent_project, NormalBasis,
    StiefelPoint, TangentVector,
};
pub use objective::{DcObjective, SmoothFn};
pub use penalty::{capped_l1, largest_k_norm, ConcavePart, SeparablePenalty};
pub use solver::{solve, SolveError, SolveOutcome, SolverConfig};
pub use spca::{sk_distance, SpcaInstance, SpcaMetrics, SpcaModel, SweepOptions};
pub use subproblem::{exact_oracle, BbParams, DualSolveResult, SubproblemData, SubsolverKind};
pub use trace::{SolveTrace, Termination};
