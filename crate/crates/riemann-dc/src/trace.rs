//! Per-iteration solve records and global counters.

use serde::Serialize;

/// Why the outer loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The near-stationarity certificate held.
    Certificate,
    /// Step and objective change both fell below the fallback thresholds.
    Fallback,
    /// Iteration budget exhausted.
    MaxOuter,
}

/// One outer iteration. `tau` is `None` on the terminal row, where the
/// certificate fired before any line search ran. `sub_tol` is `None` when
/// h ≡ 0 and the subproblem is solved in closed form.
#[derive(Clone, Debug, Serialize)]
pub struct IterRecord {
    /// Objective F(x_j).
    pub f: f64,
    /// Augmented objective F(x_j) + ρτ₋ℓ₋‖η₋‖²/2 used by the line search.
    pub f_aug: f64,
    pub eta_norm: f64,
    pub tau: Option<f64>,
    /// Curvature estimate ℓ_j.
    pub ell: f64,
    /// Per-iteration accuracy ε_j = min(1/ℓ_j, 1)·ε.
    pub accuracy: f64,
    /// Dual gradient tolerance handed to the subproblem solver.
    pub sub_tol: Option<f64>,
    /// Certificate slack χ_j.
    pub cert_slack: f64,
    pub inner_iters: usize,
    pub prox_evals: usize,
    /// Retractions spent in the line search for this iteration.
    pub ls_trials: usize,
    pub ls_capped: bool,
    pub inner_capped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveTrace {
    pub iterations: Vec<IterRecord>,
    /// Completed iterate updates (rows with a step length).
    pub outer_iters: usize,
    pub grad_evals: usize,
    pub retractions: usize,
    pub prox_evals: usize,
    pub inner_iters: usize,
    pub termination: Termination,
    /// Wall-clock seconds, total and inside the dual solver. Excluded from
    /// determinism comparisons.
    pub time_s: f64,
    pub time_sub_s: f64,
}

impl SolveTrace {
    /// Final objective value (from the last recorded row).
    pub fn final_f(&self) -> f64 {
        self.iterations.last().map(|r| r.f).unwrap_or(f64::NAN)
    }

    /// Mean inner iterations per outer row.
    pub fn inner_mean(&self) -> f64 {
        if self.iterations.is_empty() {
            0.0
        } else {
            self.inner_iters as f64 / self.iterations.len() as f64
        }
    }

    /// Checks that the global counters equal the per-row sums.
    pub fn counters_consistent(&self) -> bool {
        let prox: usize = self.iterations.iter().map(|r| r.prox_evals).sum();
        let inner: usize = self.iterations.iter().map(|r| r.inner_iters).sum();
        let retr: usize = self.iterations.iter().map(|r| r.ls_trials).sum();
        let updates = self.iterations.iter().filter(|r| r.tau.is_some()).count();
        prox == self.prox_evals
            && inner == self.inner_iters
            && retr == self.retractions
            && updates == self.outer_iters
    }

    /// Column-oriented view of the per-iteration records for serialization.
    pub fn arrays(&self) -> TraceArrays {
        TraceArrays {
            f: self.iterations.iter().map(|r| r.f).collect(),
            f_aug: self.iterations.iter().map(|r| r.f_aug).collect(),
            eta_norm: self.iterations.iter().map(|r| r.eta_norm).collect(),
            tau: self.iterations.iter().map(|r| r.tau).collect(),
            ell: self.iterations.iter().map(|r| r.ell).collect(),
            accuracy: self.iterations.iter().map(|r| r.accuracy).collect(),
            sub_tol: self.iterations.iter().map(|r| r.sub_tol).collect(),
            cert_slack: self.iterations.iter().map(|r| r.cert_slack).collect(),
            inner_iters: self.iterations.iter().map(|r| r.inner_iters).collect(),
            prox_evals: self.iterations.iter().map(|r| r.prox_evals).collect(),
            ls_trials: self.iterations.iter().map(|r| r.ls_trials).collect(),
        }
    }
}

/// Structure-of-arrays form of the trace, the shape emitted in JSON reports.
#[derive(Clone, Debug, Serialize)]
pub struct TraceArrays {
    pub f: Vec<f64>,
    pub f_aug: Vec<f64>,
    pub eta_norm: Vec<f64>,
    pub tau: Vec<Option<f64>>,
    pub ell: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub sub_tol: Vec<Option<f64>>,
    pub cert_slack: Vec<f64>,
    pub inner_iters: Vec<usize>,
    pub prox_evals: Vec<usize>,
    pub ls_trials: Vec<usize>,
}
