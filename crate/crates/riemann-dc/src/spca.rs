//! Sparse-PCA problem builders, metrics, continuation sweeps, and the
//! sparsity certificates that connect the difference-of-convex relaxations to
//! their ℓ0 counterparts on the sphere.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::manifold::StiefelPoint;
use crate::objective::{DcObjective, SmoothFn};
use crate::penalty::{largest_k_norm, ConcavePart, SeparablePenalty};
use crate::solver::{solve, SolveError, SolverConfig};
use crate::subproblem::{BbParams, SubsolverKind};
use crate::trace::Termination;

#[derive(Debug, Error)]
pub enum SpcaError {
    #[error("need r <= min(m, n), got r = {r} for a {m}x{n} data matrix")]
    BadShape { m: usize, n: usize, r: usize },
    #[error("subspace iteration did not reach residual {tol:.1e} in {iters} sweeps")]
    PcaConvergence { tol: f64, iters: usize },
    #[error("input is not on the unit sphere (norm {0})")]
    NotOnSphere(f64),
    #[error("the sparsity certificates are stated for the sphere only (r = 1), got r = {0}")]
    ThresholdNeedsSphere(usize),
    #[error("operation requires the {expected} model")]
    ModelMismatch { expected: &'static str },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which relaxation of the ℓ0 objective/constraint to solve. `gamma_tilde`
/// is the dimensionless penalty level; the effective γ is
/// γ̃·‖AX_pca‖²_F/(nr).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpcaModel {
    L1 { gamma_tilde: f64 },
    Capped { gamma_tilde: f64, upsilon: f64 },
    L1lk { gamma_tilde: f64, k: usize },
}

impl SpcaModel {
    pub fn gamma_tilde(&self) -> f64 {
        match *self {
            SpcaModel::L1 { gamma_tilde }
            | SpcaModel::Capped { gamma_tilde, .. }
            | SpcaModel::L1lk { gamma_tilde, .. } => gamma_tilde,
        }
    }
}

/// Smooth part f(X) = −tr(XᵀAᵀAX) = −‖AX‖²_F with ∇f = −2Aᵀ(AX);
/// L_f = 2‖AᵀA‖₂ and L_f⁰ = 2‖AᵀA‖₂·√r on the manifold.
#[derive(Clone, Debug)]
pub struct SpcaSmooth<'a> {
    data: &'a DMatrix<f64>,
    op_norm: f64,
    r: usize,
}

impl SmoothFn for SpcaSmooth<'_> {
    fn eval(&self, x: &DMatrix<f64>) -> f64 {
        -(self.data * x).norm_squared()
    }

    fn eval_grad(&self, x: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let ax = self.data * x;
        (-ax.norm_squared(), -2.0 * self.data.tr_mul(&ax))
    }

    fn grad_lipschitz(&self) -> f64 {
        2.0 * self.op_norm
    }

    fn value_lipschitz(&self) -> f64 {
        2.0 * self.op_norm * (self.r as f64).sqrt()
    }
}

/// Entries at or below this magnitude count as zero in the sparsity metric.
///
/// On the sphere the proximal steps produce exact zeros and any tolerance
/// works. For r ≥ 2 the polar retraction mixes columns and re-seeds
/// prox-zeroed entries each step, and the inexact dual solves leave a
/// direction-noise floor of order (L_h⁰·tol)^{1/2}, so structurally dead
/// entries settle near 1e−5..1e−4 instead of vanishing. 1e−3 sits above that
/// floor and below the smallest structurally alive magnitudes the models
/// produce here (capped survivors ≥ 1/υ, largest-k survivors around k^{-1/2}).
pub const ZERO_TOL: f64 = 1e-3;

/// Quality metrics of a candidate loading matrix: explained variance relative
/// to PCA, fraction of (numerically) zero entries, and the two ℓ0-model
/// objectives.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpcaMetrics {
    pub v_sc: f64,
    pub s_p: f64,
    pub obj_l0_reg: f64,
    pub obj_l0_con: f64,
}

/// One SPCA problem: a data matrix, the number of components and the chosen
/// relaxation, together with the PCA baseline used for scaling.
#[derive(Clone, Debug)]
pub struct SpcaInstance {
    data: DMatrix<f64>,
    r: usize,
    model: SpcaModel,
    seed: Option<u64>,
    x_pca: StiefelPoint,
    /// ‖A·X_pca‖²_F, the PCA variance.
    pca_energy: f64,
    /// ‖AᵀA‖₂ = σ₁(A)².
    op_norm: f64,
}

impl SpcaInstance {
    pub fn from_matrix(data: DMatrix<f64>, r: usize, model: SpcaModel) -> Result<Self, SpcaError> {
        let pca = pca_solution(&data, r)?;
        Ok(Self {
            data,
            r,
            model,
            seed: None,
            x_pca: pca.x,
            pca_energy: pca.energy,
            op_norm: pca.op_norm,
        })
    }

    /// Seeded instance with i.i.d. standard normal entries.
    pub fn generate(
        seed: u64,
        m: usize,
        n: usize,
        r: usize,
        model: SpcaModel,
    ) -> Result<Self, SpcaError> {
        let mut inst = Self::from_matrix(gaussian_data(seed, m, n), r, model)?;
        inst.seed = Some(seed);
        Ok(inst)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn m(&self) -> usize {
        self.data.nrows()
    }

    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn model(&self) -> &SpcaModel {
        &self.model
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn x_pca(&self) -> &StiefelPoint {
        &self.x_pca
    }

    pub fn pca_energy(&self) -> f64 {
        self.pca_energy
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    /// L_f⁰ = 2‖AᵀA‖₂√r.
    pub fn f_lipschitz(&self) -> f64 {
        2.0 * self.op_norm * (self.r as f64).sqrt()
    }

    /// Effective penalty γ = γ̃·‖AX_pca‖²_F/(nr).
    pub fn gamma(&self) -> f64 {
        self.gamma_for(self.model.gamma_tilde())
    }

    fn gamma_for(&self, gamma_tilde: f64) -> f64 {
        gamma_tilde * self.pca_energy / ((self.n() * self.r) as f64)
    }

    /// The objective for this instance's model.
    pub fn objective(&self) -> DcObjective<SpcaSmooth<'_>> {
        self.objective_for(&self.model)
    }

    /// The objective for an arbitrary model on the same data (sweeps vary the
    /// model parameters while reusing the PCA baseline).
    pub fn objective_for(&self, model: &SpcaModel) -> DcObjective<SpcaSmooth<'_>> {
        let smooth = SpcaSmooth {
            data: &self.data,
            op_norm: self.op_norm,
            r: self.r,
        };
        let gamma = self.gamma_for(model.gamma_tilde());
        let (h, g) = match *model {
            SpcaModel::L1 { .. } => (SeparablePenalty::l1(gamma), ConcavePart::Zero),
            SpcaModel::Capped { upsilon, .. } => (
                SeparablePenalty::l1(gamma * upsilon),
                ConcavePart::CappedExcess {
                    sigma: gamma,
                    upsilon,
                },
            ),
            SpcaModel::L1lk { k, .. } => (
                SeparablePenalty::l1(gamma),
                ConcavePart::LargestK { gamma, k },
            ),
        };
        DcObjective::new(smooth, h, g)
    }

    pub fn metrics(&self, x: &StiefelPoint) -> SpcaMetrics {
        self.metrics_for(x, self.gamma())
    }

    fn metrics_for(&self, x: &StiefelPoint, gamma: f64) -> SpcaMetrics {
        let f = -(&self.data * x.mat()).norm_squared();
        let nnz = x.mat().iter().filter(|v| v.abs() > ZERO_TOL).count();
        let total = x.mat().len();
        SpcaMetrics {
            v_sc: -f / self.pca_energy,
            s_p: (total - nnz) as f64 / total as f64,
            obj_l0_reg: f + gamma * nnz as f64,
            obj_l0_con: f,
        }
    }

    /// Sphere-only parameter thresholds beyond which critical points of the
    /// relaxations inherit the ℓ0 structure: υ* = L_f⁰/σ + √n for the capped
    /// model and γ* = n·L_f⁰/k for the largest-k model.
    pub fn equivalence_thresholds(&self) -> Result<EquivalenceThresholds, SpcaError> {
        if self.r != 1 {
            return Err(SpcaError::ThresholdNeedsSphere(self.r));
        }
        let lf0 = self.f_lipschitz();
        let n = self.n() as f64;
        Ok(match self.model {
            SpcaModel::Capped { .. } => EquivalenceThresholds {
                upsilon_star: Some(lf0 / self.gamma() + n.sqrt()),
                gamma_star: None,
            },
            SpcaModel::L1lk { k, .. } => EquivalenceThresholds {
                upsilon_star: None,
                gamma_star: Some(n * lf0 / k as f64),
            },
            SpcaModel::L1 { .. } => EquivalenceThresholds {
                upsilon_star: None,
                gamma_star: None,
            },
        })
    }

    /// Solves the instance's model from `x0` (PCA solution when `None`).
    pub fn solve_model(
        &self,
        x0: Option<&StiefelPoint>,
        opts: &SweepOptions,
    ) -> Result<(StiefelPoint, crate::trace::SolveTrace), SpcaError> {
        let obj = self.objective();
        let cfg = opts.config_for(&obj, self.n(), self.r);
        let start = x0.unwrap_or(&self.x_pca);
        let out = solve(&obj, start, &cfg)?;
        Ok((out.x, out.trace))
    }

    /// Continuation over υ ∈ {1, f, f², …}: the first problem starts at the
    /// PCA solution, later ones are warm-started; stops early once the
    /// ℓ0-regularized objective and the sparsity both stabilize.
    pub fn continuation_capped(&self, opts: &SweepOptions) -> Result<SweepResult, SpcaError> {
        let gamma_tilde = match self.model {
            SpcaModel::Capped { gamma_tilde, .. } => gamma_tilde,
            _ => return Err(SpcaError::ModelMismatch { expected: "capped" }),
        };
        let gamma = self.gamma_for(gamma_tilde);
        let mut x = self.x_pca.clone();
        let mut steps: Vec<SweepStep> = Vec::new();
        let mut stopped_early = false;
        for t in 0..opts.max_steps {
            let upsilon = opts.factor.powi(t as i32);
            let model = SpcaModel::Capped {
                gamma_tilde,
                upsilon,
            };
            let obj = self.objective_for(&model);
            let cfg = opts.config_for(&obj, self.n(), self.r);
            let out = solve(&obj, &x, &cfg)?;
            x = out.x;
            let metrics = self.metrics_for(&x, gamma);
            steps.push(SweepStep::new(
                upsilon,
                metrics,
                obj.value(x.mat()),
                &out.trace,
            ));
            if steps.len() >= 2 {
                let prev = &steps[steps.len() - 2];
                let cur = &steps[steps.len() - 1];
                let rel = (cur.metrics.obj_l0_reg - prev.metrics.obj_l0_reg).abs()
                    / prev.metrics.obj_l0_reg.abs().max(1.0);
                if rel <= opts.obj_rel_tol
                    && (cur.metrics.s_p - prev.metrics.s_p).abs() <= opts.sparsity_tol
                {
                    stopped_early = true;
                    break;
                }
            }
        }
        Ok(SweepResult {
            x,
            steps,
            stopped_early,
            target_met: stopped_early,
        })
    }

    /// Continuation over γ̃ ∈ {1, f, f², …} for the largest-k model until the
    /// solution sparsity reaches the level implied by k (within tolerance);
    /// flagged unmet if the schedule is exhausted first.
    pub fn continuation_l1lk(
        &self,
        target_sp: f64,
        opts: &SweepOptions,
    ) -> Result<SweepResult, SpcaError> {
        let k = match self.model {
            SpcaModel::L1lk { k, .. } => k,
            _ => return Err(SpcaError::ModelMismatch { expected: "l1lk" }),
        };
        let mut x = self.x_pca.clone();
        let mut steps: Vec<SweepStep> = Vec::new();
        let mut target_met = false;
        let mut stopped_early = false;
        for t in 0..opts.max_steps {
            let gamma_tilde = opts.factor.powi(t as i32);
            let model = SpcaModel::L1lk { gamma_tilde, k };
            let obj = self.objective_for(&model);
            let cfg = opts.config_for(&obj, self.n(), self.r);
            let out = solve(&obj, &x, &cfg)?;
            x = out.x;
            let metrics = self.metrics_for(&x, self.gamma_for(gamma_tilde));
            steps.push(SweepStep::new(
                gamma_tilde,
                metrics,
                obj.value(x.mat()),
                &out.trace,
            ));
            if metrics.s_p >= target_sp - opts.sparsity_tol {
                target_met = (metrics.s_p - target_sp).abs() <= opts.sparsity_tol;
                stopped_early = true;
                break;
            }
        }
        Ok(SweepResult {
            x,
            steps,
            stopped_early,
            target_met,
        })
    }

    /// Geometric bracket + bisection on γ̃ for the plain ℓ1 model until the
    /// solution sparsity lands within `tol` of `target_sp`. Returns the tuned
    /// γ̃ with its solution and metrics.
    pub fn tune_l1_to_sparsity(
        &self,
        target_sp: f64,
        tol: f64,
        opts: &SweepOptions,
    ) -> Result<(f64, StiefelPoint, SpcaMetrics), SpcaError> {
        let solve_at = |gamma_tilde: f64,
                        warm: &StiefelPoint|
         -> Result<(StiefelPoint, SpcaMetrics), SpcaError> {
            let model = SpcaModel::L1 { gamma_tilde };
            let obj = self.objective_for(&model);
            let cfg = opts.config_for(&obj, self.n(), self.r);
            let out = solve(&obj, warm, &cfg)?;
            let metrics = self.metrics_for(&out.x, self.gamma_for(gamma_tilde));
            Ok((out.x, metrics))
        };
        // bracket from below
        let mut lo = 1e-3;
        let (mut x, met) = solve_at(lo, &self.x_pca)?;
        if met.s_p >= target_sp {
            return Ok((lo, x, met));
        }
        let mut hi = lo;
        loop {
            hi *= 2.0;
            let (xx, mm) = solve_at(hi, &x)?;
            x = xx;
            if (mm.s_p - target_sp).abs() <= tol {
                return Ok((hi, x, mm));
            }
            if mm.s_p > target_sp {
                break;
            }
            if hi > 1e9 {
                return Ok((hi, x, mm));
            }
        }
        // bisect in log space
        for _ in 0..60 {
            let mid = ((lo.ln() + hi.ln()) / 2.0).exp();
            let (xx, mm) = solve_at(mid, &self.x_pca)?;
            if (mm.s_p - target_sp).abs() <= tol {
                return Ok((mid, xx, mm));
            }
            if mm.s_p > target_sp {
                hi = mid;
            } else {
                lo = mid;
            }
            x = xx;
        }
        let (xx, mm) = solve_at(hi, &x)?;
        Ok((hi, xx, mm))
    }
}

/// Sweep/solve options shared by the experiment harness.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepOptions {
    pub subsolver: SubsolverKind,
    pub epsilon: f64,
    pub max_outer: usize,
    pub bb: BbParams,
    pub factor: f64,
    pub max_steps: usize,
    pub obj_rel_tol: f64,
    pub sparsity_tol: f64,
    /// Per-solve fallback thresholds (see [`SolverConfig`]).
    pub step_tol_coeff: f64,
    pub obj_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            subsolver: SubsolverKind::Bb,
            epsilon: 1e-4,
            max_outer: 100,
            bb: BbParams::default(),
            factor: 1.5,
            max_steps: 21,
            obj_rel_tol: 1e-4,
            sparsity_tol: 1e-3,
            step_tol_coeff: 1e-4,
            obj_tol: 1e-6,
        }
    }
}

impl SweepOptions {
    fn config_for<S: SmoothFn>(&self, obj: &DcObjective<S>, n: usize, r: usize) -> SolverConfig {
        let mut cfg = SolverConfig::for_objective(obj, n, r);
        cfg.epsilon = self.epsilon;
        cfg.max_outer = self.max_outer;
        cfg.subsolver = self.subsolver;
        cfg.bb = self.bb;
        cfg.step_tol_coeff = self.step_tol_coeff;
        cfg.obj_tol = self.obj_tol;
        cfg
    }
}

/// Summary of one sweep step.
#[derive(Clone, Debug, Serialize)]
pub struct SweepStep {
    /// The swept parameter: υ for the capped sweep, γ̃ for the largest-k one.
    pub param: f64,
    pub metrics: SpcaMetrics,
    /// Model objective F at the returned point.
    pub f_value: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub prox_evals: usize,
    pub termination: Termination,
    pub time_s: f64,
    pub time_sub_s: f64,
}

impl SweepStep {
    fn new(
        param: f64,
        metrics: SpcaMetrics,
        f_value: f64,
        trace: &crate::trace::SolveTrace,
    ) -> Self {
        Self {
            param,
            metrics,
            f_value,
            outer_iters: trace.outer_iters,
            inner_iters: trace.inner_iters,
            prox_evals: trace.prox_evals,
            termination: trace.termination,
            time_s: trace.time_s,
            time_sub_s: trace.time_sub_s,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub x: StiefelPoint,
    pub steps: Vec<SweepStep>,
    /// The sweep stopped before exhausting its schedule.
    pub stopped_early: bool,
    /// Capped sweep: objective and sparsity stabilized. Largest-k sweep: the
    /// target sparsity was reached within tolerance.
    pub target_met: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivalenceThresholds {
    pub upsilon_star: Option<f64>,
    pub gamma_star: Option<f64>,
}

/// i.i.d. standard normal m×n matrix from a seeded generator, filled in
/// column-major order.
pub fn gaussian_data(seed: u64, m: usize, n: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        vals.push(rng.sample(StandardNormal));
    }
    DMatrix::from_vec(m, n, vals)
}

pub struct PcaSolution {
    pub x: StiefelPoint,
    /// ‖A·X‖²_F = sum of the top-r squared singular values.
    pub energy: f64,
    /// σ₁(A)².
    pub op_norm: f64,
}

/// Top-r right singular vectors of A by block subspace iteration with a
/// Rayleigh-Ritz finish, run to relative residual 1e−10 from a fixed-seed
/// start, with columns sign-fixed for determinism.
pub fn pca_solution(a: &DMatrix<f64>, r: usize) -> Result<PcaSolution, SpcaError> {
    let (m, n) = (a.nrows(), a.ncols());
    if r < 1 || r > m.min(n) {
        return Err(SpcaError::BadShape { m, n, r });
    }
    const TOL: f64 = 1e-10;
    const MAX_SWEEPS: usize = 50_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1_ab1e);
    let g = DMatrix::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = StiefelPoint::new(g).mat().clone();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let z = a.tr_mul(&(a * &q));
        let h = q.tr_mul(&z);
        let resid = (&z - &q * &h).norm();
        if resid <= TOL * z.norm().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        q = StiefelPoint::new(z).mat().clone();
    }
    if !converged {
        return Err(SpcaError::PcaConvergence {
            tol: TOL,
            iters: MAX_SWEEPS,
        });
    }
    // Rayleigh-Ritz: rotate the converged subspace onto approximate
    // eigenvectors of AᵀA, sorted by decreasing Ritz value.
    let z = a.tr_mul(&(a * &q));
    let h = q.tr_mul(&z);
    let h = (&h + h.transpose()) * 0.5;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let v = DMatrix::from_fn(r, r, |i, c| eig.eigenvectors[(i, order[c])]);
    let mut x = &q * v;
    for c in 0..r {
        let col = x.column(c);
        let mut lead = 0;
        let mut best = -1.0;
        for (i, &val) in col.iter().enumerate() {
            if val.abs() > best {
                best = val.abs();
                lead = i;
            }
        }
        if x[(lead, c)] < 0.0 {
            for i in 0..n {
                x[(i, c)] = -x[(i, c)];
            }
        }
    }
    let energy: f64 = order.iter().map(|&i| eig.eigenvalues[i]).sum();
    let op_norm = eig.eigenvalues[order[0]];
    Ok(PcaSolution {
        x: StiefelPoint::new(x),
        energy,
        op_norm,
    })
}

/// Distance from a sphere point to the k-sparse sphere and its error bound:
/// the projection keeps the k largest-|·| entries and renormalizes, and
/// dist ≤ √2·(1 + √(k/n))^{-1/2}·(‖x‖₁ − ⦀x⦀_k) always holds.
pub fn sk_distance(x: &DVector<f64>, k: usize) -> Result<(f64, f64), SpcaError> {
    let n = x.len();
    assert!(k >= 1 && k <= n, "k = {k} out of range 1..={n}");
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(SpcaError::NotOnSphere(norm));
    }
    let as_mat = DMatrix::from_column_slice(n, 1, x.as_slice());
    let topk = largest_k_norm(&as_mat, k);
    let l1: f64 = x.iter().map(|v| v.abs()).sum();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[b].abs().partial_cmp(&x[a].abs()).unwrap().then(a.cmp(&b)));
    let mut proj = DVector::zeros(n);
    for &i in order.iter().take(k) {
        proj[i] = x[i];
    }
    let head_norm = proj.norm();
    proj /= head_norm;
    let dist = (x - &proj).norm();
    let bound =
        std::f64::consts::SQRT_2 / (1.0 + (k as f64 / n as f64).sqrt()).sqrt() * (l1 - topk);
    debug_assert!(dist <= bound + 1e-12);
    Ok((dist, bound))
}

/// Number of entries violating the two-sided dichotomy |x_i| ≤ tol or
/// |x_i| ≥ 1/υ − tol that critical points of the capped model satisfy beyond
/// the sphere threshold.
pub fn dichotomy_violations(x: &DMatrix<f64>, upsilon: f64, tol: f64) -> usize {
    x.iter()
        .filter(|&&v| v.abs() > tol && v.abs() < 1.0 / upsilon - tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pca_of_diagonal_matrix() {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&[3.0, 2.0, 1.0]));
        let pca = pca_solution(&a, 2).unwrap();
        let x = pca.x.mat();
        assert_relative_eq!(x[(0, 0)].abs(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(x[(1, 1)].abs(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(pca.energy, 13.0, epsilon = 1e-8);
        assert_relative_eq!(pca.op_norm, 9.0, epsilon = 1e-8);
    }

    #[test]
    fn pca_energy_matches_direct_evaluation() {
        let a = gaussian_data(5, 12, 20);
        let pca = pca_solution(&a, 3).unwrap();
        assert_relative_eq!(
            (&a * pca.x.mat()).norm_squared(),
            pca.energy,
            max_relative = 1e-9
        );
        assert!(pca.x.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn pca_is_deterministic() {
        let a = gaussian_data(9, 15, 30);
        let p1 = pca_solution(&a, 4).unwrap();
        let p2 = pca_solution(&a, 4).unwrap();
        assert_eq!(p1.x.mat(), p2.x.mat());
    }

    #[test]
    fn smooth_part_cases() {
        // A = I: f = −r and ∇f = −2X
        let a = DMatrix::identity(6, 6);
        let inst = SpcaInstance::from_matrix(a, 2, SpcaModel::L1 { gamma_tilde: 1.0 }).unwrap();
        let obj = inst.objective();
        let x = inst.x_pca().clone();
        let (f, grad) = obj.smooth.eval_grad(x.mat());
        assert_relative_eq!(f, -2.0, epsilon = 1e-9);
        assert_relative_eq!(grad, -2.0 * x.mat(), epsilon = 1e-9);
    }

    #[test]
    fn smooth_gradient_matches_finite_differences() {
        let a = gaussian_data(11, 8, 10);
        let inst = SpcaInstance::from_matrix(a, 2, SpcaModel::L1 { gamma_tilde: 1.0 }).unwrap();
        let obj = inst.objective();
        let x = inst.x_pca().mat().clone();
        let (_, grad) = obj.smooth.eval_grad(&x);
        let h = 1e-5;
        for idx in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp.as_mut_slice()[idx] += h;
            xm.as_mut_slice()[idx] -= h;
            let fd = (obj.smooth.eval(&xp) - obj.smooth.eval(&xm)) / (2.0 * h);
            let rel = (fd - grad.as_slice()[idx]).abs() / grad.as_slice()[idx].abs().max(1.0);
            assert!(
                rel <= 1e-6,
                "entry {idx}: fd {fd} vs grad {}",
                grad.as_slice()[idx]
            );
        }
    }

    #[test]
    fn pca_solution_attains_the_singular_value_energy() {
        // f(X_pca) = −(σ₁² + … + σ_r²), cross-checked against a dense
        // eigendecomposition of AᵀA
        let a = gaussian_data(3, 10, 14);
        let inst =
            SpcaInstance::from_matrix(a.clone(), 3, SpcaModel::L1 { gamma_tilde: 1.0 }).unwrap();
        let gram = a.tr_mul(&a);
        let mut eigs: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let want: f64 = eigs[..3].iter().sum();
        assert_relative_eq!(inst.pca_energy(), want, max_relative = 1e-9);
        let obj = inst.objective();
        assert_relative_eq!(
            obj.smooth.eval(inst.x_pca().mat()),
            -want,
            max_relative = 1e-9
        );
    }

    #[test]
    fn metrics_reference_points() {
        let a = gaussian_data(21, 10, 25);
        let inst = SpcaInstance::from_matrix(a, 2, SpcaModel::L1 { gamma_tilde: 1.0 }).unwrap();
        let m = inst.metrics(inst.x_pca());
        assert_relative_eq!(m.v_sc, 1.0, epsilon = 1e-9);
        // identity columns: s_p = 1 − 1/n
        let mut id = DMatrix::zeros(25, 2);
        id[(0, 0)] = 1.0;
        id[(1, 1)] = 1.0;
        let m = inst.metrics(&StiefelPoint::new(id));
        assert_relative_eq!(m.s_p, 1.0 - 1.0 / 25.0, epsilon = 1e-12);
        assert!(m.v_sc <= 1.0 + 1e-8);
    }

    #[test]
    fn objective_matches_model_decomposition() {
        // F = f + h − g reproduces the capped and largest-k penalties exactly
        let a = gaussian_data(33, 8, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = crate::manifold::random_point(12, 2, &mut rng);
        let capped = SpcaInstance::from_matrix(
            a.clone(),
            2,
            SpcaModel::Capped {
                gamma_tilde: 0.7,
                upsilon: 3.0,
            },
        )
        .unwrap();
        let obj = capped.objective();
        let gamma = capped.gamma();
        let want = obj.smooth.eval(x.mat()) + gamma * crate::penalty::capped_l1(x.mat(), 3.0);
        assert_relative_eq!(obj.value(x.mat()), want, max_relative = 1e-12);
        let lk = SpcaInstance::from_matrix(
            a,
            2,
            SpcaModel::L1lk {
                gamma_tilde: 0.7,
                k: 5,
            },
        )
        .unwrap();
        let obj = lk.objective();
        let gamma = lk.gamma();
        let l1: f64 = x.mat().iter().map(|v| v.abs()).sum();
        let want = obj.smooth.eval(x.mat()) + gamma * (l1 - largest_k_norm(x.mat(), 5));
        assert_relative_eq!(obj.value(x.mat()), want, max_relative = 1e-12);
    }

    #[test]
    fn threshold_arithmetic() {
        // υ* = L_f⁰/σ + √n on a scaled instance
        let a = gaussian_data(13, 6, 4);
        let inst = SpcaInstance::from_matrix(
            a,
            1,
            SpcaModel::Capped {
                gamma_tilde: 1.0,
                upsilon: 1.0,
            },
        )
        .unwrap();
        let th = inst.equivalence_thresholds().unwrap();
        let want = inst.f_lipschitz() / inst.gamma() + 2.0;
        assert_relative_eq!(th.upsilon_star.unwrap(), want, max_relative = 1e-12);
        let inst = SpcaInstance::from_matrix(
            gaussian_data(13, 6, 4),
            1,
            SpcaModel::L1lk {
                gamma_tilde: 1.0,
                k: 2,
            },
        )
        .unwrap();
        let th = inst.equivalence_thresholds().unwrap();
        assert_relative_eq!(
            th.gamma_star.unwrap(),
            4.0 * inst.f_lipschitz() / 2.0,
            max_relative = 1e-12
        );
        // r > 1 is out of scope for the certificates
        let inst = SpcaInstance::from_matrix(
            gaussian_data(13, 6, 4),
            2,
            SpcaModel::L1 { gamma_tilde: 1.0 },
        )
        .unwrap();
        assert!(inst.equivalence_thresholds().is_err());
    }

    #[test]
    fn sk_distance_tight_and_sparse_cases() {
        let half = 0.5f64.sqrt();
        let (dist, bound) = sk_distance(&DVector::from_column_slice(&[half, half]), 1).unwrap();
        assert_relative_eq!(
            dist,
            (2.0 - std::f64::consts::SQRT_2).sqrt(),
            epsilon = 1e-14
        );
        assert!(
            (dist - bound).abs() <= 1e-12,
            "tight case: {dist} vs {bound}"
        );
        // already k-sparse: zero distance and zero bound
        let x = DVector::from_column_slice(&[0.0, 1.0, 0.0]);
        let (dist, bound) = sk_distance(&x, 1).unwrap();
        assert_relative_eq!(dist, 0.0, epsilon = 1e-15);
        assert_relative_eq!(bound, 0.0, epsilon = 1e-15);
        assert!(sk_distance(&DVector::from_column_slice(&[0.5, 0.5]), 1).is_err());
    }

    #[test]
    fn sk_distance_bound_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..500 {
            let n = rng.random_range(2..12);
            let mut x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            x /= x.norm();
            let k = rng.random_range(1..n);
            let (dist, bound) = sk_distance(&x, k).unwrap();
            assert!(dist <= bound + 1e-12);
        }
    }

    #[test]
    fn gaussian_data_is_seed_deterministic() {
        assert_eq!(gaussian_data(4, 6, 5), gaussian_data(4, 6, 5));
        assert_ne!(gaussian_data(4, 6, 5), gaussian_data(5, 6, 5));
    }
}
