//! Outer proximal difference-of-convex loop: curvature estimates, the
//! tolerance schedule for the inexact dual solves, the near-stationarity
//! certificate, and a nonmonotone backtracking line search on an augmented
//! objective.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::manifold::{retract, tangent_project, StiefelPoint, TangentVector};
use crate::objective::{DcObjective, SmoothFn};
use crate::subproblem::{
    solve as solve_dual, BbParams, SubproblemData, SubproblemError, SubsolverKind,
    SUBPROBLEM_TOL_FLOOR,
};
use crate::trace::{IterRecord, SolveTrace, Termination};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("rho must lie in [0, 1), got {0}")]
    Rho(f64),
    #[error("c must lie in (0, 1 - rho/2), got c = {c}, rho = {rho}")]
    C { c: f64, rho: f64 },
    #[error("backtracking factor s must lie in (0, 1), got {0}")]
    S(f64),
    #[error("beta1 must satisfy 2(1 + 4c)·beta1 < 1, got beta1 = {beta1}, c = {c}")]
    Beta1 { beta1: f64, c: f64 },
    #[error("omega0 must be nonnegative, got {0}")]
    Omega0(f64),
    #[error("tail exponent must exceed 1, got {0}")]
    TailExponent(f64),
    #[error("curvature bounds must satisfy 0 < l_min <= l_max, got [{0}, {1}]")]
    CurvatureBounds(f64, f64),
    #[error("target accuracy must be nonnegative and finite, got {0}")]
    Epsilon(f64),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Subproblem(#[from] SubproblemError),
    #[error("non-finite {what} at outer iteration {iter}")]
    NonFinite { what: &'static str, iter: usize },
}

/// Outer-loop parameters. `for_objective` fills in the reference defaults;
/// any field can be overridden afterwards.
#[derive(Clone, Debug, Serialize)]
pub struct SolverConfig {
    /// Target accuracy ε of the stationarity certificate.
    pub epsilon: f64,
    /// Nonmonotonicity weight ρ ∈ [0, 1) of the augmented objective.
    pub rho: f64,
    /// Sufficient-decrease fraction c ∈ (0, 1 − ρ/2).
    pub c: f64,
    /// Backtracking contraction s ∈ (0, 1).
    pub s: f64,
    /// Accuracy-slack coefficient β₁ ∈ (0, 1/(2 + 8c)).
    pub beta1: f64,
    /// Scale ω₀ ≥ 0 of the summable error sequence ω₀·ℓ_j·(j+1)^{-a}.
    pub omega0: f64,
    /// Tail exponent a > 1 of the summable error sequence.
    pub tail_exponent: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub max_outer: usize,
    pub subsolver: SubsolverKind,
    pub bb: BbParams,
    /// Fallback stop: ‖x_{j+1} − x_j‖_F ≤ step_tol_coeff·√r. Nonpositive
    /// disables the fallback rule.
    pub step_tol_coeff: f64,
    /// Fallback stop: |F_{j+1} − F_j| ≤ obj_tol·max(1, |F_{j+1}|).
    pub obj_tol: f64,
}

impl SolverConfig {
    /// Reference defaults, scaled to the objective: ε = 1e−4, ρ = 0.99,
    /// c = 1e−4, s = 0.5, β₁ = 0.99/(2+8c), ω₀ = 2e−5·L_h⁰, a = 1.5,
    /// L_min = 1e−10·L and L_max = 1e10·L with L the uniform curvature bound.
    pub fn for_objective<S: SmoothFn>(obj: &DcObjective<S>, n: usize, r: usize) -> Self {
        let l = obj.curvature_bound(n, r);
        let lh0 = obj.h.lipschitz(n, r);
        let c = 1e-4;
        Self {
            epsilon: 1e-4,
            rho: 0.99,
            c,
            s: 0.5,
            beta1: 0.99 / (2.0 + 8.0 * c),
            omega0: 2e-5 * lh0,
            tail_exponent: 1.5,
            l_min: 1e-10 * l,
            l_max: 1e10 * l,
            max_outer: 100,
            subsolver: SubsolverKind::Bb,
            bb: BbParams::default(),
            step_tol_coeff: 1e-4,
            obj_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(ConfigError::Rho(self.rho));
        }
        if !(self.c > 0.0 && self.c < 1.0 - self.rho / 2.0) {
            return Err(ConfigError::C {
                c: self.c,
                rho: self.rho,
            });
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(ConfigError::S(self.s));
        }
        if !(self.beta1 > 0.0 && 2.0 * (1.0 + 4.0 * self.c) * self.beta1 < 1.0) {
            return Err(ConfigError::Beta1 {
                beta1: self.beta1,
                c: self.c,
            });
        }
        if self.omega0.is_nan() || self.omega0 < 0.0 {
            return Err(ConfigError::Omega0(self.omega0));
        }
        if self.tail_exponent.is_nan() || self.tail_exponent <= 1.0 {
            return Err(ConfigError::TailExponent(self.tail_exponent));
        }
        if !(self.l_min > 0.0 && self.l_min <= self.l_max && self.l_max.is_finite()) {
            return Err(ConfigError::CurvatureBounds(self.l_min, self.l_max));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        Ok(())
    }

    /// Summable error term ω₀·ℓ_j·(j+1)^{-a}.
    pub fn omega_term(&self, ell: f64, j: usize) -> f64 {
        self.omega0 * ell * ((j + 1) as f64).powf(-self.tail_exponent)
    }

    /// Dual-gradient tolerance for the j-th subproblem, built from the
    /// previous iterate:
    /// min{(ρτ₋ℓ₋‖η₋‖² + 2ω_j + 2cβ₁ℓ_jε_j²)/(4L_h⁰), 4L_h⁰/ℓ_j},
    /// floored at 1e−10. Infinite when L_h⁰ = 0 (the subproblem is then
    /// solved in closed form).
    pub fn sub_tolerance(
        &self,
        prev: &PrevIter,
        ell: f64,
        accuracy: f64,
        lh0: f64,
        omega_term: f64,
    ) -> f64 {
        if lh0 == 0.0 {
            return f64::INFINITY;
        }
        let head = self.rho * prev.tau * prev.ell * prev.eta_norm * prev.eta_norm
            + 2.0 * omega_term
            + 2.0 * self.c * self.beta1 * ell * accuracy * accuracy;
        (head / (4.0 * lh0))
            .min(4.0 * lh0 / ell)
            .max(SUBPROBLEM_TOL_FLOOR)
    }

    /// Allowed model-decrease slack
    /// μ_j = ρ/2·(τ₋ℓ₋‖η₋‖² − ℓ_j‖η_j‖²) + ω_j.
    pub fn decrease_slack(&self, prev: &PrevIter, ell: f64, eta_norm: f64, omega_term: f64) -> f64 {
        0.5 * self.rho
            * (prev.tau * prev.ell * prev.eta_norm * prev.eta_norm - ell * eta_norm * eta_norm)
            + omega_term
    }

    /// Certificate slack χ_j = (2ρτ₋ℓ₋‖η₋‖² + 4ω_j)/ℓ_j.
    pub fn cert_slack(&self, prev: &PrevIter, ell: f64, omega_term: f64) -> f64 {
        (2.0 * self.rho * prev.tau * prev.ell * prev.eta_norm * prev.eta_norm + 4.0 * omega_term)
            / ell
    }

    /// Near-stationarity certificate ‖η_j‖ + (χ_j + 4cβ₁ε_j²)^{1/2} ≤ ε_j.
    pub fn certificate_holds(&self, eta_norm: f64, cert_slack: f64, accuracy: f64) -> bool {
        eta_norm + (cert_slack + 4.0 * self.c * self.beta1 * accuracy * accuracy).sqrt() <= accuracy
    }
}

/// Per-iteration accuracy ε_j = min(1/ℓ_j, 1)·ε.
pub fn accuracy_parameter(ell: f64, target: f64) -> f64 {
    (1.0 / ell).min(1.0) * target
}

/// Secant curvature estimate max{L_min, min{⟨p,p⟩/|⟨p, x − x_prev⟩|, L_max}};
/// a vanishing denominator yields L_max.
pub fn curvature_estimate(
    p: &TangentVector,
    x: &StiefelPoint,
    x_prev: &StiefelPoint,
    l_min: f64,
    l_max: f64,
) -> f64 {
    let num = p.mat().norm_squared();
    let den = p.mat().dot(&(x.mat() - x_prev.mat())).abs();
    if den == 0.0 {
        l_max
    } else {
        (num / den).clamp(l_min, l_max)
    }
}

/// Quantities carried from iteration j−1 into the schedule at j, initialized
/// as τ = 1, ℓ = ℓ₀ and ‖η‖ = 0.
#[derive(Clone, Copy, Debug)]
pub struct PrevIter {
    pub tau: f64,
    pub ell: f64,
    pub eta_norm: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: StiefelPoint,
    pub trace: SolveTrace,
}

struct LinesearchOutcome {
    tau: f64,
    x_next: StiefelPoint,
    f_next: f64,
    trials: usize,
    capped: bool,
}

/// Runs the solver from `x0`. The iterate update retracts τ_j·η_j where τ_j
/// is the largest s^i satisfying the relaxed sufficient-decrease condition on
/// the augmented objective F_ρ; backtracking depth is capped at
/// ⌈log_s τ̄⌉ + 5 and a breach accepts the smallest trial with a trace flag.
pub fn solve<S: SmoothFn>(
    obj: &DcObjective<S>,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut time_sub = 0.0f64;
    let n = x0.n();
    let r = x0.r();
    let lh0 = obj.h.lipschitz(n, r);
    let l_bound = obj.curvature_bound(n, r);
    let tau_bar = ((2.0 - cfg.rho - 2.0 * cfg.c) * cfg.l_min / l_bound).min(1.0);
    let i_max = (tau_bar.ln() / cfg.s.ln()).ceil().max(0.0) as i32 + 5;
    let ell0 = l_bound.clamp(cfg.l_min, cfg.l_max);

    let mut prev = PrevIter {
        tau: 1.0,
        ell: ell0,
        eta_norm: 0.0,
    };
    let mut x = x0.clone();
    let mut x_prev: Option<StiefelPoint> = None;
    let (mut f_cur, mut grad_f) = objective_eval(obj, &x, 0)?;

    let mut records: Vec<IterRecord> = Vec::new();
    let mut grad_evals = 1usize;
    let mut retractions = 0usize;
    let mut prox_total = 0usize;
    let mut inner_total = 0usize;
    let mut outer_updates = 0usize;
    let termination;

    let mut j = 0usize;
    loop {
        let grad_r = tangent_project(&x, &grad_f);
        let p_mat = if obj.g.is_zero() {
            grad_r.mat().clone()
        } else {
            let xi = tangent_project(&x, &obj.g.subgradient(x.mat()));
            grad_r.mat() - xi.mat()
        };
        let p = TangentVector::new(x.clone(), p_mat);
        let ell = match &x_prev {
            None => ell0,
            Some(xp) => curvature_estimate(&p, &x, xp, cfg.l_min, cfg.l_max),
        };
        let accuracy = accuracy_parameter(ell, cfg.epsilon);
        let omega_term = cfg.omega_term(ell, j);

        let (eta, sub_tol, inner_iters, prox_evals, inner_capped) = if lh0 == 0.0 {
            // h ≡ 0: the subproblem minimizer is the exact tangent step −p/ℓ
            (p.scaled(-1.0 / ell), None, 0, 0, false)
        } else {
            let tol = cfg.sub_tolerance(&prev, ell, accuracy, lh0, omega_term);
            let sub = SubproblemData::new(p, ell, obj.h)?;
            let t0 = Instant::now();
            let res = solve_dual(&sub, cfg.subsolver, tol, &cfg.bb);
            time_sub += t0.elapsed().as_secs_f64();
            (
                res.eta_hat,
                Some(tol),
                res.inner_iters,
                res.prox_evals,
                res.hit_cap,
            )
        };
        let eta_norm = eta.norm();
        let chi = cfg.cert_slack(&prev, ell, omega_term);
        let f_aug = f_cur + 0.5 * cfg.rho * prev.tau * prev.ell * prev.eta_norm * prev.eta_norm;
        prox_total += prox_evals;
        inner_total += inner_iters;

        let mut rec = IterRecord {
            f: f_cur,
            f_aug,
            eta_norm,
            tau: None,
            ell,
            accuracy,
            sub_tol,
            cert_slack: chi,
            inner_iters,
            prox_evals,
            ls_trials: 0,
            ls_capped: false,
            inner_capped,
        };

        if cfg.certificate_holds(eta_norm, chi, accuracy) {
            records.push(rec);
            termination = Termination::Certificate;
            break;
        }

        let ls = linesearch(
            obj, &x, &eta, f_aug, ell, accuracy, omega_term, cfg, i_max, j,
        )?;
        retractions += ls.trials;
        rec.tau = Some(ls.tau);
        rec.ls_trials = ls.trials;
        rec.ls_capped = ls.capped;
        records.push(rec);
        outer_updates += 1;

        prev = PrevIter {
            tau: ls.tau,
            ell,
            eta_norm,
        };
        let f_old = f_cur;
        x_prev = Some(std::mem::replace(&mut x, ls.x_next));
        let (f_new, g_new) = objective_eval(obj, &x, j + 1)?;
        f_cur = f_new;
        grad_f = g_new;
        grad_evals += 1;

        let fallback_on = cfg.step_tol_coeff > 0.0 && cfg.obj_tol > 0.0;
        if fallback_on {
            let step = (x.mat() - x_prev.as_ref().unwrap().mat()).norm();
            let step_ok = step <= cfg.step_tol_coeff * (r as f64).sqrt();
            let obj_ok = (f_cur - f_old).abs() <= cfg.obj_tol * f_cur.abs().max(1.0);
            if step_ok && obj_ok {
                termination = Termination::Fallback;
                break;
            }
        }
        if j + 1 >= cfg.max_outer {
            termination = Termination::MaxOuter;
            break;
        }
        j += 1;
    }

    Ok(SolveOutcome {
        x,
        trace: SolveTrace {
            iterations: records,
            outer_iters: outer_updates,
            grad_evals,
            retractions,
            prox_evals: prox_total,
            inner_iters: inner_total,
            termination,
            time_s: start.elapsed().as_secs_f64(),
            time_sub_s: time_sub,
        },
    })
}

fn objective_eval<S: SmoothFn>(
    obj: &DcObjective<S>,
    x: &StiefelPoint,
    iter: usize,
) -> Result<(f64, DMatrix<f64>), SolveError> {
    let (fs, grad) = obj.smooth.eval_grad(x.mat());
    if !fs.is_finite() {
        return Err(SolveError::NonFinite {
            what: "objective",
            iter,
        });
    }
    if grad.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFinite {
            what: "gradient",
            iter,
        });
    }
    let f = fs + obj.h.eval(x.mat()) - obj.g.eval(x.mat());
    if !f.is_finite() {
        return Err(SolveError::NonFinite {
            what: "objective",
            iter,
        });
    }
    Ok((f, grad))
}

#[allow(clippy::too_many_arguments)]
fn linesearch<S: SmoothFn>(
    obj: &DcObjective<S>,
    x: &StiefelPoint,
    eta: &TangentVector,
    f_aug_cur: f64,
    ell: f64,
    accuracy: f64,
    omega_term: f64,
    cfg: &SolverConfig,
    i_max: i32,
    iter: usize,
) -> Result<LinesearchOutcome, SolveError> {
    let eta2 = eta.norm() * eta.norm();
    let mut trials = 0usize;
    let mut last: Option<(f64, StiefelPoint, f64)> = None;
    for i in 0..=i_max {
        let tau = cfg.s.powi(i);
        let x_trial = retract(x, &eta.scaled(tau));
        let f_trial = obj.value(x_trial.mat());
        trials += 1;
        if !f_trial.is_finite() {
            return Err(SolveError::NonFinite {
                what: "objective",
                iter,
            });
        }
        let lhs = f_trial + 0.5 * cfg.rho * tau * ell * eta2;
        let rhs = f_aug_cur - cfg.c * tau * ell * eta2
            + cfg.c * cfg.beta1 * tau * ell * accuracy * accuracy
            + omega_term;
        if lhs <= rhs {
            return Ok(LinesearchOutcome {
                tau,
                x_next: x_trial,
                f_next: f_trial,
                trials,
                capped: false,
            });
        }
        last = Some((tau, x_trial, f_trial));
    }
    // cap breached: accept the smallest trial and flag the record
    let (tau, x_next, f_next) = last.expect("at least one trial");
    Ok(LinesearchOutcome {
        tau,
        x_next,
        f_next,
        trials,
        capped: true,
    })
}
