//! Per-iteration tangent-space subproblem and its dual.
//!
//! At a point x with curvature estimate ℓ and linear term p, the search
//! direction solves
//!
//!   min over tangent η of  q(η) = ⟨p, η⟩ + ℓ/2·‖η‖² + h(x + η).
//!
//! Encoding the tangent space as {η : Bᵀη = 0} with B an orthonormal normal
//! basis, the dual in q = dim(normal space) variables is
//!
//!   min over λ of  ψ(λ) = ‖λ‖²/(2ℓ) − M_{h/ℓ}(x − (p + Bλ)/ℓ) + ‖p‖²/(2ℓ),
//!
//! whose gradient norm certifies the quality of the recovered primal
//! direction. Three first-order solvers drive ‖∇ψ‖ below a requested
//! tolerance: a momentum method on a Tikhonov-regularized dual, a safeguarded
//! Barzilai-Borwein descent on the plain dual, and a fixed-schedule
//! accumulative-regularization method.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::manifold::{tangent_project, NormalBasis, StiefelPoint, TangentVector};
use crate::penalty::SeparablePenalty;

/// Tolerances below this floor are clamped to avoid chasing machine noise in
/// the inner loops.
pub const SUBPROBLEM_TOL_FLOOR: f64 = 1e-10;

/// Absolute guard on inner iterations per solve; the per-solver caps of
/// 50× the theoretical bound are additionally clamped to this.
const ABS_INNER_CAP: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum SubproblemError {
    #[error("linear term is not tangent at the base point (normal residual {0:.3e})")]
    NotTangent(f64),
    #[error("curvature estimate must be positive and finite, got {0}")]
    BadCurvature(f64),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(
        "oracle did not reach gradient norm {tol:.3e} within {cap} iterations (best {best:.3e})"
    )]
    CapExceeded { tol: f64, cap: usize, best: f64 },
}

/// Frozen per-iteration payload: base point, linear term p, curvature ℓ,
/// normal basis and the proximable penalty.
#[derive(Clone, Debug)]
pub struct SubproblemData {
    base: StiefelPoint,
    linear: TangentVector,
    curvature: f64,
    basis: NormalBasis,
    h: SeparablePenalty,
    h_lipschitz: f64,
}

impl SubproblemData {
    pub fn new(
        linear: TangentVector,
        curvature: f64,
        h: SeparablePenalty,
    ) -> Result<Self, SubproblemError> {
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(SubproblemError::BadCurvature(curvature));
        }
        let base = linear.base().clone();
        let basis = NormalBasis::new(&base);
        let residual = basis.adjoint(linear.mat()).norm();
        if residual > 1e-8 * linear.norm().max(1.0) {
            return Err(SubproblemError::NotTangent(residual));
        }
        let h_lipschitz = h.lipschitz(base.n(), base.r());
        Ok(Self {
            base,
            linear,
            curvature,
            basis,
            h,
            h_lipschitz,
        })
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn linear(&self) -> &TangentVector {
        &self.linear
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn basis(&self) -> &NormalBasis {
        &self.basis
    }

    pub fn h(&self) -> &SeparablePenalty {
        &self.h
    }

    /// L_h⁰ on the ambient space; the dual level set is contained in the ball
    /// of radius 2L_h⁰.
    pub fn h_lipschitz(&self) -> f64 {
        self.h_lipschitz
    }

    /// Dual dimension q = r(r+1)/2.
    pub fn dual_dim(&self) -> usize {
        self.basis.len()
    }

    /// Model value q(η) = ⟨p, η⟩ + ℓ/2·‖η‖² + h(x + η), for ambient η.
    pub fn model_value(&self, eta: &DMatrix<f64>) -> f64 {
        self.linear.mat().dot(eta)
            + 0.5 * self.curvature * eta.norm_squared()
            + self.h.eval(&(self.base.mat() + eta))
    }

    /// Minimizer of the λ-relaxed inner problem:
    /// prox_{h/ℓ}(x − (p + Bλ)/ℓ) − x.
    pub fn eta_at(&self, lambda: &DVector<f64>) -> DMatrix<f64> {
        let t = 1.0 / self.curvature;
        let shifted = self.base.mat() - (self.linear.mat() + self.basis.apply(lambda)) * t;
        self.h.prox(&shifted, t) - self.base.mat()
    }

    /// Dual value ψ(λ).
    pub fn dual_value(&self, lambda: &DVector<f64>) -> f64 {
        let ell = self.curvature;
        let t = 1.0 / ell;
        let shifted = self.base.mat() - (self.linear.mat() + self.basis.apply(lambda)) * t;
        lambda.norm_squared() / (2.0 * ell) - self.h.moreau(&shifted, t)
            + self.linear.mat().norm_squared() / (2.0 * ell)
    }

    /// Dual gradient ∇ψ(λ) = −Bᵀη(λ); Lipschitz with constant 1/ℓ.
    pub fn dual_grad(&self, lambda: &DVector<f64>) -> DVector<f64> {
        -self.basis.adjoint(&self.eta_at(lambda))
    }

    /// One proximal evaluation yielding η(λ), ∇ψ(λ) and its norm.
    fn eval_at(&self, lambda: &DVector<f64>) -> LambdaEval {
        let eta = self.eta_at(lambda);
        let grad = -self.basis.adjoint(&eta);
        let grad_norm = grad.norm();
        LambdaEval {
            eta,
            grad,
            grad_norm,
        }
    }

    /// Tangent projection of a recovered direction.
    pub fn project_direction(&self, eta: &DMatrix<f64>) -> TangentVector {
        tangent_project(&self.base, eta)
    }
}

struct LambdaEval {
    eta: DMatrix<f64>,
    grad: DVector<f64>,
    grad_norm: f64,
}

/// Which inexact dual solver to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsolverKind {
    /// Momentum method on the Tikhonov-regularized dual.
    Nfg,
    /// Safeguarded Barzilai-Borwein descent with nonmonotone-free backtracking.
    Bb,
    /// Accumulative regularization with a fixed round schedule.
    Ar,
}

impl std::str::FromStr for SubsolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nfg" => Ok(Self::Nfg),
            "bb" => Ok(Self::Bb),
            "ar" => Ok(Self::Ar),
            other => Err(format!(
                "unknown subsolver '{other}' (expected nfg, bb or ar)"
            )),
        }
    }
}

impl std::fmt::Display for SubsolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Nfg => "nfg",
            Self::Bb => "bb",
            Self::Ar => "ar",
        })
    }
}

/// Safeguard parameters of the BB solver: step cap ϱ₁ℓ and sufficient-decrease
/// fraction ϱ₂.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BbParams {
    pub step_cap_factor: f64,
    pub decrease_fraction: f64,
}

impl Default for BbParams {
    fn default() -> Self {
        Self {
            step_cap_factor: 100.0,
            decrease_fraction: 1e-4,
        }
    }
}

/// Outcome of an inexact dual solve. `grad_norm` is the certified ‖∇ψ‖ at the
/// returned multiplier; when `hit_cap` is set the best iterate seen is
/// returned instead and the certificate may be looser than requested.
#[derive(Clone, Debug)]
pub struct DualSolveResult {
    pub lambda: DVector<f64>,
    pub eta_hat: TangentVector,
    pub grad_norm: f64,
    pub inner_iters: usize,
    pub prox_evals: usize,
    pub hit_cap: bool,
    /// Deepest backtracking level any BB step needed (0 for the other solvers).
    pub max_backtracks: usize,
    /// Largest multiplier norm along accepted iterates.
    pub max_lambda_norm: f64,
}

struct BestIterate {
    lambda: DVector<f64>,
    eta: DMatrix<f64>,
    grad_norm: f64,
}

impl BestIterate {
    fn update(&mut self, lambda: &DVector<f64>, ev: &LambdaEval) {
        if ev.grad_norm < self.grad_norm {
            self.lambda = lambda.clone();
            self.eta = ev.eta.clone();
            self.grad_norm = ev.grad_norm;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    sub: &SubproblemData,
    lambda: DVector<f64>,
    eta: DMatrix<f64>,
    grad_norm: f64,
    inner_iters: usize,
    prox_evals: usize,
    hit_cap: bool,
    max_backtracks: usize,
    max_lambda_norm: f64,
) -> DualSolveResult {
    DualSolveResult {
        eta_hat: sub.project_direction(&eta),
        lambda,
        grad_norm,
        inner_iters,
        prox_evals,
        hit_cap,
        max_backtracks,
        max_lambda_norm,
    }
}

/// Dispatches to the requested solver.
pub fn solve(
    sub: &SubproblemData,
    kind: SubsolverKind,
    tol: f64,
    bb: &BbParams,
) -> DualSolveResult {
    match kind {
        SubsolverKind::Nfg => solve_fast_gradient(sub, tol),
        SubsolverKind::Bb => solve_bb(sub, tol, bb),
        SubsolverKind::Ar => solve_accumulative(sub, tol),
    }
}

/// With h ≡ 0 the dual is the explicit quadratic ψ(λ) = ‖λ + Bᵀp‖²/(2ℓ) + c,
/// minimized at λ = −Bᵀp; used by the regularized solvers whose schedules
/// divide by L_h⁰.
fn solve_zero_penalty(sub: &SubproblemData, tol: f64) -> DualSolveResult {
    let zero = DVector::zeros(sub.dual_dim());
    let ev = sub.eval_at(&zero);
    if ev.grad_norm <= tol {
        return finish(sub, zero, ev.eta, ev.grad_norm, 0, 1, false, 0, 0.0);
    }
    let lambda = -sub.basis().adjoint(sub.linear().mat());
    let norm = lambda.norm();
    let ev = sub.eval_at(&lambda);
    let capped = ev.grad_norm > tol;
    finish(sub, lambda, ev.eta, ev.grad_norm, 1, 2, capped, 0, norm)
}

/// Momentum method on ψ_δ(λ) = ψ(λ) + δ/2·‖λ‖² with δ = tol/(4L_h⁰), step
/// 1/(1/ℓ + δ) and momentum (√κ−1)/(√κ+1), κ = 1 + 1/(ℓδ), starting from 0.
/// The stopping test uses the unregularized gradient, available for free at
/// every extrapolation point.
pub fn solve_fast_gradient(sub: &SubproblemData, tol: f64) -> DualSolveResult {
    let tol = tol.max(SUBPROBLEM_TOL_FLOOR);
    if sub.h().is_zero() {
        return solve_zero_penalty(sub, tol);
    }
    let ell = sub.curvature();
    let lh0 = sub.h_lipschitz();
    let delta = tol / (4.0 * lh0);
    let step = 1.0 / (1.0 / ell + delta);
    let kappa = 1.0 + 1.0 / (ell * delta);
    let momentum = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);

    let ratio = 4.0 * lh0 / (ell * tol);
    let theory = 3.0 * ((1.0 + ratio).sqrt() * (1.0 + ratio).ln()).ceil().max(1.0);
    let cap = ((50.0 * theory) as usize).min(ABS_INNER_CAP);

    let q = sub.dual_dim();
    let mut lam_prev = DVector::zeros(q);
    let mut lam = DVector::zeros(q);
    let mut best: Option<BestIterate> = None;
    let mut prox_evals = 0usize;
    let mut iters = 0usize;
    let mut max_norm = 0.0f64;
    loop {
        let y = &lam + (&lam - &lam_prev) * momentum;
        let ev = sub.eval_at(&y);
        prox_evals += 1;
        if ev.grad_norm <= tol {
            return finish(
                sub,
                y,
                ev.eta,
                ev.grad_norm,
                iters,
                prox_evals,
                false,
                0,
                max_norm,
            );
        }
        match &mut best {
            Some(b) => b.update(&y, &ev),
            None => {
                best = Some(BestIterate {
                    lambda: y.clone(),
                    eta: ev.eta.clone(),
                    grad_norm: ev.grad_norm,
                })
            }
        }
        if iters >= cap {
            let b = best.unwrap();
            return finish(
                sub,
                b.lambda,
                b.eta,
                b.grad_norm,
                iters,
                prox_evals,
                true,
                0,
                max_norm,
            );
        }
        let lam_next = &y - (&ev.grad + &y * delta) * step;
        lam_prev = lam;
        lam = lam_next;
        max_norm = max_norm.max(lam.norm());
        iters += 1;
    }
}

/// Safeguarded BB descent on the plain dual: λ⁺ = λ − ν∇ψ(λ) with
/// ν = min(ν_BB, ϱ₁ℓ)·2^{−m}, ν_BB the secant ratio (0/0 = +∞, ν_BB(0) = ℓ),
/// and m the smallest backtracking level with
/// ψ(λ⁺) ≤ ψ(λ) − ϱ₂ν‖∇ψ(λ)‖².
pub fn solve_bb(sub: &SubproblemData, tol: f64, params: &BbParams) -> DualSolveResult {
    let tol = tol.max(SUBPROBLEM_TOL_FLOOR);
    let ell = sub.curvature();
    let lh0 = sub.h_lipschitz();
    let theory = (2.0 * lh0 / ell / tol).ceil() + 100.0;
    let cap = ((50.0 * theory) as usize).min(ABS_INNER_CAP);

    let q = sub.dual_dim();
    let mut lam = DVector::zeros(q);
    let mut ev = sub.eval_at(&lam);
    let mut prox_evals = 1usize;
    let mut psi_cur = sub.dual_value(&lam);
    let mut prev: Option<(DVector<f64>, DVector<f64>)> = None;
    let mut best = BestIterate {
        lambda: lam.clone(),
        eta: ev.eta.clone(),
        grad_norm: ev.grad_norm,
    };
    let mut iters = 0usize;
    let mut max_backtracks = 0usize;
    let mut max_norm = lam.norm();
    loop {
        if ev.grad_norm <= tol {
            return finish(
                sub,
                lam,
                ev.eta,
                ev.grad_norm,
                iters,
                prox_evals,
                false,
                max_backtracks,
                max_norm,
            );
        }
        if iters >= cap {
            return finish(
                sub,
                best.lambda,
                best.eta,
                best.grad_norm,
                iters,
                prox_evals,
                true,
                max_backtracks,
                max_norm,
            );
        }
        let nu_secant = match &prev {
            None => ell,
            Some((lam_old, grad_old)) => {
                let dl = &lam - lam_old;
                let dg = &ev.grad - grad_old;
                let den = dl.dot(&dg);
                if den > 0.0 {
                    dl.norm_squared() / den
                } else {
                    f64::INFINITY
                }
            }
        };
        let nu0 = nu_secant.min(params.step_cap_factor * ell);
        let gn2 = ev.grad_norm * ev.grad_norm;
        let mut m = 0usize;
        let (cand, psi_cand) = loop {
            let nu = nu0 * 0.5f64.powi(m as i32);
            let cand = &lam - &ev.grad * nu;
            let psi_cand = sub.dual_value(&cand);
            if psi_cand <= psi_cur - params.decrease_fraction * nu * gn2 || m >= 64 {
                break (cand, psi_cand);
            }
            m += 1;
        };
        max_backtracks = max_backtracks.max(m);
        prev = Some((lam.clone(), ev.grad.clone()));
        lam = cand;
        psi_cur = psi_cand;
        ev = sub.eval_at(&lam);
        prox_evals += 1;
        iters += 1;
        max_norm = max_norm.max(lam.norm());
        best.update(&lam, &ev);
    }
}

/// Accumulative regularization: rounds i = 0..⌈log₄(2L_h⁰/(ℓ·tol))⌉ solve
/// ψ(λ) + δᵢ/2·‖λ − λ̄ᵢ‖² with δᵢ = 4ⁱ·tol/(8L_h⁰) for a fixed budget of
/// ⌈16(ℓ/δᵢ + 1)^{1/2}⌉ momentum steps each, warm-started and with the
/// proximal center λ̄ᵢ = 0.25λ̄ᵢ₋₁ + 0.75λᵢ₋₁; exits as soon as the
/// unregularized gradient passes the tolerance.
pub fn solve_accumulative(sub: &SubproblemData, tol: f64) -> DualSolveResult {
    let tol = tol.max(SUBPROBLEM_TOL_FLOOR);
    if sub.h().is_zero() {
        return solve_zero_penalty(sub, tol);
    }
    let ell = sub.curvature();
    let lh0 = sub.h_lipschitz();
    let delta0 = tol / (8.0 * lh0);
    let rounds = (2.0 * lh0 / (ell * tol)).log(4.0).ceil().max(0.0) as usize;

    let q = sub.dual_dim();
    let mut center = DVector::zeros(q);
    let mut settled = DVector::zeros(q);
    let mut best: Option<BestIterate> = None;
    let mut prox_evals = 0usize;
    let mut iters = 0usize;
    let mut max_norm = 0.0f64;
    for i in 0..=rounds {
        if i > 0 {
            center = &center * 0.25 + &settled * 0.75;
        }
        let delta = delta0 * 4.0f64.powi(i as i32);
        let step = 1.0 / (1.0 / ell + delta);
        let budget = (16.0 * (ell / delta + 1.0).sqrt()).ceil() as usize;
        let mut lam_prev = settled.clone();
        let mut lam = settled.clone();
        for t in 0..=budget {
            let momentum = (t as f64 - 1.0) / (t as f64 + 2.0);
            let y = &lam + (&lam - &lam_prev) * momentum;
            let ev = sub.eval_at(&y);
            prox_evals += 1;
            if ev.grad_norm <= tol {
                return finish(
                    sub,
                    y,
                    ev.eta,
                    ev.grad_norm,
                    iters,
                    prox_evals,
                    false,
                    0,
                    max_norm,
                );
            }
            match &mut best {
                Some(b) => b.update(&y, &ev),
                None => {
                    best = Some(BestIterate {
                        lambda: y.clone(),
                        eta: ev.eta.clone(),
                        grad_norm: ev.grad_norm,
                    })
                }
            }
            if iters >= ABS_INNER_CAP {
                let b = best.unwrap();
                return finish(
                    sub,
                    b.lambda,
                    b.eta,
                    b.grad_norm,
                    iters,
                    prox_evals,
                    true,
                    0,
                    max_norm,
                );
            }
            let grad_reg = &ev.grad + (&y - &center) * delta;
            let lam_next = &y - grad_reg * step;
            lam_prev = lam;
            lam = lam_next;
            max_norm = max_norm.max(lam.norm());
            iters += 1;
        }
        settled = lam;
    }
    let b = best.expect("schedule ran at least one round");
    finish(
        sub,
        b.lambda,
        b.eta,
        b.grad_norm,
        iters,
        prox_evals,
        true,
        0,
        max_norm,
    )
}

/// High-accuracy dual optimum for validation on small instances (nr ≤ 200):
/// accelerated gradient with gradient-based momentum restarts, run until
/// ‖∇ψ‖ ≤ tol.
#[derive(Clone, Debug)]
pub struct DualOptimum {
    pub lambda: DVector<f64>,
    /// η(λ*), the primal optimum (tangent up to tol).
    pub eta: DMatrix<f64>,
    pub dual_value: f64,
    pub grad_norm: f64,
    pub iters: usize,
}

pub fn exact_oracle(sub: &SubproblemData, tol: f64) -> Result<DualOptimum, OracleError> {
    assert!(
        sub.base().n() * sub.base().r() <= 200,
        "oracle is restricted to small instances"
    );
    assert!(tol > 0.0);
    const CAP: usize = 2_000_000;
    let q = sub.dual_dim();
    let step = sub.curvature();
    let mut lam_prev = DVector::zeros(q);
    let mut lam = DVector::zeros(q);
    let mut k = 0usize;
    let mut best_norm = f64::INFINITY;
    for it in 0..CAP {
        let y = &lam + (&lam - &lam_prev) * ((k as f64 - 1.0) / (k as f64 + 2.0));
        let ev = sub.eval_at(&y);
        best_norm = best_norm.min(ev.grad_norm);
        if ev.grad_norm <= tol {
            return Ok(DualOptimum {
                dual_value: sub.dual_value(&y),
                lambda: y,
                eta: ev.eta,
                grad_norm: ev.grad_norm,
                iters: it,
            });
        }
        let lam_next = &y - &ev.grad * step;
        // restart the momentum when it points against the step direction
        if ev.grad.dot(&(&lam_next - &lam)) > 0.0 {
            k = 0;
        } else {
            k += 1;
        }
        lam_prev = lam;
        lam = lam_next;
    }
    Err(OracleError::CapExceeded {
        tol,
        cap: CAP,
        best: best_norm,
    })
}
