//! Shared helpers for the integration suites.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use riemann_dc::manifold::{random_point, random_tangent, tangent_project};
use riemann_dc::penalty::SeparablePenalty;
use riemann_dc::subproblem::SubproblemData;

/// Random dual-subproblem instance with a tangent linear term.
pub fn random_subproblem(n: usize, r: usize, weight: f64, rng: &mut ChaCha8Rng) -> SubproblemData {
    let x = random_point(n, r, rng);
    let p0 = random_tangent(&x, rng);
    let p = p0.scaled(rng.random_range(0.5..4.0) / p0.norm());
    let ell = rng.random_range(0.5..4.0);
    SubproblemData::new(p, ell, SeparablePenalty::l1(weight)).unwrap()
}

/// Instance whose proximal arguments cluster near the soft-threshold kinks,
/// the harder regime for the dual solvers.
pub fn kink_subproblem(n: usize, r: usize, w_scale: f64, rng: &mut ChaCha8Rng) -> SubproblemData {
    let x = random_point(n, r, rng);
    let ell = 1.0;
    let w = w_scale / ((n * r) as f64).sqrt();
    let mut shift = x.mat().clone();
    for (i, v) in shift.iter_mut().enumerate() {
        let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
        let jitter = ((i.wrapping_mul(2654435761) % 97) as f64 / 97.0 - 0.5) * 0.3;
        *v -= sgn * w * (1.0 + jitter);
    }
    let p = tangent_project(&x, &(shift * ell));
    SubproblemData::new(p, ell, SeparablePenalty::l1(w)).unwrap()
}

pub fn random_multiplier(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal) * scale)
}

/// Least-squares slope of y against x.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// One pass/fail line per criterion, printed before the assertion fires.
pub fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
