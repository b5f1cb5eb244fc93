//! Convex nonsmooth calculus for the two penalty slots of a
//! difference-of-convex objective: a separable weighted ℓ1 term (with proximal
//! mapping, Moreau envelope and Lipschitz constant) and a convex "concave
//! part" that is subtracted (zero, capped excess, or largest-k norm).

use nalgebra::DMatrix;
use serde::Serialize;

/// Scalar soft threshold sign(v)·max(|v| − t, 0).
#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Weighted ℓ1 penalty h(X) = w·Σ|X_ij|, the proximable term of the
/// objective. Lipschitz with constant w·√(nr) in Frobenius norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparablePenalty {
    weight: f64,
}

impl SeparablePenalty {
    pub fn l1(weight: f64) -> Self {
        assert!(weight >= 0.0 && weight.is_finite());
        Self { weight }
    }

    pub fn zero() -> Self {
        Self { weight: 0.0 }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.weight == 0.0
    }

    pub fn eval(&self, x: &DMatrix<f64>) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Entrywise soft threshold at level t·w: the minimizer of
    /// w‖u‖₁ + ‖u − v‖²/(2t).
    pub fn prox(&self, v: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
        assert!(t > 0.0, "prox parameter must be positive");
        let cut = t * self.weight;
        v.map(|e| soft_threshold(e, cut))
    }

    /// Moreau envelope min_u { w‖u‖₁ + ‖u − v‖²/(2t) }, evaluated in closed
    /// form per entry: v²/(2t) on |v| ≤ tw, else w|v| − tw²/2.
    pub fn moreau(&self, v: &DMatrix<f64>, t: f64) -> f64 {
        assert!(t > 0.0, "envelope parameter must be positive");
        let w = self.weight;
        let cut = t * w;
        v.iter()
            .map(|&e| {
                let a = e.abs();
                if a <= cut {
                    e * e / (2.0 * t)
                } else {
                    w * a - t * w * w / 2.0
                }
            })
            .sum()
    }

    /// Lipschitz constant w·√(nr) on the ambient n×r matrix space.
    pub fn lipschitz(&self, n: usize, r: usize) -> f64 {
        self.weight * ((n * r) as f64).sqrt()
    }
}

/// The convex term that is subtracted from the objective. Only a subgradient
/// is ever needed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ConcavePart {
    Zero,
    /// σ·Σ max(υ|x_i| − 1, 0); paired with h = συ‖·‖₁ this difference is the
    /// capped-ℓ1 penalty σ·Σ min(υ|x_i|, 1).
    CappedExcess {
        sigma: f64,
        upsilon: f64,
    },
    /// γ·(sum of the k largest |x_i|); paired with h = γ‖·‖₁ the difference
    /// vanishes exactly on k-sparse points.
    LargestK {
        gamma: f64,
        k: usize,
    },
}

impl ConcavePart {
    pub fn is_zero(&self) -> bool {
        matches!(self, ConcavePart::Zero)
    }

    pub fn eval(&self, x: &DMatrix<f64>) -> f64 {
        match *self {
            ConcavePart::Zero => 0.0,
            ConcavePart::CappedExcess { sigma, upsilon } => {
                sigma
                    * x.iter()
                        .map(|v| (upsilon * v.abs() - 1.0).max(0.0))
                        .sum::<f64>()
            }
            ConcavePart::LargestK { gamma, k } => gamma * largest_k_norm(x, k),
        }
    }

    /// One deterministic element of the subdifferential.
    ///
    /// Capped excess: συ·sign(x_i) where υ|x_i| > 1, zero elsewhere (including
    /// the kink υ|x_i| = 1, where 0 is a valid selection). Largest-k:
    /// γ·sign(x_i) on the k largest-magnitude entries, ties broken by lowest
    /// linear (column-major) index, zero elsewhere.
    pub fn subgradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match *self {
            ConcavePart::Zero => DMatrix::zeros(x.nrows(), x.ncols()),
            ConcavePart::CappedExcess { sigma, upsilon } => x.map(|v| {
                if upsilon * v.abs() > 1.0 {
                    sigma * upsilon * v.signum()
                } else {
                    0.0
                }
            }),
            ConcavePart::LargestK { gamma, k } => {
                let idx = top_k_indices(x, k);
                let mut out = DMatrix::zeros(x.nrows(), x.ncols());
                let xs = x.as_slice();
                let os = out.as_mut_slice();
                for &i in &idx {
                    if xs[i] > 0.0 {
                        os[i] = gamma;
                    } else if xs[i] < 0.0 {
                        os[i] = -gamma;
                    }
                }
                out
            }
        }
    }

    /// Lipschitz constant on the ambient n×r matrix space: συ√(nr) for the
    /// capped excess, γ√k for the largest-k norm.
    pub fn lipschitz(&self, n: usize, r: usize) -> f64 {
        match *self {
            ConcavePart::Zero => 0.0,
            ConcavePart::CappedExcess { sigma, upsilon } => {
                sigma * upsilon * ((n * r) as f64).sqrt()
            }
            ConcavePart::LargestK { gamma, k } => gamma * (k as f64).sqrt(),
        }
    }
}

/// Indices of the k largest-|·| entries in column-major order, ties broken by
/// lowest index.
fn top_k_indices(x: &DMatrix<f64>, k: usize) -> Vec<usize> {
    let len = x.len();
    assert!(k >= 1 && k <= len, "k = {k} out of range 1..={len}");
    let xs = x.as_slice();
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        xs[b]
            .abs()
            .partial_cmp(&xs[a].abs())
            .expect("non-finite entry")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

/// Sum of the k largest absolute entries.
pub fn largest_k_norm(x: &DMatrix<f64>, k: usize) -> f64 {
    let idx = top_k_indices(x, k);
    let xs = x.as_slice();
    idx.iter().map(|&i| xs[i].abs()).sum()
}

/// Σ min(υ|x_i|, 1), the capped-ℓ1 surrogate of the ℓ0-norm.
pub fn capped_l1(x: &DMatrix<f64>, upsilon: f64) -> f64 {
    x.iter().map(|v| (upsilon * v.abs()).min(1.0)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn mat(vals: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(vals.len(), 1, vals)
    }

    #[test]
    fn prox_scalar_cases() {
        let h = SeparablePenalty::l1(1.0);
        assert_relative_eq!(h.prox(&mat(&[2.5]), 1.0)[(0, 0)], 1.5);
        assert_relative_eq!(h.prox(&mat(&[-0.3]), 1.0)[(0, 0)], 0.0);
        assert_relative_eq!(h.prox(&mat(&[-2.0]), 0.5)[(0, 0)], -1.5);
    }

    #[test]
    #[should_panic]
    fn prox_rejects_nonpositive_parameter() {
        SeparablePenalty::l1(1.0).prox(&mat(&[1.0]), 0.0);
    }

    /// Per-coordinate grid oracle: coarse scan then two refinements around the
    /// best grid point of u ↦ w|u| + (u−v)²/(2t).
    fn prox_grid_oracle(v: f64, w: f64, t: f64) -> f64 {
        let obj = |u: f64| w * u.abs() + (u - v) * (u - v) / (2.0 * t);
        let mut lo = -v.abs() - t * w - 1.0;
        let mut hi = v.abs() + t * w + 1.0;
        let mut best = 0.0;
        for _ in 0..3 {
            let mut best_val = f64::INFINITY;
            let steps = 2000;
            for i in 0..=steps {
                let u = lo + (hi - lo) * i as f64 / steps as f64;
                let val = obj(u);
                if val < best_val {
                    best_val = val;
                    best = u;
                }
            }
            let span = (hi - lo) / steps as f64;
            lo = best - 2.0 * span;
            hi = best + 2.0 * span;
        }
        best
    }

    #[test]
    fn prox_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let w = rng.random_range(0.0..3.0);
            let t = rng.random_range(0.05..4.0);
            let v: f64 = rng.sample::<f64, _>(StandardNormal) * 3.0;
            let h = SeparablePenalty::l1(w);
            let got = h.prox(&mat(&[v]), t)[(0, 0)];
            let obj = |u: f64| w * u.abs() + (u - v) * (u - v) / (2.0 * t);
            let oracle = prox_grid_oracle(v, w, t);
            assert!(obj(got) <= obj(oracle) + 1e-10, "v={v} w={w} t={t}");
        }
    }

    #[test]
    fn prox_is_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let h = SeparablePenalty::l1(0.7);
        for _ in 0..50 {
            let u = DMatrix::from_fn(4, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = DMatrix::from_fn(4, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let t = rng.random_range(0.1..2.0);
            let du = h.prox(&u, t) - h.prox(&v, t);
            assert!(du.norm() <= (&u - &v).norm() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn moreau_cases() {
        let h = SeparablePenalty::l1(1.0);
        assert_relative_eq!(h.moreau(&mat(&[0.0]), 1.0), 0.0);
        assert_relative_eq!(h.moreau(&mat(&[0.5]), 1.0), 0.125);
        // beyond the threshold: h(prox) + ‖prox−v‖²/(2t) = 2 + 0.5
        assert_relative_eq!(h.moreau(&mat(&[3.0]), 1.0), 2.5);
    }

    #[test]
    fn moreau_equals_value_at_prox() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let w = rng.random_range(0.0..2.0);
            let t = rng.random_range(0.05..3.0);
            let h = SeparablePenalty::l1(w);
            let v = DMatrix::from_fn(5, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let p = h.prox(&v, t);
            let direct = h.eval(&p) + (&p - &v).norm_squared() / (2.0 * t);
            let env = h.moreau(&v, t);
            assert_relative_eq!(env, direct, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn lipschitz_certificates_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let h = SeparablePenalty::l1(1.3);
        let parts = [
            ConcavePart::Zero,
            ConcavePart::CappedExcess {
                sigma: 0.8,
                upsilon: 2.5,
            },
            ConcavePart::LargestK { gamma: 1.1, k: 3 },
        ];
        for _ in 0..100 {
            let u = DMatrix::from_fn(4, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = DMatrix::from_fn(4, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let dist = (&u - &v).norm();
            assert!((h.eval(&u) - h.eval(&v)).abs() <= h.lipschitz(4, 2) * dist + 1e-12);
            for g in &parts {
                assert!((g.eval(&u) - g.eval(&v)).abs() <= g.lipschitz(4, 2) * dist + 1e-12);
            }
        }
    }

    #[test]
    fn capped_excess_subgradient_cases() {
        let g = ConcavePart::CappedExcess {
            sigma: 1.0,
            upsilon: 2.0,
        };
        let s = g.subgradient(&mat(&[1.0, 0.2]));
        assert_relative_eq!(s[(0, 0)], 2.0);
        assert_relative_eq!(s[(1, 0)], 0.0);
        // kink υ|x| = 1 selects zero
        let s = g.subgradient(&mat(&[0.5]));
        assert_relative_eq!(s[(0, 0)], 0.0);
    }

    #[test]
    fn largest_k_subgradient_cases() {
        let g = ConcavePart::LargestK { gamma: 1.0, k: 1 };
        let s = g.subgradient(&mat(&[3.0, -1.0]));
        assert_relative_eq!(s[(0, 0)], 1.0);
        assert_relative_eq!(s[(1, 0)], 0.0);
        // tie at the k-th magnitude goes to the lowest index
        let g = ConcavePart::LargestK { gamma: 2.0, k: 1 };
        let s = g.subgradient(&mat(&[-1.0, 1.0]));
        assert_relative_eq!(s[(0, 0)], -2.0);
        assert_relative_eq!(s[(1, 0)], 0.0);
    }

    #[test]
    fn subgradient_inequality_all_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let parts = [
            ConcavePart::Zero,
            ConcavePart::CappedExcess {
                sigma: 1.2,
                upsilon: 1.7,
            },
            ConcavePart::LargestK { gamma: 0.9, k: 4 },
        ];
        for g in &parts {
            for _ in 0..10 {
                let x = DMatrix::from_fn(5, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
                let xi = g.subgradient(&x);
                let gx = g.eval(&x);
                for _ in 0..100 {
                    let y =
                        DMatrix::from_fn(5, 2, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0);
                    let lhs = g.eval(&y);
                    let rhs = gx + xi.dot(&(&y - &x));
                    assert!(
                        lhs >= rhs - 1e-10,
                        "subgradient inequality failed for {g:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn norm_helpers() {
        assert_relative_eq!(largest_k_norm(&mat(&[3.0, -1.0, 2.0]), 2), 5.0);
        assert_relative_eq!(capped_l1(&mat(&[0.1, 5.0]), 2.0), 1.2);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let x = DMatrix::from_fn(3, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let l1: f64 = x.iter().map(|v| v.abs()).sum();
            assert_relative_eq!(largest_k_norm(&x, 6), l1, epsilon = 1e-14);
        }
    }

    #[test]
    fn l1_minus_largest_k_gap_detects_sparsity() {
        // zero gap iff at most k nonzeros
        let x = mat(&[1.0, 0.0, -2.0, 0.0]);
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        assert_relative_eq!(l1 - largest_k_norm(&x, 2), 0.0);
        assert_relative_eq!(l1 - largest_k_norm(&x, 3), 0.0);
        let y = mat(&[1.0, 0.5, -2.0, 0.0]);
        let l1y: f64 = y.iter().map(|v| v.abs()).sum();
        assert!(l1y - largest_k_norm(&y, 2) > 0.0);
    }

    #[test]
    fn dc_identity_for_the_capped_penalty() {
        // συ‖x‖₁ − σΣmax(υ|x|−1, 0) = σ·Σ min(υ|x|, 1)
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let sigma = 0.7;
        let upsilon = 2.3;
        let h = SeparablePenalty::l1(sigma * upsilon);
        let g = ConcavePart::CappedExcess { sigma, upsilon };
        for _ in 0..50 {
            let x = DMatrix::from_fn(4, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            let lhs = h.eval(&x) - g.eval(&x);
            let rhs = sigma * capped_l1(&x, upsilon);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}
