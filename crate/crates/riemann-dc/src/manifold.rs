//! Stiefel/sphere geometry: tangent projection, polar retraction, Riemannian
//! gradient, and an orthonormal basis of the normal space.
//!
//! The Stiefel manifold St(n,r) is the set of n×r matrices with orthonormal
//! columns; the unit sphere is the r = 1 case. All inner products are
//! Frobenius.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Orthonormality drift tolerated before a point is re-orthonormalized.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Relative tolerance on the tangency constraint Xᵀη + ηᵀX = 0.
pub const TANGENCY_TOL: f64 = 1e-8;

/// A point on St(n,r): an n×r matrix X with XᵀX = I_r.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    mat: DMatrix<f64>,
}

impl StiefelPoint {
    /// Wraps a matrix as a manifold point, re-orthonormalizing (thin QR with
    /// sign-fixed diagonal) when the columns have drifted past
    /// [`ORTHONORMALITY_TOL`].
    pub fn new(mat: DMatrix<f64>) -> Self {
        assert!(
            mat.ncols() >= 1 && mat.nrows() >= mat.ncols(),
            "Stiefel point needs n >= r >= 1, got {}x{}",
            mat.nrows(),
            mat.ncols()
        );
        let point = Self { mat };
        if point.orthonormality_defect() > ORTHONORMALITY_TOL {
            Self {
                mat: orthonormalize(&point.mat),
            }
        } else {
            point
        }
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn r(&self) -> usize {
        self.mat.ncols()
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// ‖XᵀX − I_r‖_F.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.mat.tr_mul(&self.mat);
        (gram - DMatrix::identity(self.r(), self.r())).norm()
    }
}

/// Thin QR with the diagonal of R forced nonnegative, so the factor is a
/// deterministic function of the input.
fn orthonormalize(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let r = mat.ncols();
    let qr = mat.clone().qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..r {
        if rr[(j, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// A tangent vector η at a base point, satisfying Xᵀη + ηᵀX = 0.
#[derive(Clone, Debug)]
pub struct TangentVector {
    mat: DMatrix<f64>,
    base: StiefelPoint,
}

impl TangentVector {
    /// Wraps a matrix known to be tangent at `base`; asserts the constraint.
    pub fn new(base: StiefelPoint, mat: DMatrix<f64>) -> Self {
        assert_eq!(mat.nrows(), base.n());
        assert_eq!(mat.ncols(), base.r());
        let v = Self { mat, base };
        let defect = v.tangency_defect();
        assert!(
            defect <= TANGENCY_TOL * v.mat.norm().max(1.0),
            "matrix is not tangent: defect {defect:.3e}"
        );
        v
    }

    /// The zero vector of T_X M.
    pub fn zero(base: StiefelPoint) -> Self {
        let mat = DMatrix::zeros(base.n(), base.r());
        Self { mat, base }
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// ‖Xᵀη + ηᵀX‖_F.
    pub fn tangency_defect(&self) -> f64 {
        let xe = self.base.mat().tr_mul(&self.mat);
        (&xe + xe.transpose()).norm()
    }

    pub fn scaled(&self, t: f64) -> TangentVector {
        Self {
            mat: &self.mat * t,
            base: self.base.clone(),
        }
    }
}

/// Projects an ambient matrix onto the tangent space at X:
/// d − X(Xᵀd + dᵀX)/2. Idempotent and self-adjoint.
pub fn tangent_project(x: &StiefelPoint, d: &DMatrix<f64>) -> TangentVector {
    TangentVector {
        mat: tangent_project_mat(x, d),
        base: x.clone(),
    }
}

pub(crate) fn tangent_project_mat(x: &StiefelPoint, d: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(d.nrows(), x.n(), "dimension mismatch");
    assert_eq!(d.ncols(), x.r(), "dimension mismatch");
    let xd = x.mat().tr_mul(d);
    let sym = (&xd + xd.transpose()) * 0.5;
    d - x.mat() * sym
}

/// Riemannian gradient: the tangent projection of the Euclidean gradient.
pub fn riemannian_gradient(x: &StiefelPoint, egrad: &DMatrix<f64>) -> TangentVector {
    tangent_project(x, egrad)
}

/// Polar retraction (X + η)(I_r + ηᵀη)^{-1/2}. Well-defined for every
/// tangent η since I + ηᵀη is positive definite.
pub fn retract(x: &StiefelPoint, eta: &TangentVector) -> StiefelPoint {
    let r = x.r();
    let gram = eta.mat().tr_mul(eta.mat()) + DMatrix::identity(r, r);
    let eig = gram.symmetric_eigen();
    let inv_sqrt = DMatrix::from_fn(r, r, |i, j| {
        let mut s = 0.0;
        for k in 0..r {
            s += eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)] / eig.eigenvalues[k].sqrt();
        }
        s
    });
    StiefelPoint::new((x.mat() + eta.mat()) * inv_sqrt)
}

/// Orthonormal basis {X·S_ab} of the normal space at X, where {S_ab} is the
/// standard orthonormal basis of r×r symmetric matrices (S_aa = e_a e_aᵀ,
/// S_ab = (e_a e_bᵀ + e_b e_aᵀ)/√2 for a < b). The basis has q = r(r+1)/2
/// elements; on the sphere it is the single column X.
///
/// `apply`/`adjoint` use the structural form B·λ = X·sym(λ) and
/// Bᵀd = coords(sym(Xᵀd)) instead of materializing the columns.
#[derive(Clone, Debug)]
pub struct NormalBasis {
    base: StiefelPoint,
    // upper-triangle index pairs (a, b), a <= b, row-major
    pairs: Vec<(usize, usize)>,
}

impl NormalBasis {
    pub fn new(base: &StiefelPoint) -> Self {
        let r = base.r();
        let mut pairs = Vec::with_capacity(r * (r + 1) / 2);
        for a in 0..r {
            for b in a..r {
                pairs.push((a, b));
            }
        }
        Self {
            base: base.clone(),
            pairs,
        }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    /// Number of basis elements, q = r(r+1)/2.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The symmetric r×r matrix with the given coefficient vector.
    fn sym_from_coords(&self, lambda: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(lambda.len(), self.len());
        let r = self.base.r();
        let mut s = DMatrix::zeros(r, r);
        for (idx, &(a, b)) in self.pairs.iter().enumerate() {
            if a == b {
                s[(a, a)] = lambda[idx];
            } else {
                let v = lambda[idx] / std::f64::consts::SQRT_2;
                s[(a, b)] = v;
                s[(b, a)] = v;
            }
        }
        s
    }

    /// B·λ = Σ_a λ_a B_a as an n×r matrix.
    pub fn apply(&self, lambda: &DVector<f64>) -> DMatrix<f64> {
        self.base.mat() * self.sym_from_coords(lambda)
    }

    /// Bᵀd = (⟨B_a, d⟩)_a ∈ R^q.
    pub fn adjoint(&self, d: &DMatrix<f64>) -> DVector<f64> {
        assert_eq!(d.nrows(), self.base.n());
        assert_eq!(d.ncols(), self.base.r());
        let xd = self.base.mat().tr_mul(d);
        let sym = (&xd + xd.transpose()) * 0.5;
        DVector::from_fn(self.len(), |idx, _| {
            let (a, b) = self.pairs[idx];
            if a == b {
                sym[(a, a)]
            } else {
                std::f64::consts::SQRT_2 * sym[(a, b)]
            }
        })
    }

    /// Materializes the idx-th basis element X·S_ab.
    pub fn column(&self, idx: usize) -> DMatrix<f64> {
        let mut lambda = DVector::zeros(self.len());
        lambda[idx] = 1.0;
        self.apply(&lambda)
    }

    pub fn columns(&self) -> Vec<DMatrix<f64>> {
        (0..self.len()).map(|i| self.column(i)).collect()
    }
}

/// Draws a uniformly random point via QR of a Gaussian matrix.
pub fn random_point<R: Rng>(n: usize, r: usize, rng: &mut R) -> StiefelPoint {
    let g = DMatrix::from_fn(n, r, |_, _| rng.sample(StandardNormal));
    StiefelPoint::new(orthonormalize(&g))
}

/// Draws a Gaussian ambient matrix projected onto T_X M.
pub fn random_tangent<R: Rng>(x: &StiefelPoint, rng: &mut R) -> TangentVector {
    let g = DMatrix::from_fn(x.n(), x.r(), |_, _| rng.sample(StandardNormal));
    tangent_project(x, &g)
}
