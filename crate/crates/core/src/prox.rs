//! Exact Euclidean projections onto the solver's three constraint sets:
//! the per-component box, the measurement residual ball and the
//! nuclear-norm ball. All are SVD-based and exact up to root-finding
//! tolerance; none is an approximate prox step.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linop::ForwardOperator;
use crate::scalar::{real, Cx, Scalar};

/// Clamp real and imaginary parts of every entry to [-b, b].
pub fn project_box<T: Scalar>(x: &DVector<Cx<T>>, b: T) -> DVector<Cx<T>> {
    x.map(|z| Complex::new(z.re.clamp(-b, b), z.im.clamp(-b, b)))
}

/// Largest box violation of x: how far any Re/Im part exceeds [-b, b].
pub fn box_violation<T: Scalar>(x: &DVector<Cx<T>>, b: T) -> T {
    x.iter()
        .map(|z| (z.re.abs().max(z.im.abs()) - b).max(T::zero()))
        .fold(T::zero(), |a, v| a.max(v))
}

/// Euclidean projection of a nonnegative vector onto {t >= 0, sum t <= s}.
///
/// If the budget already holds the input is returned unchanged; otherwise
/// the unique soft threshold theta with sum (sigma - theta)_+ = s is applied.
pub fn project_l1_simplex<T: Scalar>(sigma: &[T], s: T) -> Vec<T> {
    debug_assert!(sigma.iter().all(|&v| v >= T::zero()));
    let total: T = sigma.iter().fold(T::zero(), |a, &b| a + b);
    if total <= s {
        return sigma.to_vec();
    }
    if s <= T::zero() {
        return vec![T::zero(); sigma.len()];
    }
    let mut sorted = sigma.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - s) / real::<T>((k + 1) as f64);
        if k + 1 == sorted.len() || sorted[k + 1] <= candidate {
            theta = candidate;
            break;
        }
    }
    sigma
        .iter()
        .map(|&v| (v - theta).max(T::zero()))
        .collect()
}

/// Project a complex matrix onto the nuclear-norm ball of radius s by
/// projecting its singular values onto the l1 simplex.
pub fn project_nuclear_ball<T: Scalar>(x: &DMatrix<Cx<T>>, s: T) -> DMatrix<Cx<T>> {
    let svd = x.clone().svd(true, true);
    let total: T = svd.singular_values.iter().fold(T::zero(), |a, &b| a + b);
    if total <= s {
        return x.clone();
    }
    let sig: Vec<T> = svd.singular_values.iter().cloned().collect();
    let projected = project_l1_simplex(&sig, s);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let k = projected.len();
    let mut scaled = u.clone();
    for c in 0..k {
        let f = projected[c];
        for r in 0..scaled.nrows() {
            scaled[(r, c)] = scaled[(r, c)].scale(f);
        }
    }
    &scaled * &v_t
}

/// Nuclear norm (sum of singular values).
pub fn nuclear_norm<T: Scalar>(x: &DMatrix<Cx<T>>) -> T {
    x.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(T::zero(), |a, &b| a + b)
}

/// Shrink every singular value by `threshold` (the prox of the nuclear norm).
pub fn singular_value_soft_threshold<T: Scalar>(
    x: &DMatrix<Cx<T>>,
    threshold: T,
) -> DMatrix<Cx<T>> {
    if threshold <= T::zero() {
        return x.clone();
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let mut scaled = u.clone();
    for c in 0..svd.singular_values.len() {
        let f = (svd.singular_values[c] - threshold).max(T::zero());
        for r in 0..scaled.nrows() {
            scaled[(r, c)] = scaled[(r, c)].scale(f);
        }
    }
    &scaled * &v_t
}

/// Thin SVD factors of a dense matrix, sorted by descending singular value.
#[derive(Debug, Clone)]
pub struct DenseSvd<T> {
    u: DMatrix<Cx<T>>,
    sigma: Vec<T>,
    v: DMatrix<Cx<T>>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> DenseSvd<T> {
    pub fn from_matrix(a: &DMatrix<Cx<T>>) -> Self {
        let (rows, cols) = (a.nrows(), a.ncols());
        let svd = a.clone().svd(true, true);
        let u_raw = svd.u.expect("svd with u");
        let v_t_raw = svd.v_t.expect("svd with v_t");
        let k = svd.singular_values.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[j]
                .partial_cmp(&svd.singular_values[i])
                .expect("finite singular values")
        });
        let sigma: Vec<T> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u = DMatrix::from_fn(rows, k, |r, c| u_raw[(r, order[c])]);
        let v = DMatrix::from_fn(cols, k, |r, c| v_t_raw[(order[c], r)].conj());
        Self {
            u,
            sigma,
            v,
            rows,
            cols,
        }
    }

    pub fn rank_count(&self) -> usize {
        self.sigma.len()
    }

    /// Largest singular value (operator norm).
    pub fn op_norm(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    pub fn singular_values(&self) -> &[T] {
        &self.sigma
    }

    /// Reassemble U diag(sigma) V^H (used by consistency checks).
    pub fn reconstruct(&self) -> DMatrix<Cx<T>> {
        let mut scaled = self.u.clone();
        for c in 0..self.sigma.len() {
            let f = self.sigma[c];
            for r in 0..self.rows {
                scaled[(r, c)] = scaled[(r, c)].scale(f);
            }
        }
        &scaled * self.v.adjoint()
    }

    /// Smallest residual ||y - A x|| achievable without any constraint:
    /// the component of y outside the (numerical) range of A.
    pub fn residual_floor(&self, y: &DVector<Cx<T>>, cutoff: T) -> T {
        let w = self.u.ad_mul(y);
        let mut inside = T::zero();
        for (i, &sv) in self.sigma.iter().enumerate() {
            if sv > cutoff {
                inside += w[i].norm_sqr();
            }
        }
        (y.norm_squared() - inside).max(T::zero()).sqrt()
    }

    /// Euclidean projection of x onto {x' : ||y - A x'|| <= r}.
    ///
    /// If x is already feasible, it is returned unchanged. Otherwise the
    /// unique multiplier lambda > 0 making the constraint active is found by
    /// bisection on a geometrically grown bracket, and the projected point
    /// (I + lambda A^H A)^{-1} (x + lambda A^H y) is assembled from the
    /// cached factors.
    pub fn project_residual_ball(
        &self,
        x: &DVector<Cx<T>>,
        y: &DVector<Cx<T>>,
        r: T,
        root_tol: T,
        cutoff: T,
    ) -> Result<DVector<Cx<T>>> {
        if x.len() != self.cols || y.len() != self.rows {
            return Err(Error::Dimension {
                context: "project_residual_ball",
                expected: self.cols,
                got: x.len(),
            });
        }
        let w = self.u.ad_mul(y);
        let z = self.v.ad_mul(x);
        let perp_sq = (y.norm_squared() - w.norm_squared()).max(T::zero());

        // rho_i = (U^H y)_i - sigma_i (V^H x)_i drives the residual
        let rho: Vec<Cx<T>> = (0..self.sigma.len())
            .map(|i| w[i] - z[i].scale(self.sigma[i]))
            .collect();

        let phi = |lambda: T| -> T {
            let mut acc = perp_sq;
            for (i, &sv) in self.sigma.iter().enumerate() {
                let denom = T::one() + lambda * sv * sv;
                acc += rho[i].norm_sqr() / (denom * denom);
            }
            acc
        };

        let current = phi(T::zero()).sqrt();
        if current <= r {
            return Ok(x.clone());
        }

        // residual as lambda -> infinity: components with (numerically)
        // zero singular value can never be reduced
        let mut limit_sq = perp_sq;
        for (i, &sv) in self.sigma.iter().enumerate() {
            if sv <= cutoff {
                limit_sq += rho[i].norm_sqr();
            }
        }
        if limit_sq.sqrt() > r {
            return Err(Error::Infeasible(format!(
                "residual ball of radius {} is unreachable; best possible {}",
                r.to_f64_lossy(),
                limit_sq.sqrt().to_f64_lossy()
            )));
        }

        let mut hi = T::one();
        let mut guard = 0;
        while phi(hi).sqrt() > r {
            hi += hi;
            guard += 1;
            if guard > 400 {
                return Err(Error::Solver(
                    "residual-ball bracket growth failed to enclose the root".into(),
                ));
            }
        }
        let mut lo = T::zero();
        let mut lambda = hi;
        for _ in 0..200 {
            let mid = (lo + hi) * real::<T>(0.5);
            let value = phi(mid).sqrt();
            if value > r {
                lo = mid;
            } else {
                hi = mid;
                lambda = mid;
            }
            if (value - r).abs() <= root_tol && value <= r {
                lambda = mid;
                break;
            }
        }

        // x' = x + V (z' - z) with z'_i = (z_i + lambda sigma_i w_i) / (1 + lambda sigma_i^2)
        let mut delta = DVector::from_element(self.sigma.len(), Complex::new(T::zero(), T::zero()));
        for (i, &sv) in self.sigma.iter().enumerate() {
            let denom = T::one() + lambda * sv * sv;
            let z_new = (z[i] + w[i].scale(lambda * sv)) / Complex::new(denom, T::zero());
            delta[i] = z_new - z[i];
        }
        Ok(x + &self.v * delta)
    }
}

/// Precomputed projection machinery for one forward operator.
#[derive(Debug, Clone)]
pub struct ProjectionToolkit<T> {
    op: ForwardOperator<T>,
    svd: DenseSvd<T>,
    box_bound: T,
    root_tol: T,
    svd_cutoff: T,
}

impl<T: Scalar> ProjectionToolkit<T> {
    pub fn new(op: ForwardOperator<T>) -> Self {
        let svd = DenseSvd::from_matrix(&op.dense());
        let n = op.dims().n_unknown();
        let box_bound = T::one() / real::<T>(n as f64).sqrt();
        Self {
            op,
            svd,
            box_bound,
            root_tol: real::<T>(1e-10),
            svd_cutoff: real::<T>(1e-12),
        }
    }

    pub fn op(&self) -> &ForwardOperator<T> {
        &self.op
    }

    pub fn svd(&self) -> &DenseSvd<T> {
        &self.svd
    }

    /// Per-component bound 1/sqrt(N) of the box constraint.
    pub fn box_bound(&self) -> T {
        self.box_bound
    }

    pub fn op_norm(&self) -> T {
        self.svd.op_norm()
    }

    /// Smallest residual ||y - A x|| achievable without any constraint.
    pub fn residual_floor(&self, y: &DVector<Cx<T>>) -> T {
        self.svd.residual_floor(y, self.svd_cutoff)
    }

    pub fn project_box(&self, x: &DVector<Cx<T>>) -> DVector<Cx<T>> {
        project_box(x, self.box_bound)
    }

    pub fn project_residual_ball(
        &self,
        x: &DVector<Cx<T>>,
        y: &DVector<Cx<T>>,
        r: T,
    ) -> Result<DVector<Cx<T>>> {
        self.svd
            .project_residual_ball(x, y, r, self.root_tol, self.svd_cutoff)
    }
}
