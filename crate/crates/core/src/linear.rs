//! Per-arm online ridge regression.
//!
//! [`RidgeState`] keeps the regularized covariance `Σ = λI + Σ xxᵀ (+ γ e I)`,
//! a maintained inverse, the `Σ x·target` accumulator and the resulting
//! center `μ̂ = Σ⁻¹ b`. The linear estimate of an arm is `μ̂ᵀx` and its
//! uncertainty in direction `x` is the width `√(xᵀΣ⁻¹x)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

/// Max-abs deviation of `Σ Σ⁻¹` from the identity that triggers a rebuild.
pub const INVERSE_DRIFT_TOLERANCE: f64 = 1e-6;

/// Updates between drift checks of the maintained inverse.
const DRIFT_CHECK_INTERVAL: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeState {
    dim: usize,
    lambda: f64,
    gamma_cov: f64,
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
    b: DVector<f64>,
    mu_hat: DVector<f64>,
    update_count: u64,
}

impl RidgeState {
    /// Fresh state: `Σ = λI`, `Σ⁻¹ = I/λ`, `b = μ̂ = 0`.
    pub fn new(dim: usize, lambda: f64, gamma_cov: f64) -> Result<Self> {
        if dim == 0 {
            return Err(BanditError::param("dim", "must be at least 1"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(BanditError::param(
                "lambda",
                format!("must be > 0, got {lambda}"),
            ));
        }
        if !(gamma_cov.is_finite() && gamma_cov >= 0.0) {
            return Err(BanditError::param(
                "gamma_cov",
                format!("must be >= 0, got {gamma_cov}"),
            ));
        }
        Ok(RidgeState {
            dim,
            lambda,
            gamma_cov,
            sigma: DMatrix::identity(dim, dim) * lambda,
            sigma_inv: DMatrix::identity(dim, dim) / lambda,
            b: DVector::zeros(dim),
            mu_hat: DVector::zeros(dim),
            update_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma_cov(&self) -> f64 {
        self.gamma_cov
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn mu_hat(&self) -> &DVector<f64> {
        &self.mu_hat
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(BanditError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Linear estimate `μ̂ᵀx`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.mu_hat.iter().zip(x).map(|(m, v)| m * v).sum())
    }

    /// Normalized width `√(xᵀΣ⁻¹x)`.
    pub fn width(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(quadratic_form(&self.sigma_inv, x).max(0.0).sqrt())
    }

    /// Folds one observation into the state.
    ///
    /// `Σ ← Σ + xxᵀ + γ·e·I`, `b ← b + residual·x`. With `γ·e = 0` the inverse
    /// follows a rank-one update; otherwise it is refactored from `Σ`.
    pub fn update(&mut self, x: &[f64], residual: f64, e_knn: f64) -> Result<()> {
        self.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(BanditError::NonFinite("context"));
        }
        if !residual.is_finite() {
            return Err(BanditError::NonFinite("residual"));
        }
        if !e_knn.is_finite() {
            return Err(BanditError::NonFinite("e_knn"));
        }
        if e_knn < 0.0 {
            return Err(BanditError::param(
                "e_knn",
                format!("must be >= 0, got {e_knn}"),
            ));
        }
        let d = self.dim;
        let inflation = self.gamma_cov * e_knn;

        for j in 0..d {
            for i in 0..d {
                self.sigma[(i, j)] += x[i] * x[j];
            }
        }
        if inflation > 0.0 {
            for i in 0..d {
                self.sigma[(i, i)] += inflation;
            }
        }
        for i in 0..d {
            self.b[i] += residual * x[i];
        }
        self.update_count += 1;

        if inflation > 0.0 {
            self.rebuild_inverse();
        } else {
            self.rank_one_inverse_update(x);
            if self.update_count.is_multiple_of(DRIFT_CHECK_INTERVAL)
                && self.inverse_drift() > INVERSE_DRIFT_TOLERANCE
            {
                self.rebuild_inverse();
            }
        }
        self.mu_hat = &self.sigma_inv * &self.b;
        Ok(())
    }

    fn rank_one_inverse_update(&mut self, x: &[f64]) {
        let d = self.dim;
        let mut v = vec![0.0; d];
        for j in 0..d {
            let xj = x[j];
            if xj != 0.0 {
                let col = self.sigma_inv.column(j);
                for i in 0..d {
                    v[i] += col[i] * xj;
                }
            }
        }
        let denom = 1.0 + x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        for j in 0..d {
            let s = v[j] / denom;
            for i in 0..d {
                self.sigma_inv[(i, j)] -= v[i] * s;
            }
        }
    }

    /// Recomputes `Σ⁻¹` from `Σ` by Cholesky factorization.
    pub fn rebuild_inverse(&mut self) {
        let chol = self
            .sigma
            .clone()
            .cholesky()
            .expect("covariance stays positive definite while lambda > 0");
        self.sigma_inv = chol.inverse();
    }

    /// `max |Σ Σ⁻¹ − I|` entrywise.
    pub fn inverse_drift(&self) -> f64 {
        let prod = &self.sigma * &self.sigma_inv;
        let mut worst: f64 = 0.0;
        for j in 0..self.dim {
            for i in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `log det Σ` via Cholesky.
    pub fn log_det(&self) -> f64 {
        let chol = self
            .sigma
            .clone()
            .cholesky()
            .expect("covariance stays positive definite while lambda > 0");
        2.0 * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|v| v.ln())
            .sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// The confidence ellipsoid `{μ : (μ−μ̂)ᵀΣ(μ−μ̂) ≤ β}` around the current center.
    pub fn ball(&self, radius_sq: f64) -> Result<ConfidenceBall> {
        ConfidenceBall::new(self.mu_hat.clone(), self.sigma.clone(), radius_sq)
    }
}

/// `xᵀ A x` for a column-major square matrix.
fn quadratic_form(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        let col = a.column(j);
        let mut acc = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            acc += col[i] * xi;
        }
        total += acc * xj;
    }
    total
}

/// Ellipsoidal confidence region for an arm's parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBall {
    pub center: DVector<f64>,
    pub shape: DMatrix<f64>,
    pub radius_sq: f64,
}

impl ConfidenceBall {
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>, radius_sq: f64) -> Result<Self> {
        if !(radius_sq.is_finite() && radius_sq >= 0.0) {
            return Err(BanditError::param(
                "radius_sq",
                format!("must be >= 0, got {radius_sq}"),
            ));
        }
        Ok(ConfidenceBall {
            center,
            shape,
            radius_sq,
        })
    }

    /// `(μ−μ̂)ᵀΣ(μ−μ̂)`.
    pub fn mahalanobis_sq(&self, mu: &DVector<f64>) -> f64 {
        let diff = mu - &self.center;
        quadratic_form(&self.shape, diff.as_slice())
    }

    pub fn contains(&self, mu: &DVector<f64>) -> bool {
        self.mahalanobis_sq(mu) <= self.radius_sq
    }

    /// Largest `|(μ−μ̂)ᵀx|` over the ball: `√(β xᵀΣ⁻¹x)`.
    pub fn max_deviation(&self, x: &[f64]) -> f64 {
        let inv = self
            .shape
            .clone()
            .cholesky()
            .expect("ball shape must be positive definite")
            .inverse();
        (self.radius_sq * quadratic_form(&inv, x)).max(0.0).sqrt()
    }

    /// Projects an arbitrary nonzero direction onto the ball boundary:
    /// `μ̂ + √β · u / √(uᵀΣu)`.
    pub fn boundary_point(&self, direction: &[f64]) -> DVector<f64> {
        let u = DVector::from_column_slice(direction);
        let scale = (self.radius_sq / quadratic_form(&self.shape, direction)).sqrt();
        &self.center + u * scale
    }
}

/// Direct batch solve of `(XᵀX + λI) μ = Xᵀy`. Used as a test oracle for the
/// incremental state.
pub fn ridge_solve_batch(
    contexts: &[Vec<f64>],
    targets: &[f64],
    lambda: f64,
    dim: usize,
) -> Result<DVector<f64>> {
    if contexts.len() != targets.len() {
        return Err(BanditError::LengthMismatch {
            left: contexts.len(),
            right: targets.len(),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(BanditError::param(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    let mut gram = DMatrix::<f64>::identity(dim, dim) * lambda;
    let mut rhs = DVector::<f64>::zeros(dim);
    for (x, &y) in contexts.iter().zip(targets) {
        if x.len() != dim {
            return Err(BanditError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        let xv = DVector::from_column_slice(x);
        gram += &xv * xv.transpose();
        rhs += xv * y;
    }
    let lu = gram.lu();
    Ok(lu
        .solve(&rhs)
        .expect("lambda > 0 keeps the system nonsingular"))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn init_is_scaled_identity() {
        let s = RidgeState::new(2, 1.0, 0.0).unwrap();
        assert_eq!(s.sigma(), &DMatrix::identity(2, 2));
        assert_eq!(s.mu_hat().as_slice(), &[0.0, 0.0]);
        let s3 = RidgeState::new(3, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(s3.det(), 8.0, epsilon = 1e-12);
        assert_eq!(s3.predict(&[0.3, -2.0, 7.0]).unwrap(), 0.0);
    }

    #[test]
    fn init_rejects_bad_parameters() {
        assert!(RidgeState::new(2, 0.0, 0.0).is_err());
        assert!(RidgeState::new(2, -1.0, 0.0).is_err());
        assert!(RidgeState::new(0, 1.0, 0.0).is_err());
        assert!(RidgeState::new(2, 1.0, -0.5).is_err());
    }

    #[test]
    fn width_on_fresh_state() {
        let s = RidgeState::new(2, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.width(&[0.6, 0.8]).unwrap(), 1.0, epsilon = 1e-15);
        let s4 = RidgeState::new(2, 4.0, 0.0).unwrap();
        assert_abs_diff_eq!(s4.width(&[0.6, 0.8]).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(s4.width(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = RidgeState::new(2, 1.0, 0.0).unwrap();
        assert!(s.predict(&[1.0]).is_err());
        assert!(s.width(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn single_update_matches_hand_solution() {
        let mut s = RidgeState::new(2, 1.0, 0.0).unwrap();
        s.update(&[1.0, 0.0], 1.0, 0.0).unwrap();
        assert_eq!(
            s.sigma(),
            &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])
        );
        assert_abs_diff_eq!(s.mu_hat()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.mu_hat()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.predict(&[1.0, 0.0]).unwrap(), 0.5, epsilon = 1e-15);
        let batch = ridge_solve_batch(&[vec![1.0, 0.0]], &[1.0], 1.0, 2).unwrap();
        assert_abs_diff_eq!(batch[0], 0.5, epsilon = 1e-15);
        assert_eq!(s.update_count(), 1);
    }

    #[test]
    fn zero_residual_keeps_center_and_inflates_sigma() {
        let mut s = RidgeState::new(2, 1.0, 0.0).unwrap();
        s.update(&[1.0, 0.0], 1.0, 0.0).unwrap();
        let before = s.mu_hat().clone();
        let det_before = s.det();
        s.update(&[0.0, 1.0], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.mu_hat()[0], before[0], epsilon = 1e-15);
        assert_abs_diff_eq!(s.mu_hat()[1], before[1], epsilon = 1e-15);
        assert!(s.det() > det_before);
    }

    #[test]
    fn empty_batch_is_zero() {
        let mu = ridge_solve_batch(&[], &[], 1.0, 3).unwrap();
        assert_eq!(mu.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn update_rejects_bad_input() {
        let mut s = RidgeState::new(2, 1.0, 0.5).unwrap();
        assert!(s.update(&[1.0, 0.0], f64::NAN, 0.0).is_err());
        assert!(s.update(&[1.0, 0.0], 1.0, -1.0).is_err());
        assert!(s.update(&[1.0, f64::INFINITY], 1.0, 0.0).is_err());
        assert!(s.update(&[1.0], 1.0, 0.0).is_err());
        assert_eq!(s.update_count(), 0);
    }

    #[test]
    fn determinant_grows_by_one_plus_width_squared() {
        let mut s = RidgeState::new(3, 0.5, 0.0).unwrap();
        for x in [[0.2, -0.4, 0.9], [1.0, 0.1, 0.0], [-0.3, 0.3, 0.3]] {
            let w = s.width(&x).unwrap();
            let before = s.log_det();
            s.update(&x, 0.7, 0.0).unwrap();
            assert_abs_diff_eq!(s.log_det() - before, (1.0 + w * w).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn inflated_path_keeps_inverse_exact() {
        let mut s = RidgeState::new(3, 1.0, 0.3).unwrap();
        s.update(&[0.5, 0.5, 0.1], 1.0, 0.8).unwrap();
        s.update(&[0.1, -0.5, 0.2], -0.2, 0.1).unwrap();
        assert!(s.inverse_drift() < 1e-12);
        // Σ includes λI + two outer products + γ(e1+e2)I on the diagonal
        assert_abs_diff_eq!(
            s.sigma()[(2, 2)],
            1.0 + 0.01 + 0.04 + 0.3 * 0.9,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cauchy_schwarz_ball_width() {
        let mut s = RidgeState::new(2, 1.0, 0.0).unwrap();
        s.update(&[1.0, 0.5], 0.3, 0.0).unwrap();
        let ball = s.ball(2.0).unwrap();
        let x = [0.4, -0.9];
        let bound = ball.max_deviation(&x);
        for k in 0..64 {
            let th = k as f64 * std::f64::consts::TAU / 64.0;
            let mu = ball.boundary_point(&[th.cos(), th.sin()]);
            assert_abs_diff_eq!(ball.mahalanobis_sq(&mu), 2.0, epsilon = 1e-12);
            let dev: f64 = (&mu - &ball.center)
                .iter()
                .zip(&x)
                .map(|(a, b)| a * b)
                .sum();
            assert!(dev.abs() <= bound + 1e-12);
        }
        assert!(ConfidenceBall::new(ball.center.clone(), ball.shape.clone(), -1.0).is_err());
    }

    fn trace_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, f64)>)> {
        (1usize..6).prop_flat_map(|d| {
            let point = (prop::collection::vec(-1.0f64..1.0, d), -1.0f64..1.0);
            (Just(d), prop::collection::vec(point, 0..60))
        })
    }

    proptest! {
        #[test]
        fn incremental_matches_batch((d, trace) in trace_strategy(), lambda in 0.1f64..5.0) {
            let mut s = RidgeState::new(d, lambda, 0.0).unwrap();
            for (x, y) in &trace {
                s.update(x, *y, 0.0).unwrap();
            }
            let xs: Vec<Vec<f64>> = trace.iter().map(|(x, _)| x.clone()).collect();
            let ys: Vec<f64> = trace.iter().map(|(_, y)| *y).collect();
            let batch = ridge_solve_batch(&xs, &ys, lambda, d).unwrap();
            for i in 0..d {
                prop_assert!((batch[i] - s.mu_hat()[i]).abs() <= 1e-8);
            }
            let recomputed = s.sigma_inv() * s.b();
            for i in 0..d {
                prop_assert!((recomputed[i] - s.mu_hat()[i]).abs() <= 1e-10);
            }
            prop_assert!(s.inverse_drift() <= 1e-8);
            prop_assert!(s.log_det() >= d as f64 * lambda.ln() - 1e-9);
        }

        #[test]
        fn repeated_direction_shrinks_width(x in prop::collection::vec(-1.0f64..1.0, 3), reps in 1usize..20) {
            prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            let mut s = RidgeState::new(3, 1.0, 0.0).unwrap();
            let mut last = s.width(&x).unwrap();
            for _ in 0..reps {
                s.update(&x, 0.5, 0.0).unwrap();
                let w = s.width(&x).unwrap();
                prop_assert!(w < last);
                last = w;
            }
        }
    }
}
