//! Iteratively reweighted least squares for the linear model y = Hx + ε.
//!
//! Every kernel in scope has a monotone score with non-increasing weight
//! ψ(r)/r, so plain IRLS (no damping) descends the objective Σ J(rᵢ). The
//! inner weighted solve scales rows by √wᵢ and uses an SVD, which also detects
//! rank deficiency.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::kernels::{Kernel, KernelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("system needs at least as many measurements as states: n = {rows}, p = {cols}")]
    Underdetermined { rows: usize, cols: usize },
    #[error("non-finite entry in the linear system")]
    NonFiniteSystem,
    #[error("kernel count {kernels} does not match measurement count {rows}")]
    KernelCountMismatch { kernels: usize, rows: usize },
    #[error("weight vector length {weights} does not match measurement count {rows}")]
    WeightCountMismatch { weights: usize, rows: usize },
    #[error("invalid weight at row {0}")]
    InvalidWeight(usize),
    #[error("singular geometry")]
    SingularGeometry,
    #[error("all measurements rejected")]
    AllMeasurementsRejected,
    #[error("invalid solver settings: tol = {tol}, max_iter = {max_iter}")]
    InvalidSettings { tol: f64, max_iter: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// The regression problem: geometry matrix H and measurement differences y.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    geometry: DMatrix<f64>,
    delta_y: DVector<f64>,
}

impl LinearSystem {
    pub fn new(geometry: DMatrix<f64>, delta_y: DVector<f64>) -> Result<Self, SolverError> {
        let (n, p) = (geometry.nrows(), geometry.ncols());
        if n < p || p == 0 {
            return Err(SolverError::Underdetermined { rows: n, cols: p });
        }
        if delta_y.len() != n {
            return Err(SolverError::WeightCountMismatch {
                weights: delta_y.len(),
                rows: n,
            });
        }
        if geometry.iter().any(|v| !v.is_finite()) || delta_y.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFiniteSystem);
        }
        Ok(Self { geometry, delta_y })
    }

    pub fn geometry(&self) -> &DMatrix<f64> {
        &self.geometry
    }

    pub fn delta_y(&self) -> &DVector<f64> {
        &self.delta_y
    }

    pub fn rows(&self) -> usize {
        self.geometry.nrows()
    }

    pub fn states(&self) -> usize {
        self.geometry.ncols()
    }

    pub fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.delta_y - &self.geometry * x
    }
}

/// Estimate with convergence metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub state_x: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_residuals: DVector<f64>,
    pub objective_trace: Vec<f64>,
}

/// Minimizer of Σ wᵢ (yᵢ - Hᵢx)² via SVD of the √w-scaled system.
pub fn weighted_ls_step(sys: &LinearSystem, weights: &[f64]) -> Result<DVector<f64>, SolverError> {
    let (n, p) = (sys.rows(), sys.states());
    if weights.len() != n {
        return Err(SolverError::WeightCountMismatch {
            weights: weights.len(),
            rows: n,
        });
    }
    let mut positive = 0usize;
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(SolverError::InvalidWeight(i));
        }
        if w > 0.0 {
            positive += 1;
        }
    }
    if positive == 0 {
        return Err(SolverError::AllMeasurementsRejected);
    }
    if positive < p {
        return Err(SolverError::SingularGeometry);
    }

    let mut scaled = sys.geometry.clone();
    let mut rhs = sys.delta_y.clone();
    for i in 0..n {
        let sw = weights[i].sqrt();
        for j in 0..p {
            scaled[(i, j)] *= sw;
        }
        rhs[i] *= sw;
    }
    let svd = scaled.svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if max_sv == 0.0 {
        return Err(SolverError::SingularGeometry);
    }
    let eps = max_sv * 1e-12;
    if svd.rank(eps) < p {
        return Err(SolverError::SingularGeometry);
    }
    svd.solve(&rhs, eps)
        .map_err(|_| SolverError::SingularGeometry)
}

fn objective(sys: &LinearSystem, kernels: &[Kernel], x: &DVector<f64>) -> Result<f64, SolverError> {
    let r = sys.residuals(x);
    let mut total = 0.0;
    for (i, kernel) in kernels.iter().enumerate() {
        total += kernel.eval(r[i])?.loss;
    }
    if !total.is_finite() {
        return Err(SolverError::NonFiniteSystem);
    }
    Ok(total)
}

/// IRLS estimate of x under per-measurement kernels.
///
/// Starts from `x0` when given, otherwise from the plain LS solution (one
/// unit-weight step). Each iteration evaluates residuals, reweights by
/// ψ(rᵢ)/rᵢ, and re-solves; stops when the infinity norm of the state update
/// drops below `tol` or after `max_iter` iterations.
pub fn irls_solve(
    sys: &LinearSystem,
    kernels: &[Kernel],
    x0: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<Solution, SolverError> {
    if kernels.len() != sys.rows() {
        return Err(SolverError::KernelCountMismatch {
            kernels: kernels.len(),
            rows: sys.rows(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) || max_iter < 1 {
        return Err(SolverError::InvalidSettings { tol, max_iter });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != sys.states() {
                return Err(SolverError::WeightCountMismatch {
                    weights: x0.len(),
                    rows: sys.states(),
                });
            }
            x0.clone()
        }
        None => weighted_ls_step(sys, &vec![1.0; sys.rows()])?,
    };

    let mut trace = vec![objective(sys, kernels, &x)?];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let r = sys.residuals(&x);
        let mut weights = Vec::with_capacity(sys.rows());
        for (i, kernel) in kernels.iter().enumerate() {
            weights.push(kernel.eval(r[i])?.weight);
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(SolverError::AllMeasurementsRejected);
        }
        let x_new = weighted_ls_step(sys, &weights)?;
        let step = (&x_new - &x).amax();
        x = x_new;
        trace.push(objective(sys, kernels, &x)?);
        if step < tol {
            converged = true;
            break;
        }
    }
    let final_residuals = sys.residuals(&x);
    Ok(Solution {
        state_x: x,
        iterations,
        converged,
        final_residuals,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Method;
    use crate::seeding::{substream, Domain};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ones_column(n: usize) -> DMatrix<f64> {
        DMatrix::from_element(n, 1, 1.0)
    }

    #[test]
    fn weighted_step_reduces_to_ols_with_unit_weights() {
        // y = 2x + 1 on x = 0..3 with design [1, x]
        let h = DMatrix::from_row_slice(4, 2, &[1., 0., 1., 1., 1., 2., 1., 3.]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let sys = LinearSystem::new(h, y).unwrap();
        let x = weighted_ls_step(&sys, &[1.0; 4]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_weight_equals_row_deletion() {
        let h = ones_column(4);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 100.0]);
        let sys = LinearSystem::new(h, y).unwrap();
        let with_zero = weighted_ls_step(&sys, &[1.0, 1.0, 1.0, 0.0]).unwrap();
        let trimmed = LinearSystem::new(ones_column(3), DVector::from_vec(vec![1.0, 2.0, 3.0]))
            .unwrap();
        let deleted = weighted_ls_step(&trimmed, &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(with_zero[0], deleted[0], epsilon = 1e-12);
    }

    #[test]
    fn weighted_mean_hand_value() {
        // H = (1;1), y = (0;10), w = (1,3): x = 30/4 = 7.5
        let sys = LinearSystem::new(ones_column(2), DVector::from_vec(vec![0.0, 10.0])).unwrap();
        let x = weighted_ls_step(&sys, &[1.0, 3.0]).unwrap();
        assert_relative_eq!(x[0], 7.5, max_relative = 1e-12);
    }

    #[test]
    fn rank_deficient_geometry_is_rejected() {
        let h = DMatrix::from_row_slice(3, 2, &[1., 2., 2., 4., 3., 6.]);
        let sys = LinearSystem::new(h, DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(
            weighted_ls_step(&sys, &[1.0; 3]).unwrap_err(),
            SolverError::SingularGeometry
        );
        // enough rows but too few carrying weight
        let h = DMatrix::from_row_slice(3, 2, &[1., 0., 0., 1., 1., 1.]);
        let sys = LinearSystem::new(h, DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(
            weighted_ls_step(&sys, &[1.0, 0.0, 0.0]).unwrap_err(),
            SolverError::SingularGeometry
        );
    }

    #[test]
    fn all_zero_weights_rejected() {
        let sys = LinearSystem::new(ones_column(2), DVector::from_vec(vec![0.0, 1.0])).unwrap();
        assert_eq!(
            weighted_ls_step(&sys, &[0.0, 0.0]).unwrap_err(),
            SolverError::AllMeasurementsRejected
        );
    }

    #[test]
    fn noise_free_system_recovers_truth_immediately() {
        let h = DMatrix::from_row_slice(5, 2, &[1., 0.5, 1., -1., 1., 2., 1., 0., 1., 1.]);
        let x_true = DVector::from_vec(vec![3.0, -2.0]);
        let y = &h * &x_true;
        let sys = LinearSystem::new(h, y).unwrap();
        for kernel in [
            Kernel::ls(1.0).unwrap(),
            Kernel::conventional_huber(1.0).unwrap(),
            Kernel::lah(1.0).unwrap(),
            Kernel::qlc(1.0).unwrap(),
        ] {
            let sol = irls_solve(&sys, &[kernel; 5], None, 1e-8, 50).unwrap();
            assert!(sol.converged);
            assert!(sol.iterations <= 2, "{kernel:?} took {}", sol.iterations);
            assert!((sol.state_x - &x_true).amax() < 1e-9);
        }
    }

    #[test]
    fn one_d_lah_matches_grid_search_oracle() {
        let y = DVector::from_vec(vec![0.0, 0.1, -0.1, 0.05, 100.0]);
        let sys = LinearSystem::new(ones_column(5), y.clone()).unwrap();
        let kernels = vec![Kernel::lah(1.0).unwrap(); 5];
        let sol = irls_solve(&sys, &kernels, None, 1e-10, 200).unwrap();
        assert!(sol.converged);

        // brute-force scan of the scalar objective on [-5, 5] step 1e-5
        let lah = crate::kernels::HuberParams::from_logistic_scale(1.0).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=1_000_000 {
            let x = -5.0 + i as f64 * 1e-5;
            let obj: f64 = y.iter().map(|&yi| lah.eval(yi - x).unwrap().loss).sum();
            if obj < best.0 {
                best = (obj, x);
            }
        }
        assert!(
            (sol.state_x[0] - best.1).abs() < 1e-4,
            "irls {} vs grid {}",
            sol.state_x[0],
            best.1
        );
    }

    #[test]
    fn ls_kernel_is_pulled_to_the_mean() {
        let y = DVector::from_vec(vec![0.0, 0.1, -0.1, 0.05, 100.0]);
        let sys = LinearSystem::new(ones_column(5), y).unwrap();
        let kernels = vec![Kernel::ls(1.0).unwrap(); 5];
        let sol = irls_solve(&sys, &kernels, None, 1e-10, 50).unwrap();
        assert_relative_eq!(sol.state_x[0], 20.01, max_relative = 1e-10);
    }

    fn random_system(seed: u64, n: usize, p: usize) -> (LinearSystem, Vec<Kernel>) {
        let mut rng = substream(seed, Domain::SampleSet, 100);
        let h = DMatrix::from_fn(n, p, |_, _| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v
        });
        let y = DVector::from_fn(n, |i, _| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            let outlier = if i % 4 == 0 { 25.0 } else { 0.0 };
            noise + outlier
        });
        let kernels: Vec<Kernel> = (0..n)
            .map(|i| match i % 4 {
                0 => Kernel::ls(1.0).unwrap(),
                1 => Kernel::conventional_huber(0.8).unwrap(),
                2 => Kernel::lah(0.9).unwrap(),
                _ => Kernel::qlc(1.1).unwrap(),
            })
            .collect();
        (LinearSystem::new(h, y).unwrap(), kernels)
    }

    #[test]
    fn objective_trace_is_monotone_non_increasing() {
        for seed in 0..12 {
            let (sys, kernels) = random_system(seed, 12, 3);
            let sol = irls_solve(&sys, &kernels, None, 1e-10, 80).unwrap();
            for w in sol.objective_trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-9,
                    "seed {seed}: objective rose from {} to {}",
                    w[0],
                    w[1]
                );
            }
            if sol.converged {
                let last = sol.objective_trace[sol.objective_trace.len() - 1];
                let prev = sol.objective_trace[sol.objective_trace.len() - 2];
                assert!((prev - last).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn convergence_is_independent_of_initialization() {
        for seed in 20..26 {
            let (sys, kernels) = random_system(seed, 10, 2);
            let a = irls_solve(&sys, &kernels, None, 1e-10, 200).unwrap();
            let far = DVector::from_vec(vec![1.0e4, -7.0e3]);
            let b = irls_solve(&sys, &kernels, Some(&far), 1e-10, 200).unwrap();
            assert!(
                (a.state_x - b.state_x).amax() < 1e-6,
                "seed {seed}: initialization changed the solution"
            );
        }
    }

    #[test]
    fn oracle_equivalence_on_small_2d_system() {
        // 2-D grid search against IRLS on a mixed-kernel system.
        let mut rng = substream(3, Domain::SampleSet, 200);
        let h = DMatrix::from_fn(6, 2, |_, _| rng.gen_range(-1.0..1.0));
        let y = DVector::from_fn(6, |i, _| if i == 5 { 30.0 } else { rng.gen_range(-0.2..0.2) });
        let sys = LinearSystem::new(h.clone(), y.clone()).unwrap();
        let kernels = vec![Kernel::lah(0.5).unwrap(); 6];
        let sol = irls_solve(&sys, &kernels, None, 1e-10, 300).unwrap();
        let objective_at = |a: f64, b: f64| -> f64 {
            (0..6)
                .map(|i| {
                    let r = y[i] - h[(i, 0)] * a - h[(i, 1)] * b;
                    kernels[i].eval(r).unwrap().loss
                })
                .sum()
        };
        // coarse-to-fine grid around the IRLS answer, spacing 1e-3
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in -400..=400 {
            for j in -400..=400 {
                let a = sol.state_x[0] + i as f64 * 1e-3;
                let b = sol.state_x[1] + j as f64 * 1e-3;
                let o = objective_at(a, b);
                if o < best.0 {
                    best = (o, a, b);
                }
            }
        }
        assert!((sol.state_x[0] - best.1).abs() <= 1e-2);
        assert!((sol.state_x[1] - best.2).abs() <= 1e-2);
    }

    #[test]
    fn robust_matches_ls_on_clean_gaussian_data() {
        let n = 200;
        let mut rng = substream(8, Domain::SampleSet, 300);
        let h = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.gen_range(-1.0..1.0) });
        let y = DVector::from_fn(n, |i, _| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            2.0 * h[(i, 1)] + 0.5 + noise
        });
        let sys = LinearSystem::new(h.clone(), y).unwrap();
        let ls = irls_solve(&sys, &vec![Kernel::ls(1.0).unwrap(); n], None, 1e-10, 50).unwrap();
        let lah = irls_solve(&sys, &vec![Kernel::lah(1.0).unwrap(); n], None, 1e-10, 100).unwrap();
        // standard errors of the LS estimate from (H^T H)^{-1}
        let gram = h.transpose() * &h;
        let cov = gram.try_inverse().unwrap();
        for j in 0..2 {
            let se = cov[(j, j)].sqrt();
            assert!(
                (ls.state_x[j] - lah.state_x[j]).abs() < 3.0 * se,
                "component {j}: LS {} vs LAH {} (se {se})",
                ls.state_x[j],
                lah.state_x[j]
            );
        }
    }

    #[test]
    fn method_kernel_construction() {
        let k = Method::Lah.kernel(3.0, 1.5).unwrap();
        match k {
            Kernel::Huber(p) => {
                assert_eq!(p.threshold_c, std::f64::consts::SQRT_2);
                assert_relative_eq!(
                    p.scale_sigma,
                    std::f64::consts::SQRT_2 * 1.5,
                    max_relative = 1e-15
                );
            }
            _ => panic!("expected Huber kernel"),
        }
        assert!(matches!(Method::Ls.kernel(3.0, 1.5).unwrap(), Kernel::Ls { .. }));
    }
}
