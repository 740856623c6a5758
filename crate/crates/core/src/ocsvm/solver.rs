//! Pairwise coordinate (SMO) solver for the one-class dual
//!
//! ```text
//! min  1/2 a'Qa   s.t.  0 <= a_i <= 1/(nu n),  sum_i a_i = 1
//! ```
//!
//! Each step picks the maximal violating pair and moves mass between the
//! two coefficients analytically, so the simplex constraint holds exactly
//! (up to rounding) after every update.

use log::{debug, warn};

use super::cache::KernelCache;
use super::kernel::KernelSpec;
use super::model::{box_upper, offset_from_gradient, OcSvmModel};
use crate::data_io::SparseRow;
use crate::error::{Error, Result};

pub const DEFAULT_CACHE_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OcSvmParams {
    pub nu: f64,
    pub kernel: KernelSpec,
    pub tol: f64,
    /// `None` means `max(10 n d, 100_000)`.
    pub max_iter: Option<usize>,
    pub cache_bytes: usize,
}

impl OcSvmParams {
    pub fn new(nu: f64, kernel: KernelSpec) -> Self {
        OcSvmParams {
            nu,
            kernel,
            tol: 1e-3,
            max_iter: None,
            cache_bytes: DEFAULT_CACHE_BYTES,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::arg(format!("nu must lie in (0, 1], got {}", self.nu)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::arg(format!("tol must be positive, got {}", self.tol)));
        }
        self.kernel.validate()
    }
}

/// Outcome of a training run. When the iteration budget runs out the model
/// is still returned, with `converged == false` and the residual attached.
#[derive(Debug, Clone)]
pub struct OcSvmFit {
    pub model: OcSvmModel,
    pub iterations: usize,
    /// Maximal pair violation at exit.
    pub residual: f64,
    pub converged: bool,
}

struct SolverState<'a> {
    alpha: Vec<f64>,
    grad: Vec<f64>,
    diag: Vec<f64>,
    cache: KernelCache<'a>,
    upper: f64,
}

impl SolverState<'_> {
    /// `(i, j, violation)`: `i` maximizes `-G` over coefficients that can
    /// grow, `j` minimizes it over coefficients that can shrink.
    fn select_pair(&self) -> Option<(usize, usize, f64)> {
        let mut up = None;
        let mut up_val = f64::NEG_INFINITY;
        let mut low = None;
        let mut low_val = f64::INFINITY;
        for (t, (&a, &g)) in self.alpha.iter().zip(&self.grad).enumerate() {
            if a < self.upper && -g > up_val {
                up_val = -g;
                up = Some(t);
            }
            if a > 0.0 && -g < low_val {
                low_val = -g;
                low = Some(t);
            }
        }
        Some((up?, low?, up_val - low_val))
    }

    fn step(&mut self, i: usize, j: usize) {
        let qi = self.cache.row(i);
        let qj = self.cache.row(j);
        let mut quad = self.diag[i] + self.diag[j] - 2.0 * qi[j];
        if quad <= 0.0 {
            quad = 1e-12;
        }
        let room_i = self.upper - self.alpha[i];
        let room_j = self.alpha[j];
        let newton = (self.grad[j] - self.grad[i]) / quad;
        let t = newton.min(room_i).min(room_j);
        if t <= 0.0 {
            return;
        }
        self.alpha[i] = if t == room_i { self.upper } else { self.alpha[i] + t };
        self.alpha[j] = if t == room_j { 0.0 } else { self.alpha[j] - t };
        for (g, (a, b)) in self.grad.iter_mut().zip(qi.iter().zip(qj.iter())) {
            *g += t * (a - b);
        }
    }
}

pub fn train_ocsvm(x: &[SparseRow], params: &OcSvmParams) -> Result<OcSvmFit> {
    params.validate()?;
    let n = x.len();
    if n < 2 {
        return Err(Error::arg(format!(
            "one-class training needs at least 2 rows, got {n}"
        )));
    }
    let dim = x[0].dim();
    if x.iter().any(|r| r.dim() != dim) {
        return Err(Error::arg("training rows differ in dimension"));
    }
    let max_iter = params
        .max_iter
        .unwrap_or_else(|| (10 * n * dim.max(1)).max(100_000));
    let upper = box_upper(params.nu, n);

    // Fill coefficients at the bound in row order until the unit mass is spent.
    let mut alpha = vec![0.0; n];
    let mut remaining = 1.0f64;
    for a in alpha.iter_mut() {
        if remaining <= 0.0 {
            break;
        }
        *a = upper.min(remaining);
        remaining -= *a;
    }

    let mut cache = KernelCache::new(x, params.kernel, params.cache_bytes);
    let diag = cache.diagonal();
    let mut grad = vec![0.0; n];
    for (i, &a) in alpha.iter().enumerate() {
        if a > 0.0 {
            let row = cache.row(i);
            for (g, &k) in grad.iter_mut().zip(row.iter()) {
                *g += a * k;
            }
        }
    }

    let mut state = SolverState {
        alpha,
        grad,
        diag,
        cache,
        upper,
    };
    let mut iterations = 0;
    let mut residual = 0.0;
    let mut converged = false;
    while let Some((i, j, violation)) = state.select_pair() {
        residual = violation.max(0.0);
        if violation <= params.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        state.step(i, j);
        iterations += 1;
    }
    if state.select_pair().is_none() {
        // every coefficient pinned at one side: nothing left to move
        converged = true;
        residual = 0.0;
    }
    if !converged {
        warn!(
            "one-class solver stopped after {iterations} iterations with KKT residual {residual:.3e} (tol {:.1e})",
            params.tol
        );
    }
    debug!(
        "one-class solver: n={n} iterations={iterations} kernel row misses={}",
        state.cache.misses
    );

    let rho = offset_from_gradient(&state.alpha, &state.grad, upper);
    let model = OcSvmModel::assemble(x, &state.alpha, params.nu, params.kernel, rho);
    model.check_feasible()?;
    Ok(OcSvmFit {
        model,
        iterations,
        residual,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[[f64; 2]]) -> Vec<SparseRow> {
        points.iter().map(|p| SparseRow::from_dense(p)).collect()
    }

    fn rbf(gamma: f64) -> KernelSpec {
        KernelSpec::Rbf { gamma }
    }

    #[test]
    fn identical_pair_sits_at_simplex_center() {
        let x = rows(&[[1.0, 2.0], [1.0, 2.0]]);
        let fit = train_ocsvm(&x, &OcSvmParams::new(1.0, rbf(0.5))).unwrap();
        assert_eq!(fit.model.alphas, vec![0.5, 0.5]);
        for xi in &x {
            assert!(fit.model.decision_value(xi).unwrap() >= 0.0);
            assert_eq!(fit.model.predict_membership(xi).unwrap(), 1);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let x = rows(&[[0.0, 0.0], [1.0, 1.0]]);
        for nu in [0.0, -0.1, 1.5, f64::NAN] {
            let err = train_ocsvm(&x, &OcSvmParams::new(nu, rbf(1.0))).unwrap_err();
            assert!(matches!(err, Error::InvalidArgument(_)), "nu={nu}");
        }
        assert!(train_ocsvm(&x[..1], &OcSvmParams::new(0.5, rbf(1.0))).is_err());
        assert!(train_ocsvm(&x, &OcSvmParams::new(0.5, rbf(1.0)).with_tol(0.0)).is_err());
    }

    #[test]
    fn exhausted_budget_is_a_warning_not_an_error() {
        let x: Vec<SparseRow> = (0..30)
            .map(|i| SparseRow::from_dense(&[(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()]))
            .collect();
        let params = OcSvmParams::new(0.5, rbf(1.0)).with_tol(1e-12).with_max_iter(2);
        let fit = train_ocsvm(&x, &params).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 2);
        assert!(fit.residual > 1e-12);
        fit.model.check_feasible().unwrap();
    }

    #[test]
    fn residual_within_tolerance_after_convergence() {
        let x: Vec<SparseRow> = (0..40)
            .map(|i| SparseRow::from_dense(&[(i as f64 * 1.3).sin() * 2.0, (i as f64 * 0.7).cos()]))
            .collect();
        let fit = train_ocsvm(&x, &OcSvmParams::new(0.3, rbf(0.5))).unwrap();
        assert!(fit.converged);
        assert!(fit.model.kkt_residual(&x) <= 1e-3);
    }

    #[test]
    fn off_simplex_vector_has_positive_residual() {
        let x = rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let model = OcSvmModel::from_dual(&x, &[0.2, 0.2, 0.2], 1.0, rbf(1.0)).unwrap();
        assert!(model.kkt_residual(&x) > 0.0);
    }

    #[test]
    fn membership_is_sign_of_decision_value() {
        let x: Vec<SparseRow> = (0..25)
            .map(|i| SparseRow::from_dense(&[i as f64 / 5.0, (i % 5) as f64]))
            .collect();
        let fit = train_ocsvm(&x, &OcSvmParams::new(0.2, rbf(0.3))).unwrap();
        for q in &x {
            let v = fit.model.decision_value(q).unwrap();
            let m = fit.model.predict_membership(q).unwrap();
            assert_eq!(m, if v >= 0.0 { 1 } else { -1 });
        }
        let wrong = SparseRow::from_dense(&[1.0]);
        assert!(fit.model.decision_value(&wrong).is_err());
    }

    #[test]
    fn tiny_cache_gives_same_model() {
        let x: Vec<SparseRow> = (0..30)
            .map(|i| SparseRow::from_dense(&[(i as f64).sqrt(), (i % 7) as f64 * 0.3]))
            .collect();
        let big = train_ocsvm(&x, &OcSvmParams::new(0.4, rbf(0.5))).unwrap();
        let mut small = OcSvmParams::new(0.4, rbf(0.5));
        small.cache_bytes = 1;
        let small = train_ocsvm(&x, &small).unwrap();
        assert_eq!(big.model, small.model);
    }

    #[test]
    fn json_round_trip_preserves_decisions() {
        let x: Vec<SparseRow> = (0..20)
            .map(|i| SparseRow::from_dense(&[(i as f64 * 0.3).sin(), (i as f64 * 0.11).exp()]))
            .collect();
        let model = train_ocsvm(&x, &OcSvmParams::new(0.5, rbf(0.7))).unwrap().model;
        let back = OcSvmModel::from_json(&model.to_json().unwrap()).unwrap();
        for q in &x {
            let a = model.decision_value(q).unwrap();
            let b = back.decision_value(q).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn newer_format_version_is_rejected() {
        let x = rows(&[[0.0, 0.0], [1.0, 1.0]]);
        let model = train_ocsvm(&x, &OcSvmParams::new(1.0, KernelSpec::Linear)).unwrap().model;
        let text = model
            .to_json()
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 99");
        let err = OcSvmModel::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("99"), "{err}");
    }
}
