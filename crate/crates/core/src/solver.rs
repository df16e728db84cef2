//! Low-rank quaternion completion with transform-domain sparsity.
//!
//! The outer loop fixes the truncation factors `A`, `B` from the QSVD of the
//! current estimate and hands them to an ADMM inner loop over the splitting
//!
//! ```text
//! min ||X||_* - Re tr(A H B^H) + lambda ||D||_1
//!     s.t. X = H, D = T(X), P_Omega(H) = P_Omega(O)
//! ```
//!
//! where `T` is the left-handed quaternion DCT. The QTNN baseline runs the
//! same loops without the `D` branch.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dims, Error, Result};
use crate::mask::ObservationMask;
use crate::qdct::{TransformAxis, TransformPlan};
use crate::qsvd::{
    qsvd, soft_threshold, svt_with_spectrum, trace_product, truncated_factors, Shrunk,
    TruncatedFactors,
};
use crate::quat::QuaternionMatrix;
use crate::scalar::{lit, Real};

/// Observed matrix `O` (zero off the mask) and the mask `Omega`.
#[derive(Debug, Clone)]
pub struct CompletionProblem<T> {
    observed: QuaternionMatrix<T>,
    mask: ObservationMask,
}

impl<T: Real> CompletionProblem<T> {
    /// Keeps the entries of `full` inside the mask and zeroes the rest.
    pub fn new(full: &QuaternionMatrix<T>, mask: ObservationMask) -> Result<Self> {
        if full.shape() != mask.shape() {
            return Err(Error::DimensionMismatch {
                expected: dims(full.rows(), full.cols()),
                found: dims(mask.rows(), mask.cols()),
            });
        }
        let mut observed = QuaternionMatrix::zeros(full.rows(), full.cols());
        for (i, j) in mask.observed_indices() {
            observed.set(i, j, full.get(i, j));
        }
        Ok(Self { observed, mask })
    }

    pub fn observed(&self) -> &QuaternionMatrix<T> {
        &self.observed
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }

    pub fn shape(&self) -> (usize, usize) {
        self.observed.shape()
    }

    /// `P_Omega^c(x) + P_Omega(O)`.
    pub fn project(&self, x: &QuaternionMatrix<T>) -> QuaternionMatrix<T> {
        let mut out = x.clone();
        self.project_in_place(&mut out);
        out
    }

    pub fn project_in_place(&self, x: &mut QuaternionMatrix<T>) {
        for (i, j) in self.mask.observed_indices() {
            x.set(i, j, self.observed.get(i, j));
        }
    }
}

/// Which model to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Truncated nuclear norm plus l1 sparsity of the QDCT coefficients.
    #[default]
    LrqrSr,
    /// Truncated nuclear norm only.
    Qtnn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::LrqrSr => "lrqr-sr",
            Method::Qtnn => "qtnn",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lrqr-sr" | "lrqr_sr" | "lrqrsr" => Ok(Method::LrqrSr),
            "qtnn" => Ok(Method::Qtnn),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SolverConfig<T: Real> {
    pub lambda: T,
    pub beta1: T,
    pub beta_max: T,
    pub rho: T,
    /// Number of leading singular values left unpenalized.
    pub rank: usize,
    pub eps_inner: T,
    pub eps_outer: T,
    pub max_inner: usize,
    pub max_outer: usize,
    pub axis: TransformAxis<T>,
    pub seed: u64,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            lambda: lit(0.07),
            beta1: lit(1e-4),
            beta_max: lit(1e10),
            rho: lit(1.01),
            rank: 0,
            eps_inner: lit(1e-4),
            eps_outer: lit(1e-3),
            max_inner: 500,
            max_outer: 10,
            axis: TransformAxis::gray(),
            seed: 0,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let finite = [
            self.lambda,
            self.beta1,
            self.beta_max,
            self.rho,
            self.eps_inner,
            self.eps_outer,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("solver parameters must be finite".into());
        }
        if self.lambda <= T::zero() {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.beta1 <= T::zero() {
            return bad(format!("beta1 must be positive, got {}", self.beta1));
        }
        if self.beta1 > self.beta_max {
            return bad(format!(
                "beta1 {} exceeds beta_max {}",
                self.beta1, self.beta_max
            ));
        }
        if self.rho < T::one() {
            return bad(format!("rho must be at least 1, got {}", self.rho));
        }
        if self.eps_inner < T::zero() || self.eps_outer < T::zero() {
            return bad("tolerances must be nonnegative".into());
        }
        if self.max_inner == 0 || self.max_outer == 0 {
            return bad("iteration caps must be at least 1".into());
        }
        if self.rank >= rows.min(cols) {
            return Err(Error::TruncationOutOfRange {
                r: self.rank,
                rows,
                cols,
            });
        }
        Ok(())
    }

    /// Steps until `beta` first equals `beta_max`: `ceil(log(beta_max / beta1) / log rho)`.
    pub fn steps_to_beta_max(&self) -> Option<usize> {
        if self.rho <= T::one() {
            return if self.beta1 >= self.beta_max {
                Some(0)
            } else {
                None
            };
        }
        let ratio = (self.beta_max / self.beta1).as_f64();
        Some((ratio.ln() / self.rho.as_f64().ln()).ceil().max(0.0) as usize)
    }
}

/// ADMM variables. `d` and `z` stay empty (`0 x 0`) in QTNN mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SolverState<T: Real> {
    pub x: QuaternionMatrix<T>,
    pub h: QuaternionMatrix<T>,
    pub d: QuaternionMatrix<T>,
    pub y: QuaternionMatrix<T>,
    pub z: QuaternionMatrix<T>,
    pub beta: T,
    pub inner_iter: usize,
    pub outer_iter: usize,
}

impl<T: Real> SolverState<T> {
    /// Start of an inner run: `H = D = X`, standard normal multipliers drawn
    /// from `(seed, outer)`, `beta = beta1`.
    pub fn initial(
        x: &QuaternionMatrix<T>,
        config: &SolverConfig<T>,
        method: Method,
        outer: usize,
    ) -> Self {
        let (m, n) = x.shape();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(outer as u64);
        let y = QuaternionMatrix::random_normal(m, n, &mut rng);
        let (d, z) = match method {
            Method::LrqrSr => (x.clone(), QuaternionMatrix::random_normal(m, n, &mut rng)),
            Method::Qtnn => (QuaternionMatrix::zeros(0, 0), QuaternionMatrix::zeros(0, 0)),
        };
        Self {
            x: x.clone(),
            h: x.clone(),
            d,
            y,
            z,
            beta: config.beta1,
            inner_iter: 0,
            outer_iter: outer,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// Per-iteration residuals `(||X - H||, ||D - T(X)||, ||X_new - X_old||)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub transform: f64,
    pub change: f64,
}

/// One inner iteration, as streamed to an observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub outer: usize,
    pub inner: usize,
    pub beta: f64,
    pub residuals: Residuals,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult<T> {
    pub x_opt: QuaternionMatrix<T>,
    pub outer_iters: usize,
    pub total_inner_iters: usize,
    /// One entry per inner iteration, across all outer iterations.
    pub residual_history: Vec<Residuals>,
    pub objective_history: Vec<f64>,
    /// Relative change of the outer iterate, one entry per outer iteration.
    pub outer_changes: Vec<f64>,
    /// Whether each inner run met its tolerance before the cap.
    pub inner_converged: Vec<bool>,
    pub converged: bool,
}

/// Outcome of one inner run.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<Residuals>,
    pub objective_history: Vec<f64>,
}

/// X-step: `svt(1/2 [H - Y/beta + IT(D + Z/beta)], 1/(2 beta))`.
///
/// The returned spectrum is that of the new iterate.
pub fn update_x<T: Real>(state: &SolverState<T>, plan: &TransformPlan<T>) -> Result<Shrunk<T>> {
    let beta_inv = T::one() / state.beta;
    let spatial = state.h.axpy(-beta_inv, &state.y);
    let code = plan.inverse(&state.d.axpy(beta_inv, &state.z))?;
    let target = spatial.try_add(&code)?.scale(lit(0.5));
    svt_with_spectrum(&target, beta_inv * lit::<T>(0.5))
}

/// D-step: `S_{4 lambda / beta}(T(X) - Z/beta)`, given `tx = T(X)`.
pub fn update_d<T: Real>(
    state: &SolverState<T>,
    tx: &QuaternionMatrix<T>,
    lambda: T,
) -> Result<QuaternionMatrix<T>> {
    let beta_inv = T::one() / state.beta;
    soft_threshold(
        &tx.axpy(-beta_inv, &state.z),
        lit::<T>(4.0) * lambda * beta_inv,
    )
}

/// H-step: `X + Y/beta + A^H B / beta`, then observed entries reset to `O`.
///
/// `ah_b` is `A^H B` for the current outer iteration.
pub fn update_h<T: Real>(
    state: &SolverState<T>,
    x_new: &QuaternionMatrix<T>,
    ah_b: &QuaternionMatrix<T>,
    problem: &CompletionProblem<T>,
) -> QuaternionMatrix<T> {
    let beta_inv = T::one() / state.beta;
    let mut h = x_new.axpy(beta_inv, &state.y).axpy(beta_inv, ah_b);
    problem.project_in_place(&mut h);
    h
}

/// Dual ascent and penalty growth. `tx = T(X_new)`; pass `None` for both
/// `d_new` and `tx` in QTNN mode.
pub fn update_multipliers_and_beta<T: Real>(
    state: &mut SolverState<T>,
    x_new: QuaternionMatrix<T>,
    h_new: QuaternionMatrix<T>,
    d_new: Option<(QuaternionMatrix<T>, &QuaternionMatrix<T>)>,
    config: &SolverConfig<T>,
) -> Result<()> {
    let beta = state.beta;
    state.y = state.y.axpy(beta, &x_new.try_sub(&h_new)?);
    if let Some((d, tx)) = d_new {
        state.z = state.z.axpy(beta, &d.try_sub(tx)?);
        state.d = d;
    }
    state.x = x_new;
    state.h = h_new;
    state.beta = (config.rho * beta).min(config.beta_max);
    Ok(())
}

/// `||X||_* - |tr(A X B^H)| + lambda ||D||_1` (monitoring only).
pub fn objective<T: Real>(
    x: &QuaternionMatrix<T>,
    d: &QuaternionMatrix<T>,
    factors: &TruncatedFactors<T>,
    lambda: T,
) -> Result<T> {
    let nuclear = crate::qsvd::nuclear_norm(x)?;
    objective_with_nuclear(nuclear, x, d, factors, lambda)
}

fn objective_with_nuclear<T: Real>(
    nuclear: T,
    x: &QuaternionMatrix<T>,
    d: &QuaternionMatrix<T>,
    factors: &TruncatedFactors<T>,
    lambda: T,
) -> Result<T> {
    let tr = trace_product(&factors.a, x, &factors.b)?.norm();
    Ok(nuclear - tr + lambda * d.l1_norm())
}

fn relative_change<T: Real>(
    new: &QuaternionMatrix<T>,
    old: &QuaternionMatrix<T>,
) -> Result<(T, T)> {
    let change = new.try_sub(old)?.frobenius_norm();
    Ok((change, T::one().max(old.frobenius_norm())))
}

/// Runs ADMM from `state` until the iterate stalls or `max_inner` is hit.
pub fn inner_solve<T: Real>(
    problem: &CompletionProblem<T>,
    factors: &TruncatedFactors<T>,
    state: &mut SolverState<T>,
    config: &SolverConfig<T>,
    method: Method,
    observer: &mut dyn FnMut(&IterationRecord),
) -> Result<InnerOutcome> {
    let (m, n) = problem.shape();
    let plan = TransformPlan::new(m, n, config.axis);
    let ah_b = if factors.r == 0 {
        QuaternionMatrix::zeros(m, n)
    } else {
        factors.ah_b()
    };
    let mut out = InnerOutcome {
        iterations: 0,
        converged: false,
        residual_history: Vec::new(),
        objective_history: Vec::new(),
    };
    while out.iterations < config.max_inner {
        let beta = state.beta;
        let old = state.x.clone();
        let (transform_residual, objective) = match method {
            Method::LrqrSr => {
                let shrunk = update_x(state, &plan)?;
                let tx = plan.forward(&shrunk.matrix)?;
                let d = update_d(state, &tx, config.lambda)?;
                let h = update_h(state, &shrunk.matrix, &ah_b, problem);
                let nuclear = shrunk.sigma.iter().fold(T::zero(), |a, &b| a + b);
                let objective =
                    objective_with_nuclear(nuclear, &shrunk.matrix, &d, factors, config.lambda)?;
                let transform_residual = d.try_sub(&tx)?.frobenius_norm();
                update_multipliers_and_beta(state, shrunk.matrix, h, Some((d, &tx)), config)?;
                (transform_residual, objective)
            }
            Method::Qtnn => {
                let beta_inv = T::one() / beta;
                let shrunk = svt_with_spectrum(&state.h.axpy(-beta_inv, &state.y), beta_inv)?;
                let h = update_h(state, &shrunk.matrix, &ah_b, problem);
                let nuclear = shrunk.sigma.iter().fold(T::zero(), |a, &b| a + b);
                let empty = QuaternionMatrix::zeros(0, 0);
                let objective =
                    objective_with_nuclear(nuclear, &shrunk.matrix, &empty, factors, T::zero())?;
                update_multipliers_and_beta(state, shrunk.matrix, h, None, config)?;
                (T::zero(), objective)
            }
        };
        let (change, scale) = relative_change(&state.x, &old)?;
        let residuals = Residuals {
            primal: state.x.try_sub(&state.h)?.frobenius_norm().as_f64(),
            transform: transform_residual.as_f64(),
            change: change.as_f64(),
        };
        state.inner_iter += 1;
        out.iterations += 1;
        out.residual_history.push(residuals);
        out.objective_history.push(objective.as_f64());
        observer(&IterationRecord {
            outer: state.outer_iter,
            inner: out.iterations,
            beta: beta.as_f64(),
            residuals,
            objective: objective.as_f64(),
        });
        // A stalled iterate far from feasibility is a transient (the large
        // early threshold pins X at zero), not convergence.
        let tol = config.eps_inner * scale;
        if change <= tol && lit::<T>(residuals.primal) <= tol {
            out.converged = true;
            break;
        }
    }
    Ok(out)
}

fn outer_factors<T: Real>(x: &QuaternionMatrix<T>, rank: usize) -> Result<TruncatedFactors<T>> {
    if rank == 0 {
        let (m, n) = x.shape();
        return Ok(TruncatedFactors::empty(m, n));
    }
    truncated_factors(&qsvd(x)?, rank)
}

/// Full solve starting from `X_1 = O`.
pub fn solve<T: Real>(
    problem: &CompletionProblem<T>,
    config: &SolverConfig<T>,
    method: Method,
    observer: &mut dyn FnMut(&IterationRecord),
) -> Result<RecoveryResult<T>> {
    let start = SolverState::initial(problem.observed(), config, method, 0);
    resume(problem, config, method, &start, observer)
}

/// Continues a solve from a checkpoint taken between outer iterations:
/// `checkpoint.x` becomes the outer iterate and `checkpoint.outer_iter` the
/// index of the next outer iteration.
pub fn resume<T: Real>(
    problem: &CompletionProblem<T>,
    config: &SolverConfig<T>,
    method: Method,
    checkpoint: &SolverState<T>,
    observer: &mut dyn FnMut(&IterationRecord),
) -> Result<RecoveryResult<T>> {
    let (m, n) = problem.shape();
    config.validate(m, n)?;
    if problem.mask().count() == 0 {
        return Err(Error::EmptyMask);
    }
    if checkpoint.x.shape() != (m, n) {
        return Err(Error::DimensionMismatch {
            expected: dims(m, n),
            found: dims(checkpoint.x.rows(), checkpoint.x.cols()),
        });
    }
    let mut x = problem.project(&checkpoint.x);
    let mut result = RecoveryResult {
        x_opt: x.clone(),
        outer_iters: 0,
        total_inner_iters: 0,
        residual_history: Vec::new(),
        objective_history: Vec::new(),
        outer_changes: Vec::new(),
        inner_converged: Vec::new(),
        converged: false,
    };
    for outer in checkpoint.outer_iter..config.max_outer {
        let factors = outer_factors(&x, config.rank)?;
        let mut state = SolverState::initial(&x, config, method, outer);
        let inner = inner_solve(problem, &factors, &mut state, config, method, observer)?;
        let next = problem.project(&state.x);
        let (change, scale) = relative_change(&next, &x)?;
        result.outer_iters += 1;
        result.total_inner_iters += inner.iterations;
        result.residual_history.extend(inner.residual_history);
        result.objective_history.extend(inner.objective_history);
        result.outer_changes.push((change / scale).as_f64());
        result.inner_converged.push(inner.converged);
        x = next;
        if change <= config.eps_outer * scale {
            result.converged = true;
            break;
        }
    }
    result.x_opt = x;
    Ok(result)
}

pub fn lrqr_sr<T: Real>(
    problem: &CompletionProblem<T>,
    config: &SolverConfig<T>,
) -> Result<RecoveryResult<T>> {
    solve(problem, config, Method::LrqrSr, &mut |_| {})
}

pub fn qtnn_baseline<T: Real>(
    problem: &CompletionProblem<T>,
    config: &SolverConfig<T>,
) -> Result<RecoveryResult<T>> {
    solve(problem, config, Method::Qtnn, &mut |_| {})
}
