//! Projections onto the consistent set and the iterations built from them.
//!
//! The synchronous iteration is run on coefficient vectors: with
//! `r^0 = theta / ||h||^2` and `c^0 = 0`,
//! `r^{k+1} = r^k - H r^k`, `c^{k+1} = c^k + r^k`, and the `k`-th iterate is
//! `sum_n c^k_n h~_n`. The residual `r^k` equals the sample residual
//! `(theta_n - <h_n, u^k>) / ||h_n||^2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSystem;
use crate::signal::{ratio_db, PeriodicBandlimitedSignal};

/// Relative singular-value cutoff defining the numerical rank of the sampling operator.
pub const SVD_CUTOFF: f64 = 1e-10;

fn check_len(ks: &KernelSystem, v: &[f64]) -> Result<()> {
    if v.len() != ks.len() {
        return Err(Error::LengthMismatch {
            expected: ks.len(),
            got: v.len(),
        });
    }
    Ok(())
}

fn check_period(ks: &KernelSystem, u: &PeriodicBandlimitedSignal) -> Result<()> {
    if u.period() != ks.period() {
        return Err(Error::PeriodMismatch(u.period(), ks.period()));
    }
    Ok(())
}

/// `||v||_N^2 = sum_n v_n^2 / ||h_n||^2`.
pub fn weighted_norm_sq(ks: &KernelSystem, v: &[f64]) -> Result<f64> {
    check_len(ks, v)?;
    Ok(v.iter().zip(ks.norms_sq()).map(|(x, n)| x * x / n).sum())
}

/// State of the synchronous iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PocsState {
    k: usize,
    residual: Vec<f64>,
    coeffs: Vec<f64>,
}

impl PocsState {
    /// Initial state `r^0 = theta / ||h||^2`, `c^0 = 0`.
    pub fn new(ks: &KernelSystem) -> Self {
        Self {
            k: 0,
            residual: ks.samples().iter().zip(ks.norms_sq()).map(|(t, n)| t / n).collect(),
            coeffs: vec![0.0; ks.len()],
        }
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    /// `r^k`.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// `c^k`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn check(&self, ks: &KernelSystem) -> Result<()> {
        check_len(ks, &self.residual)?;
        check_len(ks, &self.coeffs)
    }

    /// Advances one iteration.
    pub fn step(&mut self, ks: &KernelSystem) {
        let r = DVector::from_column_slice(&self.residual);
        let hr = ks.gram() * &r;
        for (c, x) in self.coeffs.iter_mut().zip(&self.residual) {
            *c += x;
        }
        for (x, y) in self.residual.iter_mut().zip(hr.iter()) {
            *x -= y;
        }
        self.k += 1;
    }

    /// Advances `iterations` steps.
    pub fn advance(&mut self, ks: &KernelSystem, iterations: usize) -> Result<()> {
        self.check(ks)?;
        for _ in 0..iterations {
            self.step(ks);
        }
        Ok(())
    }

    /// Advances until `||r^k||_N < tol` (sample residual measured in the
    /// weighted norm) or `max_iterations` steps were taken. Returns whether the
    /// tolerance was met.
    pub fn advance_until(&mut self, ks: &KernelSystem, max_iterations: usize, tol: f64) -> Result<bool> {
        self.check(ks)?;
        for _ in 0..max_iterations {
            if self.residual_norm(ks) < tol {
                return Ok(true);
            }
            self.step(ks);
        }
        Ok(self.residual_norm(ks) < tol)
    }

    /// `||theta - H u^k||_N`.
    pub fn residual_norm(&self, ks: &KernelSystem) -> f64 {
        self.residual
            .iter()
            .zip(ks.norms_sq())
            .map(|(r, n)| r * r * n)
            .sum::<f64>()
            .sqrt()
    }

    /// Coordinates of the current iterate in the orthonormal harmonic basis.
    pub fn coords(&self, ks: &KernelSystem) -> DVector<f64> {
        ks.operator().tr_mul(&DVector::from_column_slice(&self.coeffs))
    }

    /// Converts the coefficient vector to the iterate `sum_n c^k_n h~_n`.
    pub fn synthesize(&self, ks: &KernelSystem) -> PeriodicBandlimitedSignal {
        ks.synthesize(&self.coeffs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Restores a checkpoint; the lengths must match `ks`.
    pub fn from_json(s: &str, ks: &KernelSystem) -> Result<Self> {
        let st: Self = serde_json::from_str(s)?;
        st.check(ks)?;
        Ok(st)
    }
}

/// Observed samples together with the clean ones when known.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySampleModel {
    observed: Vec<f64>,
    clean: Option<Vec<f64>>,
}

impl NoisySampleModel {
    pub fn observed_only(observed: Vec<f64>) -> Self {
        Self { observed, clean: None }
    }

    pub fn with_truth(clean: Vec<f64>, observed: Vec<f64>) -> Result<Self> {
        if clean.len() != observed.len() {
            return Err(Error::LengthMismatch {
                expected: observed.len(),
                got: clean.len(),
            });
        }
        Ok(Self {
            observed,
            clean: Some(clean),
        })
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn clean(&self) -> Option<&[f64]> {
        self.clean.as_deref()
    }

    /// Deviation `e = theta - theta^0`, when the clean samples are known.
    pub fn deviation(&self) -> Option<Vec<f64>> {
        self.clean
            .as_ref()
            .map(|c| self.observed.iter().zip(c).map(|(o, c)| o - c).collect())
    }

    /// Deviation after projecting onto the range of the sampling operator.
    pub fn projected_deviation(&self, ks: &KernelSystem) -> Result<Option<Vec<f64>>> {
        match self.deviation() {
            Some(e) => Ok(Some(project_range(ks, &e)?)),
            None => Ok(None),
        }
    }
}

/// Exact projection `P_C u = u + sum_n w_n h_n` onto the consistent set, with
/// `w_n = (theta_n - <h_n, u>) / ||h_n||^2`. It is not bandlimited; its lowpass
/// part is [`project_consistent`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProjection {
    base: PeriodicBandlimitedSignal,
    weights: Vec<f64>,
}

impl ExactProjection {
    pub fn new(u: &PeriodicBandlimitedSignal, ks: &KernelSystem) -> Result<Self> {
        check_period(ks, u)?;
        let weights = ks
            .apply(u)
            .iter()
            .zip(ks.samples())
            .zip(ks.norms_sq())
            .map(|((hu, th), n)| (th - hu) / n)
            .collect();
        Ok(Self {
            base: u.clone(),
            weights,
        })
    }

    pub fn base(&self) -> &PeriodicBandlimitedSignal {
        &self.base
    }

    /// `w_n`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, ks: &KernelSystem, t: f64) -> f64 {
        let tp = ks.period() as f64;
        let tm = t.rem_euclid(tp);
        let n = ks.train().times().partition_point(|&tn| tn <= tm);
        let pulse = if n < ks.len() {
            self.weights[n] * ks.kernel_value(n, tm)
        } else {
            0.0
        };
        self.base.eval(t) + pulse
    }

    /// `<h_n, P_C u>` for every `n`, using the disjoint kernel supports.
    pub fn kernel_samples(&self, ks: &KernelSystem) -> Vec<f64> {
        ks.apply(&self.base)
            .iter()
            .zip(&self.weights)
            .zip(ks.norms_sq())
            .map(|((hu, w), n)| hu + w * n)
            .collect()
    }

    /// `||P_C u - x||^2` for in-band `x`.
    pub fn distance_sq(&self, ks: &KernelSystem, x: &PeriodicBandlimitedSignal) -> Result<f64> {
        check_period(ks, x)?;
        let diff = &self.base - x;
        let cross: f64 = ks.apply(&diff).iter().zip(&self.weights).map(|(h, w)| h * w).sum();
        let own: f64 = self.weights.iter().zip(ks.norms_sq()).map(|(w, n)| w * w * n).sum();
        Ok(diff.norm_sq() + 2.0 * cross + own)
    }

    /// Lowpass part `P_B P_C u`.
    pub fn filtered(&self, ks: &KernelSystem) -> PeriodicBandlimitedSignal {
        let mut out = self.base.clone();
        out.axpy(1.0, &ks.synthesize(&self.weights));
        out
    }
}

/// `u + sum_n ((theta_n - <h_n, u>) / ||h_n||^2) h~_n`.
pub fn project_consistent(u: &PeriodicBandlimitedSignal, ks: &KernelSystem) -> Result<PeriodicBandlimitedSignal> {
    check_period(ks, u)?;
    let weights: Vec<f64> = ks
        .apply(u)
        .iter()
        .zip(ks.samples())
        .zip(ks.norms_sq())
        .map(|((hu, th), n)| (th - hu) / n)
        .collect();
    let mut out = u.clone();
    out.axpy(1.0, &ks.synthesize(&weights));
    Ok(out)
}

/// Runs `iterations` steps from the zero signal.
pub fn pocs_run(ks: &KernelSystem, iterations: usize) -> (PocsState, PeriodicBandlimitedSignal) {
    let mut st = PocsState::new(ks);
    for _ in 0..iterations {
        st.step(ks);
    }
    let u = st.synthesize(ks);
    (st, u)
}

/// Runs `iterations` steps from `u` by iterating on the shifted samples
/// `theta - H u` and adding `u` back.
pub fn pocs_run_from(
    u: &PeriodicBandlimitedSignal,
    ks: &KernelSystem,
    iterations: usize,
) -> Result<PeriodicBandlimitedSignal> {
    check_period(ks, u)?;
    let shifted: Vec<f64> = ks.samples().iter().zip(ks.apply(u)).map(|(t, hu)| t - hu).collect();
    let (_, z) = pocs_run(&ks.with_samples(shifted)?, iterations);
    Ok(u + &z)
}

/// Projects the coordinate vector `a` onto `{v : <h~_n, v> = theta_n}`.
fn project_one(ks: &KernelSystem, a: &mut DVector<f64>, n: usize) {
    let row = ks.operator().row(n);
    let norm_sq = row.norm_squared();
    if norm_sq == 0.0 {
        return;
    }
    let w = (ks.samples()[n] - row.dot(&a.transpose())) / norm_sq;
    for (x, r) in a.iter_mut().zip(row.iter()) {
        *x += w * r;
    }
}

/// One sequential sweep of elementary projections in index order.
pub fn yeh_stark_sweep(u: &PeriodicBandlimitedSignal, ks: &KernelSystem) -> Result<PeriodicBandlimitedSignal> {
    check_period(ks, u)?;
    let mut a = DVector::from_vec(u.to_coords());
    for n in 0..ks.len() {
        project_one(ks, &mut a, n);
    }
    PeriodicBandlimitedSignal::from_coords(ks.period(), a.as_slice())
}

fn normalized_operator(ks: &KernelSystem) -> DMatrix<f64> {
    let mut m = ks.operator().clone();
    for (n, &h) in ks.norms_sq().iter().enumerate() {
        m.row_mut(n).scale_mut(1.0 / h.sqrt());
    }
    m
}

/// Thin SVD `(U, s, V)` of `m`. nalgebra's iterative SVD stalls at errors
/// near 1e-6 on some of these operators, so the factorization uses faer.
fn thin_svd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let f = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = f
        .thin_svd()
        .map_err(|e| Error::InvalidParameter(format!("singular value decomposition failed: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sv = svd.S().column_vector();
    Ok((
        DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        (0..sv.nrows()).map(|i| sv[i]).collect(),
        DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    ))
}

/// Minimal-norm least-squares coordinates for samples `theta`.
fn pinv_coords(ks: &KernelSystem, theta: &[f64]) -> Result<DVector<f64>> {
    check_len(ks, theta)?;
    let m = normalized_operator(ks);
    let b = DVector::from_iterator(theta.len(), theta.iter().zip(ks.norms_sq()).map(|(t, n)| t / n.sqrt()));
    let (u, sv, v) = thin_svd(&m)?;
    let cutoff = SVD_CUTOFF * sv.iter().cloned().fold(0.0, f64::max);
    let mut ub = u.transpose() * b;
    for (x, &s) in ub.iter_mut().zip(&sv) {
        *x = if s > cutoff { *x / s } else { 0.0 };
    }
    Ok(v * ub)
}

/// Minimal-norm in-band signal whose samples best match `theta` in the weighted norm.
pub fn pseudo_inverse(ks: &KernelSystem, theta: &[f64]) -> Result<PeriodicBandlimitedSignal> {
    let a = pinv_coords(ks, theta)?;
    PeriodicBandlimitedSignal::from_coords(ks.period(), a.as_slice())
}

/// Weighted-orthogonal projection of `theta` onto the range of the sampling operator.
pub fn project_range(ks: &KernelSystem, theta: &[f64]) -> Result<Vec<f64>> {
    let a = pinv_coords(ks, theta)?;
    Ok((ks.operator() * a).as_slice().to_vec())
}

/// Numerical rank of the sampling operator.
pub fn operator_rank(ks: &KernelSystem) -> Result<usize> {
    let (_, sv, _) = thin_svd(&normalized_operator(ks))?;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > SVD_CUTOFF * smax).count())
}

/// Per-iteration `10 log10(||u^k - x||^2 / ref_power)` for `k = 0 ..= iterations`,
/// starting from `start` (zero when absent).
pub fn mse_trace(
    ks: &KernelSystem,
    x: &PeriodicBandlimitedSignal,
    iterations: usize,
    start: Option<&PeriodicBandlimitedSignal>,
    ref_power: f64,
) -> Result<Vec<f64>> {
    distance_trace(ks, x, iterations, start)?
        .into_iter()
        .map(|d| ratio_db(d * d, ref_power))
        .collect()
}

/// Per-iteration `||u^k - y||` for `k = 0 ..= iterations`.
pub fn distance_trace(
    ks: &KernelSystem,
    y: &PeriodicBandlimitedSignal,
    iterations: usize,
    start: Option<&PeriodicBandlimitedSignal>,
) -> Result<Vec<f64>> {
    check_period(ks, y)?;
    let (sys, offset) = match start {
        Some(u) => {
            check_period(ks, u)?;
            let shifted = ks.samples().iter().zip(ks.apply(u)).map(|(t, hu)| t - hu).collect();
            (ks.with_samples(shifted)?, DVector::from_vec(u.to_coords()))
        }
        None => (ks.clone(), DVector::zeros(ks.period())),
    };
    let target = DVector::from_vec(y.to_coords()) - offset;
    let mut st = PocsState::new(&sys);
    let mut out = Vec::with_capacity(iterations + 1);
    out.push((st.coords(&sys) - &target).norm());
    for _ in 0..iterations {
        st.step(&sys);
        out.push((st.coords(&sys) - &target).norm());
    }
    Ok(out)
}
