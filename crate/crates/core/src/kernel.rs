//! Sampling kernels of the LIF encoder.
//!
//! Spike `n` (zero-based here) observes the input through
//! `h_n(t) = e^{-alpha (t_n - t)}` on `[t_{n-1}, t_n)`, so that
//! `<h_n, x> = theta_n`. The kernels have disjoint supports; their bandlimited
//! versions `h~_n` are not orthogonal, and the matrix of their cross inner
//! products drives the discretized POCS recursion.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expo::{leak_energy, leak_integral, sinhc};
use crate::lif::{LifParams, SpikeTrain};
use crate::signal::{check_period, harmonic, PeriodicBandlimitedSignal};

/// Sample values `theta_n = eps_n theta - (c / alpha)(1 - e^{-alpha dt_n})`.
pub fn sample_values(train: &SpikeTrain, params: &LifParams) -> Vec<f64> {
    train
        .intervals()
        .iter()
        .zip(train.signs())
        .map(|(&dt, &s)| s as f64 * params.threshold() - params.offset() * leak_integral(params.alpha(), dt))
        .collect()
}

/// `||h_n||^2 = (1 - e^{-2 alpha dt}) / (2 alpha)`.
pub fn h_norm_sq(alpha: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("interval must be > 0, got {dt}")));
    }
    Ok(leak_energy(alpha, dt))
}

/// Bandlimited kernel `h~_n = P_B h_n` for the interval `[t_prev, t_cur)`.
pub fn h_fourier(t_prev: f64, t_cur: f64, alpha: f64, period: usize) -> Result<PeriodicBandlimitedSignal> {
    check_period(period)?;
    if !(t_prev >= 0.0 && t_prev < t_cur && t_cur <= period as f64) {
        return Err(Error::InvalidParameter(format!(
            "kernel interval [{t_prev}, {t_cur}) not inside [0, {period}]"
        )));
    }
    let dt = t_cur - t_prev;
    let decay = (-alpha * dt).exp();
    let inv_t = 1.0 / period as f64;
    let mut coeffs = Vec::with_capacity(period / 2 + 1);
    coeffs.push(Complex64::new(leak_integral(alpha, dt) * inv_t, 0.0));
    for k in 1..=period / 2 {
        let w = harmonic(k, period);
        let num = Complex64::from_polar(1.0, -w * t_cur) - decay * Complex64::from_polar(1.0, -w * t_prev);
        coeffs.push(num / Complex64::new(alpha, -w) * inv_t);
    }
    PeriodicBandlimitedSignal::from_coeffs(period, coeffs)
}

/// `g(t) = (1/alpha) int_0^t sinh(alpha (t - s)) phi(s) ds` with `phi` the
/// Dirichlet kernel of the given period. Even in `t`.
pub fn g_function(t: f64, alpha: f64, period: usize) -> f64 {
    let half = 0.5 * t * sinhc(0.5 * alpha * t);
    let ch = (alpha * t).cosh();
    let a2 = alpha * alpha;
    let tail = harmonic_sum(t, period, |k, cos| {
        let w = harmonic(k, period);
        (ch - cos) / (w * w + a2)
    });
    (2.0 * half * half + 2.0 * tail) / period as f64
}

/// Bounded part of `g`: `-(2/T) sum_{k>=1} cos(w_k t) / (w_k^2 + alpha^2)`.
///
/// `g` minus this is `a cosh(alpha t) + b`. The Gram combination annihilates
/// `e^{alpha t}` and `e^{-alpha t}`, and maps the constant to the DC product
/// `L_m L_n / T`, so entries can be assembled without the exponential growth
/// or the cancellation of the raw form.
fn g_oscillating(t: f64, alpha: f64, period: usize) -> f64 {
    let a2 = alpha * alpha;
    let tail = harmonic_sum(t, period, |k, cos| {
        let w = harmonic(k, period);
        cos / (w * w + a2)
    });
    -2.0 * tail / period as f64
}

/// `sum_{k=1}^{K} f(k, cos(w_k t))`.
fn harmonic_sum(t: f64, period: usize, f: impl Fn(usize, f64) -> f64) -> f64 {
    let rot = Complex64::from_polar(1.0, harmonic(1, period) * t);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = 0.0;
    for k in 1..=period / 2 {
        z *= rot;
        acc += f(k, z.re);
    }
    acc
}

/// Four-point combination of `g` values at `edges[p] - edges[q]` giving
/// `<h_m, h~_n>` once the DC product is added.
fn gram_combination(m: usize, n: usize, decay: &[f64], g: impl Fn(usize, usize) -> f64) -> f64 {
    decay[n] * (g(m + 1, n) - decay[m] * g(m, n)) - (g(m + 1, n + 1) - decay[m] * g(m, n + 1))
}

/// Builds and holds every kernel quantity derived from one spike train.
#[derive(Debug, Clone)]
pub struct KernelSystem {
    train: SpikeTrain,
    alpha: f64,
    edges: Vec<f64>,
    decay: Vec<f64>,
    samples: Vec<f64>,
    norms_sq: Vec<f64>,
    filtered: Vec<PeriodicBandlimitedSignal>,
    gram: DMatrix<f64>,
    operator: DMatrix<f64>,
}

impl KernelSystem {
    pub fn build(train: &SpikeTrain, params: &LifParams) -> Result<Self> {
        Self::build_with_samples(train, params.alpha(), sample_values(train, params))
    }

    /// Assembles the system for explicit sample values (e.g. noisy ones).
    pub fn build_with_samples(train: &SpikeTrain, alpha: f64, samples: Vec<f64>) -> Result<Self> {
        let n = train.len();
        if n == 0 {
            return Err(Error::EmptyTrain);
        }
        if samples.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: samples.len(),
            });
        }
        let period = train.period();
        let mut edges = Vec::with_capacity(n + 1);
        edges.push(0.0);
        edges.extend_from_slice(train.times());
        let dts = train.intervals();
        let decay: Vec<f64> = dts.iter().map(|&dt| (-alpha * dt).exp()).collect();
        let norms_sq = dts.iter().map(|&dt| h_norm_sq(alpha, dt)).collect::<Result<Vec<_>>>()?;
        let filtered = (0..n)
            .into_par_iter()
            .map(|j| h_fourier(edges[j], edges[j + 1], alpha, period))
            .collect::<Result<Vec<_>>>()?;

        let leak: Vec<f64> = dts.iter().map(|&dt| leak_integral(alpha, dt)).collect();
        let inv_t = 1.0 / period as f64;
        // g is even, so a triangular table of edge differences suffices
        let g_rows: Vec<Vec<f64>> = (0..=n)
            .into_par_iter()
            .map(|p| {
                (0..=p)
                    .map(|q| g_oscillating(edges[p] - edges[q], alpha, period))
                    .collect()
            })
            .collect();
        let g = |p: usize, q: usize| if q <= p { g_rows[p][q] } else { g_rows[q][p] };

        let mut raw = DMatrix::zeros(n, n);
        for m in 0..n {
            for j in 0..=m {
                let v = gram_combination(m, j, &decay, g) + leak[m] * leak[j] * inv_t;
                raw[(m, j)] = v;
                raw[(j, m)] = v;
            }
        }
        let mut gram = raw;
        for m in 0..n {
            let inv = 1.0 / norms_sq[m];
            gram.row_mut(m).scale_mut(inv);
        }

        let mut operator = DMatrix::zeros(n, period);
        for (j, h) in filtered.iter().enumerate() {
            for (col, v) in h.to_coords().into_iter().enumerate() {
                operator[(j, col)] = v;
            }
        }

        Ok(Self {
            train: train.clone(),
            alpha,
            edges,
            decay,
            samples,
            norms_sq,
            filtered,
            gram,
            operator,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn period(&self) -> usize {
        self.train.period()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn train(&self) -> &SpikeTrain {
        &self.train
    }

    /// `theta_n`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `||h_n||^2`.
    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    /// `h~_n`.
    pub fn filtered(&self, n: usize) -> &PeriodicBandlimitedSignal {
        &self.filtered[n]
    }

    pub fn filtered_all(&self) -> &[PeriodicBandlimitedSignal] {
        &self.filtered
    }

    /// `H[m, n] = <h_m, h~_n> / ||h_m||^2`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Row `n` holds the orthonormal-basis coordinates of `h~_n`, so that
    /// `operator * coords(u) = (<h_n, u>)_n` for in-band `u`.
    pub fn operator(&self) -> &DMatrix<f64> {
        &self.operator
    }

    /// Unfiltered kernel `h_n(t) = e^{-alpha (t_n - t)}` on `[t_{n-1}, t_n)`, zero elsewhere
    /// in `[0, T)`.
    pub fn kernel_value(&self, n: usize, t: f64) -> f64 {
        let (a, b) = (self.edges[n], self.edges[n + 1]);
        if t >= a && t < b {
            (-self.alpha * (b - t)).exp()
        } else {
            0.0
        }
    }

    /// The sampling operator `H u = (<h_n, u>)_n`.
    pub fn apply(&self, u: &PeriodicBandlimitedSignal) -> Vec<f64> {
        let c = DVector::from_vec(u.to_coords());
        (&self.operator * c).as_slice().to_vec()
    }

    /// Copy of the system with the sample vector replaced.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        Ok(Self {
            samples,
            ..self.clone()
        })
    }

    /// `sum_n c_n h~_n` as a signal.
    pub fn synthesize(&self, weights: &[f64]) -> PeriodicBandlimitedSignal {
        let coords = self.operator.tr_mul(&DVector::from_column_slice(weights));
        PeriodicBandlimitedSignal::from_coords(self.period(), coords.as_slice())
            .expect("operator width equals the period")
    }

    pub fn write_gram_csv<W: Write>(&self, w: W) -> Result<()> {
        write_matrix_csv(&self.gram, w)
    }

    pub fn write_operator_csv<W: Write>(&self, w: W) -> Result<()> {
        write_matrix_csv(&self.operator, w)
    }
}

/// Shorthand for [`KernelSystem::build`].
pub fn build_system(train: &SpikeTrain, params: &LifParams) -> Result<KernelSystem> {
    KernelSystem::build(train, params)
}

/// `<h_m, h~_n>` from the closed-form `g` combination (zero-based indices).
pub fn gram_entry(m: usize, n: usize, ks: &KernelSystem) -> Result<f64> {
    let len = ks.len();
    for i in [m, n] {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
    }
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    let period = ks.period();
    let alpha = ks.alpha;
    let g = |p: usize, q: usize| g_oscillating(ks.edges[p] - ks.edges[q], alpha, period);
    let dc = leak_integral(alpha, ks.edges[m + 1] - ks.edges[m]) * leak_integral(alpha, ks.edges[n + 1] - ks.edges[n]);
    Ok(gram_combination(m, n, &ks.decay, g) + dc / period as f64)
}

/// `<h_m, f(. - shift)>` for in-band `f`, via the leaky primitive
/// `g_f(t) = int_0^t e^{alpha (s - t)} f(s) ds` evaluated at `t_m - shift` and
/// `t_{m-1} - shift`.
pub fn inner_h_shifted(m: usize, f: &PeriodicBandlimitedSignal, shift: f64, ks: &KernelSystem) -> Result<f64> {
    if m >= ks.len() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: ks.len(),
        });
    }
    if f.period() != ks.period() {
        return Err(Error::PeriodMismatch(f.period(), ks.period()));
    }
    let period = ks.period();
    let alpha = ks.alpha;
    let (t0, t1) = (ks.edges[m], ks.edges[m + 1]);
    // The e^{-alpha t} part of g_f cancels between the two evaluations, and
    // the DC harmonic integrates to c_0 L(dt) directly.
    let g_f = |t: f64| -> f64 {
        let rot = Complex64::from_polar(1.0, harmonic(1, period) * t);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (k, c) in f.coeffs().iter().enumerate().skip(1) {
            z *= rot;
            acc += (c * z / Complex64::new(alpha, harmonic(k, period))).re;
        }
        2.0 * acc
    };
    let dc = f.coeffs()[0].re * leak_integral(alpha, t1 - t0);
    Ok(g_f(t1 - shift) - ks.decay[m] * g_f(t0 - shift) + dc)
}

fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for i in 0..m.nrows() {
        wtr.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
