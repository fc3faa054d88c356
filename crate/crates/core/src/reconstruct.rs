//! One-step estimates from a spike train and Lazar's contraction iteration.
//!
//! The one-step estimates target `x + c`; subtract the offset to compare them
//! with `x`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSystem;
use crate::lif::{LifParams, SpikeTrain};
use crate::signal::{harmonic, PeriodicBandlimitedSignal};

/// Spectrum of the signed spike train, `S(w_k) = sum_n eps_n e^{-i w_k t_n}`.
pub fn spike_spectrum(train: &SpikeTrain) -> Vec<Complex64> {
    let period = train.period();
    (0..=period / 2)
        .map(|k| {
            let w = harmonic(k, period);
            train
                .times()
                .iter()
                .zip(train.signs())
                .map(|(&t, &s)| Complex64::from_polar(s as f64, -w * t))
                .sum()
        })
        .collect()
}

/// `sum_n eps_n theta phi(. - t_n)`: every spike replaced by a scaled Dirichlet pulse.
pub fn naive_estimate(train: &SpikeTrain, threshold: f64) -> PeriodicBandlimitedSignal {
    let scale = threshold / train.period() as f64;
    let coeffs = spike_spectrum(train).into_iter().map(|s| s * scale).collect();
    PeriodicBandlimitedSignal::from_coeffs(train.period(), coeffs).expect("spectrum has K + 1 entries")
}

/// Steady-state leaky integral of the spike train sampled at the integer instants.
pub fn leaky_spike_samples(train: &SpikeTrain, threshold: f64, alpha: f64) -> Vec<f64> {
    let period = train.period();
    let tp = period as f64;
    let wrap = 1.0 / -(-alpha * tp).exp_m1();
    (0..period)
        .map(|k| {
            train
                .times()
                .iter()
                .zip(train.signs())
                .map(|(&t, &s)| s as f64 * threshold * (-alpha * (k as f64 - t).rem_euclid(tp)).exp())
                .sum::<f64>()
                * wrap
        })
        .collect()
}

/// Leak-compensated estimate: the Nyquist-rate samples of the steady-state
/// leaky integral of the spike train, interpolated with `psi = phi' + alpha phi`.
pub fn feichtinger_estimate(train: &SpikeTrain, threshold: f64, alpha: f64) -> Result<PeriodicBandlimitedSignal> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "leak-compensated estimate needs alpha > 0, got {alpha}"
        )));
    }
    let period = train.period();
    let interp = PeriodicBandlimitedSignal::from_nyquist_samples(&leaky_spike_samples(train, threshold, alpha))?;
    let coeffs = interp
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::new(alpha, harmonic(k, period)))
        .collect();
    PeriodicBandlimitedSignal::from_coeffs(period, coeffs)
}

/// Linear time-invariant estimator `u = f * s` fitted by least squares over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WienerRecord", into = "WienerRecord")]
pub struct WienerFilter {
    period: usize,
    response: Vec<Complex64>,
    ensemble_size: usize,
    params: LifParams,
}

#[derive(Serialize, Deserialize)]
struct WienerRecord {
    #[serde(rename = "T")]
    period: usize,
    ensemble_size: usize,
    params: LifParams,
    response: BTreeMap<usize, [f64; 2]>,
}

impl From<WienerFilter> for WienerRecord {
    fn from(f: WienerFilter) -> Self {
        Self {
            period: f.period,
            ensemble_size: f.ensemble_size,
            params: f.params,
            response: f.response.iter().enumerate().map(|(k, c)| (k, [c.re, c.im])).collect(),
        }
    }
}

impl TryFrom<WienerRecord> for WienerFilter {
    type Error = Error;

    fn try_from(r: WienerRecord) -> Result<Self> {
        let half = r.period / 2;
        let mut response = vec![Complex64::new(0.0, 0.0); half + 1];
        for (k, [re, im]) in r.response {
            if k > half {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    len: half + 1,
                });
            }
            response[k] = Complex64::new(re, im);
        }
        Self::from_response(r.period, response, r.ensemble_size, r.params)
    }
}

impl WienerFilter {
    /// Builds a filter from its response on harmonics `0 ..= K`.
    pub fn from_response(
        period: usize,
        mut response: Vec<Complex64>,
        ensemble_size: usize,
        params: LifParams,
    ) -> Result<Self> {
        crate::signal::check_period(period)?;
        if response.len() != period / 2 + 1 {
            return Err(Error::CoefficientCount {
                period,
                expected: period / 2 + 1,
                got: response.len(),
            });
        }
        response[0].im = 0.0;
        Ok(Self {
            period,
            response,
            ensemble_size,
            params,
        })
    }

    /// Constant in-band response, e.g. `theta` to reproduce [`naive_estimate`].
    pub fn flat(period: usize, value: f64, params: LifParams) -> Result<Self> {
        Self::from_response(period, vec![Complex64::new(value, 0.0); period / 2 + 1], 0, params)
    }

    /// Fits the response harmonic by harmonic against the offset input `x + c`.
    ///
    /// Members are processed in parallel; their accumulators are summed in
    /// ensemble order. Harmonics never excited by any train get a zero response.
    pub fn fit(pairs: &[(PeriodicBandlimitedSignal, SpikeTrain)], params: &LifParams) -> Result<Self> {
        let Some((first, _)) = pairs.first() else {
            return Err(Error::InvalidParameter("Wiener fit needs a non-empty ensemble".into()));
        };
        let period = first.period();
        for (x, s) in pairs {
            for p in [x.period(), s.period()] {
                if p != period {
                    return Err(Error::PeriodMismatch(p, period));
                }
            }
        }
        let parts: Vec<(Vec<Complex64>, Vec<f64>)> = pairs
            .par_iter()
            .map(|(x, s)| {
                let spec = spike_spectrum(s);
                let target = x.clone().with_offset(params.offset());
                let num = spec.iter().zip(target.coeffs()).map(|(s, c)| s.conj() * c).collect();
                let den = spec.iter().map(|s| s.norm_sqr()).collect();
                (num, den)
            })
            .collect();
        let half = period / 2;
        let mut num = vec![Complex64::new(0.0, 0.0); half + 1];
        let mut den = vec![0.0; half + 1];
        for (n, d) in &parts {
            for k in 0..=half {
                num[k] += n[k];
                den[k] += d[k];
            }
        }
        let tp = period as f64;
        let response = num
            .iter()
            .zip(&den)
            .map(|(n, &d)| if d > 0.0 { n * tp / d } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::from_response(period, response, pairs.len(), *params)
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Response `F(w_k)` for `k = 0 ..= K`.
    pub fn response(&self) -> &[Complex64] {
        &self.response
    }

    pub fn ensemble_size(&self) -> usize {
        self.ensemble_size
    }

    pub fn params(&self) -> &LifParams {
        &self.params
    }

    /// Impulse response `f(t)`, bandlimited and real.
    pub fn impulse_response(&self) -> PeriodicBandlimitedSignal {
        let inv = 1.0 / self.period as f64;
        PeriodicBandlimitedSignal::from_coeffs(self.period, self.response.iter().map(|c| c * inv).collect())
            .expect("response has K + 1 entries")
    }

    /// `sum_n eps_n f(t - t_n)`, an estimate of `x + c`.
    pub fn apply(&self, train: &SpikeTrain) -> Result<PeriodicBandlimitedSignal> {
        if train.period() != self.period {
            return Err(Error::PeriodMismatch(train.period(), self.period));
        }
        let inv = 1.0 / self.period as f64;
        let coeffs = spike_spectrum(train)
            .iter()
            .zip(&self.response)
            .map(|(s, f)| s * f * inv)
            .collect();
        PeriodicBandlimitedSignal::from_coeffs(self.period, coeffs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Shorthand for [`WienerFilter::fit`].
pub fn wiener_fit(pairs: &[(PeriodicBandlimitedSignal, SpikeTrain)], params: &LifParams) -> Result<WienerFilter> {
    WienerFilter::fit(pairs, params)
}

/// Shorthand for [`WienerFilter::apply`].
pub fn wiener_apply(filter: &WienerFilter, train: &SpikeTrain) -> Result<PeriodicBandlimitedSignal> {
    filter.apply(train)
}

/// Midpoints `(t_{n-1} + t_n) / 2` of the firing intervals, with `t_0 = 0`.
pub fn interval_midpoints(train: &SpikeTrain) -> Vec<f64> {
    (0..train.len())
        .map(|n| 0.5 * (train.start_of(n) + train.times()[n]))
        .collect()
}

/// One step of `Lu = u + sum_n (theta_n - <h_n, u>) phi(. - tau_n)`.
pub fn lazar_iterate(ks: &KernelSystem, u: &PeriodicBandlimitedSignal) -> Result<PeriodicBandlimitedSignal> {
    if u.period() != ks.period() {
        return Err(Error::PeriodMismatch(u.period(), ks.period()));
    }
    let period = ks.period();
    let inv = 1.0 / period as f64;
    let residual: Vec<f64> = ks.apply(u).iter().zip(ks.samples()).map(|(hu, th)| th - hu).collect();
    let mids = interval_midpoints(ks.train());
    let mut out = u.clone();
    let coeffs: Vec<Complex64> = (0..=period / 2)
        .map(|k| {
            let w = harmonic(k, period);
            residual
                .iter()
                .zip(&mids)
                .map(|(&r, &tau)| Complex64::from_polar(r * inv, -w * tau))
                .sum()
        })
        .collect();
    out.axpy(1.0, &PeriodicBandlimitedSignal::from_coeffs(period, coeffs)?);
    Ok(out)
}

/// Distances `||L^k u_0 - y||` for `k = 0 ..= iterations`, computed on basis
/// coordinates with the correction pulses tabulated once.
pub fn lazar_distance_trace(
    ks: &KernelSystem,
    y: &PeriodicBandlimitedSignal,
    iterations: usize,
    start: Option<&PeriodicBandlimitedSignal>,
) -> Result<Vec<f64>> {
    let period = ks.period();
    for p in [Some(y.period()), start.map(|s| s.period())].into_iter().flatten() {
        if p != period {
            return Err(Error::PeriodMismatch(p, period));
        }
    }
    let mids = interval_midpoints(ks.train());
    let mut pulses = DMatrix::zeros(period, ks.len());
    for (n, &tau) in mids.iter().enumerate() {
        let col = PeriodicBandlimitedSignal::shifted_dirichlet(period, tau, 1.0)?.to_coords();
        pulses.column_mut(n).copy_from_slice(&col);
    }
    let theta = DVector::from_column_slice(ks.samples());
    let target = DVector::from_vec(y.to_coords());
    let mut a = match start {
        Some(u) => DVector::from_vec(u.to_coords()),
        None => DVector::zeros(period),
    };
    let mut out = Vec::with_capacity(iterations + 1);
    out.push((&a - &target).norm());
    for _ in 0..iterations {
        let r = &theta - ks.operator() * &a;
        a += &pulses * r;
        out.push((&a - &target).norm());
    }
    Ok(out)
}
