//! Leaky integrate-and-fire encoding.
//!
//! Starting from `t_0 = 0`, the encoder fires at the first instant `t_n` where
//! the leaky integral `int_{t_{n-1}}^t e^{-alpha (t - s)} (x(s) + c) ds` reaches
//! `+theta` or `-theta`, records the sign of the crossing and restarts the
//! integral from zero.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expo::leak_integral;
use crate::signal::{harmonic, synthesize_on_grid, PeriodicBandlimitedSignal, TimeGrid};

/// Absolute tolerance on each resolved firing time.
pub const CROSSING_TOLERANCE: f64 = 1e-12;

/// Relative tolerance accepted by [`calibrate_threshold`].
pub const CALIBRATION_TOLERANCE: f64 = 0.02;

const THRESHOLD_BRACKET: (f64, f64) = (1e-6, 1e3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Unipolar,
    Bipolar,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Unipolar => "unipolar",
            Polarity::Bipolar => "bipolar",
        }
    }
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unipolar" => Ok(Polarity::Unipolar),
            "bipolar" => Ok(Polarity::Bipolar),
            other => Err(Error::InvalidParameter(format!("unknown polarity {other:?}"))),
        }
    }
}

/// Encoder constants: leakage `alpha >= 0`, offset `c >= 0`, threshold `theta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    alpha: f64,
    offset: f64,
    threshold: f64,
    polarity: Polarity,
}

impl LifParams {
    pub fn new(alpha: f64, offset: f64, threshold: f64, polarity: Polarity) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("leakage must be >= 0, got {alpha}")));
        }
        if !(offset >= 0.0) || !offset.is_finite() {
            return Err(Error::InvalidParameter(format!("offset must be >= 0, got {offset}")));
        }
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "threshold must be > 0, got {threshold}"
            )));
        }
        Ok(Self {
            alpha,
            offset,
            threshold,
            polarity,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        Self::new(self.alpha, self.offset, threshold, self.polarity)
    }
}

/// Firing times `0 < t_1 < ... < t_N <= T` with signs `eps_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpikeTrainRecord", into = "SpikeTrainRecord")]
pub struct SpikeTrain {
    period: usize,
    times: Vec<f64>,
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct SpikeTrainRecord {
    #[serde(rename = "T")]
    period: usize,
    times: Vec<f64>,
    signs: Vec<i8>,
}

impl TryFrom<SpikeTrainRecord> for SpikeTrain {
    type Error = Error;

    fn try_from(r: SpikeTrainRecord) -> Result<Self> {
        SpikeTrain::new(r.period, r.times, r.signs)
    }
}

impl From<SpikeTrain> for SpikeTrainRecord {
    fn from(s: SpikeTrain) -> Self {
        Self {
            period: s.period,
            times: s.times,
            signs: s.signs,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    time: f64,
    sign: i8,
}

impl SpikeTrain {
    pub fn new(period: usize, times: Vec<f64>, signs: Vec<i8>) -> Result<Self> {
        crate::signal::check_period(period)?;
        if times.len() != signs.len() {
            return Err(Error::InvalidSpikeTrain(format!(
                "{} times but {} signs",
                times.len(),
                signs.len()
            )));
        }
        let mut prev = 0.0;
        for (n, &t) in times.iter().enumerate() {
            if !(t > prev) || t > period as f64 {
                return Err(Error::InvalidSpikeTrain(format!(
                    "time {t} at index {n} breaks 0 < t_1 < ... <= T"
                )));
            }
            prev = t;
        }
        if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpikeTrain(format!("sign {s} is not +1 or -1")));
        }
        Ok(Self { period, times, signs })
    }

    pub fn empty(period: usize) -> Result<Self> {
        Self::new(period, Vec::new(), Vec::new())
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `t_{n-1}` for the zero-based spike `n`, with `t_{-1} = 0`.
    pub fn start_of(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.times[n - 1]
        }
    }

    /// Interval lengths `t_n - t_{n-1}`.
    pub fn intervals(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.times[n] - self.start_of(n)).collect()
    }

    /// Average number of spikes per Nyquist period.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.period as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Two-column CSV `time,sign`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for (&time, &sign) in self.times.iter().zip(&self.signs) {
            wtr.serialize(CsvRow { time, sign })?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(period: usize, r: R) -> Result<Self> {
        let mut times = Vec::new();
        let mut signs = Vec::new();
        for row in csv::Reader::from_reader(r).deserialize() {
            let row: CsvRow = row?;
            times.push(row.time);
            signs.push(row.sign);
        }
        Self::new(period, times, signs)
    }
}

/// Per-input precomputation for repeated encodings at different thresholds.
///
/// The leaky integral is split as
/// `A_tau(t) = Y(t) - e^{-alpha (t - tau)} Y(tau) + (c_0 + c) L(t - tau)`,
/// where `Y` is the periodic steady-state response of the non-DC harmonics,
/// tabulated once on the grid.
#[derive(Debug, Clone)]
pub struct LeakyIntegrator {
    period: usize,
    alpha: f64,
    dc: f64,
    grid: TimeGrid,
    steady_coeffs: Vec<Complex64>,
    steady_grid: Vec<f64>,
    min_level: f64,
}

impl LeakyIntegrator {
    pub fn new(x: &PeriodicBandlimitedSignal, alpha: f64, offset: f64, grid: TimeGrid) -> Result<Self> {
        if grid.period() != x.period() {
            return Err(Error::PeriodMismatch(grid.period(), x.period()));
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("leakage must be >= 0, got {alpha}")));
        }
        let period = x.period();
        let mut steady_coeffs = vec![Complex64::new(0.0, 0.0); x.half_band() + 1];
        for (k, c) in x.coeffs().iter().enumerate().skip(1) {
            steady_coeffs[k] = c / Complex64::new(alpha, harmonic(k, period));
        }
        let steady_grid = synthesize_on_grid(&steady_coeffs, period, grid.per_period());
        let min_level = x
            .sample_grid(grid.per_period())
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            + offset;
        Ok(Self {
            period,
            alpha,
            dc: x.coeffs()[0].re + offset,
            grid,
            steady_coeffs,
            steady_grid,
            min_level,
        })
    }

    /// Minimum of `x(t) + c` over the grid.
    pub fn min_level(&self) -> f64 {
        self.min_level
    }

    fn steady_at(&self, t: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, harmonic(1, self.period) * t);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for c in &self.steady_coeffs[1..] {
            z *= rot;
            acc += (c * z).re;
        }
        2.0 * acc
    }

    fn steady_at_grid(&self, j: usize) -> f64 {
        self.steady_grid[j % self.steady_grid.len()]
    }

    #[inline]
    fn integral(&self, tau: f64, y_tau: f64, t: f64, y_t: f64) -> f64 {
        let dt = t - tau;
        y_t - (-self.alpha * dt).exp() * y_tau + self.dc * leak_integral(self.alpha, dt)
    }

    /// `A_tau (x + c)(t)` for `t >= tau`.
    pub fn value(&self, tau: f64, t: f64) -> f64 {
        self.integral(tau, self.steady_at(tau), t, self.steady_at(t))
    }

    /// Runs the firing recursion over one period. Stops early once `cap`
    /// spikes have been emitted.
    pub fn fire(&self, threshold: f64, polarity: Polarity, cap: Option<usize>) -> Result<SpikeTrain> {
        if !(threshold > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be > 0, got {threshold}"
            )));
        }
        if polarity == Polarity::Unipolar && !(self.min_level > 0.0) {
            return Err(Error::NotUnipolar { min: self.min_level });
        }
        let last = self.grid.len();
        let step = self.grid.step();
        let cap = cap.unwrap_or(usize::MAX);
        let mut times = Vec::new();
        let mut signs = Vec::new();
        let mut tau = 0.0;
        let mut y_tau = self.steady_grid[0];
        let mut j = 1;

        while times.len() < cap {
            // first grid instant in (tau, T] where the integral reaches the threshold
            let mut hit = None;
            while j <= last {
                let t = self.grid.instant(j);
                let a = self.integral(tau, y_tau, t, self.steady_at_grid(j));
                if a.abs() >= threshold {
                    hit = Some((j, a.signum()));
                    break;
                }
                j += 1;
            }
            let Some((jh, sign)) = hit else { break };

            let mut lo = tau.max(self.grid.instant(jh - 1));
            let mut hi = self.grid.instant(jh);
            while hi - lo > CROSSING_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sign * self.integral(tau, y_tau, mid, self.steady_at(mid)) >= threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            times.push(hi);
            signs.push(sign as i8);
            tau = hi;
            y_tau = self.steady_at(hi);
            j = (hi / step).floor() as usize + 1;
        }
        SpikeTrain::new(self.period, times, signs)
    }
}

/// Encodes one period of `x` starting from `t_0 = 0`.
///
/// A threshold too large for any crossing yields an empty train and a warning.
pub fn encode(x: &PeriodicBandlimitedSignal, params: &LifParams, grid: TimeGrid) -> Result<SpikeTrain> {
    let integ = LeakyIntegrator::new(x, params.alpha, params.offset, grid)?;
    let train = integ.fire(params.threshold, params.polarity, None)?;
    if train.is_empty() {
        log::warn!("threshold {} produced no spikes over one period", params.threshold);
    }
    Ok(train)
}

/// Encodes every input with the same parameters, results in input order.
pub fn encode_all(inputs: &[PeriodicBandlimitedSignal], params: &LifParams, grid: TimeGrid) -> Result<Vec<SpikeTrain>> {
    inputs.par_iter().map(|x| encode(x, params, grid)).collect()
}

/// Threshold giving an ensemble-average density of `target` spikes per Nyquist
/// period, within [`CALIBRATION_TOLERANCE`]. The threshold in `params` is ignored.
pub fn calibrate_threshold(inputs: &[PeriodicBandlimitedSignal], params: &LifParams, target: f64) -> Result<f64> {
    let period = inputs
        .first()
        .ok_or_else(|| Error::InvalidParameter("calibration needs at least one input".into()))?
        .period();
    calibrate_threshold_on(inputs, params, target, TimeGrid::with_default(period)?)
}

pub fn calibrate_threshold_on(
    inputs: &[PeriodicBandlimitedSignal],
    params: &LifParams,
    target: f64,
    grid: TimeGrid,
) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target density must be > 0, got {target}"
        )));
    }
    if inputs.is_empty() {
        return Err(Error::InvalidParameter("calibration needs at least one input".into()));
    }
    let integrators = inputs
        .par_iter()
        .map(|x| LeakyIntegrator::new(x, params.alpha, params.offset, grid))
        .collect::<Result<Vec<_>>>()?;
    let period = grid.period() as f64;
    let cap = (20.0 * target * period).ceil() as usize + 1;
    let density = |theta: f64| -> Result<f64> {
        let counts = integrators
            .par_iter()
            .map(|ig| ig.fire(theta, params.polarity, Some(cap)).map(|s| s.len()))
            .collect::<Result<Vec<_>>>()?;
        Ok(counts.iter().sum::<usize>() as f64 / (period * counts.len() as f64))
    };
    let within = |d: f64| (d - target).abs() <= CALIBRATION_TOLERANCE * target;

    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    let (mut d_lo, mut d_hi) = (density(lo)?, density(hi)?);
    if d_lo < target * (1.0 - CALIBRATION_TOLERANCE) || d_hi > target * (1.0 + CALIBRATION_TOLERANCE) {
        return Err(Error::CalibrationUnreachable {
            target,
            low: d_hi,
            high: d_lo,
        });
    }
    for (theta, d) in [(lo, d_lo), (hi, d_hi)] {
        if within(d) {
            return Ok(theta);
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let d = density(mid)?;
        if within(d) {
            return Ok(mid);
        }
        if d > target {
            lo = mid;
            d_lo = d;
        } else {
            hi = mid;
            d_hi = d;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Err(Error::CalibrationUnreachable {
        target,
        low: d_hi,
        high: d_lo,
    })
}

/// Rounds each firing time to the nearest multiple of `2^-bits`.
///
/// A time that would not stay strictly after its predecessor is pushed up by one
/// quantum; times pushed beyond `T` are dropped.
pub fn quantize_times(train: &SpikeTrain, bits: u32) -> SpikeTrain {
    let q = (-(bits as f64)).exp2();
    let period = train.period as f64;
    let mut times = Vec::with_capacity(train.len());
    let mut signs = Vec::with_capacity(train.len());
    let mut prev = 0.0;
    for (&t, &s) in train.times.iter().zip(&train.signs) {
        let mut r = (t / q).round() * q;
        if r <= prev {
            r = prev + q;
        }
        if r > period {
            break;
        }
        times.push(r);
        signs.push(s);
        prev = r;
    }
    SpikeTrain {
        period: train.period,
        times,
        signs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::random_bandlimited;

    fn grid(period: usize) -> TimeGrid {
        TimeGrid::with_default(period).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(LifParams::new(-0.1, 0.0, 1.0, Polarity::Bipolar).is_err());
        assert!(LifParams::new(0.1, -1.0, 1.0, Polarity::Bipolar).is_err());
        assert!(LifParams::new(0.1, 0.0, 0.0, Polarity::Bipolar).is_err());
        assert!(LifParams::new(0.0, 0.0, 1e-3, Polarity::Unipolar).is_ok());
    }

    #[test]
    fn train_validation() {
        assert!(SpikeTrain::new(5, vec![0.5, 0.5], vec![1, 1]).is_err());
        assert!(SpikeTrain::new(5, vec![0.0], vec![1]).is_err());
        assert!(SpikeTrain::new(5, vec![5.1], vec![1]).is_err());
        assert!(SpikeTrain::new(5, vec![1.0], vec![0]).is_err());
        assert!(SpikeTrain::new(5, vec![1.0], vec![1, 1]).is_err());
        let s = SpikeTrain::new(5, vec![1.0, 2.5, 5.0], vec![1, -1, 1]).unwrap();
        assert_eq!(s.intervals(), vec![1.0, 1.5, 2.5]);
    }

    #[test]
    fn constant_input_without_leak() {
        let a = 0.8;
        let theta = 0.3;
        let x = PeriodicBandlimitedSignal::constant(7, a).unwrap();
        let p = LifParams::new(0.0, 0.0, theta, Polarity::Unipolar).unwrap();
        let s = encode(&x, &p, grid(7)).unwrap();
        assert_eq!(s.len(), (7.0 * a / theta).floor() as usize);
        for dt in s.intervals() {
            assert!((dt - theta / a).abs() < 1e-11);
        }
        assert!(s.signs().iter().all(|&e| e == 1));
    }

    #[test]
    fn constant_input_with_leak() {
        let (a, alpha, theta) = (1.2, 0.7, 0.5);
        let x = PeriodicBandlimitedSignal::constant(9, a).unwrap();
        let p = LifParams::new(alpha, 0.0, theta, Polarity::Unipolar).unwrap();
        let s = encode(&x, &p, grid(9)).unwrap();
        let expected = -(1.0 - alpha * theta / a).ln() / alpha;
        assert!(!s.is_empty());
        for dt in s.intervals() {
            assert!((dt - expected).abs() < 1e-11);
        }
    }

    #[test]
    fn crossings_hit_the_threshold_and_nothing_earlier() {
        let x = random_bandlimited(21, 0.7, 11).unwrap();
        for (alpha, c, pol) in [
            (0.0, 0.0, Polarity::Bipolar),
            (1.5, 1.0, Polarity::Unipolar),
            (0.8, 0.0, Polarity::Bipolar),
        ] {
            let ig = LeakyIntegrator::new(&x, alpha, c, grid(21)).unwrap();
            let theta = 0.2;
            let s = ig.fire(theta, pol, None).unwrap();
            assert!(s.len() > 5);
            for n in 0..s.len() {
                let (tau, t) = (s.start_of(n), s.times()[n]);
                let direct = x.leaky_antiderivative(c, tau, t, alpha).unwrap();
                assert!((direct - s.signs()[n] as f64 * theta).abs() < 1e-10);
                // minimality on the refinement grid
                let g = grid(21);
                for j in 0..g.len() {
                    let u = g.instant(j);
                    if u > tau && u < t {
                        assert!(ig.value(tau, u).abs() < theta);
                    }
                }
            }
        }
    }

    #[test]
    fn unipolar_positivity_is_enforced() {
        let x = PeriodicBandlimitedSignal::constant(5, -0.5).unwrap();
        let p = LifParams::new(0.0, 0.2, 0.1, Polarity::Unipolar).unwrap();
        assert!(matches!(encode(&x, &p, grid(5)), Err(Error::NotUnipolar { .. })));
    }

    #[test]
    fn huge_threshold_gives_empty_train() {
        let x = random_bandlimited(11, 0.7, 2).unwrap();
        let p = LifParams::new(0.5, 1.0, 100.0, Polarity::Unipolar).unwrap();
        assert!(encode(&x, &p, grid(11)).unwrap().is_empty());
    }

    #[test]
    fn calibration_of_constant_input() {
        let (a, target) = (1.0, 1.5);
        let x = PeriodicBandlimitedSignal::constant(61, a).unwrap();
        let p = LifParams::new(0.0, 0.0, 1.0, Polarity::Unipolar).unwrap();
        let theta = calibrate_threshold(std::slice::from_ref(&x), &p, target).unwrap();
        let d = encode(&x, &p.with_threshold(theta).unwrap(), grid(61))
            .unwrap()
            .density();
        assert!((d - target).abs() <= 0.02 * target);
        assert!((theta - a / target).abs() <= 0.03 * a / target);
    }

    #[test]
    fn calibration_unreachable() {
        // even the largest threshold in the bracket fires far too often
        let x = PeriodicBandlimitedSignal::constant(5, 1e6).unwrap();
        let p = LifParams::new(0.0, 0.0, 1.0, Polarity::Unipolar).unwrap();
        let err = calibrate_threshold(std::slice::from_ref(&x), &p, 1.0).unwrap_err();
        assert!(matches!(err, Error::CalibrationUnreachable { .. }));
        assert!(calibrate_threshold(&[], &p, 1.0).is_err());
    }

    #[test]
    fn monotone_in_threshold() {
        let x = random_bandlimited(31, 0.7, 5).unwrap();
        let ig = LeakyIntegrator::new(&x, 0.3, 1.0, grid(31)).unwrap();
        let mut theta = 0.05;
        let mut prev = usize::MAX;
        while theta < 5.0 {
            let n = ig.fire(theta, Polarity::Unipolar, None).unwrap().len();
            assert!(n <= prev);
            prev = n;
            theta *= 2.0;
        }
    }

    #[test]
    fn quantization_rules() {
        let s = SpikeTrain::new(3, vec![0.25, 0.75, 1.5], vec![1, 1, -1]).unwrap();
        assert_eq!(quantize_times(&s, 2), s);
        let s = SpikeTrain::new(3, vec![0.3], vec![1]).unwrap();
        assert_eq!(quantize_times(&s, 2).times(), &[0.25]);
        let s = SpikeTrain::new(3, vec![0.26, 0.27], vec![1, -1]).unwrap();
        let q = quantize_times(&s, 2);
        assert_eq!(q.times(), &[0.25, 0.5]);
        assert_eq!(q.signs(), &[1, -1]);
        let s = SpikeTrain::new(3, vec![0.01], vec![1]).unwrap();
        assert_eq!(quantize_times(&s, 2).times(), &[0.25]);
    }

    #[test]
    fn serialization_formats() {
        let s = SpikeTrain::new(5, vec![0.5, 1.25, 4.0], vec![1, -1, 1]).unwrap();
        let back = SpikeTrain::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        let json: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(json["T"], 5);

        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time,sign\n0.5,1\n"));
        assert_eq!(SpikeTrain::read_csv(5, buf.as_slice()).unwrap(), s);

        assert!(SpikeTrain::from_json(r#"{"T":5,"times":[2.0,1.0],"signs":[1,1]}"#).is_err());
    }
}
