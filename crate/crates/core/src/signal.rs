//! Real periodic bandlimited signals.
//!
//! A signal of period `T` (an odd number of Nyquist periods) is stored by its
//! Fourier coefficients `c_k` for `0 <= k <= (T-1)/2`. The negative harmonics
//! are implied by `c_{-k} = conj(c_k)`, so every signal is real and in-band by
//! construction. Time is measured in Nyquist periods.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expo::leak_integral;

/// Lowest value reported by [`mse_db`].
pub const DB_FLOOR: f64 = -200.0;

pub(crate) fn check_period(period: usize) -> Result<()> {
    if period == 0 || period % 2 == 0 {
        return Err(Error::InvalidPeriod(period));
    }
    Ok(())
}

/// Angular frequency of harmonic `k` for the given period.
#[inline]
pub fn harmonic(k: usize, period: usize) -> f64 {
    2.0 * PI * k as f64 / period as f64
}

/// Periodic sinc (Dirichlet kernel) `sin(pi t) / (T sin(pi t / T))`.
pub fn dirichlet(t: f64, period: usize) -> Result<f64> {
    check_period(period)?;
    let tp = period as f64;
    // reduce to (-T/2, T/2]; the kernel is T-periodic for odd T
    let r = t - tp * (t / tp).round();
    if r.abs() < 1e-6 {
        let inv = 1.0 / (tp * tp);
        return Ok(1.0 - PI * PI * r * r * (1.0 - inv) / 6.0);
    }
    Ok((PI * r).sin() / (tp * (PI * r / tp).sin()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicBandlimitedSignal {
    period: usize,
    coeffs: Vec<Complex64>,
}

impl PeriodicBandlimitedSignal {
    pub fn zero(period: usize) -> Result<Self> {
        check_period(period)?;
        Ok(Self {
            period,
            coeffs: vec![Complex64::new(0.0, 0.0); period / 2 + 1],
        })
    }

    pub fn constant(period: usize, level: f64) -> Result<Self> {
        let mut s = Self::zero(period)?;
        s.coeffs[0] = Complex64::new(level, 0.0);
        Ok(s)
    }

    /// Builds a signal from its non-negative harmonics `c_0 ..= c_K`.
    ///
    /// The imaginary part of `c_0` is discarded since the signal is real.
    pub fn from_coeffs(period: usize, mut coeffs: Vec<Complex64>) -> Result<Self> {
        check_period(period)?;
        let expected = period / 2 + 1;
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount {
                period,
                expected,
                got: coeffs.len(),
            });
        }
        coeffs[0].im = 0.0;
        Ok(Self { period, coeffs })
    }

    /// Dirichlet interpolant of `T` Nyquist-rate samples `s_0 .. s_{T-1}`.
    pub fn from_nyquist_samples(samples: &[f64]) -> Result<Self> {
        let period = samples.len();
        check_period(period)?;
        let half = period / 2;
        let coeffs = (0..=half)
            .map(|k| {
                let w = harmonic(k, period);
                samples
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| Complex64::from_polar(s, -w * j as f64))
                    .sum::<Complex64>()
                    / period as f64
            })
            .collect();
        Self::from_coeffs(period, coeffs)
    }

    /// `scale * phi(t - shift)` where `phi` is the Dirichlet kernel.
    pub fn shifted_dirichlet(period: usize, shift: f64, scale: f64) -> Result<Self> {
        check_period(period)?;
        let amp = scale / period as f64;
        let coeffs = (0..=period / 2)
            .map(|k| Complex64::from_polar(amp, -harmonic(k, period) * shift))
            .collect();
        Self::from_coeffs(period, coeffs)
    }

    /// Builds a signal from coordinates in the orthonormal real harmonic basis
    /// `1/sqrt(T), sqrt(2/T) cos(w_k t), sqrt(2/T) sin(w_k t), ...`.
    pub fn from_coords(period: usize, coords: &[f64]) -> Result<Self> {
        check_period(period)?;
        if coords.len() != period {
            return Err(Error::LengthMismatch {
                expected: period,
                got: coords.len(),
            });
        }
        let tp = period as f64;
        let s = (2.0 * tp).sqrt();
        let mut coeffs = Vec::with_capacity(period / 2 + 1);
        coeffs.push(Complex64::new(coords[0] / tp.sqrt(), 0.0));
        for k in 1..=period / 2 {
            coeffs.push(Complex64::new(coords[2 * k - 1] / s, -coords[2 * k] / s));
        }
        Self::from_coeffs(period, coeffs)
    }

    /// Coordinates in the orthonormal basis used by [`Self::from_coords`].
    /// The Euclidean inner product of coordinates equals [`Self::inner_product`].
    pub fn to_coords(&self) -> Vec<f64> {
        let tp = self.period as f64;
        let s = (2.0 * tp).sqrt();
        let mut out = Vec::with_capacity(self.period);
        out.push(tp.sqrt() * self.coeffs[0].re);
        for c in &self.coeffs[1..] {
            out.push(s * c.re);
            out.push(-s * c.im);
        }
        out
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Highest harmonic index `K = (T-1)/2`.
    pub fn half_band(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, harmonic(1, self.period) * t);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for c in &self.coeffs[1..] {
            z *= rot;
            acc += (c * z).re;
        }
        self.coeffs[0].re + 2.0 * acc
    }

    /// Full two-sided synthesis `sum_{|k|<=K} c_k e^{i w_k t}` without using
    /// the Hermitian shortcut. The imaginary part is roundoff only.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let mut acc = self.coeffs[0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let e = Complex64::from_polar(1.0, harmonic(k, self.period) * t);
            acc += c * e + c.conj() * e.conj();
        }
        acc
    }

    /// Values at the instants `j / per_period` for `j = 0 .. per_period * T`.
    pub fn sample_grid(&self, per_period: usize) -> Vec<f64> {
        synthesize_on_grid(&self.coeffs, self.period, per_period)
    }

    /// `<u, v> = integral over one period of u(t) v(t)`.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        if self.period != other.period {
            return Err(Error::PeriodMismatch(self.period, other.period));
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> f64 {
        let tail: f64 = self.coeffs[1..]
            .iter()
            .zip(&other.coeffs[1..])
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        self.period as f64 * (self.coeffs[0].re * other.coeffs[0].re + 2.0 * tail)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner_unchecked(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Leaky integral `int_tau^t e^{-alpha (t - s)} (x(s) + offset) ds`, computed
    /// per harmonic in closed form.
    pub fn leaky_antiderivative(&self, offset: f64, tau: f64, t: f64, alpha: f64) -> Result<f64> {
        if t < tau {
            return Err(Error::ReversedInterval { tau, t });
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("leakage must be >= 0, got {alpha}")));
        }
        let dt = t - tau;
        let decay = (-alpha * dt).exp();
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = harmonic(k, self.period);
            let num = Complex64::from_polar(1.0, w * t) - decay * Complex64::from_polar(1.0, w * tau);
            acc += (c * num / Complex64::new(alpha, w)).re;
        }
        Ok(2.0 * acc + (self.coeffs[0].re + offset) * leak_integral(alpha, dt))
    }

    /// Adds a constant to the signal.
    pub fn with_offset(mut self, level: f64) -> Self {
        self.coeffs[0].re += level;
        self
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        assert_eq!(self.period, other.period, "period mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            period: self.period,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Squared distance `||self - other||^2`.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        (self - other).norm_sq()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SignalRecord::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: SignalRecord = serde_json::from_str(s)?;
        rec.try_into()
    }
}

impl Add for &PeriodicBandlimitedSignal {
    type Output = PeriodicBandlimitedSignal;

    /// Panics if the periods differ.
    fn add(self, rhs: Self) -> PeriodicBandlimitedSignal {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &PeriodicBandlimitedSignal {
    type Output = PeriodicBandlimitedSignal;

    /// Panics if the periods differ.
    fn sub(self, rhs: Self) -> PeriodicBandlimitedSignal {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &PeriodicBandlimitedSignal {
    type Output = PeriodicBandlimitedSignal;

    fn mul(self, rhs: f64) -> PeriodicBandlimitedSignal {
        self.scaled(rhs)
    }
}

/// On-disk form: `{"T": period, "coeffs": [[re, im], ...]}` for `k = 0 ..= K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalRecord {
    #[serde(rename = "T")]
    pub period: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&PeriodicBandlimitedSignal> for SignalRecord {
    fn from(s: &PeriodicBandlimitedSignal) -> Self {
        Self {
            period: s.period,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<SignalRecord> for PeriodicBandlimitedSignal {
    type Error = Error;

    fn try_from(rec: SignalRecord) -> Result<Self> {
        let coeffs = rec.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::from_coeffs(rec.period, coeffs)
    }
}

/// Evaluates `sum_{|k|<=K} c_k e^{i w_k t}` at `t = j / per_period` by an inverse FFT.
pub(crate) fn synthesize_on_grid(coeffs: &[Complex64], period: usize, per_period: usize) -> Vec<f64> {
    let n = period * per_period;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[0] = coeffs[0];
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        buf[k] += c;
        buf[n - k] += c.conj();
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Uniform refinement grid used to bracket threshold crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    period: usize,
    per_period: usize,
}

impl TimeGrid {
    pub const DEFAULT_PER_PERIOD: usize = 64;

    pub fn new(period: usize, per_period: usize) -> Result<Self> {
        check_period(period)?;
        if per_period == 0 {
            return Err(Error::InvalidParameter("grid oversampling must be positive".into()));
        }
        Ok(Self { period, per_period })
    }

    pub fn with_default(period: usize) -> Result<Self> {
        Self::new(period, Self::DEFAULT_PER_PERIOD)
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn per_period(&self) -> usize {
        self.per_period
    }

    pub fn len(&self) -> usize {
        self.period * self.per_period
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_period as f64
    }

    pub fn instant(&self, j: usize) -> f64 {
        j as f64 / self.per_period as f64
    }

    /// Instants `0, 1/m, 2/m, ...` covering `[0, T)`.
    pub fn instants(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.instant(j))
    }
}

/// Draws `T` Nyquist samples uniformly in `[-amp, amp]` and returns their
/// Dirichlet interpolant.
pub fn random_bandlimited_with<R: Rng + ?Sized>(
    period: usize,
    amp: f64,
    rng: &mut R,
) -> Result<PeriodicBandlimitedSignal> {
    check_period(period)?;
    if !(amp > 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude must be > 0, got {amp}")));
    }
    let samples: Vec<f64> = (0..period).map(|_| rng.random_range(-amp..=amp)).collect();
    PeriodicBandlimitedSignal::from_nyquist_samples(&samples)
}

/// Seeded variant of [`random_bandlimited_with`].
pub fn random_bandlimited(period: usize, amp: f64, seed: u64) -> Result<PeriodicBandlimitedSignal> {
    random_bandlimited_with(period, amp, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `10 log10(||u - x||^2 / ref_power)`, floored at [`DB_FLOOR`].
pub fn mse_db(u: &PeriodicBandlimitedSignal, x: &PeriodicBandlimitedSignal, ref_power: f64) -> Result<f64> {
    if u.period != x.period {
        return Err(Error::PeriodMismatch(u.period, x.period));
    }
    ratio_db(u.distance_sq(x), ref_power)
}

/// `10 log10(err / ref_power)` with the same floor as [`mse_db`].
pub fn ratio_db(err: f64, ref_power: f64) -> Result<f64> {
    if !(ref_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reference power must be > 0, got {ref_power}"
        )));
    }
    let ratio = err / ref_power;
    if ratio > 0.0 {
        Ok((10.0 * ratio.log10()).max(DB_FLOOR))
    } else {
        Ok(DB_FLOOR)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn trapezoid_product(u: &PeriodicBandlimitedSignal, v: &PeriodicBandlimitedSignal, n: usize) -> f64 {
        // periodic trapezoid rule: exact for trigonometric polynomials of degree < n
        let h = u.period() as f64 / n as f64;
        (0..n).map(|j| u.eval(j as f64 * h) * v.eval(j as f64 * h)).sum::<f64>() * h
    }

    #[test]
    fn dirichlet_values() {
        assert_eq!(dirichlet(0.0, 5).unwrap(), 1.0);
        assert!(dirichlet(2.0, 5).unwrap().abs() < 1e-15);
        assert!(dirichlet(5.0, 5).unwrap() - 1.0 < 1e-15);
        // sin(pi/2) / (5 sin(pi/10))
        assert!((dirichlet(0.5, 5).unwrap() - 0.647214).abs() < 1e-6);
        assert!(matches!(dirichlet(0.5, 4), Err(Error::InvalidPeriod(4))));
        assert!(dirichlet(0.5, 0).is_err());
    }

    #[test]
    fn dirichlet_matches_fourier_sum() {
        let phi = PeriodicBandlimitedSignal::shifted_dirichlet(7, 0.0, 1.0).unwrap();
        for &t in &[0.0, 1e-8, 0.3, 2.7, -3.1, 6.99] {
            assert!((phi.eval(t) - dirichlet(t, 7).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_basics() {
        let z = PeriodicBandlimitedSignal::zero(9).unwrap();
        assert_eq!(z.eval(1.234), 0.0);
        let dc = PeriodicBandlimitedSignal::constant(9, 0.4).unwrap();
        assert!((dc.eval(3.3) - 0.4).abs() < 1e-15);
        let samples = [0.1, -0.3, 0.5, 0.2, -0.6, 0.0, 0.7];
        let s = PeriodicBandlimitedSignal::from_nyquist_samples(&samples).unwrap();
        for (j, &v) in samples.iter().enumerate() {
            assert!((s.eval(j as f64) - v).abs() < 1e-13);
        }
        let grid = s.sample_grid(4);
        for (j, g) in grid.iter().enumerate() {
            assert!((g - s.eval(j as f64 / 4.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn inner_product_cases() {
        let one = PeriodicBandlimitedSignal::constant(5, 1.0).unwrap();
        assert!((one.inner_product(&one).unwrap() - 5.0).abs() < 1e-14);

        let mut c1 = vec![Complex64::new(0.0, 0.0); 3];
        c1[1] = Complex64::new(0.5, 0.0);
        let mut c2 = vec![Complex64::new(0.0, 0.0); 3];
        c2[2] = Complex64::new(0.0, 0.5);
        let u = PeriodicBandlimitedSignal::from_coeffs(5, c1).unwrap();
        let v = PeriodicBandlimitedSignal::from_coeffs(5, c2).unwrap();
        assert!(u.inner_product(&v).unwrap().abs() < 1e-15);

        let w = PeriodicBandlimitedSignal::zero(7).unwrap();
        assert!(matches!(u.inner_product(&w), Err(Error::PeriodMismatch(5, 7))));
    }

    #[test]
    fn inner_product_matches_quadrature() {
        for seed in 0..100 {
            let u = random_bandlimited(61, 0.7, seed).unwrap();
            let v = random_bandlimited(61, 0.7, seed + 1000).unwrap();
            let q = trapezoid_product(&u, &v, 1024);
            assert_relative_eq!(u.inner_product(&v).unwrap(), q, max_relative = 1e-8);
            let q2 = trapezoid_product(&u, &u, 1024);
            assert_relative_eq!(u.norm_sq(), q2, max_relative = 1e-8);
        }
    }

    #[test]
    fn reproducing_property() {
        for seed in 0..20 {
            let u = random_bandlimited(31, 0.7, seed).unwrap();
            let t0 = (seed as f64 * 1.618).rem_euclid(31.0);
            let phi = PeriodicBandlimitedSignal::shifted_dirichlet(31, t0, 1.0).unwrap();
            assert!((phi.inner_product(&u).unwrap() - u.eval(t0)).abs() < 1e-10);
        }
    }

    #[test]
    fn imaginary_residue_is_negligible() {
        let u = random_bandlimited(61, 0.7, 3).unwrap();
        for j in 0..50 {
            let z = u.eval_complex(j as f64 * 1.21);
            assert!(z.im.abs() < 1e-12 * u.norm());
            assert!((z.re - u.eval(j as f64 * 1.21)).abs() < 1e-12);
        }
    }

    #[test]
    fn coords_roundtrip_and_isometry() {
        let u = random_bandlimited(11, 0.7, 9).unwrap();
        let v = random_bandlimited(11, 0.7, 10).unwrap();
        let back = PeriodicBandlimitedSignal::from_coords(11, &u.to_coords()).unwrap();
        assert!(back.distance_sq(&u) < 1e-28);
        let dot: f64 = u.to_coords().iter().zip(v.to_coords()).map(|(a, b)| a * b).sum();
        assert!((dot - u.inner_product(&v).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn leaky_antiderivative_closed_forms() {
        let a = 0.8;
        let dc = PeriodicBandlimitedSignal::constant(7, a).unwrap();
        let v = dc.leaky_antiderivative(0.0, 1.0, 3.5, 0.0).unwrap();
        assert!((v - a * 2.5).abs() < 1e-14);

        let alpha = 0.6;
        let v = dc.leaky_antiderivative(0.0, 1.0, 3.5, alpha).unwrap();
        let expected = a / alpha * (1.0 - (-alpha * 2.5f64).exp());
        assert!((v - expected).abs() < 1e-14);
        // the offset is integrated the same way as a DC input
        let z = PeriodicBandlimitedSignal::zero(7).unwrap();
        assert!((z.leaky_antiderivative(a, 1.0, 3.5, alpha).unwrap() - expected).abs() < 1e-14);

        assert!(matches!(
            dc.leaky_antiderivative(0.0, 2.0, 1.0, 0.1),
            Err(Error::ReversedInterval { .. })
        ));
    }

    #[test]
    fn leaky_antiderivative_matches_quadrature() {
        let u = random_bandlimited(15, 0.7, 4).unwrap();
        let (tau, t, alpha, c) = (1.3, 4.1, 0.9, 0.5);
        let n = 20_000;
        let h = (t - tau) / n as f64;
        // composite Simpson
        let f = |s: f64| (-alpha * (t - s)).exp() * (u.eval(s) + c);
        let mut q = f(tau) + f(t);
        for j in 1..n {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            q += w * f(tau + j as f64 * h);
        }
        q *= h / 3.0;
        assert!((u.leaky_antiderivative(c, tau, t, alpha).unwrap() - q).abs() < 1e-10);
    }

    #[test]
    fn leaky_antiderivative_semigroup() {
        let u = random_bandlimited(21, 0.7, 5).unwrap();
        let (tau, s, t) = (0.4, 2.2, 5.9);
        for &alpha in &[0.0, 0.03, 1.5] {
            let lhs = u.leaky_antiderivative(1.0, tau, t, alpha).unwrap();
            let rhs = (-alpha * (t - s)).exp() * u.leaky_antiderivative(1.0, tau, s, alpha).unwrap()
                + u.leaky_antiderivative(1.0, s, t, alpha).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
            assert_eq!(u.leaky_antiderivative(1.0, tau, tau, alpha).unwrap(), 0.0);
        }
    }

    #[test]
    fn random_draws() {
        let a = random_bandlimited(61, 0.7, 42).unwrap();
        let b = random_bandlimited(61, 0.7, 42).unwrap();
        assert_eq!(a, b);
        for j in 0..61 {
            assert!(a.eval(j as f64).abs() <= 0.7 + 1e-12);
        }
        assert!(random_bandlimited(61, 0.0, 1).is_err());
    }

    #[test]
    fn dc_coefficient_is_zero_mean_in_distribution() {
        // c_0 is the mean of T uniform samples: variance amp^2 / (3 T)
        let (period, amp, draws) = (61usize, 0.7, 1000);
        let mean = (0..draws)
            .map(|s| random_bandlimited(period, amp, s as u64).unwrap().coeffs()[0].re)
            .sum::<f64>()
            / draws as f64;
        let sigma = (amp * amp / (3.0 * period as f64) / draws as f64).sqrt();
        assert!(mean.abs() < 3.0 * sigma, "mean {mean} sigma {sigma}");
    }

    #[test]
    fn mse_db_cases() {
        let x = random_bandlimited(11, 0.7, 1).unwrap();
        let z = PeriodicBandlimitedSignal::zero(11).unwrap();
        assert_eq!(mse_db(&x, &x, 1.0).unwrap(), DB_FLOOR);
        assert!(mse_db(&z, &x, x.norm_sq()).unwrap().abs() < 1e-12);
        assert!((mse_db(&z, &x, 10.0 * x.norm_sq()).unwrap() + 10.0).abs() < 1e-12);
        assert!(mse_db(&z, &x, 0.0).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let x = random_bandlimited(9, 0.7, 8).unwrap();
        let back = PeriodicBandlimitedSignal::from_json(&x.to_json().unwrap()).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"T": 9, "coeffs": [[0.0, 0.0]]}"#;
        assert!(PeriodicBandlimitedSignal::from_json(bad).is_err());
    }

    #[test]
    fn grid_instants() {
        let g = TimeGrid::new(3, 4).unwrap();
        let v: Vec<f64> = g.instants().collect();
        assert_eq!(v.len(), 12);
        assert_eq!(v[0], 0.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!(*v.last().unwrap() < 3.0);
        assert!(TimeGrid::new(4, 4).is_err());
        assert!(TimeGrid::new(3, 0).is_err());
    }
}
