//! Small exponential helpers with series fallbacks near zero.

/// Below this value of `x` the `1 - e^{-x}` family switches to its series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// `(1 - e^{-alpha * dt}) / alpha`, the integral of `e^{-alpha (dt - s)}` over `[0, dt]`.
pub fn leak_integral(alpha: f64, dt: f64) -> f64 {
    let x = alpha * dt;
    if x.abs() < SERIES_THRESHOLD {
        dt * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / alpha
    }
}

/// `(1 - e^{-2 alpha dt}) / (2 alpha)`.
pub fn leak_energy(alpha: f64, dt: f64) -> f64 {
    let x = alpha * dt;
    if x.abs() < SERIES_THRESHOLD {
        dt * (1.0 - x)
    } else {
        -(-2.0 * x).exp_m1() / (2.0 * alpha)
    }
}

/// `sinh(x) / x`, equal to 1 at the origin.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_closed_form_agree_at_switchover() {
        let alpha = 1.0;
        for &dt in &[0.999e-6, 1.001e-6] {
            let exact = -(-alpha * dt as f64).exp_m1() / alpha;
            assert!((leak_integral(alpha, dt) - exact).abs() < 1e-12 * exact);
            let exact2 = -(-2.0 * alpha * dt as f64).exp_m1() / (2.0 * alpha);
            assert!((leak_energy(alpha, dt) - exact2).abs() < 1e-12 * exact2);
        }
    }

    #[test]
    fn zero_leak_limits() {
        assert_eq!(leak_integral(0.0, 0.7), 0.7);
        assert_eq!(leak_energy(0.0, 0.7), 0.7);
        assert_eq!(sinhc(0.0), 1.0);
    }
}
