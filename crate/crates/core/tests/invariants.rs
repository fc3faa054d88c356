use lifpocs::experiment::{draw_inputs, EVAL_STREAM};
use lifpocs::kernel::KernelSystem;
use lifpocs::lif::{calibrate_threshold, encode, quantize_times, LifParams, Polarity};
use lifpocs::pocs::{pocs_run, project_consistent, weighted_norm_sq, ExactProjection};
use lifpocs::signal::{random_bandlimited, PeriodicBandlimitedSignal, TimeGrid};
use proptest::prelude::*;

const T: usize = 15;

/// Input and kernels at a threshold calibrated to 1.5 spikes per Nyquist period
/// on four inputs of the seed's stream. `None` when no threshold lands in the
/// calibration window.
fn system(seed: u64, alpha: f64, bipolar: bool) -> Option<(PeriodicBandlimitedSignal, KernelSystem)> {
    let mut xs = draw_inputs(T, 0.5, 1.0, seed, EVAL_STREAM, 4).unwrap();
    let (pol, c) = if bipolar {
        (Polarity::Bipolar, 0.0)
    } else {
        (Polarity::Unipolar, 1.0)
    };
    let probe = LifParams::new(alpha, c, 1.0, pol).unwrap();
    let params = probe
        .with_threshold(calibrate_threshold(&xs, &probe, 1.5).ok()?)
        .unwrap();
    let x = xs.swap_remove(0);
    let train = encode(&x, &params, TimeGrid::with_default(T).unwrap()).unwrap();
    let ks = KernelSystem::build(&train, &params).unwrap();
    Some((x, ks))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_idempotent_and_consistent(seed in 0u64..1000, useed in 0u64..1000, alpha in 0.01f64..2.0, bipolar: bool) {
        let sys = system(seed, alpha, bipolar);
        prop_assume!(sys.is_some());
        let (x, ks) = sys.unwrap();
        let u = random_bandlimited(T, 0.5, useed).unwrap();
        let p = project_consistent(&u, &ks).unwrap();
        let pp = project_consistent(&p, &ks).unwrap();
        // a lowpass projection is not consistent by itself, but repeating it moves less
        prop_assert!(pp.distance_sq(&p) <= p.distance_sq(&u) * (1.0 + 1e-9) + 1e-24);
        let exact = ExactProjection::new(&u, &ks).unwrap();
        for (v, th) in exact.kernel_samples(&ks).iter().zip(ks.samples()) {
            prop_assert!((v - th).abs() < 1e-10);
        }
        prop_assert!(exact.distance_sq(&ks, &x).unwrap() <= u.distance_sq(&x) * (1.0 + 1e-12));
    }

    #[test]
    fn gram_has_unit_diagonal_and_weighted_symmetry(seed in 0u64..1000, alpha in 0.01f64..2.0, bipolar: bool) {
        let sys = system(seed, alpha, bipolar);
        prop_assume!(sys.is_some());
        let (_, ks) = sys.unwrap();
        let g = ks.gram();
        for m in 0..ks.len() {
            prop_assert!(g[(m, m)] > 0.0 && g[(m, m)] <= 1.0 + 1e-12);
            for n in 0..ks.len() {
                let a = g[(m, n)] * ks.norms_sq()[m];
                let b = g[(n, m)] * ks.norms_sq()[n];
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pocs_never_moves_away_from_the_input(seed in 0u64..1000, alpha in 0.01f64..2.0, bipolar: bool) {
        let sys = system(seed, alpha, bipolar);
        prop_assume!(sys.is_some());
        let (x, ks) = sys.unwrap();
        let mut last = f64::INFINITY;
        for k in [0, 1, 2, 5, 10, 20] {
            let d = pocs_run(&ks, k).1.distance_sq(&x);
            prop_assert!(d <= last * (1.0 + 1e-10) + 1e-20);
            last = d;
        }
    }

    #[test]
    fn weighted_norm_matches_definition(seed in 0u64..1000, alpha in 0.01f64..2.0) {
        let sys = system(seed, alpha, false);
        prop_assume!(sys.is_some());
        let (_, ks) = sys.unwrap();
        let e: Vec<f64> = (0..ks.len()).map(|i| (i as f64).sin()).collect();
        let direct: f64 = e.iter().zip(ks.norms_sq()).map(|(v, n)| v * v / n).sum();
        prop_assert!((weighted_norm_sq(&ks, &e).unwrap() - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn quantization_is_idempotent_and_bounded(seed in 0u64..1000, bits in 1u32..12) {
        let sys = system(seed, 0.3, false);
        prop_assume!(sys.is_some());
        let (_, ks) = sys.unwrap();
        let q = quantize_times(ks.train(), bits);
        let again = quantize_times(&q, bits);
        prop_assert_eq!(again.times(), q.times());
        let step = 2f64.powi(-(bits as i32));
        for t in q.times() {
            prop_assert!((t / step - (t / step).round()).abs() < 1e-9);
        }
    }
}
