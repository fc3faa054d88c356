use lifpocs::experiment::{self, render_svg, ExperimentConfig, ExperimentKind, Rows};
use lifpocs::lif::Polarity;

fn small(kind: ExperimentKind, extra: &str) -> ExperimentConfig {
    let doc = format!("period = 21\nensemble = 3\ntraining = 20\niterations = 8\n{extra}");
    ExperimentConfig::from_toml_str(&doc, Some(kind)).unwrap()
}

fn csv_bytes(rows: &Rows) -> Vec<u8> {
    let mut buf = Vec::new();
    rows.write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn runs_are_reproducible_from_the_seed() {
    let cfg = small(ExperimentKind::FigIter, "alphas = [0.5]\n");
    let a = experiment::run(&cfg).unwrap();
    let b = experiment::run(&cfg).unwrap();
    assert_eq!(csv_bytes(&a.results), csv_bytes(&b.results));
    assert_eq!(a.calibration, b.calibration);

    let other = experiment::run(&ExperimentConfig { seed: 2, ..cfg }).unwrap();
    assert_ne!(csv_bytes(&a.results), csv_bytes(&other.results));
}

#[test]
fn leakage_sweep_has_one_row_per_method_and_setting() {
    let cfg = small(ExperimentKind::Fig1, "alphas = [0.1, 1.0]\n");
    let rec = experiment::run(&cfg).unwrap();
    assert_eq!(rec.results.len(), 2 * 2 * experiment::FIG1_METHODS.len());
    assert_eq!(rec.calibration.len(), 4);
    for method in experiment::FIG1_METHODS {
        let v = rec.results.fig1_value(0.1, Polarity::Bipolar, method).unwrap();
        assert!(v.is_finite() && v < 5.0, "{method}: {v}");
    }
}

#[test]
fn plots_rebuild_identically_from_csv() {
    let rec = experiment::run(&small(ExperimentKind::Quant, "bits = [4, 5]\n")).unwrap();
    let reread = Rows::read_csv(ExperimentKind::Quant, &csv_bytes(&rec.results)[..]).unwrap();
    let a = render_svg(ExperimentKind::Quant, &rec.results).unwrap();
    let b = render_svg(ExperimentKind::Quant, &reread).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert!(a[0].1.contains("<svg"));
}

#[test]
fn records_and_configs_round_trip() {
    let cfg = small(ExperimentKind::FigIter, "alphas = [1.5]\npolarities = [\"bipolar\"]\n");
    let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap(), None).unwrap();
    assert_eq!(back, cfg);
    let rec = experiment::run(&cfg).unwrap();
    assert_eq!(
        experiment::ExperimentRecord::from_json(&rec.to_json().unwrap()).unwrap(),
        rec
    );
}

#[test]
fn unreachable_density_is_reported() {
    // one input over three Nyquist periods: densities move in steps of 1/3
    let doc = "period = 3\nensemble = 1\ntraining = 2\nalphas = [0.5]\ndensity = 0.5\n";
    let cfg = ExperimentConfig::from_toml_str(doc, Some(ExperimentKind::Fig1)).unwrap();
    let err = experiment::run(&cfg).unwrap_err();
    assert!(err.to_string().contains("alpha"), "{err}");
}
