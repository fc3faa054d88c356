//! Seeded Monte Carlo experiments: one-step estimates versus leakage, iterative
//! reconstruction traces, and time-quantization sweeps.

mod config;
mod fig1;
mod figiter;
mod plot;
mod quant;

use std::io::{Read, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lif::{calibrate_threshold, LifParams, Polarity};
use crate::signal::{random_bandlimited_with, PeriodicBandlimitedSignal, TimeGrid};

pub use config::{ExperimentConfig, ExperimentKind};
pub use fig1::{run_fig1, FIG1_METHODS};
pub use figiter::{arm_name, run_figiter, FIGITER_ARMS};
pub use plot::{render_plots, render_svg};
pub use quant::run_quant;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LIFPOCS_THREADS";

/// Sub-stream of evaluation inputs.
pub const EVAL_STREAM: u64 = 1;
/// Sub-stream of Wiener training inputs, disjoint from [`EVAL_STREAM`].
pub const TRAIN_STREAM: u64 = 2;

const MAX_DRAW_ATTEMPTS: u64 = 10_000;

/// Configures the global worker pool from [`THREADS_ENV`] when it is set.
/// Has no effect once the pool is running.
pub fn init_thread_pool() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got 0"
        )));
    }
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::debug!("worker pool already initialized");
    }
    Ok(())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of member `index`, draw `attempt`, in sub-stream `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64, index: u64, attempt: u64) -> u64 {
    [stream, index, attempt]
        .iter()
        .fold(splitmix(base), |acc, &v| splitmix(acc ^ splitmix(v)))
}

/// Draws `count` random inputs from a seeded sub-stream, redrawing any input
/// whose minimum drops to `-floor` or below so that `x + floor` stays positive.
pub fn draw_inputs(
    period: usize,
    amplitude: f64,
    floor: f64,
    base: u64,
    stream: u64,
    count: usize,
) -> Result<Vec<PeriodicBandlimitedSignal>> {
    let grid = TimeGrid::with_default(period)?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            for attempt in 0..MAX_DRAW_ATTEMPTS {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base, stream, i, attempt));
                let x = random_bandlimited_with(period, amplitude, &mut rng)?;
                let min = x
                    .sample_grid(grid.per_period())
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                if min + floor > 0.0 {
                    return Ok(x);
                }
            }
            Err(Error::Config(format!(
                "no input with minimum above {} after {MAX_DRAW_ATTEMPTS} draws; lower the amplitude",
                -floor
            )))
        })
        .collect()
}

/// Average of `||x||^2`, the 0 dB reference.
pub fn mean_power(inputs: &[PeriodicBandlimitedSignal]) -> f64 {
    inputs.iter().map(|x| x.norm_sq()).sum::<f64>() / inputs.len() as f64
}

/// Threshold calibrated for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub polarity: Polarity,
    pub density: f64,
    pub threshold: f64,
}

/// Calibrates the threshold of `(alpha, polarity)` to `density` on `inputs`.
pub(crate) fn calibrated_params(
    cfg: &ExperimentConfig,
    inputs: &[PeriodicBandlimitedSignal],
    alpha: f64,
    polarity: Polarity,
    density: f64,
) -> Result<(LifParams, Calibration)> {
    let probe = LifParams::new(alpha, cfg.offset_for(polarity), 1.0, polarity)?;
    let threshold = calibrate_threshold(inputs, &probe, density).map_err(|e| Error::CalibrationAt {
        alpha,
        source: Box::new(e),
    })?;
    Ok((
        probe.with_threshold(threshold)?,
        Calibration {
            alpha,
            polarity,
            density,
            threshold,
        },
    ))
}

/// One point of the leakage sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub alpha: f64,
    pub polarity: Polarity,
    pub method: String,
    pub mse_db: f64,
}

/// One point of an iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub arm: String,
    pub k: usize,
    pub mse_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "lowercase")]
pub enum Rows {
    Fig1(Vec<Fig1Row>),
    Trace(Vec<TraceRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Fig1(r) => r.len(),
            Rows::Trace(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows of a trace arm, in iteration order.
    pub fn trace(&self, arm: &str) -> Vec<f64> {
        match self {
            Rows::Trace(r) => r.iter().filter(|row| row.arm == arm).map(|row| row.mse_db).collect(),
            Rows::Fig1(_) => Vec::new(),
        }
    }

    /// The leakage-sweep value of one method.
    pub fn fig1_value(&self, alpha: f64, polarity: Polarity, method: &str) -> Option<f64> {
        match self {
            Rows::Fig1(r) => r
                .iter()
                .find(|row| row.alpha == alpha && row.polarity == polarity && row.method == method)
                .map(|row| row.mse_db),
            Rows::Trace(_) => None,
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        match self {
            Rows::Fig1(rows) => rows.iter().try_for_each(|r| wtr.serialize(r))?,
            Rows::Trace(rows) => rows.iter().try_for_each(|r| wtr.serialize(r))?,
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(kind: ExperimentKind, r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        Ok(match kind {
            ExperimentKind::Fig1 => Rows::Fig1(rdr.deserialize().collect::<std::result::Result<_, _>>()?),
            ExperimentKind::FigIter | ExperimentKind::Quant => {
                Rows::Trace(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
            }
        })
    }
}

/// Full result of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub calibration: Vec<Calibration>,
    pub results: Rows,
    pub wall_clock_s: f64,
    pub version: String,
}

impl ExperimentRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Runs the experiment named in the configuration.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let (calibration, results) = match cfg.experiment {
        ExperimentKind::Fig1 => run_fig1(cfg)?,
        ExperimentKind::FigIter => run_figiter(cfg)?,
        ExperimentKind::Quant => run_quant(cfg)?,
    };
    Ok(ExperimentRecord {
        config: cfg.clone(),
        calibration,
        results,
        wall_clock_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Averages per-member squared errors and converts to dB against `ref_power`.
pub(crate) fn averaged_db(per_member: &[Vec<f64>], ref_power: f64) -> Result<Vec<f64>> {
    let len = per_member.first().map_or(0, Vec::len);
    let mut sum = vec![0.0; len];
    for m in per_member {
        for (s, v) in sum.iter_mut().zip(m) {
            *s += v;
        }
    }
    let n = per_member.len() as f64;
    sum.into_iter()
        .map(|s| crate::signal::ratio_db(s / n, ref_power))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_across_streams_and_members() {
        let mut seen = std::collections::HashSet::new();
        for stream in [EVAL_STREAM, TRAIN_STREAM] {
            for i in 0..1000 {
                assert!(seen.insert(derive_seed(7, stream, i, 0)));
            }
        }
        assert_eq!(derive_seed(7, 1, 3, 0), derive_seed(7, 1, 3, 0));
        assert_ne!(derive_seed(7, 1, 3, 0), derive_seed(8, 1, 3, 0));
    }

    #[test]
    fn drawn_inputs_respect_floor_and_are_deterministic() {
        let a = draw_inputs(21, 0.7, 1.0, 5, EVAL_STREAM, 30).unwrap();
        let b = draw_inputs(21, 0.7, 1.0, 5, EVAL_STREAM, 30).unwrap();
        assert_eq!(a, b);
        for x in &a {
            let min = x.sample_grid(64).into_iter().fold(f64::INFINITY, f64::min);
            assert!(min > -1.0);
        }
        let t = draw_inputs(21, 0.7, 1.0, 5, TRAIN_STREAM, 30).unwrap();
        assert!(a.iter().all(|x| !t.contains(x)));
    }

    #[test]
    fn averaging_and_csv_roundtrip() {
        let db = averaged_db(&[vec![1.0, 0.1], vec![3.0, 0.1]], 2.0).unwrap();
        assert!(db[0].abs() < 1e-12);
        assert!((db[1] + 13.010299956639813).abs() < 1e-9);
        let rows = Rows::Trace(vec![
            TraceRow {
                arm: "a".into(),
                k: 0,
                mse_db: -1.5,
            },
            TraceRow {
                arm: "a".into(),
                k: 1,
                mse_db: -2.25,
            },
        ]);
        let mut buf = Vec::new();
        rows.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("arm,k,mse_db\n"));
        assert_eq!(Rows::read_csv(ExperimentKind::Quant, &buf[..]).unwrap(), rows);
        assert_eq!(rows.trace("a"), vec![-1.5, -2.25]);
    }
}
