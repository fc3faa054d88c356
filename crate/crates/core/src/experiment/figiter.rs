use rayon::prelude::*;

use super::{
    averaged_db, calibrated_params, draw_inputs, mean_power, Calibration, ExperimentConfig, Rows, TraceRow,
    EVAL_STREAM, TRAIN_STREAM,
};
use crate::error::Result;
use crate::kernel::KernelSystem;
use crate::lif::{encode, encode_all, Polarity};
use crate::pocs::distance_trace;
use crate::reconstruct::{lazar_distance_trace, WienerFilter};
use crate::signal::TimeGrid;

/// Trace labels: Lazar from zero, POCS from zero, POCS from the Wiener
/// estimate, and POCS from zero at the denser firing rate.
pub const FIGITER_ARMS: [&str; 4] = ["lazar", "pocs", "pocs_wiener", "pocs_dense"];

/// Full arm name `polarity/alpha=<alpha>/<label>`.
pub fn arm_name(polarity: Polarity, alpha: f64, label: &str) -> String {
    format!("{polarity}/alpha={alpha}/{label}")
}

/// Ensemble-averaged MSE traces of the iterative reconstructions.
pub fn run_figiter(cfg: &ExperimentConfig) -> Result<(Vec<Calibration>, Rows)> {
    let grid = TimeGrid::with_default(cfg.period)?;
    let eval = draw_inputs(
        cfg.period,
        cfg.amplitude,
        cfg.offset_unipolar,
        cfg.seed,
        EVAL_STREAM,
        cfg.ensemble,
    )?;
    let train = draw_inputs(
        cfg.period,
        cfg.amplitude,
        cfg.offset_unipolar,
        cfg.seed,
        TRAIN_STREAM,
        cfg.training,
    )?;
    let reference = mean_power(&eval);
    let k_max = cfg.iterations;
    let mut calibration = Vec::new();
    let mut rows = Vec::new();
    for &polarity in &cfg.polarities {
        for &alpha in &cfg.alphas {
            let (params, cal) = calibrated_params(cfg, &eval, alpha, polarity, cfg.density)?;
            let (dense, cal_dense) = calibrated_params(cfg, &eval, alpha, polarity, cfg.dense_density)?;
            log::info!(
                "figiter {polarity} alpha={alpha}: thresholds {:.6} / {:.6}",
                cal.threshold,
                cal_dense.threshold
            );
            calibration.extend([cal, cal_dense]);
            let train_spikes = encode_all(&train, &params, grid)?;
            let pairs: Vec<_> = train.iter().cloned().zip(train_spikes).collect();
            let wiener = WienerFilter::fit(&pairs, &params)?;
            let c = params.offset();

            let per_member = eval
                .par_iter()
                .map(|x| -> Result<Vec<Vec<f64>>> {
                    let s = encode(x, &params, grid)?;
                    let ks = KernelSystem::build(&s, &params)?;
                    let ks_dense = KernelSystem::build(&encode(x, &dense, grid)?, &dense)?;
                    let warm = wiener.apply(&s)?.with_offset(-c);
                    let traces = [
                        lazar_distance_trace(&ks, x, k_max, None)?,
                        distance_trace(&ks, x, k_max, None)?,
                        distance_trace(&ks, x, k_max, Some(&warm))?,
                        distance_trace(&ks_dense, x, k_max, None)?,
                    ];
                    Ok(traces
                        .into_iter()
                        .map(|t| t.into_iter().map(|d| d * d).collect())
                        .collect())
                })
                .collect::<Result<Vec<_>>>()?;

            for (a, label) in FIGITER_ARMS.iter().enumerate() {
                let arm: Vec<Vec<f64>> = per_member.iter().map(|m| m[a].clone()).collect();
                let name = arm_name(polarity, alpha, label);
                for (k, mse_db) in averaged_db(&arm, reference)?.into_iter().enumerate() {
                    rows.push(TraceRow {
                        arm: name.clone(),
                        k,
                        mse_db,
                    });
                }
            }
        }
    }
    Ok((calibration, Rows::Trace(rows)))
}
