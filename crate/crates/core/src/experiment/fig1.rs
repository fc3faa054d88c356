use rayon::prelude::*;

use super::{
    calibrated_params, draw_inputs, mean_power, Calibration, ExperimentConfig, Fig1Row, Rows, EVAL_STREAM, TRAIN_STREAM,
};
use crate::error::Result;
use crate::lif::encode_all;
use crate::reconstruct::{feichtinger_estimate, naive_estimate, WienerFilter};
use crate::signal::{ratio_db, TimeGrid};

/// Method labels, in output order.
pub const FIG1_METHODS: [&str; 3] = ["feichtinger", "naive", "wiener"];

/// MSE of the three one-step estimates for every leakage value and polarity.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<(Vec<Calibration>, Rows)> {
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
    let mut calibration = Vec::new();
    let mut rows = Vec::new();
    for &polarity in &cfg.polarities {
        for &alpha in &cfg.alphas {
            let (params, cal) = calibrated_params(cfg, &eval, alpha, polarity, cfg.density)?;
            log::info!("fig1 {polarity} alpha={alpha}: threshold {:.6}", cal.threshold);
            calibration.push(cal);
            let train_spikes = encode_all(&train, &params, grid)?;
            let pairs: Vec<_> = train.iter().cloned().zip(train_spikes).collect();
            let wiener = WienerFilter::fit(&pairs, &params)?;
            let eval_spikes = encode_all(&eval, &params, grid)?;
            let c = params.offset();
            let errors = eval
                .par_iter()
                .zip(&eval_spikes)
                .map(|(x, s)| -> Result<[f64; 3]> {
                    let f = feichtinger_estimate(s, params.threshold(), alpha)?.with_offset(-c);
                    let n = naive_estimate(s, params.threshold()).with_offset(-c);
                    let w = wiener.apply(s)?.with_offset(-c);
                    Ok([f.distance_sq(x), n.distance_sq(x), w.distance_sq(x)])
                })
                .collect::<Result<Vec<_>>>()?;
            for (m, method) in FIG1_METHODS.iter().enumerate() {
                let mean = errors.iter().map(|e| e[m]).sum::<f64>() / errors.len() as f64;
                rows.push(Fig1Row {
                    alpha,
                    polarity,
                    method: method.to_string(),
                    mse_db: ratio_db(mean, reference)?,
                });
            }
        }
    }
    Ok((calibration, Rows::Fig1(rows)))
}
