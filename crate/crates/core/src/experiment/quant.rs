use rayon::prelude::*;

use super::{
    averaged_db, calibrated_params, draw_inputs, figiter::arm_name, mean_power, Calibration, ExperimentConfig, Rows,
    TraceRow, EVAL_STREAM,
};
use crate::error::Result;
use crate::kernel::KernelSystem;
use crate::lif::{encode, quantize_times};
use crate::pocs::{distance_trace, pseudo_inverse};
use crate::signal::TimeGrid;

/// POCS traces and pseudo-inverse levels when the firing times are quantized.
///
/// Kernels and samples are rebuilt from the quantized times. Arms are
/// `<group>/b=<bits>/pocs` (a trace) and `<group>/b=<bits>/pinv` (a constant
/// repeated over the same iterations).
pub fn run_quant(cfg: &ExperimentConfig) -> Result<(Vec<Calibration>, Rows)> {
    let grid = TimeGrid::with_default(cfg.period)?;
    let eval = draw_inputs(
        cfg.period,
        cfg.amplitude,
        cfg.offset_unipolar,
        cfg.seed,
        EVAL_STREAM,
        cfg.ensemble,
    )?;
    let reference = mean_power(&eval);
    let k_max = cfg.iterations;
    let mut calibration = Vec::new();
    let mut rows = Vec::new();
    for &polarity in &cfg.polarities {
        for &alpha in &cfg.alphas {
            let (params, cal) = calibrated_params(cfg, &eval, alpha, polarity, cfg.density)?;
            log::info!("quant {polarity} alpha={alpha}: threshold {:.6}", cal.threshold);
            calibration.push(cal);
            let spikes = eval
                .par_iter()
                .map(|x| encode(x, &params, grid))
                .collect::<Result<Vec<_>>>()?;
            for &bits in &cfg.bits {
                let per_member = eval
                    .par_iter()
                    .zip(&spikes)
                    .map(|(x, s)| -> Result<(Vec<f64>, f64)> {
                        let ks = KernelSystem::build(&quantize_times(s, bits), &params)?;
                        let pinv = pseudo_inverse(&ks, ks.samples())?.distance_sq(x);
                        let trace = distance_trace(&ks, x, k_max, None)?
                            .into_iter()
                            .map(|d| d * d)
                            .collect();
                        Ok((trace, pinv))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let traces: Vec<Vec<f64>> = per_member.iter().map(|m| m.0.clone()).collect();
                let pinv: Vec<Vec<f64>> = per_member.iter().map(|m| vec![m.1; k_max + 1]).collect();
                for (label, data) in [("pocs", &traces), ("pinv", &pinv)] {
                    let name = arm_name(polarity, alpha, &format!("b={bits}/{label}"));
                    for (k, mse_db) in averaged_db(data, reference)?.into_iter().enumerate() {
                        rows.push(TraceRow {
                            arm: name.clone(),
                            k,
                            mse_db,
                        });
                    }
                }
            }
        }
    }
    Ok((calibration, Rows::Trace(rows)))
}
