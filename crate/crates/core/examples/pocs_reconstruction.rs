//! Iterative reconstruction: POCS from zero, from a Wiener warm start, and the
//! midpoint (Lazar) iteration for comparison.

use lifpocs::experiment::{draw_inputs, EVAL_STREAM, TRAIN_STREAM};
use lifpocs::kernel::KernelSystem;
use lifpocs::lif::{calibrate_threshold, encode, encode_all, LifParams, Polarity};
use lifpocs::pocs::{mse_trace, PocsState};
use lifpocs::reconstruct::{lazar_distance_trace, WienerFilter};
use lifpocs::signal::{ratio_db, TimeGrid};

fn main() -> lifpocs::Result<()> {
    let period = 61;
    let grid = TimeGrid::with_default(period)?;
    let inputs = draw_inputs(period, 0.7, 1.0, 2, EVAL_STREAM, 8)?;
    let probe = LifParams::new(1.5, 1.0, 1.0, Polarity::Unipolar)?;
    let params = probe.with_threshold(calibrate_threshold(&inputs, &probe, 1.5)?)?;

    let x = &inputs[0];
    let ks = KernelSystem::build(&encode(x, &params, grid)?, &params)?;
    let power = x.norm_sq();

    let training = draw_inputs(period, 0.7, 1.0, 2, TRAIN_STREAM, 200)?;
    let pairs: Vec<_> = training
        .iter()
        .cloned()
        .zip(encode_all(&training, &params, grid)?)
        .collect();
    let warm = WienerFilter::fit(&pairs, &params)?
        .apply(ks.train())?
        .with_offset(-params.offset());

    let cold = mse_trace(&ks, x, 100, None, power)?;
    let hot = mse_trace(&ks, x, 100, Some(&warm), power)?;
    let lazar = lazar_distance_trace(&ks, x, 100, None)?;
    println!("{:>4} {:>10} {:>10} {:>10}", "k", "pocs", "wiener+", "lazar");
    for k in [0, 1, 5, 10, 50, 100] {
        println!(
            "{k:4} {:10.2} {:10.2} {:10.2}",
            cold[k],
            hot[k],
            ratio_db(lazar[k] * lazar[k], power)?
        );
    }

    // iterations can be checkpointed and resumed
    let mut state = PocsState::new(&ks);
    state.advance(&ks, 40)?;
    let mut resumed = PocsState::from_json(&state.to_json()?, &ks)?;
    resumed.advance(&ks, 60)?;
    let err = resumed.synthesize(&ks).distance_sq(x);
    println!(
        "resumed after {} iterations: {:.2} dB",
        resumed.iteration(),
        ratio_db(err, power)?
    );
    Ok(())
}
